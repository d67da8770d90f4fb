// Command-line front end.  Exit codes: 0 success, 1 usage/config/runtime
// error, 2 statistical check failed (observed frequencies off prediction).
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "pwsg/config.hpp"
#include "pwsg/errors.hpp"
#include "pwsg/experiment.hpp"

namespace {

pwsg::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw pwsg::Error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return pwsg::parse_config(buf.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pilotwave-sg: deterministic pilot-wave spin simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_opt;
  std::optional<std::uint64_t> n_opt;
  std::optional<std::string> out_opt;
  bool plot_flag = false;
  std::string alice;

  CLI::App* run = app.add_subcommand("run", "execute an experiment config");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("--seed", seed_opt, "override the random seed");
  run->add_option("--n", n_opt, "override the ensemble size");
  run->add_option("--out", out_opt, "override the output directory");
  run->add_flag("--plot", plot_flag, "also write SVG diagrams");
  run->add_option("--alice", alice,
                  "entangled runs: include or remove the first device")
      ->check(CLI::IsMember({"present", "absent"}));

  CLI::App* sweep =
      app.add_subcommand("sweep", "run a correlation sweep config");
  sweep->add_option("config", config_path, "sweep config file")->required();
  sweep->add_option("--seed", seed_opt, "override the random seed");
  sweep->add_option("--n", n_opt, "override the per-cell sample count");
  sweep->add_option("--out", out_opt, "override the output directory");

  CLI::App* validate =
      app.add_subcommand("validate", "parse and check a config, run nothing");
  validate->add_option("config", config_path, "config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // nonzero usage errors all map to 1
  }

  try {
    pwsg::ExperimentConfig cfg = load_config(config_path);
    if (validate->parsed()) {
      for (const std::string& w : pwsg::config_warnings(cfg))
        std::cerr << "warning: " << w << "\n";
      std::cout << "valid " << pwsg::kind_name(cfg.kind) << " config\n";
      return 0;
    }
    if (sweep->parsed() && cfg.kind != pwsg::ExperimentKind::Sweep)
      throw pwsg::ConfigError("the sweep command needs kind = sweep");
    if (seed_opt) cfg.seed = *seed_opt;
    if (n_opt) cfg.n = *n_opt;
    if (out_opt) cfg.out_dir = *out_opt;
    if (plot_flag) cfg.plot = true;
    if (!alice.empty()) {
      if (cfg.kind != pwsg::ExperimentKind::Entangled)
        throw pwsg::ConfigError("--alice applies only to entangled configs");
      cfg.alice_present = alice == "present";
    }
    return pwsg::run_experiment(cfg, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
