#include "pwsg/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include <json.hpp>

#include "pwsg/errors.hpp"
#include "pwsg/rng.hpp"
#include "pwsg/svg.hpp"

namespace pwsg {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << data;
}

const char* polarity_name(Polarity p) {
  return p == Polarity::Standard ? "standard" : "reversed";
}

ordered_json device_json(const DeviceConfig& d) {
  ordered_json j;
  j["theta"] = d.axis.theta;
  j["polarity"] = polarity_name(d.polarity);
  j["w"] = d.w;
  j["k"] = d.k;
  j["kappa"] = d.kappa;
  return j;
}

// ------------------------------------------------------------ chain kinds

int run_chain_kind(const ExperimentConfig& cfg, std::ostream& log,
                   const std::filesystem::path& out_dir,
                   ordered_json& summary) {
  const ExperimentChain chain = cfg.effective_chain();

  std::string particle_rows;
  ChainObserver observer;
  if (cfg.per_particle_csv) {
    particle_rows = "particle,stage,z0,branch,sign\n";
    observer = [&particle_rows](std::uint64_t i, std::span<const double> z0s,
                                const ChainResult& r) {
      for (std::size_t j = 0; j < r.labels.size(); ++j) {
        particle_rows += std::to_string(i) + "," + std::to_string(j) + "," +
                         fmt17(z0s[j]) + "," +
                         branch_name(r.records[j].exit_branch) + "," +
                         std::to_string(r.labels[j].sign) + "\n";
      }
    };
  }

  const RunStats stats =
      run_ensemble(chain, cfg.n, cfg.seed, TransverseMode::FreshSample,
                   observer);
  const BornReport report = compare_to_born(stats, chain);

  summary["n_total"] = stats.n_total;
  summary["n_discarded"] = stats.n_discarded;
  ordered_json stages = ordered_json::array();
  for (const Stage& s : chain.stages) {
    ordered_json j = device_json(s.device);
    switch (s.selection) {
      case Selection::KeepUpperPort: j["selection"] = "keep_upper"; break;
      case Selection::KeepLowerPort: j["selection"] = "keep_lower"; break;
      case Selection::MeasureBoth: j["selection"] = "measure_both"; break;
    }
    stages.push_back(j);
  }
  summary["stages"] = stages;
  summary["survival"] = {{"freq", report.survival_freq},
                         {"predicted", report.survival_predicted},
                         {"z", report.survival_z}};
  ordered_json outcomes = ordered_json::array();
  for (const BornRow& row : report.rows) {
    ordered_json j;
    j["labels"] = row.labels;
    j["count"] = row.count;
    j["freq"] = row.freq;
    j["predicted"] = row.predicted;
    j["z"] = row.z;
    outcomes.push_back(j);
  }
  summary["outcomes"] = outcomes;
  summary["born_check"] = report.fail ? "FAIL" : "PASS";

  if (cfg.per_particle_csv)
    write_file(out_dir / "per_particle.csv", particle_rows);
  if (report.fail) {
    log << "born check FAILED (some |z| > 4)\n";
    return 2;
  }
  return 0;
}

// ----------------------------------------------------------- trajectories

int run_trajectories_kind(const ExperimentConfig& cfg, std::ostream&,
                          const std::filesystem::path& out_dir,
                          ordered_json& summary) {
  const WaveField field = make_device_field(cfg.input, cfg.device);
  const double reach = cfg.device.overlap_extent();
  const double y_start = cfg.y_start.value_or(-reach);
  const double y_end = cfg.y_end.value_or(2.2 * reach);

  std::vector<double> z0s = cfg.z0_list;
  if (z0s.empty()) {
    // n_paths offsets evenly spaced across the open packet interval.
    const double step = cfg.device.w / static_cast<double>(cfg.n_paths + 1);
    for (std::uint64_t i = 1; i <= cfg.n_paths; ++i)
      z0s.push_back(-0.5 * cfg.device.w + static_cast<double>(i) * step);
  }

  std::vector<TrajectoryRecord> records;
  records.reserve(z0s.size());
  std::uint64_t upper = 0;
  for (const double z0 : z0s) {
    records.push_back(propagate_analytic(z0, field, y_start, y_end));
    if (records.back().exit_branch == Branch::Upper) ++upper;
  }

  write_file(out_dir / "trajectories.csv",
             trajectories_csv(records, cfg.device));
  if (cfg.plot)
    write_file(out_dir / "trajectories.svg",
               emit_svg(records, field, y_start, y_end));

  const CriticalGeometry g = critical_geometry(field);
  summary["n_paths"] = z0s.size();
  summary["z_critical"] = g.z_critical;
  summary["p_plus_geometric"] = g.p_plus_geometric;
  summary["upper_exits"] = upper;
  summary["lower_exits"] = z0s.size() - upper;
  return 0;
}

// -------------------------------------------------------------- entangled

ordered_json label_json(const OutcomeLabel& l) {
  return {{"theta", l.axis.theta}, {"sign", l.sign}};
}

ScenarioConfig scenario_from(const ExperimentConfig& cfg) {
  ScenarioConfig sc;
  sc.state = cfg.state;
  if (cfg.alice_present) sc.device1 = cfg.device1;
  sc.device2 = cfg.device2;
  sc.order = cfg.order;
  return sc;
}

int run_entangled_kind(const ExperimentConfig& cfg, std::ostream& log,
                       const std::filesystem::path& out_dir,
                       ordered_json& summary) {
  ordered_json scenario;
  scenario["alice_present"] = cfg.alice_present;
  scenario["order"] = cfg.order == MeasurementOrder::Particle1First
                          ? "particle1_first"
                          : "particle2_first";
  scenario["device1"] = device_json(cfg.device1);
  scenario["device2"] = device_json(cfg.device2);
  summary["scenario"] = scenario;

  ScenarioConfig sc = scenario_from(cfg);

  if (cfg.z0_1 && cfg.z0_2) {  // one deterministic pair
    sc.z0_1 = *cfg.z0_1;
    sc.z0_2 = *cfg.z0_2;
    const ScenarioResult r = run_scenario(sc);
    summary["z0_1"] = sc.z0_1;
    summary["z0_2"] = sc.z0_2;
    summary["outcome1"] =
        r.outcome1 ? label_json(*r.outcome1) : ordered_json(nullptr);
    summary["outcome2"] = label_json(r.outcome2);
    if (cfg.plot) {
      // One diagram per particle.  The first-measured particle rides the
      // marginal-weight field; the other rides the collapsed spinor's field.
      const double reach2 = cfg.device2.overlap_extent();
      if (cfg.alice_present) {
        const double reach1 = cfg.device1.overlap_extent();
        const bool p1_first = cfg.order == MeasurementOrder::Particle1First;
        const WaveField f1 =
            p1_first ? first_measurement_field(cfg.state, 1, cfg.device1)
                     : make_device_field(conditional_spinor(*r.collapsed, 1),
                                         cfg.device1);
        const WaveField f2 =
            p1_first ? make_device_field(conditional_spinor(*r.collapsed, 2),
                                         cfg.device2)
                     : first_measurement_field(cfg.state, 2, cfg.device2);
        write_file(out_dir / "particle1.svg",
                   emit_svg({&r.records[0], 1}, f1, -reach1, 2.0 * reach1));
        write_file(out_dir / "particle2.svg",
                   emit_svg({&r.records[1], 1}, f2, -reach2, 2.0 * reach2));
      } else {
        const WaveField f2 = first_measurement_field(cfg.state, 2,
                                                     cfg.device2);
        write_file(out_dir / "particle2.svg",
                   emit_svg({&r.records[0], 1}, f2, -reach2, 2.0 * reach2));
      }
    }
    return 0;
  }

  // Ensemble: joint outcome tallies against the quantum prediction.
  std::map<std::pair<int, int>, std::uint64_t> counts;
  for (std::uint64_t i = 0; i < cfg.n; ++i) {
    sc.z0_1 = uniform_symmetric(cfg.seed, 0, i, 0.5 * cfg.device1.w);
    sc.z0_2 = uniform_symmetric(cfg.seed, 1, i, 0.5 * cfg.device2.w);
    const ScenarioResult r = run_scenario(sc);
    const int s1 = r.outcome1 ? r.outcome1->sign : 0;
    ++counts[{s1, r.outcome2.sign}];
  }

  std::map<std::pair<int, int>, double> predicted;
  if (cfg.alice_present) {
    const auto p = joint_born_probabilities(cfg.state, cfg.device1.axis,
                                            cfg.device2.axis);
    predicted[{+1, +1}] = p[0][0];
    predicted[{+1, -1}] = p[0][1];
    predicted[{-1, +1}] = p[1][0];
    predicted[{-1, -1}] = p[1][1];
  } else {
    const auto [wp, wm] = marginal_weights(cfg.state, 2, cfg.device2.axis);
    predicted[{0, +1}] = wp;
    predicted[{0, -1}] = wm;
  }

  std::map<std::pair<int, int>, std::uint64_t> merged = counts;
  for (const auto& [key, p] : predicted)
    if (p > 0.0) merged.emplace(key, 0);

  bool fail = false;
  ordered_json outcomes = ordered_json::array();
  summary["n_total"] = cfg.n;
  summary["n_discarded"] = 0;
  for (const auto& [key, count] : merged) {
    const auto it = predicted.find(key);
    const double p = it == predicted.end() ? 0.0 : it->second;
    const double freq =
        cfg.n == 0 ? 0.0
                   : static_cast<double>(count) / static_cast<double>(cfg.n);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.n));
    double z = 0.0;
    if (cfg.n > 0) {
      if (se == 0.0)
        z = freq == p ? 0.0 : std::numeric_limits<double>::infinity();
      else
        z = (freq - p) / se;
    }
    if (std::abs(z) > 4.0) fail = true;
    ordered_json j;
    j["labels"] = ordered_json::array();
    j["labels"].push_back(key.first == 0 ? ordered_json(nullptr)
                                         : ordered_json(key.first));
    j["labels"].push_back(key.second);
    j["count"] = count;
    j["freq"] = freq;
    j["predicted"] = p;
    j["z"] = z;
    outcomes.push_back(j);
  }
  summary["outcomes"] = outcomes;
  summary["born_check"] = fail ? "FAIL" : "PASS";
  if (fail) {
    log << "born check FAILED (some |z| > 4)\n";
    return 2;
  }
  return 0;
}

// ------------------------------------------------------------------ sweep

int run_sweep_kind(const ExperimentConfig& cfg, std::ostream&,
                   const std::filesystem::path& out_dir,
                   ordered_json& summary) {
  const std::vector<SweepRow> rows = correlation_sweep(
      cfg.theta1_list, cfg.theta2_list, cfg.n, cfg.seed, cfg.sweep_device);
  write_file(out_dir / "sweep.csv", sweep_csv(rows));
  ordered_json cells = ordered_json::array();
  for (const SweepRow& r : rows) {
    ordered_json j;
    j["theta1"] = r.theta1;
    j["theta2"] = r.theta2;
    j["n"] = r.n;
    j["E"] = r.E;
    j["stderr"] = r.stderr_;
    cells.push_back(j);
  }
  summary["n_per_cell"] = cfg.n;
  summary["cells"] = cells;
  return 0;
}

}  // namespace

std::vector<std::string> config_warnings(const ExperimentConfig& cfg) {
  std::vector<std::string> all;
  auto add = [&all](const std::string& where, const DeviceConfig& d) {
    for (const std::string& w : d.validity_warnings())
      all.push_back(where + ": " + w);
  };
  switch (cfg.kind) {
    case ExperimentKind::Single:
    case ExperimentKind::Trajectories:
      add("device", cfg.device);
      break;
    case ExperimentKind::Chain:
      for (std::size_t i = 0; i < cfg.stages.size(); ++i)
        add("stage " + std::to_string(i + 1), cfg.stages[i].device);
      break;
    case ExperimentKind::Entangled:
      if (cfg.alice_present) add("device1", cfg.device1);
      add("device2", cfg.device2);
      break;
    case ExperimentKind::Sweep:
      add("sweep device", cfg.sweep_device);
      break;
  }
  return all;
}

std::string trajectories_csv(std::span<const TrajectoryRecord> records,
                             const DeviceConfig& device) {
  std::string out = "traj_id,t,y,z,region,branch\n";
  for (std::size_t id = 0; id < records.size(); ++id) {
    const TrajectoryRecord& rec = records[id];
    for (const TrajectoryPoint& p : rec.points) {
      out += std::to_string(id) + "," + fmt17(p.t) + "," + fmt17(p.y) + "," +
             fmt17(p.z) + "," +
             region_name(classify_region(p.y, p.z, device)) + "," +
             branch_name(rec.exit_branch) + "\n";
    }
  }
  return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "theta1,theta2,n,E,stderr\n";
  for (const SweepRow& r : rows) {
    out += fmt17(r.theta1) + "," + fmt17(r.theta2) + "," +
           std::to_string(r.n) + "," + fmt17(r.E) + "," + fmt17(r.stderr_) +
           "\n";
  }
  return out;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const std::filesystem::path out_dir{cfg.out_dir};
  std::filesystem::create_directories(out_dir);

  ordered_json summary;
  summary["kind"] = kind_name(cfg.kind);
  summary["seed"] = cfg.seed;
  const std::vector<std::string> warnings = config_warnings(cfg);
  for (const std::string& w : warnings) log << "warning: " << w << "\n";
  summary["warnings"] = warnings;

  int code = 0;
  switch (cfg.kind) {
    case ExperimentKind::Single:
    case ExperimentKind::Chain:
      code = run_chain_kind(cfg, log, out_dir, summary);
      break;
    case ExperimentKind::Trajectories:
      code = run_trajectories_kind(cfg, log, out_dir, summary);
      break;
    case ExperimentKind::Entangled:
      code = run_entangled_kind(cfg, log, out_dir, summary);
      break;
    case ExperimentKind::Sweep:
      code = run_sweep_kind(cfg, log, out_dir, summary);
      break;
  }

  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  return code;
}

}  // namespace pwsg
