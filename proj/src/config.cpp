#include "pwsg/config.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "pwsg/errors.hpp"

namespace pwsg {

const char* kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Single: return "single";
    case ExperimentKind::Chain: return "chain";
    case ExperimentKind::Entangled: return "entangled";
    case ExperimentKind::Sweep: return "sweep";
    case ExperimentKind::Trajectories: return "trajectories";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------- lexing

struct Item {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Section {
  std::string name;  // "" for the top level
  int line = 0;
  std::map<std::string, Item> items;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (const char c : k)
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  return true;
}

std::vector<Section> lex(std::string_view text) {
  std::vector<Section> sections;
  sections.push_back({"", 0, {}});
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    ++line_no;
    const std::string_view line = trim(raw);
    if (!line.empty() && line.front() != '#') {
      if (line.front() == '[') {
        if (line.back() != ']')
          throw ParseError("section header missing ']'", line_no,
                           static_cast<int>(raw.size()));
        const std::string_view name = trim(line.substr(1, line.size() - 2));
        if (!valid_key(name))
          throw ParseError("bad section name", line_no, 1);
        sections.push_back({std::string(name), line_no, {}});
      } else {
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
          throw ParseError("expected 'key = value' or '[section]'", line_no,
                           1);
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};
        if (!valid_key(key))
          throw ParseError("bad key '" + key + "'", line_no, 1);
        auto& items = sections.back().items;
        if (items.count(key))
          throw ValidationError(key, "duplicate key (line " +
                                         std::to_string(line_no) + ")");
        items[key] = Item{value, line_no, false};
      }
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return sections;
}

// ------------------------------------------------------------ value types

double parse_double(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
    throw ValidationError(key, "expected a finite number, got '" + text + "'");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& text) {
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0' || errno == ERANGE || text.front() == '-')
    throw ValidationError(key, "expected a non-negative integer, got '" +
                                   text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ValidationError(key, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_reals(const std::string& key,
                                const std::string& text) {
  std::vector<double> out;
  std::istringstream in{text};
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  if (out.empty()) throw ValidationError(key, "expected at least one number");
  return out;
}

Polarity parse_polarity(const std::string& key, const std::string& text) {
  if (text == "standard") return Polarity::Standard;
  if (text == "reversed") return Polarity::Reversed;
  throw ValidationError(key, "expected standard or reversed, got '" + text +
                                 "'");
}

// ------------------------------------------------------------- consumption

class Bag {
 public:
  Bag(Section& section, std::string context)
      : section_(section), context_(std::move(context)) {}

  bool has(const std::string& key) const { return section_.items.count(key); }

  std::optional<std::string> take(const std::string& key) {
    const auto it = section_.items.find(key);
    if (it == section_.items.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  double take_double(const std::string& key, double fallback) {
    const auto v = take(key);
    return v ? parse_double(key, *v) : fallback;
  }
  std::optional<double> take_double_opt(const std::string& key) {
    const auto v = take(key);
    if (!v) return std::nullopt;
    return parse_double(key, *v);
  }
  std::uint64_t take_uint(const std::string& key, std::uint64_t fallback) {
    const auto v = take(key);
    return v ? parse_uint(key, *v) : fallback;
  }
  bool take_bool(const std::string& key, bool fallback) {
    const auto v = take(key);
    return v ? parse_bool(key, *v) : fallback;
  }
  Polarity take_polarity(const std::string& key, Polarity fallback) {
    const auto v = take(key);
    return v ? parse_polarity(key, *v) : fallback;
  }

  /// Every key must have been consumed by now.
  void finish() const {
    for (const auto& [key, item] : section_.items)
      if (!item.used)
        throw ValidationError(
            key, "unknown key in " + context_ + " (line " +
                     std::to_string(item.line) + ")");
  }

 private:
  Section& section_;
  std::string context_;
};

DeviceConfig take_device(Bag& bag, MeasurementAxis axis, Polarity polarity) {
  const double w = bag.take_double("w", 1.0);
  const double k = bag.take_double("k", 100.0);
  if (!(w > 0.0)) throw ValidationError("w", "w must be positive");
  if (!(k > 0.0)) throw ValidationError("k", "k must be positive");

  const auto kappa_text = bag.take("kappa");
  const auto m = bag.take_double_opt("m");
  const auto mu = bag.take_double_opt("mu");
  const auto b = bag.take_double_opt("b");
  double kappa = 5.0;
  if (m || mu || b) {
    if (!(m && mu && b))
      throw ValidationError("m", "m, mu, b must be given together");
    if (kappa_text)
      throw ValidationError("kappa", "give either kappa or m/mu/b, not both");
    if (!(*m > 0.0 && *mu > 0.0 && *b > 0.0))
      throw ValidationError("m", "m, mu, b must be positive");
    kappa = *m * *mu * *b / k;
  } else if (kappa_text) {
    kappa = parse_double("kappa", *kappa_text);
  }
  if (!(kappa > 0.0)) throw ValidationError("kappa", "kappa must be positive");
  if (!(kappa < k)) throw ValidationError("kappa", "kappa must be < k");

  const auto length = bag.take_double_opt("packet_length");
  if (length && !(*length > 0.0))
    throw ValidationError("packet_length", "packet_length must be positive");
  return DeviceConfig::from_wavenumbers(axis, polarity, w, k, kappa, length);
}

DeviceConfig take_device(Bag& bag) {
  const MeasurementAxis axis{bag.take_double("theta", 0.0)};
  const Polarity polarity = bag.take_polarity("polarity", Polarity::Standard);
  return take_device(bag, axis, polarity);
}

Spinor take_spinor(Bag& bag, const std::string& key, const Spinor& fallback) {
  const auto v = bag.take(key);
  if (!v) return fallback;
  const auto reals = parse_reals(key, *v);
  if (reals.size() != 4)
    throw ValidationError(key, "expected four reals: re+ im+ re- im-");
  const complexd cp{reals[0], reals[1]};
  const complexd cm{reals[2], reals[3]};
  if (std::norm(cp) + std::norm(cm) == 0.0)
    throw ValidationError(key, "spinor cannot be the zero vector");
  return Spinor{cp, cm}.normalized();  // explicit normalization on load
}

Selection parse_selection(const std::string& text) {
  if (text == "keep_upper") return Selection::KeepUpperPort;
  if (text == "keep_lower") return Selection::KeepLowerPort;
  if (text == "measure_both") return Selection::MeasureBoth;
  throw ValidationError(
      "selection", "expected keep_upper, keep_lower or measure_both, got '" +
                       text + "'");
}

}  // namespace

ExperimentChain ExperimentConfig::effective_chain() const {
  ExperimentChain chain;
  chain.input = input;
  if (kind == ExperimentKind::Chain) {
    chain.stages = stages;
  } else {
    chain.stages = {Stage{device, Selection::MeasureBoth}};
  }
  return chain;
}

ExperimentConfig parse_config(std::string_view text) {
  std::vector<Section> sections = lex(text);
  ExperimentConfig cfg;

  Bag top{sections[0], "the top level"};
  const auto kind_text = top.take("kind");
  if (!kind_text) throw ValidationError("kind", "required key is missing");
  if (*kind_text == "single") cfg.kind = ExperimentKind::Single;
  else if (*kind_text == "chain") cfg.kind = ExperimentKind::Chain;
  else if (*kind_text == "entangled") cfg.kind = ExperimentKind::Entangled;
  else if (*kind_text == "sweep") cfg.kind = ExperimentKind::Sweep;
  else if (*kind_text == "trajectories")
    cfg.kind = ExperimentKind::Trajectories;
  else
    throw ValidationError("kind", "unknown experiment kind '" + *kind_text +
                                      "'");

  cfg.n = top.take_uint("n", 100000);
  cfg.seed = top.take_uint("seed", 42);
  if (const auto out = top.take("out")) cfg.out_dir = *out;
  if (cfg.out_dir.empty()) throw ValidationError("out", "path is empty");
  cfg.plot = top.take_bool("plot", false);
  cfg.per_particle_csv = top.take_bool("per_particle_csv", false);

  const bool beam_kind = cfg.kind == ExperimentKind::Single ||
                         cfg.kind == ExperimentKind::Chain ||
                         cfg.kind == ExperimentKind::Trajectories;
  if (beam_kind) cfg.input = take_spinor(top, "input_spinor", Spinor::plus_z());

  if (cfg.kind == ExperimentKind::Trajectories) {
    cfg.n_paths = top.take_uint("n_paths", 9);
    if (cfg.n_paths == 0)
      throw ValidationError("n_paths", "need at least one path");
    if (const auto v = top.take("z0_list"))
      cfg.z0_list = parse_reals("z0_list", *v);
    cfg.y_start = top.take_double_opt("y_start");
    cfg.y_end = top.take_double_opt("y_end");
  }
  top.finish();

  // ------------------------------------------------------------- sections
  auto section_of = [&](const std::string& name) -> Section* {
    Section* found = nullptr;
    for (std::size_t i = 1; i < sections.size(); ++i) {
      if (sections[i].name != name) continue;
      if (found)
        throw ValidationError(name, "section appears more than once (line " +
                                        std::to_string(sections[i].line) +
                                        ")");
      found = &sections[i];
    }
    return found;
  };
  auto reject_unknown_sections = [&](std::initializer_list<const char*> ok) {
    for (std::size_t i = 1; i < sections.size(); ++i) {
      bool known = false;
      for (const char* name : ok)
        if (sections[i].name == name) known = true;
      if (!known)
        throw ValidationError(
            sections[i].name,
            "section not allowed for kind " + std::string(kind_name(cfg.kind)) +
                " (line " + std::to_string(sections[i].line) + ")");
    }
  };

  switch (cfg.kind) {
    case ExperimentKind::Single:
    case ExperimentKind::Trajectories: {
      reject_unknown_sections({"device"});
      if (Section* s = section_of("device")) {
        Bag bag{*s, "[device]"};
        cfg.device = take_device(bag);
        bag.finish();
      }
      if (cfg.kind == ExperimentKind::Trajectories) {
        const double half = 0.5 * cfg.device.w;
        for (const double z0 : cfg.z0_list)
          if (std::abs(z0) > half)
            throw ValidationError("z0_list", "offset outside the packet");
        if (cfg.y_start && !(*cfg.y_start < 0.0))
          throw ValidationError("y_start", "y_start must be negative");
        if (cfg.y_end && !(*cfg.y_end > cfg.device.overlap_extent()))
          throw ValidationError("y_end",
                                "y_end must lie beyond the overlap wedge");
      }
      break;
    }
    case ExperimentKind::Chain: {
      reject_unknown_sections({"stage"});
      for (std::size_t i = 1; i < sections.size(); ++i) {
        Bag bag{sections[i], "[stage]"};
        const auto sel = bag.take("selection");
        if (!sel)
          throw ValidationError("selection",
                                "required in every [stage] (line " +
                                    std::to_string(sections[i].line) + ")");
        cfg.stages.push_back(Stage{take_device(bag), parse_selection(*sel)});
        bag.finish();
      }
      if (cfg.stages.empty())
        throw ValidationError("kind", "a chain needs at least one [stage]");
      try {
        cfg.effective_chain().validate();
      } catch (const ConfigError& e) {
        throw ValidationError("selection", e.what());
      }
      break;
    }
    case ExperimentKind::Entangled: {
      reject_unknown_sections({"scenario"});
      Section empty{"scenario", 0, {}};
      Section* s = section_of("scenario");
      Bag bag{s ? *s : empty, "[scenario]"};
      if (const auto v = bag.take("state")) {
        if (*v == "singlet") {
          cfg.state = TwoParticleSpinState::singlet();
        } else {
          const auto reals = parse_reals("state", *v);
          if (reals.size() != 8)
            throw ValidationError(
                "state",
                "expected 'singlet' or eight reals (re and im of the four "
                "z-basis amplitudes, ++ +- -+ --)");
          TwoParticleSpinState st;
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
              st.amps[i][j] = complexd{reals[2 * (2 * i + j)],
                                       reals[2 * (2 * i + j) + 1]};
          const double n2 = st.norm_squared();
          if (n2 == 0.0)
            throw ValidationError("state", "state cannot be the zero vector");
          const double scale = 1.0 / std::sqrt(n2);
          for (auto& row : st.amps)
            for (auto& a : row) a *= scale;  // explicit normalization
          cfg.state = st;
        }
      }
      if (const auto v = bag.take("order")) {
        if (*v == "particle1_first")
          cfg.order = MeasurementOrder::Particle1First;
        else if (*v == "particle2_first")
          cfg.order = MeasurementOrder::Particle2First;
        else
          throw ValidationError(
              "order", "expected particle1_first or particle2_first");
      }
      cfg.alice_present = bag.take_bool("alice_present", true);
      const MeasurementAxis axis1{bag.take_double("theta1", 0.0)};
      const MeasurementAxis axis2{bag.take_double("theta2", 0.0)};
      const Polarity pol1 = bag.take_polarity("polarity1", Polarity::Standard);
      const Polarity pol2 = bag.take_polarity("polarity2", Polarity::Standard);
      DeviceConfig proto = take_device(bag, axis1, pol1);
      cfg.device1 = proto;
      cfg.device2 = DeviceConfig::from_wavenumbers(axis2, pol2, proto.w,
                                                   proto.k, proto.kappa,
                                                   proto.packet_length);
      cfg.z0_1 = bag.take_double_opt("z0_1");
      cfg.z0_2 = bag.take_double_opt("z0_2");
      if (cfg.z0_1.has_value() != cfg.z0_2.has_value())
        throw ValidationError("z0_1", "z0_1 and z0_2 must be given together");
      const double half = 0.5 * proto.w;
      if (cfg.z0_1 && std::abs(*cfg.z0_1) > half)
        throw ValidationError("z0_1", "offset outside the packet");
      if (cfg.z0_2 && std::abs(*cfg.z0_2) > half)
        throw ValidationError("z0_2", "offset outside the packet");
      bag.finish();
      break;
    }
    case ExperimentKind::Sweep: {
      reject_unknown_sections({"sweep"});
      Section* s = section_of("sweep");
      if (!s)
        throw ValidationError("sweep", "kind sweep needs a [sweep] section");
      Bag bag{*s, "[sweep]"};
      const auto t1 = bag.take("theta1_list");
      const auto t2 = bag.take("theta2_list");
      if (!t1 || !t2)
        throw ValidationError(t1 ? "theta2_list" : "theta1_list",
                              "required key is missing");
      cfg.theta1_list = parse_reals("theta1_list", *t1);
      cfg.theta2_list = parse_reals("theta2_list", *t2);
      cfg.sweep_device = take_device(bag, MeasurementAxis{0.0},
                                     Polarity::Standard);
      bag.finish();
      break;
    }
  }
  return cfg;
}

// -------------------------------------------------------------- serialize

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const Spinor& s) {
  return fmt(s.c_plus.real()) + " " + fmt(s.c_plus.imag()) + " " +
         fmt(s.c_minus.real()) + " " + fmt(s.c_minus.imag());
}

void emit_device_body(std::ostringstream& out, const DeviceConfig& d,
                      const std::string& theta_key,
                      const std::string& polarity_key) {
  out << theta_key << " = " << fmt(d.axis.theta) << "\n";
  out << polarity_key << " = "
      << (d.polarity == Polarity::Standard ? "standard" : "reversed") << "\n";
  out << "w = " << fmt(d.w) << "\n";
  out << "k = " << fmt(d.k) << "\n";
  out << "kappa = " << fmt(d.kappa) << "\n";
  if (d.packet_length)
    out << "packet_length = " << fmt(*d.packet_length) << "\n";
}

}  // namespace

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "kind = " << kind_name(cfg.kind) << "\n";
  out << "n = " << cfg.n << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "out = " << cfg.out_dir << "\n";
  out << "plot = " << (cfg.plot ? "true" : "false") << "\n";
  out << "per_particle_csv = " << (cfg.per_particle_csv ? "true" : "false")
      << "\n";
  switch (cfg.kind) {
    case ExperimentKind::Single:
    case ExperimentKind::Trajectories: {
      out << "input_spinor = " << fmt(cfg.input) << "\n";
      if (cfg.kind == ExperimentKind::Trajectories) {
        out << "n_paths = " << cfg.n_paths << "\n";
        if (!cfg.z0_list.empty()) {
          out << "z0_list =";
          for (const double z : cfg.z0_list) out << " " << fmt(z);
          out << "\n";
        }
        if (cfg.y_start) out << "y_start = " << fmt(*cfg.y_start) << "\n";
        if (cfg.y_end) out << "y_end = " << fmt(*cfg.y_end) << "\n";
      }
      out << "\n[device]\n";
      emit_device_body(out, cfg.device, "theta", "polarity");
      break;
    }
    case ExperimentKind::Chain: {
      out << "input_spinor = " << fmt(cfg.input) << "\n";
      for (const Stage& stage : cfg.stages) {
        out << "\n[stage]\n";
        emit_device_body(out, stage.device, "theta", "polarity");
        out << "selection = ";
        switch (stage.selection) {
          case Selection::KeepUpperPort: out << "keep_upper"; break;
          case Selection::KeepLowerPort: out << "keep_lower"; break;
          case Selection::MeasureBoth: out << "measure_both"; break;
        }
        out << "\n";
      }
      break;
    }
    case ExperimentKind::Entangled: {
      out << "\n[scenario]\n";
      const auto singlet = TwoParticleSpinState::singlet().amps;
      if (cfg.state.amps == singlet) {
        out << "state = singlet\n";
      } else {
        out << "state =";
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            out << " " << fmt(cfg.state.amps[i][j].real()) << " "
                << fmt(cfg.state.amps[i][j].imag());
        out << "\n";
      }
      out << "order = "
          << (cfg.order == MeasurementOrder::Particle1First
                  ? "particle1_first"
                  : "particle2_first")
          << "\n";
      out << "alice_present = " << (cfg.alice_present ? "true" : "false")
          << "\n";
      out << "theta1 = " << fmt(cfg.device1.axis.theta) << "\n";
      out << "theta2 = " << fmt(cfg.device2.axis.theta) << "\n";
      out << "polarity1 = "
          << (cfg.device1.polarity == Polarity::Standard ? "standard"
                                                         : "reversed")
          << "\n";
      out << "polarity2 = "
          << (cfg.device2.polarity == Polarity::Standard ? "standard"
                                                         : "reversed")
          << "\n";
      out << "w = " << fmt(cfg.device1.w) << "\n";
      out << "k = " << fmt(cfg.device1.k) << "\n";
      out << "kappa = " << fmt(cfg.device1.kappa) << "\n";
      if (cfg.device1.packet_length)
        out << "packet_length = " << fmt(*cfg.device1.packet_length) << "\n";
      if (cfg.z0_1) out << "z0_1 = " << fmt(*cfg.z0_1) << "\n";
      if (cfg.z0_2) out << "z0_2 = " << fmt(*cfg.z0_2) << "\n";
      break;
    }
    case ExperimentKind::Sweep: {
      out << "\n[sweep]\n";
      out << "theta1_list =";
      for (const double t : cfg.theta1_list) out << " " << fmt(t);
      out << "\ntheta2_list =";
      for (const double t : cfg.theta2_list) out << " " << fmt(t);
      out << "\n";
      out << "w = " << fmt(cfg.sweep_device.w) << "\n";
      out << "k = " << fmt(cfg.sweep_device.k) << "\n";
      out << "kappa = " << fmt(cfg.sweep_device.kappa) << "\n";
      break;
    }
  }
  return out.str();
}

namespace {

bool device_eq(const DeviceConfig& a, const DeviceConfig& b) {
  return a.axis.theta == b.axis.theta && a.polarity == b.polarity &&
         a.w == b.w && a.k == b.k && a.kappa == b.kappa &&
         a.packet_length == b.packet_length;
}

}  // namespace

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  if (a.kind != b.kind || a.n != b.n || a.seed != b.seed ||
      a.out_dir != b.out_dir || a.plot != b.plot ||
      a.per_particle_csv != b.per_particle_csv)
    return false;
  switch (a.kind) {
    case ExperimentKind::Single:
      return a.input == b.input && device_eq(a.device, b.device);
    case ExperimentKind::Trajectories:
      return a.input == b.input && device_eq(a.device, b.device) &&
             a.n_paths == b.n_paths && a.z0_list == b.z0_list &&
             a.y_start == b.y_start && a.y_end == b.y_end;
    case ExperimentKind::Chain: {
      if (!(a.input == b.input) || a.stages.size() != b.stages.size())
        return false;
      for (std::size_t i = 0; i < a.stages.size(); ++i)
        if (!device_eq(a.stages[i].device, b.stages[i].device) ||
            a.stages[i].selection != b.stages[i].selection)
          return false;
      return true;
    }
    case ExperimentKind::Entangled:
      return a.state.amps == b.state.amps &&
             a.alice_present == b.alice_present && a.order == b.order &&
             device_eq(a.device1, b.device1) &&
             device_eq(a.device2, b.device2) && a.z0_1 == b.z0_1 &&
             a.z0_2 == b.z0_2;
    case ExperimentKind::Sweep:
      return a.theta1_list == b.theta1_list &&
             a.theta2_list == b.theta2_list &&
             device_eq(a.sweep_device, b.sweep_device);
  }
  return false;
}

}  // namespace pwsg
