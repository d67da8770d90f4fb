#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pwsg/entangled.hpp"
#include "pwsg/ensemble.hpp"

namespace pwsg {

enum class ExperimentKind { Single, Chain, Entangled, Sweep, Trajectories };

const char* kind_name(ExperimentKind k);

/// Parsed experiment description.  The text format is flat `key = value`
/// lines under optional `[section]` headers; full-line `#` comments and
/// blank lines are ignored.  Unknown keys, unknown sections, duplicate
/// keys and values out of contract are rejected.
///
/// Top level: kind (required), n, seed, out, plot, per_particle_csv, and
/// for the beam kinds input_spinor (four reals: re+, im+, re-, im-),
/// n_paths / z0_list / y_start / y_end (trajectories only).
/// Sections: [device] for single/trajectories, repeated [stage] for
/// chain (device keys plus selection), [scenario] for entangled, [sweep]
/// for sweep.  Device keys: theta, polarity, w, k, kappa -- or m, mu, b
/// as an alternative to kappa -- and packet_length.
/// Defaults: w = 1, k = 100, kappa = 5, n = 100000, seed = 42, theta = 0,
/// polarity = standard.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Single;
  std::uint64_t n = 100000;
  std::uint64_t seed = 42;
  std::string out_dir = ".";
  bool plot = false;
  bool per_particle_csv = false;

  // single / chain / trajectories
  Spinor input = Spinor::plus_z();
  DeviceConfig device;            // single, trajectories
  std::vector<Stage> stages;      // chain

  // trajectories
  std::uint64_t n_paths = 9;
  std::vector<double> z0_list;    // explicit offsets; overrides n_paths
  std::optional<double> y_start;  // default -overlap_extent
  std::optional<double> y_end;    // default 2.2 * overlap_extent

  // entangled
  TwoParticleSpinState state = TwoParticleSpinState::singlet();
  bool alice_present = true;
  MeasurementOrder order = MeasurementOrder::Particle1First;
  DeviceConfig device1;  // axis/polarity from theta1/polarity1
  DeviceConfig device2;
  std::optional<double> z0_1;  // both set -> single deterministic run
  std::optional<double> z0_2;

  // sweep
  std::vector<double> theta1_list;
  std::vector<double> theta2_list;
  DeviceConfig sweep_device;  // geometry prototype for all cells

  /// The chain actually executed: the single-device kinds wrap their
  /// device in a one-stage measure-both chain.
  ExperimentChain effective_chain() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

/// Strict parse; ParseError carries line/column, ValidationError names the
/// offending key.
ExperimentConfig parse_config(std::string_view text);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace pwsg
