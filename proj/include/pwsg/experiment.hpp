#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "pwsg/config.hpp"

namespace pwsg {

/// Execute a parsed experiment and write its outputs (summary.json plus
/// kind-specific CSV/SVG files) into cfg.out_dir.  Progress and warnings
/// go to log.  Returns the process exit code: 0 on success, 2 when a
/// Born-rule comparison failed (some |z| > 4).  Errors keep propagating
/// as exceptions; the command-line wrapper maps them to exit code 1.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// Gentle-field warnings for every device the experiment uses, each
/// prefixed with the device's role ("stage 2", "device1", ...).
std::vector<std::string> config_warnings(const ExperimentConfig& cfg);

/// Trajectory table: one row per recorded point, 17 significant digits.
std::string trajectories_csv(std::span<const TrajectoryRecord> records,
                             const DeviceConfig& device);

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace pwsg
