#pragma once

#include <span>
#include <vector>

#include "pwsg/trajectory.hpp"

namespace pwsg {

/// A recorded measurement outcome: spin sign (+1 or -1) along the device
/// axis.  Which *port* the particle actually left through depends on the
/// device polarity and is reported separately as the branch.
struct OutcomeLabel {
  MeasurementAxis axis{};
  int sign = +1;
};

bool operator==(const OutcomeLabel& a, const OutcomeLabel& b);

/// Standard polarity calibrates the upper port as spin +1; a
/// reversed-field device deflects the +1 component downward instead, so
/// the same port reads -1.
OutcomeLabel label_outcome(Branch branch, const DeviceConfig& d);

enum class Selection { KeepUpperPort, KeepLowerPort, MeasureBoth };

struct Stage {
  DeviceConfig device;
  Selection selection = Selection::MeasureBoth;
};

/// A sequence of devices.  Every stage but the last must post-select one
/// port; the last may keep both.
struct ExperimentChain {
  Spinor input;
  std::vector<Stage> stages;

  void validate() const;  // ConfigError on structural problems
};

struct PassResult {
  Branch branch = Branch::Upper;
  OutcomeLabel label;
  Spinor post_spinor;  // eigenspinor of the outcome, the particle's new guide
  TrajectoryRecord record;
  /// Exit position within the branch band, relative to the band center.
  double exit_offset = 0.0;
};

/// The guiding field a device presents to a particle with spinor s: the
/// spinor decomposed in the device basis, with the two amplitudes swapped
/// when the polarity is reversed (the +1 component then rides the lower
/// band).
WaveField make_device_field(const Spinor& s, const DeviceConfig& d);

/// Send one particle with guiding spinor s and packet offset z0 through a
/// device.  For a reversed device the amplitudes swap roles in the field
/// and the exit branch is labeled accordingly; the deflection geometry
/// itself is unchanged.
PassResult pass_device(const Spinor& s, double z0, const DeviceConfig& d);

/// How the transverse coordinate of stage i+1 relates to stage i.
enum class TransverseMode {
  /// Each stage draws its own offset; downstream packets re-form around
  /// the selected beam.  The default.
  FreshSample,
  /// Map the exit offset within the branch band affinely onto the next
  /// packet's cross-section.  A uniform packet stays uniform under this
  /// map, so the statistics are identical to FreshSample.
  CarryThrough,
};

struct ChainResult {
  bool discarded = false;
  int discard_stage = -1;  // stage whose selection rejected the particle
  std::vector<OutcomeLabel> labels;       // one per stage traversed
  std::vector<TrajectoryRecord> records;  // parallel to labels
};

/// Run one particle down the chain.  z0_per_stage supplies one offset per
/// stage (later entries are ignored in CarryThrough mode).  A particle
/// leaving through a non-selected port is Discarded -- an ordinary result,
/// not an error.
ChainResult run_chain(const ExperimentChain& chain,
                      std::span<const double> z0_per_stage,
                      TransverseMode mode = TransverseMode::FreshSample);

}  // namespace pwsg
