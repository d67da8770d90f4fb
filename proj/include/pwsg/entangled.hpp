#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pwsg/apparatus.hpp"

namespace pwsg {

/// Spin state of two particles in the z (x) z basis.  amps[i][j] is the
/// amplitude of particle 1 in state i and particle 2 in state j, with
/// index 0 = +z, 1 = -z.  Must be unit-normalized.
struct TwoParticleSpinState {
  std::array<std::array<complexd, 2>, 2> amps{};

  TwoParticleSpinState() = default;
  explicit TwoParticleSpinState(
      const std::array<std::array<complexd, 2>, 2>& a);

  double norm_squared() const;

  static TwoParticleSpinState singlet();
  static TwoParticleSpinState product(const Spinor& s1, const Spinor& s2);
};

/// Probabilities (W+, W-) that a measurement of the given particle along
/// the axis yields +1 / -1: squared amplitudes in the device basis, summed
/// over the other particle's index.  These weights are what drive the
/// measured particle's packet through the device.
std::pair<double, double> marginal_weights(const TwoParticleSpinState& state,
                                           int particle,
                                           const MeasurementAxis& axis);

struct FirstMeasurementResult {
  Branch branch = Branch::Upper;
  OutcomeLabel label;
  TwoParticleSpinState collapsed;  // renormalized, product by construction
  TrajectoryRecord record;
};

/// Measure one particle of a (possibly entangled) pair.  The packet moves
/// through the fork exactly like a single-particle packet whose band
/// weights are the marginal weights; once a branch is decided, the
/// two-particle amplitudes are projected onto that outcome's eigenspinor
/// and renormalized.  Any overall factor of the wave cancels from the
/// guidance law, which is why only the weights matter here.
FirstMeasurementResult first_measurement(const TwoParticleSpinState& state,
                                         int particle, const DeviceConfig& d,
                                         double z0);

/// The effective single-particle field driving that measurement (band
/// amplitudes are square roots of the polarity-adjusted marginal weights).
WaveField first_measurement_field(const TwoParticleSpinState& state,
                                  int particle, const DeviceConfig& d);

/// Quantum prediction for joint outcomes: P[i][j] is the probability of
/// sign (+,-)[i] on particle 1 along axis1 and (+,-)[j] on particle 2
/// along axis2.
std::array<std::array<double, 2>, 2> joint_born_probabilities(
    const TwoParticleSpinState& state, const MeasurementAxis& axis1,
    const MeasurementAxis& axis2);

/// Unit spinor guiding the given particle of a product state (phase-fixed
/// like eigenspinors).  NotProductError if the amplitudes are entangled
/// beyond 1e-10.
Spinor conditional_spinor(const TwoParticleSpinState& state, int particle);

enum class MeasurementOrder { Particle1First, Particle2First };

/// One run of the two-device experiment.  device1 absent means particle
/// 1's device was removed (nothing happens to particle 1); particle 2 is
/// then measured straight from the joint state.
struct ScenarioConfig {
  TwoParticleSpinState state;
  std::optional<DeviceConfig> device1;
  DeviceConfig device2;
  MeasurementOrder order = MeasurementOrder::Particle1First;
  double z0_1 = 0.0;
  double z0_2 = 0.0;
};

struct ScenarioResult {
  std::optional<OutcomeLabel> outcome1;
  OutcomeLabel outcome2;
  std::vector<TrajectoryRecord> records;  // particle 1 first when present
  // State right after the first measurement; guides the second particle.
  std::optional<TwoParticleSpinState> collapsed;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

struct SweepRow {
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::uint64_t n = 0;
  double E = 0.0;        // mean of sign1 * sign2
  double stderr_ = 0.0;  // sqrt((1 - E^2)/n)
};

/// Spin-correlation E(theta1, theta2) of the singlet for every pair of
/// angles, estimated from n runs per pair.  Offsets come from per-cell
/// counter streams (particle 1 on stream 2*cell, particle 2 on 2*cell+1).
std::vector<SweepRow> correlation_sweep(std::span<const double> theta1_list,
                                        std::span<const double> theta2_list,
                                        std::uint64_t n, std::uint64_t seed,
                                        const DeviceConfig& prototype);

}  // namespace pwsg
