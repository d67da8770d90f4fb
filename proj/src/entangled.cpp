#include "pwsg/entangled.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pwsg/errors.hpp"
#include "pwsg/rng.hpp"

namespace pwsg {

namespace {

void check_particle_index(int particle) {
  if (particle != 1 && particle != 2)
    throw std::invalid_argument("particle index must be 1 or 2");
}

}  // namespace

TwoParticleSpinState::TwoParticleSpinState(
    const std::array<std::array<complexd, 2>, 2>& a)
    : amps(a) {
  if (std::abs(norm_squared() - 1.0) > 1e-12)
    throw std::invalid_argument("two-particle amplitudes must be normalized");
}

double TwoParticleSpinState::norm_squared() const {
  double n = 0.0;
  for (const auto& row : amps)
    for (const complexd& a : row) n += std::norm(a);
  return n;
}

TwoParticleSpinState TwoParticleSpinState::singlet() {
  const double r = 1.0 / std::numbers::sqrt2;
  TwoParticleSpinState s;
  s.amps[0][1] = r;
  s.amps[1][0] = -r;
  return s;
}

TwoParticleSpinState TwoParticleSpinState::product(const Spinor& s1,
                                                   const Spinor& s2) {
  if (!s1.is_normalized() || !s2.is_normalized())
    throw std::invalid_argument("product factors must be unit spinors");
  TwoParticleSpinState s;
  const complexd c1[2] = {s1.c_plus, s1.c_minus};
  const complexd c2[2] = {s2.c_plus, s2.c_minus};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.amps[i][j] = c1[i] * c2[j];
  return s;
}

namespace {

// Amplitudes with the measured particle's index rotated into the axis
// basis; row 0 of the result is the +1 component along the axis.
std::array<std::array<complexd, 2>, 2> rotate_particle(
    const TwoParticleSpinState& state, int particle,
    const MeasurementAxis& axis) {
  const auto chi = eigenspinors(axis);
  const complexd u[2][2] = {  // u[row = new index][col = old index]
      {std::conj(chi.plus.c_plus), std::conj(chi.plus.c_minus)},
      {std::conj(chi.minus.c_plus), std::conj(chi.minus.c_minus)}};
  std::array<std::array<complexd, 2>, 2> out{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int old_idx = 0; old_idx < 2; ++old_idx) {
        if (particle == 1)
          out[a][b] += u[a][old_idx] * state.amps[old_idx][b];
        else
          out[a][b] += u[b][old_idx] * state.amps[a][old_idx];
      }
  return out;
}

}  // namespace

std::pair<double, double> marginal_weights(const TwoParticleSpinState& state,
                                           int particle,
                                           const MeasurementAxis& axis) {
  check_particle_index(particle);
  const auto rotated = rotate_particle(state, particle, axis);
  double w_plus = 0.0, w_minus = 0.0;
  for (int other = 0; other < 2; ++other) {
    if (particle == 1) {
      w_plus += std::norm(rotated[0][other]);
      w_minus += std::norm(rotated[1][other]);
    } else {
      w_plus += std::norm(rotated[other][0]);
      w_minus += std::norm(rotated[other][1]);
    }
  }
  return {w_plus, w_minus};
}

WaveField first_measurement_field(const TwoParticleSpinState& state,
                                  int particle, const DeviceConfig& d) {
  check_particle_index(particle);
  const auto [w_plus, w_minus] = marginal_weights(state, particle, d.axis);
  // Band weights stand in for |a+|^2, |a-|^2 of the single-particle
  // field; reversal puts the +1 weight on the lower band as usual.
  const bool reversed = d.polarity == Polarity::Reversed;
  const double up_weight = reversed ? w_minus : w_plus;
  const double down_weight = reversed ? w_plus : w_minus;
  return WaveField(d, std::sqrt(up_weight), std::sqrt(down_weight));
}

FirstMeasurementResult first_measurement(const TwoParticleSpinState& state,
                                         int particle, const DeviceConfig& d,
                                         double z0) {
  check_particle_index(particle);
  const WaveField field = first_measurement_field(state, particle, d);

  FirstMeasurementResult r;
  const double reach = d.overlap_extent();
  r.record = propagate_analytic(z0, field, -reach, 2.0 * reach);
  r.branch = r.record.exit_branch;
  r.label = label_outcome(r.branch, d);

  // Collapse: project the measured index onto the outcome eigenspinor and
  // renormalize.  The conditional amplitude for the other particle is the
  // overlap of that eigenspinor with its row/column of the state.
  const auto chi = eigenspinors(d.axis);
  const Spinor& pick = r.label.sign > 0 ? chi.plus : chi.minus;
  const complexd e[2] = {pick.c_plus, pick.c_minus};
  complexd cond[2] = {0.0, 0.0};
  for (int other = 0; other < 2; ++other)
    for (int measured = 0; measured < 2; ++measured)
      cond[other] += std::conj(e[measured]) * (particle == 1
                                                   ? state.amps[measured][other]
                                                   : state.amps[other][measured]);
  const double norm = std::sqrt(std::norm(cond[0]) + std::norm(cond[1]));
  if (norm == 0.0)
    throw ZeroAmplitudeError("collapse onto an outcome with zero weight");
  for (complexd& c : cond) c /= norm;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r.collapsed.amps[i][j] = particle == 1 ? e[i] * cond[j] : cond[i] * e[j];
  return r;
}

Spinor conditional_spinor(const TwoParticleSpinState& state, int particle) {
  check_particle_index(particle);
  // A product state has a rank-1 amplitude matrix; for 2x2 the product of
  // singular values is |det|, so with unit Frobenius norm a determinant
  // above tolerance certifies entanglement.
  const auto& m = state.amps;
  const complexd det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  if (std::abs(det) > 1e-10)
    throw NotProductError("two-particle state is entangled");

  // Take the row (or column) with the larger weight as the factor.
  complexd v[2];
  if (particle == 2) {
    const double r0 = std::norm(m[0][0]) + std::norm(m[0][1]);
    const double r1 = std::norm(m[1][0]) + std::norm(m[1][1]);
    const int row = r0 >= r1 ? 0 : 1;
    v[0] = m[row][0];
    v[1] = m[row][1];
  } else {
    const double c0 = std::norm(m[0][0]) + std::norm(m[1][0]);
    const double c1 = std::norm(m[0][1]) + std::norm(m[1][1]);
    const int col = c0 >= c1 ? 0 : 1;
    v[0] = m[0][col];
    v[1] = m[1][col];
  }
  const double norm = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  Spinor s{v[0] / norm, v[1] / norm};
  // Same phase convention as eigenspinors: first component of modulus
  // above threshold made real and non-negative.
  const complexd ref = std::abs(s.c_plus) > 1e-12 ? s.c_plus : s.c_minus;
  const complexd phase = ref / std::abs(ref);
  return {s.c_plus / phase, s.c_minus / phase};
}

std::array<std::array<double, 2>, 2> joint_born_probabilities(
    const TwoParticleSpinState& state, const MeasurementAxis& axis1,
    const MeasurementAxis& axis2) {
  const auto chi1 = eigenspinors(axis1);
  const auto chi2 = eigenspinors(axis2);
  const Spinor* e1[2] = {&chi1.plus, &chi1.minus};
  const Spinor* e2[2] = {&chi2.plus, &chi2.minus};
  std::array<std::array<double, 2>, 2> p{};
  for (int a = 0; a < 2; ++a) {
    const complexd u[2] = {e1[a]->c_plus, e1[a]->c_minus};
    for (int b = 0; b < 2; ++b) {
      const complexd v[2] = {e2[b]->c_plus, e2[b]->c_minus};
      complexd amp = 0.0;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          amp += std::conj(u[i] * v[j]) * state.amps[i][j];
      p[a][b] = std::norm(amp);
    }
  }
  return p;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  ScenarioResult out;
  if (!cfg.device1.has_value()) {
    // Nothing interacts with particle 1; particle 2 is driven directly by
    // its marginal weights in the joint state.
    const auto fm = first_measurement(cfg.state, 2, cfg.device2, cfg.z0_2);
    out.outcome2 = fm.label;
    out.records.push_back(fm.record);
    out.collapsed = fm.collapsed;
    return out;
  }
  if (cfg.order == MeasurementOrder::Particle1First) {
    const auto fm = first_measurement(cfg.state, 1, *cfg.device1, cfg.z0_1);
    const Spinor guide2 = conditional_spinor(fm.collapsed, 2);
    const PassResult second = pass_device(guide2, cfg.z0_2, cfg.device2);
    out.outcome1 = fm.label;
    out.outcome2 = second.label;
    out.records.push_back(fm.record);
    out.records.push_back(second.record);
    out.collapsed = fm.collapsed;
  } else {
    const auto fm = first_measurement(cfg.state, 2, cfg.device2, cfg.z0_2);
    const Spinor guide1 = conditional_spinor(fm.collapsed, 1);
    const PassResult second = pass_device(guide1, cfg.z0_1, *cfg.device1);
    out.outcome1 = second.label;
    out.outcome2 = fm.label;
    out.records.push_back(second.record);
    out.records.push_back(fm.record);
    out.collapsed = fm.collapsed;
  }
  return out;
}

std::vector<SweepRow> correlation_sweep(std::span<const double> theta1_list,
                                        std::span<const double> theta2_list,
                                        std::uint64_t n, std::uint64_t seed,
                                        const DeviceConfig& prototype) {
  std::vector<SweepRow> rows;
  std::uint64_t cell = 0;
  for (const double t1 : theta1_list) {
    for (const double t2 : theta2_list) {
      ScenarioConfig cfg;
      cfg.state = TwoParticleSpinState::singlet();
      cfg.device1 = DeviceConfig::from_wavenumbers(
          MeasurementAxis{t1}, Polarity::Standard, prototype.w, prototype.k,
          prototype.kappa);
      cfg.device2 = DeviceConfig::from_wavenumbers(
          MeasurementAxis{t2}, Polarity::Standard, prototype.w, prototype.k,
          prototype.kappa);
      double sum = 0.0;
      for (std::uint64_t i = 0; i < n; ++i) {
        cfg.z0_1 = uniform_symmetric(seed, 2 * cell, i, 0.5 * prototype.w);
        cfg.z0_2 = uniform_symmetric(seed, 2 * cell + 1, i, 0.5 * prototype.w);
        const ScenarioResult r = run_scenario(cfg);
        sum += r.outcome1->sign * r.outcome2.sign;
      }
      SweepRow row;
      row.theta1 = t1;
      row.theta2 = t2;
      row.n = n;
      row.E = n == 0 ? 0.0 : sum / static_cast<double>(n);
      row.stderr_ =
          n == 0 ? 0.0
                 : std::sqrt(std::max(0.0, 1.0 - row.E * row.E) /
                             static_cast<double>(n));
      rows.push_back(row);
      ++cell;
    }
  }
  return rows;
}

}  // namespace pwsg
