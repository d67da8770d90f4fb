#include "pwsg/spinor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pwsg {

namespace {

// Divide out the phase of the first component whose modulus exceeds the
// threshold, leaving that component real and non-negative.  With axes in
// the x-z plane every component is real anyway, so this reduces to a sign
// flip, but the rule is applied generally.
Spinor fix_phase(complexd a, complexd b) {
  constexpr double thresh = 1e-12;
  complexd ref = std::abs(a) > thresh ? a : b;
  const double mag = std::abs(ref);
  if (mag == 0.0) return Spinor{a, b};
  const complexd phase = ref / mag;
  return Spinor{a / phase, b / phase};
}

}  // namespace

Spinor::Spinor(complexd cp, complexd cm) : c_plus(cp), c_minus(cm) {
  if (norm_squared() == 0.0)
    throw std::invalid_argument("spinor components are both zero");
}

double Spinor::norm_squared() const {
  return std::norm(c_plus) + std::norm(c_minus);
}

bool Spinor::is_normalized(double tol) const {
  return std::abs(norm_squared() - 1.0) <= tol;
}

Spinor Spinor::normalized() const {
  const double n = std::sqrt(norm_squared());
  return Spinor{c_plus / n, c_minus / n};
}

Spinor Spinor::plus_x() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {r, r};
}

Spinor Spinor::minus_x() {
  const double r = 1.0 / std::numbers::sqrt2;
  return {r, -r};
}

complexd inner(const Spinor& a, const Spinor& b) {
  return std::conj(a.c_plus) * b.c_plus + std::conj(a.c_minus) * b.c_minus;
}

bool operator==(const Spinor& a, const Spinor& b) {
  return a.c_plus == b.c_plus && a.c_minus == b.c_minus;
}

MeasurementAxis::MeasurementAxis(double theta_radians) {
  if (!std::isfinite(theta_radians))
    throw std::invalid_argument("axis angle must be finite");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  theta = std::fmod(theta_radians, two_pi);
  if (theta < 0.0) theta += two_pi;
}

EigenspinorPair eigenspinors(const MeasurementAxis& axis) {
  // sigma_n is real symmetric with eigenvalues +-1; the half-angle vectors
  // (cos t/2, sin t/2) and (-sin t/2, cos t/2) diagonalize it.
  const double c = std::cos(0.5 * axis.theta);
  const double s = std::sin(0.5 * axis.theta);
  return {fix_phase(c, s), fix_phase(-s, c)};
}

std::pair<complexd, complexd> decompose(const Spinor& s,
                                        const MeasurementAxis& axis) {
  if (!s.is_normalized())
    throw std::invalid_argument("decompose requires a unit spinor");
  const auto [chi_plus, chi_minus] = eigenspinors(axis);
  return {inner(chi_plus, s), inner(chi_minus, s)};
}

std::pair<double, double> born_probabilities(const Spinor& s,
                                             const MeasurementAxis& axis) {
  const auto [cp, cm] = decompose(s, axis);
  return {std::norm(cp), std::norm(cm)};
}

}  // namespace pwsg
