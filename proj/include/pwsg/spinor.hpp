#pragma once

#include <complex>
#include <utility>

namespace pwsg {

using complexd = std::complex<double>;

/// Two-component spin-1/2 state in the z basis: c_plus |+z> + c_minus |-z>.
///
/// Construction accepts unnormalized components; nothing is rescaled
/// silently.  Call normalized() to get a unit spinor -- keeping the two
/// steps separate is what makes norm-conservation checks meaningful.
struct Spinor {
  complexd c_plus{1.0, 0.0};
  complexd c_minus{0.0, 0.0};

  Spinor() = default;
  Spinor(complexd cp, complexd cm);  // rejects the zero vector

  double norm_squared() const;
  bool is_normalized(double tol = 1e-12) const;
  Spinor normalized() const;

  static Spinor plus_z() { return {1.0, 0.0}; }
  static Spinor minus_z() { return {0.0, 1.0}; }
  static Spinor plus_x();
  static Spinor minus_x();
};

/// Hermitian inner product <a|b>.
complexd inner(const Spinor& a, const Spinor& b);

bool operator==(const Spinor& a, const Spinor& b);

/// Measurement direction n = cos(theta) z + sin(theta) x, confined to the
/// x-z plane.  theta is canonicalized into [0, 2*pi).
struct MeasurementAxis {
  double theta = 0.0;

  MeasurementAxis() = default;
  explicit MeasurementAxis(double theta_radians);  // rejects non-finite input
};

struct EigenspinorPair {
  Spinor plus;   // spin +1 along the axis
  Spinor minus;  // spin -1 along the axis
};

/// Eigenspinors of the spin operator along the axis,
///   sigma_n = [[cos t, sin t], [sin t, -cos t]],
/// phase-fixed so the first component of modulus > 1e-12 is real and >= 0.
EigenspinorPair eigenspinors(const MeasurementAxis& axis);

/// Amplitudes (c_plus_n, c_minus_n) of a unit spinor in the axis basis.
std::pair<complexd, complexd> decompose(const Spinor& s,
                                        const MeasurementAxis& axis);

/// Probabilities (|c_plus_n|^2, |c_minus_n|^2) for the two outcomes of a
/// spin measurement along the axis.
std::pair<double, double> born_probabilities(const Spinor& s,
                                             const MeasurementAxis& axis);

}  // namespace pwsg
