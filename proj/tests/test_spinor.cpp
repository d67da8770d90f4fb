#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "pwsg/spinor.hpp"

#if PWSG_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace pwsg;
using std::numbers::pi;

namespace {

// Oracle: the spin operator along theta in the x-z plane, built directly
// from the Pauli matrices, with no half-angle shortcuts.
struct Sigma {
  complexd m[2][2];
};

Sigma sigma_n(double theta) {
  return {{{std::cos(theta), std::sin(theta)},
           {std::sin(theta), -std::cos(theta)}}};
}

// Residual |sigma_n v - lambda v|.
double eigen_residual(const Sigma& s, const Spinor& v, double lambda) {
  const complexd r0 = s.m[0][0] * v.c_plus + s.m[0][1] * v.c_minus -
                      lambda * v.c_plus;
  const complexd r1 = s.m[1][0] * v.c_plus + s.m[1][1] * v.c_minus -
                      lambda * v.c_minus;
  return std::sqrt(std::norm(r0) + std::norm(r1));
}

}  // namespace

TEST_SUITE("spinor") {

TEST_CASE("construction rejects the zero vector") {
  CHECK_THROWS_AS(Spinor(0.0, 0.0), std::invalid_argument);
  CHECK_NOTHROW(Spinor(0.0, 1e-30));
}

TEST_CASE("norm bookkeeping") {
  const Spinor s{complexd{3.0, 0.0}, complexd{0.0, 4.0}};
  CHECK(s.norm_squared() == doctest::Approx(25.0));
  CHECK_FALSE(s.is_normalized());
  const Spinor u = s.normalized();
  CHECK(u.is_normalized());
  CHECK(u.c_plus.real() == doctest::Approx(0.6));
  CHECK(u.c_minus.imag() == doctest::Approx(0.8));
}

TEST_CASE("inner product is conjugate-linear in the first argument") {
  const complexd i{0.0, 1.0};
  const Spinor a{i, 0.0};
  const Spinor b{1.0, 0.0};
  CHECK(inner(a, b) == complexd{0.0, -1.0});
  CHECK(std::abs(inner(Spinor::plus_x(), Spinor::plus_z()) -
                 complexd{1.0 / std::sqrt(2.0), 0.0}) < 1e-15);
}

TEST_CASE("axis angle is canonicalized into [0, 2 pi)") {
  CHECK(MeasurementAxis{-pi / 2}.theta == doctest::Approx(3 * pi / 2));
  CHECK(MeasurementAxis{2 * pi}.theta == doctest::Approx(0.0));
  CHECK(MeasurementAxis{5 * pi}.theta == doctest::Approx(pi));
  CHECK_THROWS_AS(MeasurementAxis{std::nan("")}, std::invalid_argument);
  CHECK_THROWS_AS(MeasurementAxis{INFINITY}, std::invalid_argument);
}

TEST_CASE("eigenspinors satisfy the eigenvalue equation across the circle") {
  for (int i = 0; i < 100; ++i) {
    const double theta = 2 * pi * i / 100.0;
    const auto [plus, minus] = eigenspinors(MeasurementAxis{theta});
    const Sigma s = sigma_n(theta);
    CAPTURE(theta);
    CHECK(eigen_residual(s, plus, +1.0) < 1e-14);
    CHECK(eigen_residual(s, minus, -1.0) < 1e-14);
    CHECK(plus.is_normalized(1e-14));
    CHECK(minus.is_normalized(1e-14));
    CHECK(std::abs(inner(plus, minus)) < 1e-14);
  }
}

TEST_CASE("eigenspinor phase convention: leading component real and >= 0") {
  for (int i = 0; i < 100; ++i) {
    const double theta = 2 * pi * i / 100.0;
    for (const Spinor& v :
         {eigenspinors(MeasurementAxis{theta}).plus,
          eigenspinors(MeasurementAxis{theta}).minus}) {
      const complexd lead =
          std::abs(v.c_plus) > 1e-12 ? v.c_plus : v.c_minus;
      CAPTURE(theta);
      CHECK(std::abs(lead.imag()) < 1e-14);
      CHECK(lead.real() >= 0.0);
    }
  }
}

TEST_CASE("frozen eigenspinors at the cardinal angles") {
  const auto z = eigenspinors(MeasurementAxis{0.0});
  CHECK(z.plus == Spinor::plus_z());
  CHECK(z.minus == Spinor::minus_z());

  const auto x = eigenspinors(MeasurementAxis{pi / 2});
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(x.plus.c_plus - r) < 1e-15);
  CHECK(std::abs(x.plus.c_minus - r) < 1e-15);
  CHECK(std::abs(x.minus.c_plus - r) < 1e-15);
  CHECK(std::abs(x.minus.c_minus + r) < 1e-15);
  CHECK(std::abs(inner(x.plus, Spinor::plus_x())) == doctest::Approx(1.0));
  CHECK(std::abs(inner(x.minus, Spinor::minus_x())) == doctest::Approx(1.0));
}

#if PWSG_HAVE_EIGEN
TEST_CASE("eigenspinors agree with a general-purpose eigensolver") {
  for (const double theta : {0.1, pi / 3, 1.9, pi, 4.4, 6.1}) {
    Eigen::Matrix2cd m;
    m << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(m);
    REQUIRE(solver.info() == Eigen::Success);
    // Eigen orders eigenvalues ascending: column 0 <-> -1, column 1 <-> +1.
    const Eigen::Vector2cd vm = solver.eigenvectors().col(0);
    const Eigen::Vector2cd vp = solver.eigenvectors().col(1);
    const auto pair = eigenspinors(MeasurementAxis{theta});
    const complexd op = std::conj(vp(0)) * pair.plus.c_plus +
                        std::conj(vp(1)) * pair.plus.c_minus;
    const complexd om = std::conj(vm(0)) * pair.minus.c_plus +
                        std::conj(vm(1)) * pair.minus.c_minus;
    CAPTURE(theta);
    CHECK(std::abs(op) == doctest::Approx(1.0).epsilon(1e-12));  // same ray
    CHECK(std::abs(om) == doctest::Approx(1.0).epsilon(1e-12));
  }
}
#endif

TEST_CASE("decomposition reassembles the spinor and preserves norm") {
  const Spinor psi =
      Spinor{complexd{0.3, 0.4}, complexd{-0.5, 0.2}}.normalized();
  for (const double theta : {0.0, 0.7, pi / 2, 2.9, 4.2}) {
    const MeasurementAxis axis{theta};
    const auto [cp, cm] = decompose(psi, axis);
    const auto [plus, minus] = eigenspinors(axis);
    const complexd r0 = cp * plus.c_plus + cm * minus.c_plus - psi.c_plus;
    const complexd r1 = cp * plus.c_minus + cm * minus.c_minus - psi.c_minus;
    CAPTURE(theta);
    CHECK(std::sqrt(std::norm(r0) + std::norm(r1)) < 1e-14);
    CHECK(std::norm(cp) + std::norm(cm) == doctest::Approx(1.0));
  }
}

TEST_CASE("decompose rejects unnormalized input") {
  CHECK_THROWS_AS(decompose(Spinor{2.0, 0.0}, MeasurementAxis{0.3}),
                  std::invalid_argument);
}

TEST_CASE("outcome probabilities follow the half-angle law") {
  // P(+ along theta | +z) = cos^2(theta/2).
  for (int i = 0; i <= 100; ++i) {
    const double theta = 2 * pi * i / 100.0 * 0.999;
    const auto [p, m] = born_probabilities(Spinor::plus_z(),
                                           MeasurementAxis{theta});
    CAPTURE(theta);
    CHECK(p == doctest::Approx(std::cos(theta / 2) * std::cos(theta / 2))
                   .epsilon(1e-12));
    CHECK(p + m == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("frozen probabilities for reference states") {
  // (sqrt(2/3), sqrt(1/3)) measured along z.
  const Spinor tilted{std::sqrt(2.0 / 3.0), std::sqrt(1.0 / 3.0)};
  const auto [pz, mz] = born_probabilities(tilted, MeasurementAxis{0.0});
  CHECK(pz == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(mz == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // |+z> measured along 2 pi / 3: cos^2(pi/3) = 1/4.
  const auto [pt, mt] =
      born_probabilities(Spinor::plus_z(), MeasurementAxis{2 * pi / 3});
  CHECK(pt == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mt == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("probabilities are insensitive to a global phase") {
  const complexd phase = std::polar(1.0, 1.234);
  const Spinor psi =
      Spinor{complexd{0.6, 0.1}, complexd{0.2, -0.7}}.normalized();
  const Spinor rotated{psi.c_plus * phase, psi.c_minus * phase};
  for (const double theta : {0.0, 1.1, 3.3, 5.5}) {
    const auto a = born_probabilities(psi, MeasurementAxis{theta});
    const auto b = born_probabilities(rotated, MeasurementAxis{theta});
    CHECK(a.first == doctest::Approx(b.first).epsilon(1e-13));
    CHECK(a.second == doctest::Approx(b.second).epsilon(1e-13));
  }
}

}  // TEST_SUITE
