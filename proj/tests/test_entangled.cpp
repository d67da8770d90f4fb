#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pwsg/entangled.hpp"
#include "pwsg/errors.hpp"
#include "pwsg/rng.hpp"

using namespace pwsg;
using std::numbers::pi;

namespace {

DeviceConfig device_along(double theta, Polarity p = Polarity::Standard) {
  return DeviceConfig::from_wavenumbers(MeasurementAxis{theta}, p, 1.0,
                                        100.0, 5.0);
}

ScenarioConfig singlet_zz(double z0_1, double z0_2) {
  ScenarioConfig cfg;
  cfg.state = TwoParticleSpinState::singlet();
  cfg.device1 = device_along(0.0);
  cfg.device2 = device_along(0.0);
  cfg.z0_1 = z0_1;
  cfg.z0_2 = z0_2;
  return cfg;
}

}  // namespace

TEST_SUITE("entangled") {

TEST_CASE("state construction and normalization") {
  CHECK_THROWS_AS(TwoParticleSpinState({{{complexd{0.7, 0.0}, 0.0},
                                         {0.0, 0.0}}}),
                  std::invalid_argument);
  const auto s = TwoParticleSpinState::singlet();
  CHECK(s.norm_squared() == doctest::Approx(1.0));
  CHECK(s.amps[0][0] == complexd{0.0, 0.0});
  CHECK(s.amps[0][1].real() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(s.amps[1][0].real() == doctest::Approx(-1.0 / std::sqrt(2.0)));

  const auto prod = TwoParticleSpinState::product(Spinor::plus_z(),
                                                  Spinor::minus_z());
  CHECK(prod.amps[0][1] == complexd{1.0, 0.0});
  CHECK(prod.norm_squared() == doctest::Approx(1.0));
}

TEST_CASE("singlet looks the same along every axis") {
  // Rewriting the singlet in the theta basis for both particles must give
  // the same antisymmetric pattern: a(+,-) = -a(-,+), a(+,+)=a(-,-)=0.
  // Oracle: transform the amplitudes by hand with the eigenspinors.
  const auto st = TwoParticleSpinState::singlet();
  for (const double theta : {0.3, pi / 5, 2.2, 4.0}) {
    const auto [up, dn] = eigenspinors(MeasurementAxis{theta});
    const Spinor basis[2] = {up, dn};
    complexd rotated[2][2];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        complexd amp = 0.0;
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            const complexd bi = i == 0 ? basis[a].c_plus : basis[a].c_minus;
            const complexd bj = j == 0 ? basis[b].c_plus : basis[b].c_minus;
            amp += std::conj(bi) * std::conj(bj) * st.amps[i][j];
          }
        }
        rotated[a][b] = amp;
      }
    }
    CAPTURE(theta);
    CHECK(std::abs(rotated[0][0]) < 1e-14);
    CHECK(std::abs(rotated[1][1]) < 1e-14);
    CHECK(std::abs(rotated[0][1] + rotated[1][0]) < 1e-14);
    CHECK(std::norm(rotated[0][1]) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("marginal weights ignore the other particle") {
  const auto st = TwoParticleSpinState::singlet();
  for (const double theta : {0.0, 0.9, pi / 2, 3.7}) {
    for (const int particle : {1, 2}) {
      const auto [wp, wm] = marginal_weights(st, particle,
                                             MeasurementAxis{theta});
      CHECK(wp == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(wm == doctest::Approx(0.5).epsilon(1e-12));
    }
  }
  // Product state: weights are the single-particle probabilities.
  const auto prod = TwoParticleSpinState::product(
      Spinor{std::sqrt(2.0 / 3.0), std::sqrt(1.0 / 3.0)}, Spinor::plus_x());
  const auto [wp, wm] = marginal_weights(prod, 1, MeasurementAxis{0.0});
  CHECK(wp == doctest::Approx(2.0 / 3.0));
  CHECK(wm == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("joint probabilities reproduce the singlet correlation") {
  const auto st = TwoParticleSpinState::singlet();
  for (const double d : {0.0, pi / 4, pi / 3, pi / 2, 3 * pi / 4, pi}) {
    const auto p = joint_born_probabilities(st, MeasurementAxis{0.0},
                                            MeasurementAxis{d});
    // P(same sign) = sin^2(d/2)/... pattern: P(+,+) = 1/2 sin^2(d/2).
    const double same = 0.5 * std::sin(d / 2) * std::sin(d / 2);
    const double diff = 0.5 * std::cos(d / 2) * std::cos(d / 2);
    CAPTURE(d);
    CHECK(p[0][0] == doctest::Approx(same).epsilon(1e-12));
    CHECK(p[1][1] == doctest::Approx(same).epsilon(1e-12));
    CHECK(p[0][1] == doctest::Approx(diff).epsilon(1e-12));
    CHECK(p[1][0] == doctest::Approx(diff).epsilon(1e-12));
    const double E = p[0][0] + p[1][1] - p[0][1] - p[1][0];
    CHECK(E == doctest::Approx(-std::cos(d)).epsilon(1e-12));
  }
}

TEST_CASE("first measurement collapses the pair onto the outcome") {
  const auto st = TwoParticleSpinState::singlet();
  const DeviceConfig d = device_along(0.0);

  // Singlet marginal is 50/50, so the critical line is at 0: the offset
  // sign decides the port deterministically.
  const FirstMeasurementResult up = first_measurement(st, 1, d, 0.25);
  CHECK(up.branch == Branch::Upper);
  CHECK(up.label.sign == +1);
  // Partner is left in the opposite eigenspinor.
  const Spinor partner = conditional_spinor(up.collapsed, 2);
  CHECK(partner == Spinor::minus_z());
  CHECK(conditional_spinor(up.collapsed, 1) == Spinor::plus_z());

  const FirstMeasurementResult dn = first_measurement(st, 1, d, -0.25);
  CHECK(dn.label.sign == -1);
  CHECK(conditional_spinor(dn.collapsed, 2) == Spinor::plus_z());
}

TEST_CASE("conditional spinor refuses entangled states") {
  CHECK_THROWS_AS(conditional_spinor(TwoParticleSpinState::singlet(), 1),
                  NotProductError);
  const auto prod = TwoParticleSpinState::product(Spinor::plus_x(),
                                                  Spinor::minus_z());
  // Same ray as the factors (bitwise equality is too strict here: the
  // extraction renormalizes, shifting the last ulp).
  CHECK(std::abs(inner(conditional_spinor(prod, 1), Spinor::plus_x())) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(inner(conditional_spinor(prod, 2), Spinor::minus_z())) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("whether the partner fires decides this particle's port") {
  // Same state, same offsets; the only difference is a distant device.
  const double z0 = 0.2;

  ScenarioConfig with = singlet_zz(z0, z0);
  const ScenarioResult a = run_scenario(with);
  REQUIRE(a.outcome1.has_value());
  CHECK(a.outcome1->sign == +1);   // upper half of its packet
  CHECK(a.outcome2.sign == -1);    // forced opposite by the collapse

  ScenarioConfig without = singlet_zz(z0, z0);
  without.device1.reset();
  const ScenarioResult b = run_scenario(without);
  CHECK_FALSE(b.outcome1.has_value());
  CHECK(b.outcome2.sign == +1);    // same offset, opposite port
}

TEST_CASE("measurement order changes trajectories, not statistics") {
  // theta2 = pi/3: an offset pair where the two orders disagree
  // particle-by-particle.
  ScenarioConfig cfg;
  cfg.state = TwoParticleSpinState::singlet();
  cfg.device1 = device_along(0.0);
  cfg.device2 = device_along(pi / 3);
  cfg.z0_1 = 0.1;
  cfg.z0_2 = 0.3;

  cfg.order = MeasurementOrder::Particle1First;
  const ScenarioResult first = run_scenario(cfg);
  cfg.order = MeasurementOrder::Particle2First;
  const ScenarioResult second = run_scenario(cfg);
  REQUIRE(first.outcome1.has_value());
  REQUIRE(second.outcome1.has_value());
  const bool differs = first.outcome1->sign != second.outcome1->sign ||
                       first.outcome2.sign != second.outcome2.sign;
  CHECK(differs);

  // Yet over an ensemble the joint frequencies agree within noise.
  const int n = 20000;
  int agree[2][2] = {{0, 0}, {0, 0}};
  for (int i = 0; i < n; ++i) {
    cfg.z0_1 = uniform_symmetric(3, 0, i, 0.5);
    cfg.z0_2 = uniform_symmetric(3, 1, i, 0.5);
    cfg.order = MeasurementOrder::Particle1First;
    const ScenarioResult r1 = run_scenario(cfg);
    cfg.order = MeasurementOrder::Particle2First;
    const ScenarioResult r2 = run_scenario(cfg);
    ++agree[r1.outcome1->sign == +1 ? 0 : 1][r1.outcome2.sign == +1 ? 0 : 1];
    --agree[r2.outcome1->sign == +1 ? 0 : 1][r2.outcome2.sign == +1 ? 0 : 1];
  }
  // Count differences cancel to within a few hundred out of 20000.
  const auto p = joint_born_probabilities(cfg.state, cfg.device1->axis,
                                          cfg.device2.axis);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double se = std::sqrt(2.0 * n * p[i][j] * (1.0 - p[i][j]));
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::abs(agree[i][j]) < 5.0 * se);
    }
  }
}

TEST_CASE("equal axes anticorrelate perfectly, sample by sample") {
  for (int i = 0; i < 500; ++i) {
    ScenarioConfig cfg = singlet_zz(uniform_symmetric(5, 0, i, 0.5),
                                    uniform_symmetric(5, 1, i, 0.5));
    const ScenarioResult r = run_scenario(cfg);
    REQUIRE(r.outcome1.has_value());
    CHECK(r.outcome1->sign * r.outcome2.sign == -1);
  }
}

TEST_CASE("no signaling: remote settings leave local statistics alone") {
  // Particle 2's +1 frequency with particle 1 measured along z vs along x.
  const int n = 20000;
  int up_z = 0, up_x = 0;
  for (int i = 0; i < n; ++i) {
    const double z0_1 = uniform_symmetric(9, 0, i, 0.5);
    const double z0_2 = uniform_symmetric(9, 1, i, 0.5);
    ScenarioConfig a = singlet_zz(z0_1, z0_2);
    a.device1 = device_along(0.0);
    if (run_scenario(a).outcome2.sign == +1) ++up_z;
    a.device1 = device_along(pi / 2);
    if (run_scenario(a).outcome2.sign == +1) ++up_x;
  }
  const double se = std::sqrt(0.25 / n);
  CHECK(std::abs(up_z / static_cast<double>(n) - 0.5) < 4.0 * se);
  CHECK(std::abs(up_x / static_cast<double>(n) - 0.5) < 4.0 * se);
}

TEST_CASE("correlation sweep recovers minus cosine") {
  const std::vector<double> t1{0.0};
  const std::vector<double> t2{pi / 3};
  const auto rows = correlation_sweep(t1, t2, 30000, 42, device_along(0.0));
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n == 30000);
  // E = -cos(pi/3) = -1/2 within 4 standard errors.
  CHECK(std::abs(rows[0].E + 0.5) < 4.0 * rows[0].stderr_);
  CHECK(rows[0].stderr_ ==
        doctest::Approx(std::sqrt((1.0 - rows[0].E * rows[0].E) / 30000.0)));
}

TEST_CASE("sweep cells are independent: adding a cell changes nothing") {
  const std::vector<double> one{0.0};
  const std::vector<double> t2{pi / 4, 3 * pi / 4};
  const auto small = correlation_sweep(one, {t2.data(), 1}, 5000, 7,
                                       device_along(0.0));
  const auto big = correlation_sweep(one, t2, 5000, 7, device_along(0.0));
  REQUIRE(big.size() == 2);
  CHECK(small[0].E == big[0].E);  // bitwise: same stream, same counters
}

}  // TEST_SUITE
