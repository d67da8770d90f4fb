#include "pwsg/trajectory.hpp"

#include <cmath>
#include <stdexcept>

#include "pwsg/errors.hpp"

namespace pwsg {

const char* branch_name(Branch b) {
  return b == Branch::Upper ? "Upper" : "Lower";
}

TrajectoryPoint TrajectoryRecord::at(double t) const {
  if (points.empty()) return {};
  if (t <= points.front().t) return points.front();
  if (t >= points.back().t) return points.back();
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (t <= points[i].t) {
      const auto& a = points[i - 1];
      const auto& b = points[i];
      const double f = (t - a.t) / (b.t - a.t);
      return {t, a.y + f * (b.y - a.y), a.z + f * (b.z - a.z)};
    }
  }
  return points.back();
}

CriticalGeometry critical_geometry(const WaveField& f) {
  const DeviceConfig& d = f.device();
  const double p = std::norm(f.a_plus());
  const double q = std::norm(f.a_minus());
  CriticalGeometry g;
  g.delta_y = d.overlap_extent();
  g.slope = (p - q) * d.deflection_slope();
  g.z_critical = -g.slope * g.delta_y;
  g.p_plus_geometric = 0.5 + g.slope * g.delta_y / d.w;
  // Algebraically p_plus_geometric == |a+|^2; anything beyond rounding
  // means the geometry above is wrong.
  if (std::abs(g.p_plus_geometric - p) > 1e-12)
    throw std::logic_error("critical geometry inconsistent with amplitudes");
  return g;
}

static void check_propagation_window(const WaveField& f, double z0,
                                     double y_start, double y_end) {
  const DeviceConfig& d = f.device();
  if (std::abs(z0) > 0.5 * d.w)
    throw OutsidePacketError("z0 outside the incident packet");
  if (!(y_start < 0.0))
    throw std::invalid_argument("y_start must be upstream of the field");
  if (!(y_end > d.overlap_extent()))
    throw std::invalid_argument("y_end must lie beyond the overlap wedge");
}

TrajectoryRecord propagate_analytic(double z0, const WaveField& f,
                                    double y_start, double y_end) {
  check_propagation_window(f, z0, y_start, y_end);
  const DeviceConfig& d = f.device();
  const double half = 0.5 * d.w;
  const double p = std::norm(f.a_plus());
  const double q = std::norm(f.a_minus());
  const CriticalGeometry g = critical_geometry(f);

  TrajectoryRecord rec;
  rec.z0 = z0;
  rec.exit_branch = z0 >= g.z_critical ? Branch::Upper : Branch::Lower;
  rec.points.push_back({0.0, y_start, z0});

  // Incident drift at (k, 0) until the field plane.
  const double t_enter = -y_start / d.k;
  rec.points.push_back({t_enter, 0.0, z0});

  // Inside the wedge the velocity is (k', kappa (p - q)).  The particle
  // leaves through the upper edge z = -slope_geo*y + w/2 or the lower edge
  // mirrored; relative closing speeds are 2*kappa*p and 2*kappa*q.
  const double vz = d.kappa * (p - q);
  double tau;  // time from y = 0 to the wedge exit
  if (rec.exit_branch == Branch::Upper) {
    const double numer = half - z0;
    tau = numer == 0.0 ? 0.0 : numer / (vz + d.kappa);
  } else {
    const double numer = half + z0;
    tau = numer == 0.0 ? 0.0 : numer / (d.kappa - vz);
  }
  const double y_exit = d.k_prime * tau;
  const double z_exit = z0 + vz * tau;
  if (tau > 0.0) rec.points.push_back({t_enter + tau, y_exit, z_exit});

  // Free flight in the chosen branch band out to y_end.
  const double sign = rec.exit_branch == Branch::Upper ? 1.0 : -1.0;
  const double dy = y_end - y_exit;
  rec.points.push_back({t_enter + tau + dy / d.k_prime, y_end,
                        z_exit + sign * d.deflection_slope() * dy});
  return rec;
}

TrajectoryRecord propagate_numeric(double z0, const WaveField& f, double dt,
                                   double y_start, double y_end,
                                   VelocityMode mode) {
  check_propagation_window(f, z0, y_start, y_end);
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const DeviceConfig& d = f.device();
  const double fd_step = 1e-6 * d.w;

  const auto vel = [&](double y, double z) -> Velocity {
    return mode == VelocityMode::FiniteDifference
               ? f.velocity_numeric(y, z, fd_step)
               : f.velocity(y, z);
  };

  TrajectoryRecord rec;
  rec.z0 = z0;
  rec.near_critical =
      std::abs(z0 - critical_geometry(f).z_critical) <= 10.0 * dt * d.k;
  rec.points.push_back({0.0, y_start, z0});

  double t = 0.0, y = y_start, z = z0;
  while (y < y_end) {
    const Velocity v1 = vel(y, z);
    double h = dt;
    bool landing = false;
    // Land exactly on y_end (longitudinal speed is positive everywhere).
    if (y + v1.vy * h >= y_end) {
      h = (y_end - y) / v1.vy;
      landing = true;
    }

    // If the step would jump a region boundary, bisect the crossing time
    // along the straight-line probe (exact here: the velocity is constant
    // within a region) and take the smallest step that still crosses.
    // Crossing in one definite step, rather than creeping up on the
    // boundary, is what keeps the walk from stalling on a sub-ulp gap.
    const Region here = classify_region(y, z, d);
    const auto crosses = [&](double s) {
      return classify_region(y + v1.vy * s, z + v1.vz * s, d) != here;
    };
    if (crosses(h)) {
      double lo = 0.0, hi = h;
      for (int i = 0; i < 64 && lo + 0.5 * (hi - lo) > lo; ++i) {
        const double mid = lo + 0.5 * (hi - lo);
        (crosses(mid) ? hi : lo) = mid;
      }
      h = hi;
      // Advance exactly like the probe (straight line at v1): the endpoint
      // is the very point that classified as crossed, so the walk cannot
      // get stuck re-bisecting the same gap.
      y += v1.vy * h;
      z += v1.vz * h;
    } else {
      // Classical RK4 on the sampled field.  The probe segment stays in
      // one region and regions are convex, so every stage point sees the
      // same constant velocity and the update is exact.
      const Velocity v2 = vel(y + 0.5 * h * v1.vy, z + 0.5 * h * v1.vz);
      const Velocity v3 = vel(y + 0.5 * h * v2.vy, z + 0.5 * h * v2.vz);
      const Velocity v4 = vel(y + h * v3.vy, z + h * v3.vz);
      y += h / 6.0 * (v1.vy + 2.0 * v2.vy + 2.0 * v3.vy + v4.vy);
      z += h / 6.0 * (v1.vz + 2.0 * v2.vz + 2.0 * v3.vz + v4.vz);
      if (landing) y = y_end;  // squash the last ulp of roundoff
    }
    t += h;
    rec.points.push_back({t, y, z});
  }

  const Region final_region = classify_region(y, z, d);
  if (final_region == Region::UpperBranch) {
    rec.exit_branch = Branch::Upper;
  } else if (final_region == Region::LowerBranch) {
    rec.exit_branch = Branch::Lower;
  } else {
    // Beyond the wedge only the two bands carry amplitude; landing
    // anywhere else means the integration lost the beam.
    throw Error("numeric trajectory left the beam envelope");
  }
  return rec;
}

}  // namespace pwsg
