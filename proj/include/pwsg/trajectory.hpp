#pragma once

#include <vector>

#include "pwsg/wavefield.hpp"

namespace pwsg {

enum class Branch { Upper, Lower };

const char* branch_name(Branch b);

struct TrajectoryPoint {
  double t = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// One particle's path through a device.  Points are strictly increasing
/// in both t and y (the longitudinal drift never reverses).  For the
/// analytic engine the points are the segment breakpoints; the numeric
/// engine records every accepted step.
struct TrajectoryRecord {
  std::vector<TrajectoryPoint> points;
  Branch exit_branch = Branch::Upper;
  double z0 = 0.0;
  /// Set by the numeric engine when z0 is within its resolution of the
  /// critical line; branch assignment is then reported, not trusted.
  bool near_critical = false;

  /// Piecewise-linear position at time t (clamped to the recorded span).
  TrajectoryPoint at(double t) const;
};

/// Derived constants of the fork for given amplitudes:
///   delta_y   -- downstream reach of the overlap wedge, w k' / (2 kappa)
///   slope     -- transverse slope (|a+|^2 - |a-|^2) kappa / k' inside it
///   z_critical-- initial height -slope * delta_y separating up from down
///   p_plus_geometric -- 1/2 + slope * delta_y / w, the fraction of a
///                uniform packet above the critical line.  This equals
///                |a+|^2 identically, which is how the geometry reproduces
///                the Born rule without any randomness in the dynamics.
struct CriticalGeometry {
  double delta_y = 0.0;
  double slope = 0.0;
  double z_critical = 0.0;
  double p_plus_geometric = 0.0;
};

CriticalGeometry critical_geometry(const WaveField& f);

/// Exact propagation from (y_start, z0) at t = 0 to y = y_end, using the
/// region-wise constant velocities and exact boundary intersections.
/// Requires y_start < 0, y_end beyond the overlap wedge, |z0| <= w/2
/// (OutsidePacketError otherwise).  A particle aimed exactly at the
/// critical line is assigned Upper.
TrajectoryRecord propagate_analytic(double z0, const WaveField& f,
                                    double y_start, double y_end);

enum class VelocityMode {
  FiniteDifference,  // sample the wave and difference it (default)
  ClosedForm,        // per-region constants, for fast cross-checks
};

/// Independent check on the analytic engine: classical RK4 on the sampled
/// velocity field with time step dt.  A step that would jump a region
/// boundary is replaced by a straight probe whose crossing time is
/// bisected to the last bit, so the recorded point lands on the boundary
/// and the next step starts in the new region.
TrajectoryRecord propagate_numeric(
    double z0, const WaveField& f, double dt, double y_start, double y_end,
    VelocityMode mode = VelocityMode::FiniteDifference);

}  // namespace pwsg
