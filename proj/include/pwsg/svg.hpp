#pragma once

#include <span>
#include <string>

#include "pwsg/trajectory.hpp"

namespace pwsg {

/// Static SVG diagram of trajectories through one device: beam envelopes,
/// the overlap wedge, one polyline per trajectory, and the critical
/// trajectory dashed.  All numbers are printed with fixed precision, so
/// the same inputs always give the same bytes.  An empty trajectory list
/// draws the geometry alone.
std::string emit_svg(std::span<const TrajectoryRecord> trajectories,
                     const WaveField& field, double y_start, double y_end);

}  // namespace pwsg
