#include "pwsg/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace pwsg {

namespace {

// Map physics coordinates (y right, z up) onto the SVG canvas (x right,
// y down) with a fixed margin.
struct Canvas {
  double y0, y1, z0, z1;  // physics window
  double width, height, margin;

  double sx(double y) const {
    return margin + (y - y0) / (y1 - y0) * (width - 2.0 * margin);
  }
  double sy(double z) const {
    return margin + (z1 - z) / (z1 - z0) * (height - 2.0 * margin);
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void line(std::ostringstream& out, const Canvas& c, double ya, double za,
          double yb, double zb, const char* style) {
  out << "<line x1=\"" << num(c.sx(ya)) << "\" y1=\"" << num(c.sy(za))
      << "\" x2=\"" << num(c.sx(yb)) << "\" y2=\"" << num(c.sy(zb)) << "\" "
      << style << "/>\n";
}

}  // namespace

std::string emit_svg(std::span<const TrajectoryRecord> trajectories,
                     const WaveField& field, double y_start, double y_end) {
  const DeviceConfig& d = field.device();
  const double half = 0.5 * d.w;
  const double slope = d.deflection_slope();
  const double reach = d.overlap_extent();
  const double z_max = slope * y_end + half;

  Canvas c{y_start, y_end, -z_max, z_max, 900.0, 480.0, 24.0};

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c.width
      << "\" height=\"" << c.height << "\" viewBox=\"0 0 " << c.width << " "
      << c.height << "\">\n";
  out << "<rect width=\"" << c.width << "\" height=\"" << c.height
      << "\" fill=\"white\"/>\n";

  const char* envelope = "stroke=\"#999999\" stroke-width=\"1\"";
  // Incident packet edges up to the field plane.
  line(out, c, y_start, half, 0.0, half, envelope);
  line(out, c, y_start, -half, 0.0, -half, envelope);
  // Deflected band edges downstream.
  line(out, c, 0.0, half, y_end, slope * y_end + half, envelope);
  line(out, c, 0.0, -half, y_end, slope * y_end - half, envelope);
  line(out, c, 0.0, half, y_end, -slope * y_end + half, envelope);
  line(out, c, 0.0, -half, y_end, -slope * y_end - half, envelope);
  // Field plane marker.
  line(out, c, 0.0, -z_max, 0.0, z_max,
       "stroke=\"#cccccc\" stroke-width=\"1\" stroke-dasharray=\"2,4\"");
  // The overlap wedge: both sloped boundaries end on the axis at `reach`.
  const char* wedge = "stroke=\"#5577aa\" stroke-width=\"1.2\"";
  line(out, c, 0.0, half, reach, 0.0, wedge);
  line(out, c, 0.0, -half, reach, 0.0, wedge);

  // The critical trajectory: straight to the wedge apex.
  const CriticalGeometry g = critical_geometry(field);
  out << "<polyline fill=\"none\" stroke=\"#cc3333\" stroke-width=\"1.2\" "
         "stroke-dasharray=\"6,3\" points=\""
      << num(c.sx(y_start)) << "," << num(c.sy(g.z_critical)) << " "
      << num(c.sx(0.0)) << "," << num(c.sy(g.z_critical)) << " "
      << num(c.sx(reach)) << "," << num(c.sy(0.0)) << "\"/>\n";

  for (const TrajectoryRecord& rec : trajectories) {
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" "
           "points=\"";
    for (std::size_t i = 0; i < rec.points.size(); ++i) {
      if (i) out << " ";
      out << num(c.sx(rec.points[i].y)) << "," << num(c.sy(rec.points[i].z));
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace pwsg
