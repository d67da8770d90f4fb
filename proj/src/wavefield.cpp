#include "pwsg/wavefield.hpp"

#include <cmath>
#include <stdexcept>

#include "pwsg/errors.hpp"

namespace pwsg {

namespace {

constexpr double kZeroDensity = 1e-30;

DeviceConfig make_device(MeasurementAxis axis, Polarity polarity, double w,
                         double k, double kappa,
                         std::optional<double> packet_length) {
  if (!(w > 0.0) || !std::isfinite(w))
    throw std::invalid_argument("packet width must be positive");
  if (!std::isfinite(k) || !std::isfinite(kappa))
    throw std::invalid_argument("wavenumbers must be finite");
  if (!(kappa > 0.0 && kappa < k))
    throw std::invalid_argument("kappa must satisfy 0 < kappa < k");
  DeviceConfig d;
  d.axis = axis;
  d.polarity = polarity;
  d.w = w;
  d.k = k;
  d.kappa = kappa;
  d.k_prime = std::sqrt(k * k - kappa * kappa);
  d.packet_length = packet_length;
  return d;
}

}  // namespace

DeviceConfig::DeviceConfig() : k_prime(std::sqrt(k * k - kappa * kappa)) {}

DeviceConfig DeviceConfig::from_wavenumbers(
    MeasurementAxis axis, Polarity polarity, double w, double k, double kappa,
    std::optional<double> packet_length) {
  return make_device(axis, polarity, w, k, kappa, packet_length);
}

DeviceConfig DeviceConfig::from_physical(MeasurementAxis axis,
                                         Polarity polarity, double w, double k,
                                         double m_mass, double mu, double b,
                                         std::optional<double> packet_length) {
  if (!(m_mass > 0.0) || !(mu > 0.0) || !(b > 0.0))
    throw std::invalid_argument("m, mu, b must be positive");
  return make_device(axis, polarity, w, k, m_mass * mu * b / k, packet_length);
}

std::vector<std::string> DeviceConfig::validity_warnings() const {
  std::vector<std::string> out;
  if (kappa / k > 0.1)
    out.push_back(
        "kappa/k = " + std::to_string(kappa / k) +
        " exceeds 0.1: deflection is not gentle, the impulsive model is "
        "stretched");
  if (kappa * w > 0.1)
    out.push_back(
        "kappa*w = " + std::to_string(kappa * w) +
        " exceeds 0.1: transverse phase varies across the packet, the "
        "sharp-edge matching is approximate");
  return out;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::Incident: return "Incident";
    case Region::Overlap: return "Overlap";
    case Region::UpperBranch: return "UpperBranch";
    case Region::LowerBranch: return "LowerBranch";
    case Region::Vacuum: return "Vacuum";
  }
  return "?";
}

Region classify_region(double y, double z, const DeviceConfig& d) {
  const double half = 0.5 * d.w;
  if (y < 0.0) return std::abs(z) <= half ? Region::Incident : Region::Vacuum;
  const double shift = d.deflection_slope() * y;
  const bool in_upper = z >= shift - half && z <= shift + half;
  const bool in_lower = z >= -shift - half && z <= -shift + half;
  if (in_upper && in_lower) return Region::Overlap;
  if (in_upper) return Region::UpperBranch;
  if (in_lower) return Region::LowerBranch;
  return Region::Vacuum;
}

double PsiValue::norm_squared() const {
  return std::norm(plus) + std::norm(minus);
}

WaveField::WaveField(DeviceConfig device, complexd a_plus, complexd a_minus)
    : device_(device), a_plus_(a_plus), a_minus_(a_minus) {
  const double n = std::norm(a_plus_) + std::norm(a_minus_);
  if (std::abs(n - 1.0) > 1e-12)
    throw std::invalid_argument("wavefield amplitudes must be normalized");
}

WaveField::WaveField(DeviceConfig device, const Spinor& incident)
    : device_(device) {
  const auto [cp, cm] = decompose(incident, device.axis);
  a_plus_ = cp;
  a_minus_ = cm;
}

PsiValue WaveField::psi(double y, double z) const {
  const double half = 0.5 * device_.w;
  constexpr complexd i{0.0, 1.0};
  if (y < 0.0) {
    if (std::abs(z) > half) return {};
    const complexd ph = std::exp(i * device_.k * y);
    return {ph * a_plus_, ph * a_minus_};
  }
  const double shift = device_.deflection_slope() * y;
  const bool in_upper = z >= shift - half && z <= shift + half;
  const bool in_lower = z >= -shift - half && z <= -shift + half;
  if (!in_upper && !in_lower) return {};
  const complexd ph = std::exp(i * device_.k_prime * y);
  PsiValue v;
  if (in_upper) v.plus = ph * std::exp(i * device_.kappa * z) * a_plus_;
  if (in_lower) v.minus = ph * std::exp(-i * device_.kappa * z) * a_minus_;
  return v;
}

Velocity WaveField::velocity(double y, double z) const {
  const double p = std::norm(a_plus_);
  const double q = std::norm(a_minus_);
  switch (classify_region(y, z, device_)) {
    case Region::Incident:
      return {device_.k, 0.0};
    case Region::Overlap:
      // Both plane-wave terms contribute; the density is p + q = 1 and the
      // transverse current is the amplitude-weighted mix of the two kicks.
      return {device_.k_prime, device_.kappa * (p - q)};
    case Region::UpperBranch:
      if (p < kZeroDensity)
        throw ZeroAmplitudeError("wave vanishes in the upper branch");
      return {device_.k_prime, device_.kappa};
    case Region::LowerBranch:
      if (q < kZeroDensity)
        throw ZeroAmplitudeError("wave vanishes in the lower branch");
      return {device_.k_prime, -device_.kappa};
    case Region::Vacuum:
      break;
  }
  throw ZeroAmplitudeError("guidance velocity undefined in vacuum");
}

Velocity guidance_velocity_fd(
    const std::function<PsiValue(double, double)>& psi_fn, double y, double z,
    double step) {
  const PsiValue c = psi_fn(y, z);
  const double rho = c.norm_squared();
  if (rho < kZeroDensity)
    throw ZeroAmplitudeError("guidance velocity undefined: zero density");
  const PsiValue yp = psi_fn(y + step, z);
  const PsiValue ym = psi_fn(y - step, z);
  const PsiValue zp = psi_fn(y, z + step);
  const PsiValue zm = psi_fn(y, z - step);
  const double inv = 1.0 / (2.0 * step);
  const complexd dy_plus = (yp.plus - ym.plus) * inv;
  const complexd dy_minus = (yp.minus - ym.minus) * inv;
  const complexd dz_plus = (zp.plus - zm.plus) * inv;
  const complexd dz_minus = (zp.minus - zm.minus) * inv;
  const double jy =
      std::imag(std::conj(c.plus) * dy_plus + std::conj(c.minus) * dy_minus);
  const double jz =
      std::imag(std::conj(c.plus) * dz_plus + std::conj(c.minus) * dz_minus);
  return {jy / rho, jz / rho};
}

Velocity WaveField::velocity_numeric(double y, double z, double step) const {
  // Shrink the stencil until all four offset points see the same region as
  // the center; the wave has sharp edges and a difference across one is
  // meaningless.  On (or within machine reach of) a boundary there is no
  // usable stencil, so fall back to the closed form.
  const Region center = classify_region(y, z, device_);
  double h = step;
  const double h_min = step / 1024.0;
  while (h >= h_min) {
    if (classify_region(y + h, z, device_) == center &&
        classify_region(y - h, z, device_) == center &&
        classify_region(y, z + h, device_) == center &&
        classify_region(y, z - h, device_) == center) {
      return guidance_velocity_fd(
          [this](double yy, double zz) { return psi(yy, zz); }, y, z, h);
    }
    h *= 0.5;
  }
  return velocity(y, z);
}

}  // namespace pwsg
