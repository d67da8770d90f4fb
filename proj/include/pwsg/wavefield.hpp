#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pwsg/spinor.hpp"

namespace pwsg {

enum class Polarity { Standard, Reversed };

/// Geometry and field strength of one Stern-Gerlach device, in units with
/// hbar = m = 1.  The incident packet is a top-hat of width w drifting in
/// +y with wavenumber k; the impulsive field at y = 0 kicks the two spin
/// components by -+kappa in z, after which they drift with longitudinal
/// wavenumber k_prime = sqrt(k^2 - kappa^2).
struct DeviceConfig {
  MeasurementAxis axis{};
  Polarity polarity = Polarity::Standard;
  double w = 1.0;
  double k = 100.0;
  double kappa = 5.0;
  double k_prime;  // derived
  std::optional<double> packet_length;  // longitudinal extent, metadata only

  DeviceConfig();  // the documented defaults, k_prime included

  static DeviceConfig from_wavenumbers(
      MeasurementAxis axis, Polarity polarity, double w, double k,
      double kappa, std::optional<double> packet_length = std::nullopt);

  /// Same, with kappa derived from particle mass, magnetic moment and
  /// field gradient: kappa = m_mass * mu * b / k.
  static DeviceConfig from_physical(
      MeasurementAxis axis, Polarity polarity, double w, double k,
      double m_mass, double mu, double b,
      std::optional<double> packet_length = std::nullopt);

  /// Transverse slope kappa / k_prime of the deflected beams.
  double deflection_slope() const { return kappa / k_prime; }

  /// Downstream extent w * k_prime / (2 * kappa) of the region where the
  /// two deflected packets still overlap.
  double overlap_extent() const { return 0.5 * w * k_prime / kappa; }

  /// The model assumes a gentle field (kappa << k) and a packet narrow on
  /// the transverse phase scale (kappa * w << 1).  Returns human-readable
  /// notes when either ratio looks large; never an error.
  std::vector<std::string> validity_warnings() const;
};

/// Where a point sits relative to the beams.  Boundary points are assigned
/// to the first matching entry in the order Overlap, UpperBranch,
/// LowerBranch, Incident.
enum class Region { Incident, Overlap, UpperBranch, LowerBranch, Vacuum };

const char* region_name(Region r);

Region classify_region(double y, double z, const DeviceConfig& d);

/// Value of the two-component wave at a point, in the device basis.
struct PsiValue {
  complexd plus{};
  complexd minus{};
  double norm_squared() const;
};

struct Velocity {
  double vy = 0.0;
  double vz = 0.0;
};

/// The piecewise-analytic guiding wave behind one device, with amplitudes
/// already expressed in the device basis.  Polarity is *not* applied here:
/// a_plus always rides the up-deflected packet.  Callers that model a
/// reversed-polarity device swap amplitudes before constructing the field
/// and reinterpret the exit branch afterwards.
class WaveField {
 public:
  WaveField(DeviceConfig device, complexd a_plus, complexd a_minus);
  WaveField(DeviceConfig device, const Spinor& incident);

  const DeviceConfig& device() const { return device_; }
  complexd a_plus() const { return a_plus_; }
  complexd a_minus() const { return a_minus_; }

  // Upstream of the field the packet is e^{iky} (a+, a-).  Downstream each
  // component becomes e^{ik'y} e^{+-i kappa z} confined to its own band.
  // The impulsive matching at y = 0 also produces a weak reflected wave
  // (relative amplitude of order i*kappa*z across the packet); it is
  // negligible in the gentle-field regime and omitted from the model.
  PsiValue psi(double y, double z) const;

  /// Guidance velocity j / rho at a point, from the closed-form wave.
  /// Throws ZeroAmplitudeError where the wave vanishes.
  Velocity velocity(double y, double z) const;

  /// Same quantity, but evaluated by central finite differences of psi
  /// with the given step.  The step shrinks automatically when the stencil
  /// would straddle a region boundary (the wave is discontinuous there);
  /// if no usable stencil remains the closed form is returned.
  Velocity velocity_numeric(double y, double z, double step) const;

 private:
  DeviceConfig device_;
  complexd a_plus_;
  complexd a_minus_;
};

/// Guidance law applied to an arbitrary two-component field by central
/// finite differences: v = Im(psi^dag grad psi) / (psi^dag psi), the spin
/// index summed in both products.  Multiplying the field by any nonzero
/// complex constant leaves the result unchanged.
Velocity guidance_velocity_fd(
    const std::function<PsiValue(double, double)>& psi_fn, double y, double z,
    double step);

}  // namespace pwsg
