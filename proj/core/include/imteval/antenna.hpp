// SPDX-License-Identifier: Apache-2.0
#pragma once

// Element radiation patterns, planar panel arrays, directivity quadrature and
// TXRU (port to element) mapping.
//
// Angle conventions: azimuth in degrees in [-180, 180] measured from the
// array boresight (x axis) toward +y; zenith in degrees in [0, 180] from +z.
// Element positions are in wavelengths in the array's y-z plane.

#include <complex>
#include <span>
#include <string_view>
#include <vector>

namespace imteval::antenna {

using cdouble = std::complex<double>;

/// Parametric sector pattern (or isotropic). All values in dB / degrees.
struct ElementPattern {
  double max_gain = 0.0;
  double h_3db_beamwidth = 65.0;
  double v_3db_beamwidth = 65.0;
  double front_back_ratio = 30.0;  // A_m
  double sidelobe_limit = 30.0;    // SLA_v
  bool isotropic = false;

  static ElementPattern make_isotropic(double gain_dbi = 0.0) {
    ElementPattern p;
    p.max_gain = gain_dbi;
    p.isotropic = true;
    return p;
  }
  friend bool operator==(const ElementPattern&, const ElementPattern&) = default;
};

/// Gain in dBi toward (azimuth, zenith). Throws DomainError outside the ranges.
double element_gain(const ElementPattern& pattern, double azimuth_deg, double zenith_deg);

/// Same formula without range checks; angles are wrapped by the caller.
double element_gain_unchecked(const ElementPattern& pattern, double azimuth_deg,
                              double zenith_deg) noexcept;

struct Orientation {
  double bearing = 0.0;   // degrees, rotation about z
  double downtilt = 0.0;  // degrees, positive tilts boresight toward the ground
  friend bool operator==(const Orientation&, const Orientation&) = default;
};

struct LocalAngles {
  double azimuth;  // degrees in (-180, 180]
  double zenith;   // degrees in [0, 180]
};

/// Global direction expressed in the frame of an array with `orientation`.
LocalAngles to_local(const Orientation& orientation, double azimuth_deg, double zenith_deg) noexcept;

/// Rotation of an orientation, precomputed for repeated conversions.
struct Frame {
  double cos_bearing = 1.0, sin_bearing = 0.0;
  double cos_tilt = 1.0, sin_tilt = 0.0;
  static Frame of(const Orientation& o) noexcept;
};

/// Global unit vector (x, y, z) expressed in a frame.
LocalAngles to_local(const Frame& frame, double x, double y, double z) noexcept;

/// Panel array (M, N, P, Mg, Ng; Mp, Np).
struct ArrayConfig {
  int M = 1;   // rows (vertical) per panel
  int N = 1;   // columns (horizontal) per panel
  int P = 1;   // polarizations, 1 = vertical, 2 = +/-45 slant
  int Mg = 1;  // panel rows
  int Ng = 1;  // panel columns
  int Mp = 1;  // TXRU rows per panel and polarization
  int Np = 1;  // TXRU columns per panel and polarization
  double element_spacing_h = 0.5;  // wavelengths
  double element_spacing_v = 0.8;  // wavelengths
  Orientation orientation{};
  double electrical_tilt = 90.0;  // zenith steering of each TXRU subarray, degrees
  ElementPattern pattern{};

  int total_elements() const noexcept { return M * N * P * Mg * Ng; }
  int ports() const noexcept { return Mp * Np * P * Mg * Ng; }
  /// Throws ConfigInvalid naming `prefix`.<field>.
  void validate(std::string_view prefix) const;
  friend bool operator==(const ArrayConfig&, const ArrayConfig&) = default;
};

struct ElementSite {
  double y;               // wavelengths
  double z;               // wavelengths
  double slant_deg;       // polarization slant angle
  int polarization;       // 0 or 1
};

/// Element index = ((((mg*Ng + ng)*P + p)*M + m)*N + n).
int element_index(const ArrayConfig& cfg, int mg, int ng, int p, int m, int n) noexcept;
std::vector<ElementSite> element_sites(const ArrayConfig& cfg);

/// Unit-modulus steering vector, one entry per element, for a plane wave
/// from global direction (azimuth, zenith).
std::vector<cdouble> array_response(const ArrayConfig& cfg, double azimuth_deg, double zenith_deg);

/// Peak over sphere-average radiated power of the co-phased array built from
/// the first polarization's elements, by trapezoidal quadrature on a
/// `grid_resolution_deg` grid. Throws DomainError unless the step divides 180.
double directivity(const ArrayConfig& cfg, const ElementPattern& pattern,
                   double grid_resolution_deg);

/// Total radiated power (linear, relative to isotropic) from the same quadrature.
double radiated_power(const ArrayConfig& cfg, const ElementPattern& pattern,
                      double grid_resolution_deg);

/// One TXRU port driving a contiguous vertical subarray.
struct TxruPort {
  int panel = 0;
  int polarization = 0;
  int row = 0;  // first element row
  int col = 0;  // first element column
  std::vector<std::pair<int, cdouble>> weights;  // (element index, weight)
};

struct TxruMapping {
  int vertical_span = 1;
  int horizontal_span = 1;
  int element_count = 0;
  std::vector<TxruPort> ports;

  /// Per-element excitation for the given per-port signals.
  std::vector<cdouble> apply(std::span<const cdouble> port_signals) const;
};

/// Partition each panel into Mp x Np subarrays per polarization with equal
/// amplitude and a progressive vertical phase for `cfg.electrical_tilt`.
/// Throws MappingError when the port grid does not divide the panel.
TxruMapping map_txru(const ArrayConfig& cfg);

/// Gain in dB of one TXRU subarray toward a local direction (0 dB for a
/// single-element port).
double subarray_gain(const ArrayConfig& cfg, double local_azimuth_deg, double local_zenith_deg);

/// One site per TXRU port, at the position of the subarray's first element,
/// in port order (panel, polarization, row, column).
std::vector<ElementSite> port_sites(const ArrayConfig& cfg);

/// Element gain plus subarray gain in dBi toward a local direction.
double port_gain(const ArrayConfig& cfg, double local_azimuth_deg, double local_zenith_deg);

}  // namespace imteval::antenna
