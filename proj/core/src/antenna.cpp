// SPDX-License-Identifier: Apache-2.0
#include "imteval/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "imteval/error.hpp"

namespace imteval::antenna {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void require_positive(std::string_view prefix, const char* name, double value) {
  if (!(value > 0.0)) throw ConfigInvalid(std::string(prefix) + "." + name, "must be > 0");
}

void require_count(std::string_view prefix, const char* name, int value) {
  if (value < 1 || value > 1024) {
    throw ConfigInvalid(std::string(prefix) + "." + name, "must be in [1, 1024]");
  }
}

// Co-phased array factor power over the elements of polarization 0,
// normalized so a single element gives 1.
double array_factor_power(const std::vector<ElementSite>& sites, double az_deg, double zen_deg) {
  const double st = std::sin(zen_deg * kDeg);
  const double ry = st * std::sin(az_deg * kDeg);
  const double rz = std::cos(zen_deg * kDeg);
  cdouble sum{0.0, 0.0};
  int count = 0;
  for (const auto& s : sites) {
    if (s.polarization != 0) continue;
    const double phase = 2.0 * std::numbers::pi * (s.y * ry + s.z * rz);
    sum += cdouble(std::cos(phase), std::sin(phase));
    ++count;
  }
  return std::norm(sum) / count;
}

struct Quadrature {
  double mean_power;
  double peak_power;
};

Quadrature integrate(const ArrayConfig& cfg, const ElementPattern& pattern, double step_deg) {
  if (!(step_deg > 0.0)) throw DomainError("grid resolution must be > 0");
  const double steps = 180.0 / step_deg;
  const long k_max = std::lround(steps);
  if (k_max < 2 || std::abs(steps - static_cast<double>(k_max)) > 1e-9) {
    throw DomainError("grid resolution must divide 180 degrees");
  }
  const auto sites = element_sites(cfg);
  const long l_max = 2 * k_max;
  const double h = step_deg * kDeg;
  double sum = 0.0;
  double peak = 0.0;
  for (long k = 0; k <= k_max; ++k) {
    const double zen = static_cast<double>(k) * step_deg;
    const double weight = (k == 0 || k == k_max) ? 0.5 : 1.0;
    const double sin_zen = std::sin(zen * kDeg);
    for (long l = 0; l < l_max; ++l) {
      const double az = -180.0 + static_cast<double>(l) * step_deg;
      const double p = db_to_linear(element_gain_unchecked(pattern, az, zen)) *
                       array_factor_power(sites, az, zen);
      sum += weight * sin_zen * p;
      peak = std::max(peak, p);
    }
  }
  return {sum * h * h / (4.0 * std::numbers::pi), peak};
}

}  // namespace

double element_gain_unchecked(const ElementPattern& pattern, double azimuth_deg,
                              double zenith_deg) noexcept {
  if (pattern.isotropic) return pattern.max_gain;
  const double a_h =
      -std::min(12.0 * std::pow(azimuth_deg / pattern.h_3db_beamwidth, 2), pattern.front_back_ratio);
  const double a_v = -std::min(12.0 * std::pow((zenith_deg - 90.0) / pattern.v_3db_beamwidth, 2),
                               pattern.sidelobe_limit);
  return pattern.max_gain - std::min(-(a_h + a_v), pattern.front_back_ratio);
}

double element_gain(const ElementPattern& pattern, double azimuth_deg, double zenith_deg) {
  if (!(azimuth_deg >= -180.0 && azimuth_deg <= 180.0)) {
    throw DomainError("azimuth " + std::to_string(azimuth_deg) + " outside [-180, 180]");
  }
  if (!(zenith_deg >= 0.0 && zenith_deg <= 180.0)) {
    throw DomainError("zenith " + std::to_string(zenith_deg) + " outside [0, 180]");
  }
  return element_gain_unchecked(pattern, azimuth_deg, zenith_deg);
}

Frame Frame::of(const Orientation& o) noexcept {
  return {std::cos(o.bearing * kDeg), std::sin(o.bearing * kDeg), std::cos(o.downtilt * kDeg),
          std::sin(o.downtilt * kDeg)};
}

LocalAngles to_local(const Frame& f, double x, double y, double z) noexcept {
  const double x1 = f.cos_bearing * x + f.sin_bearing * y;
  const double y1 = -f.sin_bearing * x + f.cos_bearing * y;
  const double x2 = f.cos_tilt * x1 - f.sin_tilt * z;
  const double z2 = f.sin_tilt * x1 + f.cos_tilt * z;
  const double zen = std::acos(std::clamp(z2, -1.0, 1.0)) / kDeg;
  const double az = std::atan2(y1, x2) / kDeg;
  return {az, zen};
}

LocalAngles to_local(const Orientation& o, double azimuth_deg, double zenith_deg) noexcept {
  const double st = std::sin(zenith_deg * kDeg);
  return to_local(Frame::of(o), st * std::cos(azimuth_deg * kDeg), st * std::sin(azimuth_deg * kDeg),
                  std::cos(zenith_deg * kDeg));
}

void ArrayConfig::validate(std::string_view prefix) const {
  require_count(prefix, "M", M);
  require_count(prefix, "N", N);
  require_count(prefix, "Mg", Mg);
  require_count(prefix, "Ng", Ng);
  require_count(prefix, "Mp", Mp);
  require_count(prefix, "Np", Np);
  if (P != 1 && P != 2) throw ConfigInvalid(std::string(prefix) + ".P", "must be 1 or 2");
  if (Mp > M) throw ConfigInvalid(std::string(prefix) + ".Mp", "must not exceed M");
  if (Np > N) throw ConfigInvalid(std::string(prefix) + ".Np", "must not exceed N");
  require_positive(prefix, "element_spacing_h", element_spacing_h);
  require_positive(prefix, "element_spacing_v", element_spacing_v);
  if (!(orientation.downtilt >= -90.0 && orientation.downtilt <= 90.0)) {
    throw ConfigInvalid(std::string(prefix) + ".downtilt", "must be in [-90, 90]");
  }
  if (!(orientation.bearing >= -360.0 && orientation.bearing <= 360.0)) {
    throw ConfigInvalid(std::string(prefix) + ".bearing", "must be in [-360, 360]");
  }
  if (!(electrical_tilt >= 0.0 && electrical_tilt <= 180.0)) {
    throw ConfigInvalid(std::string(prefix) + ".electrical_tilt", "must be in [0, 180]");
  }
  if (!pattern.isotropic) {
    require_positive(prefix, "h_3db_beamwidth", pattern.h_3db_beamwidth);
    require_positive(prefix, "v_3db_beamwidth", pattern.v_3db_beamwidth);
    if (!(pattern.front_back_ratio >= 0.0)) {
      throw ConfigInvalid(std::string(prefix) + ".front_back_ratio", "must be >= 0");
    }
    if (!(pattern.sidelobe_limit >= 0.0)) {
      throw ConfigInvalid(std::string(prefix) + ".sidelobe_limit", "must be >= 0");
    }
  }
}

int element_index(const ArrayConfig& c, int mg, int ng, int p, int m, int n) noexcept {
  return ((((mg * c.Ng + ng) * c.P + p) * c.M + m) * c.N) + n;
}

std::vector<ElementSite> element_sites(const ArrayConfig& c) {
  std::vector<ElementSite> sites(static_cast<std::size_t>(c.total_elements()));
  for (int mg = 0; mg < c.Mg; ++mg) {
    for (int ng = 0; ng < c.Ng; ++ng) {
      for (int p = 0; p < c.P; ++p) {
        const double slant = c.P == 1 ? 0.0 : (p == 0 ? 45.0 : -45.0);
        for (int m = 0; m < c.M; ++m) {
          for (int n = 0; n < c.N; ++n) {
            auto& s = sites[static_cast<std::size_t>(element_index(c, mg, ng, p, m, n))];
            s.y = (ng * c.N + n) * c.element_spacing_h;
            s.z = (mg * c.M + m) * c.element_spacing_v;
            s.slant_deg = slant;
            s.polarization = p;
          }
        }
      }
    }
  }
  return sites;
}

std::vector<cdouble> array_response(const ArrayConfig& cfg, double azimuth_deg, double zenith_deg) {
  const auto local = to_local(cfg.orientation, azimuth_deg, zenith_deg);
  const double st = std::sin(local.zenith * kDeg);
  const double ry = st * std::sin(local.azimuth * kDeg);
  const double rz = std::cos(local.zenith * kDeg);
  const auto sites = element_sites(cfg);
  std::vector<cdouble> out;
  out.reserve(sites.size());
  for (const auto& s : sites) {
    out.push_back(std::polar(1.0, 2.0 * std::numbers::pi * (s.y * ry + s.z * rz)));
  }
  return out;
}

double directivity(const ArrayConfig& cfg, const ElementPattern& pattern, double grid_resolution_deg) {
  const auto q = integrate(cfg, pattern, grid_resolution_deg);
  return 10.0 * std::log10(q.peak_power / q.mean_power);
}

double radiated_power(const ArrayConfig& cfg, const ElementPattern& pattern,
                      double grid_resolution_deg) {
  return integrate(cfg, pattern, grid_resolution_deg).mean_power;
}

std::vector<cdouble> TxruMapping::apply(std::span<const cdouble> port_signals) const {
  if (port_signals.size() != ports.size()) {
    throw MappingError("expected " + std::to_string(ports.size()) + " port signals, got " +
                       std::to_string(port_signals.size()));
  }
  std::vector<cdouble> out(static_cast<std::size_t>(element_count));
  for (std::size_t i = 0; i < ports.size(); ++i) {
    for (const auto& [element, w] : ports[i].weights) {
      out[static_cast<std::size_t>(element)] += w * port_signals[i];
    }
  }
  return out;
}

TxruMapping map_txru(const ArrayConfig& c) {
  if (c.Mp < 1 || c.Np < 1 || c.M % c.Mp != 0 || c.N % c.Np != 0) {
    throw MappingError("port grid (" + std::to_string(c.Mp) + "," + std::to_string(c.Np) +
                       ") does not partition panel (" + std::to_string(c.M) + "," +
                       std::to_string(c.N) + ")");
  }
  TxruMapping map;
  map.vertical_span = c.M / c.Mp;
  map.horizontal_span = c.N / c.Np;
  map.element_count = c.total_elements();
  const int k = map.vertical_span * map.horizontal_span;
  const double amplitude = 1.0 / std::sqrt(static_cast<double>(k));
  const double tilt_cos = std::cos(c.electrical_tilt * kDeg);
  for (int mg = 0; mg < c.Mg; ++mg) {
    for (int ng = 0; ng < c.Ng; ++ng) {
      for (int p = 0; p < c.P; ++p) {
        for (int mp = 0; mp < c.Mp; ++mp) {
          for (int np = 0; np < c.Np; ++np) {
            TxruPort port;
            port.panel = mg * c.Ng + ng;
            port.polarization = p;
            port.row = mp * map.vertical_span;
            port.col = np * map.horizontal_span;
            for (int dm = 0; dm < map.vertical_span; ++dm) {
              const double phase = -2.0 * std::numbers::pi * c.element_spacing_v * dm * tilt_cos;
              for (int dn = 0; dn < map.horizontal_span; ++dn) {
                port.weights.emplace_back(
                    element_index(c, mg, ng, p, port.row + dm, port.col + dn),
                    std::polar(amplitude, phase));
              }
            }
            map.ports.push_back(std::move(port));
          }
        }
      }
    }
  }
  return map;
}

double subarray_gain(const ArrayConfig& c, double local_azimuth_deg, double local_zenith_deg) {
  const int kv = std::max(1, c.M / std::max(1, c.Mp));
  const int kh = std::max(1, c.N / std::max(1, c.Np));
  if (kv == 1 && kh == 1) return 0.0;
  const double st = std::sin(local_zenith_deg * kDeg);
  const double ry = st * std::sin(local_azimuth_deg * kDeg);
  const double rz = std::cos(local_zenith_deg * kDeg);
  const double tilt_cos = std::cos(c.electrical_tilt * kDeg);
  cdouble sum{0.0, 0.0};
  for (int dm = 0; dm < kv; ++dm) {
    for (int dn = 0; dn < kh; ++dn) {
      const double phase = 2.0 * std::numbers::pi *
                           (dn * c.element_spacing_h * ry + dm * c.element_spacing_v * (rz - tilt_cos));
      sum += std::polar(1.0, phase);
    }
  }
  return 10.0 * std::log10(std::norm(sum) / (kv * kh));
}

std::vector<ElementSite> port_sites(const ArrayConfig& c) {
  const int kv = c.M / c.Mp;
  const int kh = c.N / c.Np;
  std::vector<ElementSite> sites;
  sites.reserve(static_cast<std::size_t>(c.ports()));
  for (int mg = 0; mg < c.Mg; ++mg) {
    for (int ng = 0; ng < c.Ng; ++ng) {
      for (int p = 0; p < c.P; ++p) {
        const double slant = c.P == 1 ? 0.0 : (p == 0 ? 45.0 : -45.0);
        for (int mp = 0; mp < c.Mp; ++mp) {
          for (int np = 0; np < c.Np; ++np) {
            sites.push_back({(ng * c.N + np * kh) * c.element_spacing_h,
                             (mg * c.M + mp * kv) * c.element_spacing_v, slant, p});
          }
        }
      }
    }
  }
  return sites;
}

double port_gain(const ArrayConfig& c, double local_azimuth_deg, double local_zenith_deg) {
  return element_gain_unchecked(c.pattern, local_azimuth_deg, local_zenith_deg) +
         subarray_gain(c, local_azimuth_deg, local_zenith_deg);
}

}  // namespace imteval::antenna
