// SPDX-License-Identifier: Apache-2.0
#include "imteval/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "imteval/error.hpp"

namespace imteval::channel {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// Spread limits applied to log-normal angle spread draws, degrees.
constexpr double kMaxAzimuthSpread = 104.0;
constexpr double kMaxZenithSpread = 52.0;

struct ScalingPoint {
  int clusters;
  double value;
};

// Angle scaling factors by cluster count for azimuth and zenith generation.
constexpr ScalingPoint kAzimuthScaling[] = {{4, 0.779},  {5, 0.860},  {8, 1.018},  {10, 1.090},
                                            {11, 1.123}, {12, 1.146}, {14, 1.190}, {15, 1.211},
                                            {16, 1.226}, {19, 1.273}, {20, 1.289}, {25, 1.358}};
constexpr ScalingPoint kZenithScaling[] = {{8, 0.889},  {10, 0.957}, {11, 1.031}, {12, 1.104},
                                           {15, 1.1088}, {19, 1.184}, {20, 1.178}, {25, 1.282}};

template <std::size_t N>
double scaling(const ScalingPoint (&table)[N], int n) {
  if (n <= table[0].clusters) return table[0].value;
  for (std::size_t i = 1; i < N; ++i) {
    if (n <= table[i].clusters) {
      const double w = static_cast<double>(n - table[i - 1].clusters) /
                       static_cast<double>(table[i].clusters - table[i - 1].clusters);
      return table[i - 1].value + w * (table[i].value - table[i - 1].value);
    }
  }
  return table[N - 1].value;
}

double wrap_azimuth(double deg) {
  double a = std::fmod(deg + 180.0, 360.0);
  if (a <= 0.0) a += 360.0;
  return a - 180.0;
}

double wrap_zenith(double deg) {
  double a = std::fmod(deg, 360.0);
  if (a < 0.0) a += 360.0;
  return a > 180.0 ? 360.0 - a : a;
}

double clamp_spread(double log_value, double limit) {
  return std::min(std::pow(10.0, log_value), limit);
}

struct Direction {
  double x, y, z;
};

Direction unit(double azimuth_deg, double zenith_deg) {
  const double st = std::sin(zenith_deg * kDeg);
  return {st * std::cos(azimuth_deg * kDeg), st * std::sin(azimuth_deg * kDeg),
          std::cos(zenith_deg * kDeg)};
}

// Field pattern and array phases of one end of a link toward a direction.
struct EndResponse {
  std::array<double, 2> field_theta{};
  std::array<double, 2> field_phi{};
  std::vector<cdouble> phase;
};

EndResponse respond(const PortArray& a, double azimuth_deg, double zenith_deg) {
  EndResponse r;
  const auto local = antenna::to_local(a.array.orientation, azimuth_deg, zenith_deg);
  const double gain_db = a.subarray
                             ? antenna::port_gain(a.array, local.azimuth, local.zenith)
                             : antenna::element_gain_unchecked(a.array.pattern, local.azimuth,
                                                               local.zenith);
  const double amp = std::isfinite(gain_db) ? std::pow(10.0, gain_db / 20.0) : 0.0;
  // Polarization slant by polarization index; the rotation between local and
  // global field components is neglected.
  for (const auto& s : a.sites) {
    const auto p = static_cast<std::size_t>(s.polarization);
    r.field_theta[p] = amp * std::cos(s.slant_deg * kDeg);
    r.field_phi[p] = amp * std::sin(s.slant_deg * kDeg);
  }
  const double st = std::sin(local.zenith * kDeg);
  const double ry = st * std::sin(local.azimuth * kDeg);
  const double rz = std::cos(local.zenith * kDeg);
  r.phase.reserve(a.sites.size());
  for (const auto& s : a.sites) r.phase.push_back(std::polar(1.0, 2.0 * kPi * (s.y * ry + s.z * rz)));
  return r;
}

double doppler(const ChannelRealization& real, double aoa, double zoa) {
  const double v = real.speed / 3.6;
  if (v == 0.0 || real.carrier <= 0.0) return 0.0;
  const auto r = unit(aoa, zoa);
  const double along = r.x * std::cos(real.direction) + r.y * std::sin(real.direction);
  return along * v * real.carrier / kSpeedOfLight;
}

}  // namespace

const std::array<double, 20> kRayOffsets = {
    0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715, -0.3715, 0.5129, -0.5129,
    0.6797, -0.6797, 0.8844, -0.8844, 1.1481, -1.1481, 1.5195, -1.5195, 2.1551, -2.1551};

void ConditionProfile::prepare(const std::string& field_prefix) {
  const std::string field = field_prefix + ".correlation";
  for (int i = 0; i < kLspCount; ++i) {
    if (correlation(i, i) != 1.0) throw ConfigInvalid(field, "diagonal must be 1");
    for (int j = 0; j < i; ++j) {
      if (correlation(i, j) != correlation(j, i)) throw ConfigInvalid(field, "must be symmetric");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, kLspCount, kLspCount>> eig(correlation);
  if (eig.eigenvalues().minCoeff() < -1e-10) {
    throw ConfigInvalid(field, "matrix is not positive semi-definite");
  }
  // A small ridge keeps the factorization defined for singular matrices.
  Eigen::Matrix<double, kLspCount, kLspCount> ridge = correlation;
  ridge.diagonal().array() += 1e-12;
  Eigen::LLT<Eigen::Matrix<double, kLspCount, kLspCount>> llt(ridge);
  if (llt.info() != Eigen::Success) throw ConfigInvalid(field, "factorization failed");
  factor = llt.matrixL();
}

const ConditionProfile& ChannelProfile::condition(Condition c) const noexcept {
  switch (c) {
    case Condition::LOS:
      return los;
    case Condition::O2I:
      return has_o2i ? o2i : nlos;
    default:
      return nlos;
  }
}

double los_probability(LosModel model, double d2d) noexcept {
  const double d = std::max(0.0, d2d);
  switch (model) {
    case LosModel::UMa:
      if (d <= 18.0) return 1.0;
      return 18.0 / d + std::exp(-d / 63.0) * (1.0 - 18.0 / d);
    case LosModel::UMi:
      if (d <= 18.0) return 1.0;
      return 18.0 / d + std::exp(-d / 36.0) * (1.0 - 18.0 / d);
    case LosModel::RMa:
      if (d <= 10.0) return 1.0;
      return std::exp(-(d - 10.0) / 1000.0);
    case LosModel::InH:
      if (d <= 1.2) return 1.0;
      if (d < 6.5) return std::exp(-(d - 1.2) / 4.7);
      return std::exp(-(d - 6.5) / 32.6) * 0.32;
    case LosModel::AlwaysLos:
      return 1.0;
    case LosModel::NeverLos:
      return d == 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

PropagationCondition assign_los(const ChannelProfile& profile, double d2d, RngStream& rng) {
  const double p = los_probability(profile.los_model, d2d);
  return {rng.uniform() < p, p};
}

double free_space_1m(double fc_hz) noexcept {
  return 20.0 * std::log10(4.0 * kPi * fc_hz / kSpeedOfLight);
}

double breakpoint_distance(const ChannelProfile& p, double fc_hz, double h_bs, double h_ut) noexcept {
  switch (p.breakpoint) {
    case BreakpointModel::Standard: {
      const double d = 4.0 * (h_bs - p.env_height) * (h_ut - p.env_height) * fc_hz / kSpeedOfLight;
      return d > 0.0 ? d : std::numeric_limits<double>::infinity();
    }
    case BreakpointModel::Rural:
      return 2.0 * kPi * h_bs * h_ut * fc_hz / kSpeedOfLight;
    case BreakpointModel::None:
      break;
  }
  return std::numeric_limits<double>::infinity();
}

double pathloss(const ChannelProfile& profile, bool los, double fc_hz, double d3d, double h_bs,
                double h_ut) {
  if (!(d3d >= profile.min_distance)) {
    throw DomainError("3D distance " + std::to_string(d3d) + " m below the profile minimum of " +
                      std::to_string(profile.min_distance) + " m");
  }
  const double fs = free_space_1m(fc_hz);
  const double bp = std::max(breakpoint_distance(profile, fc_hz, h_bs, h_ut), profile.min_distance);
  const auto& l = profile.los;
  const double los_pl = d3d <= bp ? fs + 10.0 * l.pl_exponent * std::log10(d3d)
                                  : fs + 10.0 * l.pl_exponent * std::log10(bp) +
                                        10.0 * l.pl_exponent_far * std::log10(d3d / bp);
  if (los) return los_pl;
  const auto& n = profile.nlos;
  return std::max(los_pl, fs + n.pl_offset + 10.0 * n.pl_exponent * std::log10(d3d));
}

double pathloss(const ChannelProfile& profile, bool los, double fc_hz, geometry::Vec3 tx,
                geometry::Vec3 rx) {
  const double d3d = std::sqrt((tx.x - rx.x) * (tx.x - rx.x) + (tx.y - rx.y) * (tx.y - rx.y) +
                               (tx.z - rx.z) * (tx.z - rx.z));
  return pathloss(profile, los, fc_hz, d3d, std::max(tx.z, rx.z), std::min(tx.z, rx.z));
}

double penetration_loss(const PenetrationModel& m, double fc_hz, bool high_loss,
                        double indoor_distance, double standard_normal) {
  const double f = fc_hz / 1e9;
  const double concrete = std::pow(10.0, -(5.0 + 4.0 * f) / 10.0);
  double wall;
  if (high_loss) {
    const double irr_glass = std::pow(10.0, -(23.0 + 0.3 * f) / 10.0);
    wall = 5.0 - 10.0 * std::log10(m.high_glass_fraction * irr_glass +
                                   (1.0 - m.high_glass_fraction) * concrete);
  } else {
    const double glass = std::pow(10.0, -(2.0 + 0.2 * f) / 10.0);
    wall = 5.0 - 10.0 * std::log10(m.low_glass_fraction * glass + (1.0 - m.low_glass_fraction) * concrete);
  }
  const double sigma = high_loss ? m.sigma_high : m.sigma_low;
  return wall + m.indoor_loss_per_m * indoor_distance + sigma * standard_normal;
}

LargeScaleParams gen_lsp(const ConditionProfile& p, Condition condition, RngStream& rng) {
  Eigen::Matrix<double, kLspCount, 1> z;
  for (int i = 0; i < kLspCount; ++i) z(i) = rng.normal();
  const Eigen::Matrix<double, kLspCount, 1> x = p.factor * z;
  LargeScaleParams l;
  l.condition = condition;
  l.sf = p.sf_sigma * x(kSF);
  l.k = p.k.mu + p.k.sigma * x(kK);
  l.ds = std::pow(10.0, p.ds.mu + p.ds.sigma * x(kDS));
  l.asd = clamp_spread(p.asd.mu + p.asd.sigma * x(kASD), kMaxAzimuthSpread);
  l.asa = clamp_spread(p.asa.mu + p.asa.sigma * x(kASA), kMaxAzimuthSpread);
  l.zsd = clamp_spread(p.zsd.mu + p.zsd.sigma * x(kZSD), kMaxZenithSpread);
  l.zsa = clamp_spread(p.zsa.mu + p.zsa.sigma * x(kZSA), kMaxZenithSpread);
  return l;
}

ClusterSet gen_clusters(const LargeScaleParams& lsp, const ConditionProfile& p, int n_clusters,
                        int rays_per_cluster, const LinkAngles& los, RngStream& rng) {
  if (n_clusters < 1) throw DomainError("n_clusters must be >= 1");
  if (rays_per_cluster != 1 && rays_per_cluster != 20) {
    throw DomainError("rays_per_cluster must be 1 or 20");
  }
  const auto n = static_cast<std::size_t>(n_clusters);
  const bool is_los = lsp.condition == Condition::LOS;
  ClusterSet cs;
  cs.n_clusters = n_clusters;
  cs.rays_per_cluster = rays_per_cluster;

  // Delays: scaled exponential draws, shifted to start at zero, sorted.
  const double r_tau = p.delay_scaling;
  cs.delays.resize(n);
  for (auto& d : cs.delays) d = -r_tau * lsp.ds * std::log(rng.uniform_open());
  std::sort(cs.delays.begin(), cs.delays.end());
  const double first = cs.delays.front();
  for (auto& d : cs.delays) d -= first;

  // Powers: exponential decay in delay with per-cluster shadowing.
  cs.scattered_powers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double shadow = rng.normal(0.0, p.cluster_shadowing);
    cs.scattered_powers[i] =
        std::exp(-cs.delays[i] * (r_tau - 1.0) / (r_tau * lsp.ds)) * std::pow(10.0, -shadow / 10.0);
  }
  const double total = std::accumulate(cs.scattered_powers.begin(), cs.scattered_powers.end(), 0.0);
  for (auto& w : cs.scattered_powers) w /= total;
  cs.k_factor = is_los ? std::pow(10.0, lsp.k / 10.0) : 0.0;
  cs.powers.resize(n);
  for (std::size_t i = 0; i < n; ++i) cs.powers[i] = cs.scattered_powers[i] / (cs.k_factor + 1.0);
  cs.powers[0] += cs.k_factor / (cs.k_factor + 1.0);
  const double sum = std::accumulate(cs.powers.begin(), cs.powers.end(), 0.0);
  for (auto& w : cs.powers) w /= sum;

  // Cluster angles from the power profile.
  const double max_power = *std::max_element(cs.powers.begin(), cs.powers.end());
  double c_phi = scaling(kAzimuthScaling, n_clusters);
  double c_theta = scaling(kZenithScaling, n_clusters);
  if (is_los) {
    const double k = lsp.k;
    c_phi *= 1.1035 - 0.028 * k - 0.002 * k * k + 0.0001 * k * k * k;
    c_theta *= 1.3086 + 0.0339 * k - 0.0077 * k * k + 0.0002 * k * k * k;
  }
  auto azimuths = [&](double spread, double centre) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double base = 2.0 * (spread / 1.4) * std::sqrt(-std::log(cs.powers[i] / max_power)) / c_phi;
      const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
      out[i] = sign * base + rng.normal(0.0, spread / 7.0);
    }
    const double shift = is_los ? out[0] : 0.0;
    for (auto& a : out) a = wrap_azimuth(a - shift + centre);
    return out;
  };
  auto zeniths = [&](double spread, double centre) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double base = -spread * std::log(cs.powers[i] / max_power) / c_theta;
      const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
      out[i] = sign * base + rng.normal(0.0, spread / 7.0);
    }
    const double shift = is_los ? out[0] : 0.0;
    for (auto& a : out) a = wrap_zenith(a - shift + centre);
    return out;
  };
  cs.aoa = azimuths(lsp.asa, los.aoa);
  cs.aod = azimuths(lsp.asd, los.aod);
  cs.zoa = zeniths(lsp.zsa, lsp.condition == Condition::O2I ? 90.0 : los.zoa);
  cs.zod = zeniths(lsp.zsd, los.zod);

  // Rays: fixed offsets around each centre, randomly coupled across the four
  // angle dimensions.
  const auto m = static_cast<std::size_t>(rays_per_cluster);
  const double c_zsd = 3.0 / 8.0 * std::pow(10.0, p.zsd.mu);
  const std::size_t rays = n * m;
  cs.ray_aoa.resize(rays);
  cs.ray_aod.resize(rays);
  cs.ray_zoa.resize(rays);
  cs.ray_zod.resize(rays);
  std::vector<double> offsets(m);
  for (std::size_t j = 0; j < m; ++j) offsets[j] = m == 1 ? 0.0 : kRayOffsets[j];
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = i * m;
    for (std::size_t j = 0; j < m; ++j) cs.ray_aoa[base + j] = wrap_azimuth(cs.aoa[i] + p.c_asa * offsets[j]);
    auto coupled = [&](std::vector<double>& dst, double centre, double spread, bool zenith) {
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      rng.shuffle(std::span<std::size_t>(perm));
      for (std::size_t j = 0; j < m; ++j) {
        const double a = centre + spread * offsets[perm[j]];
        dst[base + j] = zenith ? wrap_zenith(a) : wrap_azimuth(a);
      }
    };
    coupled(cs.ray_aod, cs.aod[i], p.c_asd, false);
    coupled(cs.ray_zoa, cs.zoa[i], p.c_zsa, true);
    coupled(cs.ray_zod, cs.zod[i], c_zsd, true);
  }

  cs.xpr.resize(rays);
  for (auto& x : cs.xpr) x = std::pow(10.0, rng.normal(p.xpr.mu, p.xpr.sigma) / 10.0);
  cs.phases.resize(rays);
  for (auto& ph : cs.phases) {
    for (auto& v : ph) v = kPi - 2.0 * kPi * rng.uniform();
  }
  return cs;
}

double rms_delay_spread(const std::vector<double>& delays, const std::vector<double>& powers) {
  if (delays.size() != powers.size() || delays.empty()) {
    throw DomainError("delays and powers must be non-empty and of equal length");
  }
  double p = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < delays.size(); ++i) {
    p += powers[i];
    m1 += powers[i] * delays[i];
    m2 += powers[i] * delays[i] * delays[i];
  }
  m1 /= p;
  m2 /= p;
  return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

bool PortArray::omnidirectional() const noexcept {
  return array.pattern.isotropic && (!subarray || (array.M == array.Mp && array.N == array.Np));
}

double PortArray::gain_db(double azimuth_deg, double zenith_deg) const {
  if (omnidirectional()) return array.pattern.max_gain;
  const auto local = antenna::to_local(array.orientation, azimuth_deg, zenith_deg);
  return subarray ? antenna::port_gain(array, local.azimuth, local.zenith)
                  : antenna::element_gain_unchecked(array.pattern, local.azimuth, local.zenith);
}

double PortArray::gain_db(const antenna::Frame& frame, double x, double y, double z) const {
  if (omnidirectional()) return array.pattern.max_gain;
  const auto local = antenna::to_local(frame, x, y, z);
  return subarray ? antenna::port_gain(array, local.azimuth, local.zenith)
                  : antenna::element_gain_unchecked(array.pattern, local.azimuth, local.zenith);
}

PortArray PortArray::single_isotropic() {
  PortArray a;
  a.array.pattern = antenna::ElementPattern::make_isotropic();
  a.sites = antenna::element_sites(a.array);
  return a;
}

PortArray PortArray::element_level(const antenna::ArrayConfig& cfg) {
  PortArray a;
  a.array = cfg;
  a.sites = antenna::element_sites(cfg);
  return a;
}

PortArray PortArray::port_level(const antenna::ArrayConfig& cfg) {
  PortArray a;
  a.array = cfg;
  a.subarray = true;
  a.sites = antenna::port_sites(cfg);
  return a;
}

CoefficientGenerator::CoefficientGenerator(const ChannelRealization& real, const PortArray& tx,
                                           const PortArray& rx)
    : rx_ports_(static_cast<int>(rx.sites.size())),
      tx_ports_(static_cast<int>(tx.sites.size())),
      delays_(real.clusters.delays) {
  for (const auto& s : rx.sites) rx_pol_.push_back(s.polarization);
  for (const auto& s : tx.sites) tx_pol_.push_back(s.polarization);
  const auto& cs = real.clusters;
  const double k = cs.k_factor;
  const double scatter_scale = std::sqrt(1.0 / (k + 1.0));
  const double rays_per_cluster = static_cast<double>(cs.rays_per_cluster);

  for (int n = 0; n < cs.n_clusters; ++n) {
    const double cluster_amp =
        scatter_scale * std::sqrt(cs.scattered_powers[static_cast<std::size_t>(n)] / rays_per_cluster);
    for (int m = 0; m < cs.rays_per_cluster; ++m) {
      const std::size_t i = cs.ray_index(n, m);
      const auto r = respond(rx, cs.ray_aoa[i], cs.ray_zoa[i]);
      const auto t = respond(tx, cs.ray_aod[i], cs.ray_zod[i]);
      const auto& ph = cs.phases[i];
      const double cross = 1.0 / std::sqrt(cs.xpr[i]);
      const cdouble tt = std::polar(1.0, ph[0]);
      const cdouble tp = std::polar(cross, ph[1]);
      const cdouble pt = std::polar(cross, ph[2]);
      const cdouble pp = std::polar(1.0, ph[3]);
      Ray ray;
      ray.cluster = n;
      ray.amplitude = cluster_amp;
      ray.doppler_hz = doppler(real, cs.ray_aoa[i], cs.ray_zoa[i]);
      ray.base_phase = 0.0;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const auto ua = static_cast<std::size_t>(a);
          const auto ub = static_cast<std::size_t>(b);
          ray.pol[ua * 2 + ub] = r.field_theta[ua] * (tt * t.field_theta[ub] + tp * t.field_phi[ub]) +
                                 r.field_phi[ua] * (pt * t.field_theta[ub] + pp * t.field_phi[ub]);
          const double rt = r.field_theta[ua] * r.field_theta[ua];
          const double rp = r.field_phi[ua] * r.field_phi[ua];
          const double tt2 = t.field_theta[ub] * t.field_theta[ub];
          const double tp2 = t.field_phi[ub] * t.field_phi[ub];
          ray.pol_power[ua * 2 + ub] =
              rt * tt2 + rp * tp2 + (rt * tp2 + rp * tt2) / cs.xpr[i];
        }
      }
      ray.rx_phase = r.phase;
      ray.tx_phase = t.phase;
      rays_.push_back(std::move(ray));
    }
  }
  if (k > 0.0) {
    const auto& a = real.angles;
    const auto r = respond(rx, a.aoa, a.zoa);
    const auto t = respond(tx, a.aod, a.zod);
    Ray ray;
    ray.cluster = 0;
    ray.amplitude = std::sqrt(k / (k + 1.0));
    ray.doppler_hz = doppler(real, a.aoa, a.zoa);
    const double lambda = real.carrier > 0.0 ? kSpeedOfLight / real.carrier : 0.0;
    ray.base_phase = lambda > 0.0 ? -2.0 * kPi * real.distance_3d / lambda : 0.0;
    for (std::size_t ua = 0; ua < 2; ++ua) {
      for (std::size_t ub = 0; ub < 2; ++ub) {
        ray.pol[ua * 2 + ub] =
            cdouble(r.field_theta[ua] * t.field_theta[ub] - r.field_phi[ua] * t.field_phi[ub], 0.0);
        ray.pol_power[ua * 2 + ub] = std::norm(ray.pol[ua * 2 + ub]);
      }
    }
    ray.rx_phase = r.phase;
    ray.tx_phase = t.phase;
    rays_.push_back(std::move(ray));
  }
}

std::vector<CoefficientMatrix> CoefficientGenerator::cluster_matrices(double t) const {
  std::vector<CoefficientMatrix> out(delays_.size(), CoefficientMatrix::Zero(rx_ports_, tx_ports_));
  for (const auto& ray : rays_) {
    auto& h = out[static_cast<std::size_t>(ray.cluster)];
    const cdouble common = std::polar(ray.amplitude, ray.base_phase + 2.0 * kPi * ray.doppler_hz * t);
    for (int u = 0; u < rx_ports_; ++u) {
      const auto uu = static_cast<std::size_t>(u);
      const cdouble ru = common * ray.rx_phase[uu];
      const auto pa = static_cast<std::size_t>(rx_pol_[uu]) * 2;
      for (int s = 0; s < tx_ports_; ++s) {
        const auto ss = static_cast<std::size_t>(s);
        h(u, s) += ru * ray.pol[pa + static_cast<std::size_t>(tx_pol_[ss])] * ray.tx_phase[ss];
      }
    }
  }
  return out;
}

CoefficientMatrix CoefficientGenerator::at(double t, double f) const {
  const auto clusters = cluster_matrices(t);
  CoefficientMatrix h = CoefficientMatrix::Zero(rx_ports_, tx_ports_);
  for (std::size_t n = 0; n < clusters.size(); ++n) {
    h += clusters[n] * (f == 0.0 ? cdouble(1.0, 0.0) : std::polar(1.0, -2.0 * kPi * f * delays_[n]));
  }
  return h;
}

double CoefficientGenerator::expected_power(int u, int s) const {
  const auto pa = static_cast<std::size_t>(rx_pol_.at(static_cast<std::size_t>(u))) * 2;
  const auto pb = static_cast<std::size_t>(tx_pol_.at(static_cast<std::size_t>(s)));
  double sum = 0.0;
  for (const auto& ray : rays_) sum += ray.amplitude * ray.amplitude * ray.pol_power[pa + pb];
  return sum;
}

CoefficientMatrix channel_coeff(const ChannelRealization& real, const PortArray& tx,
                                const PortArray& rx, double t) {
  return CoefficientGenerator(real, tx, rx).at(t);
}

std::vector<CoefficientMatrix> cluster_coefficients(const ChannelRealization& real,
                                                    const PortArray& tx, const PortArray& rx,
                                                    double t) {
  return CoefficientGenerator(real, tx, rx).cluster_matrices(t);
}

CoefficientMatrix apply_pl_sf(const ChannelRealization& real, const CoefficientMatrix& h) {
  return h * std::pow(10.0, -(real.pathloss + real.shadow) / 20.0);
}

}  // namespace imteval::channel
