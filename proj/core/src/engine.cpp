// SPDX-License-Identifier: Apache-2.0
#include "imteval/engine.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <Eigen/Eigenvalues>

#include "imteval/channel.hpp"
#include "imteval/error.hpp"
#include "imteval/profiles.hpp"
#include "imteval/random.hpp"
#include "imteval/requirements.hpp"
#include "ini.hpp"

namespace imteval::engine {

namespace {

using channel::ChannelProfile;
using channel::Condition;
using geometry::Vec2;
using geometry::Vec3;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Service time standing in for a device that cannot reach any rate.
constexpr double kNeverServed = 1e30;
constexpr std::uint64_t kQueueDrop = stream_id::kReservedDropBase + (1ULL << 30);

double wrap_azimuth(double deg) {
  while (deg > 180.0) deg -= 360.0;
  while (deg <= -180.0) deg += 360.0;
  return deg;
}

struct LinkBudget {
  bool los = false;
  Condition condition = Condition::NLOS;
  const ChannelProfile* profile = nullptr;
  Vec3 bs;   // wrapped BS position
  double d2d = 0.0;
  double d3d = 0.0;
  double pathloss = 0.0;
  double penetration = 0.0;
  double shadow = 0.0;
  double bs_gain = 0.0;
  double ue_gain = 0.0;
  channel::LinkAngles angles;

  double coupling_loss() const noexcept {
    return pathloss + penetration + shadow - bs_gain - ue_gain;
  }
};

struct UeLoss {
  double macro = 0.0;  // dB
  double micro = 0.0;
};

// Per-drop link data shared by the SINR computation and the calibration.
struct DropGeometry {
  std::vector<geometry::UePlacement> ues;
  std::vector<UeLoss> pen;
  std::vector<double> cl;    // UE-major coupling loss, dB
  std::vector<double> gain;  // same as a linear power ratio
  std::vector<int> serving;
  std::vector<std::vector<std::uint32_t>> attached;  // per TRxP
  /// Per TRxP, the UE scheduled on the uplink resource seen by the others, or -1.
  std::vector<int> active;
  std::size_t n_trxp = 0;

  double loss(std::size_t u, std::size_t t) const noexcept { return cl[u * n_trxp + t]; }
};

double dominant_gain(const channel::CoefficientGenerator& gen, double t, int freq_samples,
                     double bandwidth) {
  const auto clusters = gen.cluster_matrices(t);
  const int rx = gen.rx_ports();
  const int tx = gen.tx_ports();
  const bool rx_side = rx <= tx;
  const int n = rx_side ? rx : tx;
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(n, n);
  for (int k = 0; k < freq_samples; ++k) {
    const double f =
        freq_samples == 1 ? 0.0
                          : bandwidth * ((k + 0.5) / static_cast<double>(freq_samples) - 0.5);
    channel::CoefficientMatrix h = channel::CoefficientMatrix::Zero(rx, tx);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const double delay = gen.delays()[c];
      h += clusters[c] * (f == 0.0 ? std::complex<double>(1.0, 0.0)
                                   : std::polar(1.0, -2.0 * std::numbers::pi * f * delay));
    }
    if (rx_side) {
      gram.noalias() += h * h.adjoint();
    } else {
      gram.noalias() += h.adjoint() * h;
    }
  }
  gram /= static_cast<double>(freq_samples);
  if (n == 1) return gram(0, 0).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

struct Accumulator;

}  // namespace

struct Simulator::Impl {
  EvaluationConfig cfg;
  geometry::NetworkLayout layout;
  const ChannelProfile* macro = nullptr;
  const ChannelProfile* micro = nullptr;
  std::vector<channel::PortArray> bs_ports;
  channel::PortArray ue_ports;
  std::vector<antenna::Frame> bs_frames;
  antenna::Frame ue_frame;
  std::vector<double> trxp_power;  // dBm
  std::vector<double> trxp_power_mw;
  double dl_noise_mw = 0.0;
  double ul_noise_mw = 0.0;
  double ul_band = 0.0;
  int resources = 1;
  int intervals = 1;
  link::Calibration calibration;
  link::PowerControl pc;

  Impl(EvaluationConfig c, geometry::NetworkLayout l) : cfg(std::move(c)), layout(std::move(l)) {
    cfg.validate();
    const auto& lib = channel::ProfileLibrary::builtin();
    macro = &lib.get(channel::macro_profile_name(cfg.environment, cfg.config_variant, cfg.channel.profile));
    micro = &lib.get(channel::micro_profile_name(cfg.config_variant));
    for (const auto& t : layout.trxps) {
      auto a = cfg.bs_array();
      a.orientation.bearing = t.boresight_azimuth;
      bs_ports.push_back(channel::PortArray::port_level(a));
      bs_frames.push_back(antenna::Frame::of(a.orientation));
      trxp_power.push_back(t.micro ? cfg.micro_tx_power : cfg.bs_tx_power);
      trxp_power_mw.push_back(link::dbm_to_mw(trxp_power.back()));
    }
    ue_ports = channel::PortArray::port_level(cfg.ue_array());
    ue_frame = antenna::Frame::of(ue_ports.array.orientation);
    ul_band = uplink_bandwidth(cfg);
    resources = uplink_resources(cfg);
    dl_noise_mw = link::dbm_to_mw(
        link::noise_power(cfg.bandwidth, cfg.ue_noise_figure, cfg.thermal_noise_density));
    ul_noise_mw = link::dbm_to_mw(link::noise_power(ul_band / resources, cfg.bs_noise_figure,
                                                    cfg.thermal_noise_density));
    intervals = std::max(1, static_cast<int>(std::lround(cfg.duration_T /
                                                         cfg.scheduling.scheduling_interval)));
    pc.alpha = cfg.link.pc_alpha;
    pc.p_max = cfg.ue_tx_power;
    calibrate();
  }

  const ChannelProfile& profile_for(std::size_t t) const noexcept {
    return layout.trxps[t].micro ? *micro : *macro;
  }

  static std::uint64_t link_id(std::size_t u, std::size_t t, std::size_t n_trxp) noexcept {
    return stream_id::link(static_cast<std::uint64_t>(u) * n_trxp + t);
  }

  // Large-scale budget of one UE-TRxP pair. `rng` is the fresh link stream;
  // it is left positioned after the LOS draw so the caller can continue with
  // the large-scale parameters.
  LinkBudget budget(const geometry::UePlacement& ue, std::size_t t, const UeLoss& pen,
                    RngStream& rng, double& z0, bool with_angles = false) const {
    const auto& trxp = layout.trxps[t];
    LinkBudget b;
    b.profile = &profile_for(t);
    const auto w = geometry::wrap_distance(layout, ue.position.xy(), trxp.position);
    const Vec2 bs_xy = trxp.position + w.translation;
    b.bs = {bs_xy.x, bs_xy.y, trxp.height};
    b.d2d = w.distance;
    const double dz = ue.position.z - trxp.height;
    b.d3d = std::max(std::sqrt(b.d2d * b.d2d + dz * dz), b.profile->min_distance);
    b.los = channel::assign_los(*b.profile, b.d2d, rng).los;
    const bool o2i = ue.indoor && b.profile->has_o2i;
    b.condition = o2i ? Condition::O2I : (b.los ? Condition::LOS : Condition::NLOS);
    b.pathloss = channel::pathloss(*b.profile, b.los, cfg.carrier_frequency, b.d3d, trxp.height,
                                   ue.position.z);
    if (o2i) b.penetration = layout.trxps[t].micro ? pen.micro : pen.macro;
    RngStream peek = rng;
    z0 = peek.normal();
    b.shadow = channel::shadowing_from_normal(b.profile->condition(b.condition), z0);

    // Unit vector from the BS toward the UE.
    const double dx = ue.position.x - bs_xy.x;
    const double dy = ue.position.y - bs_xy.y;
    const double h = std::sqrt(dx * dx + dy * dy);
    const double hx = h > 0.0 ? dx / h : 1.0;
    const double hy = h > 0.0 ? dy / h : 0.0;
    const double cz = std::clamp(dz / b.d3d, -1.0, 1.0);
    const double sz = std::sqrt(1.0 - cz * cz);
    b.bs_gain = bs_ports[t].gain_db(bs_frames[t], sz * hx, sz * hy, cz);
    b.ue_gain = ue_ports.gain_db(ue_frame, -sz * hx, -sz * hy, -cz);
    if (with_angles) {
      const double az = h > 0.0 ? std::atan2(dy, dx) * kRadToDeg : 0.0;
      const double zen = std::acos(cz) * kRadToDeg;
      b.angles = {az, zen, wrap_azimuth(az + 180.0), 180.0 - zen};
    }
    return b;
  }

  // Building entry loss of each UE under the macro and micro profiles, from
  // one normal draw per UE.
  std::vector<UeLoss> penetration(std::uint64_t drop,
                                  const std::vector<geometry::UePlacement>& ues) const {
    std::vector<UeLoss> out(ues.size());
    for (std::size_t u = 0; u < ues.size(); ++u) {
      if (!ues[u].indoor) continue;
      auto rng = derive_stream(cfg.master_seed, drop, stream_id::placement(1 + u));
      const double z = rng.normal();
      auto loss = [&](const ChannelProfile& p) {
        return channel::penetration_loss(p.penetration, cfg.carrier_frequency, ues[u].high_loss,
                                         ues[u].indoor_distance, z);
      };
      out[u].macro = loss(*macro);
      out[u].micro = micro == macro ? out[u].macro : loss(*micro);
    }
    return out;
  }

  DropGeometry place(std::uint64_t drop) const {
    DropGeometry g;
    auto rng = derive_stream(cfg.master_seed, drop, stream_id::placement(0));
    g.ues = geometry::drop_ues(layout, cfg, rng);
    g.n_trxp = layout.trxp_count();
    g.pen = penetration(drop, g.ues);
    const auto& pen = g.pen;
    g.cl.resize(g.ues.size() * g.n_trxp);
    for (std::size_t u = 0; u < g.ues.size(); ++u) {
      for (std::size_t t = 0; t < g.n_trxp; ++t) {
        auto lr = derive_stream(cfg.master_seed, drop, link_id(u, t, g.n_trxp));
        double z0 = 0.0;
        g.cl[u * g.n_trxp + t] = budget(g.ues[u], t, pen[u], lr, z0).coupling_loss();
      }
    }
    g.gain.resize(g.cl.size());
    for (std::size_t i = 0; i < g.cl.size(); ++i) g.gain[i] = link::dbm_to_mw(-g.cl[i]);
    g.serving.resize(g.ues.size());
    g.attached.assign(g.n_trxp, {});
    for (std::size_t u = 0; u < g.ues.size(); ++u) {
      const int s = geometry::attach(g.ues[u], layout, [&](const geometry::UePlacement&, std::size_t t) {
        return g.loss(u, t);
      });
      g.serving[u] = s;
      g.ues[u].serving_trxp = s;
      g.attached[static_cast<std::size_t>(s)].push_back(static_cast<std::uint32_t>(u));
    }
    g.active.assign(g.n_trxp, -1);
    for (std::size_t t = 0; t < g.n_trxp; ++t) {
      const auto& a = g.attached[t];
      if (a.empty()) continue;
      auto cr = derive_stream(cfg.master_seed, drop, stream_id::coschedule(t));
      g.active[t] = static_cast<int>(a[cr.below(a.size())]);
    }
    return g;
  }

  double tx_power(const DropGeometry& g, std::size_t u, double p0) const {
    link::PowerControl p = pc;
    p.p0 = p0;
    return link::uplink_power(p, g.loss(u, static_cast<std::size_t>(g.serving[u])));
  }

  // Transmit power of each TRxP's active uplink UE, mW (0 when none).
  std::vector<double> active_power(const DropGeometry& g, double p0) const {
    std::vector<double> out(g.n_trxp, 0.0);
    for (std::size_t t = 0; t < g.n_trxp; ++t) {
      if (g.active[t] >= 0) out[t] = link::dbm_to_mw(tx_power(g, static_cast<std::size_t>(g.active[t]), p0));
    }
    return out;
  }

  // Uplink interference at TRxP s from the active UEs of the other TRxPs, mW.
  std::vector<double> ul_interferers(const DropGeometry& g, std::size_t s,
                                     const std::vector<double>& power) const {
    std::vector<double> out;
    out.reserve(g.n_trxp);
    for (std::size_t t = 0; t < g.n_trxp; ++t) {
      if (t == s || g.active[t] < 0) continue;
      const auto v = static_cast<std::size_t>(g.active[t]);
      out.push_back(power[t] * g.gain[v * g.n_trxp + s]);
    }
    return out;
  }

  double iot_db(const DropGeometry& g, std::size_t s, const std::vector<double>& power) const {
    double i = 0.0;
    for (std::size_t t = 0; t < g.n_trxp; ++t) {
      if (t == s || g.active[t] < 0) continue;
      i += power[t] * g.gain[static_cast<std::size_t>(g.active[t]) * g.n_trxp + s];
    }
    return link::linear_to_db((i + ul_noise_mw) / ul_noise_mw);
  }

  void calibrate() {
    std::vector<DropGeometry> drops;
    for (int i = 0; i < kCalibrationDrops; ++i) {
      drops.push_back(place(stream_id::kReservedDropBase + static_cast<std::uint64_t>(i)));
    }
    auto mean_iot = [&](double p0) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& g : drops) {
        const auto power = active_power(g, p0);
        for (std::size_t s = 0; s < g.n_trxp; ++s) {
          sum += iot_db(g, s, power);
          ++n;
        }
      }
      return n ? sum / static_cast<double>(n) : 0.0;
    };
    calibration = link::calibrate_p0(mean_iot, cfg.link.iot_target, -200.0, cfg.ue_tx_power, 60);
    pc.p0 = calibration.p0;
  }

  // Serving-link combining gain (linear, unit conditional mean per port pair)
  // at each fading time sample.
  std::vector<double> fading(std::uint64_t drop, const DropGeometry& g, std::size_t u) const {
    const int samples = cfg.channel.fading_time_samples;
    if (!cfg.channel.fading) return std::vector<double>(static_cast<std::size_t>(samples), 1.0);
    const auto s = static_cast<std::size_t>(g.serving[u]);
    auto rng = derive_stream(cfg.master_seed, drop, link_id(u, s, g.n_trxp));
    double z0 = 0.0;
    const auto b = budget(g.ues[u], s, g.pen[u], rng, z0, true);
    const auto& cp = b.profile->condition(b.condition);
    channel::ChannelRealization real;
    real.pathloss = b.pathloss;
    real.lsp = channel::gen_lsp(cp, b.condition, rng);
    real.shadow = real.lsp.sf;
    real.clusters = channel::gen_clusters(real.lsp, cp, cp.n_clusters, cfg.channel.rays_per_cluster,
                                          b.angles, rng);
    real.angles = b.angles;
    real.distance_3d = b.d3d;
    real.speed = g.ues[u].speed;
    real.direction = g.ues[u].direction;
    real.carrier = cfg.carrier_frequency;
    const channel::CoefficientGenerator gen(real, bs_ports[s], ue_ports);
    double mean = 0.0;
    for (int a = 0; a < gen.rx_ports(); ++a) {
      for (int c = 0; c < gen.tx_ports(); ++c) mean += gen.expected_power(a, c);
    }
    mean /= static_cast<double>(gen.rx_ports() * gen.tx_ports());
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int j = 0; j < samples; ++j) {
      const double t = cfg.duration_T * j / samples;
      const double lambda = dominant_gain(gen, t, cfg.channel.frequency_samples, cfg.bandwidth);
      out.push_back(mean > 0.0 ? lambda / mean : 0.0);
    }
    return out;
  }

  DropResult run_drop(std::uint64_t drop) const;
};

namespace {

double mean_mw(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Proportional-fair scheduling of one TRxP over the drop duration. `sinr`
// holds, per attached UE, the SINR (dB) at each fading time sample. Returns
// bits per attached UE and the allocation log.
std::vector<double> schedule(const std::vector<std::vector<double>>& sinr,
                             const link::LinkAbstraction& abstraction, double backoff,
                             double bandwidth, int resources, int intervals, double interval,
                             double beta, std::vector<traffic::Allocation>* log) {
  const auto n = sinr.size();
  std::vector<double> bits(n, 0.0);
  if (n == 0) return bits;
  traffic::SchedulerState state(n, beta);
  std::vector<std::uint32_t> backlogged(n);
  for (std::size_t i = 0; i < n; ++i) backlogged[i] = static_cast<std::uint32_t>(i);
  std::vector<double> rates(n);
  const auto samples = sinr.front().size();
  for (int k = 0; k < intervals; ++k) {
    const auto j = static_cast<std::size_t>(k) * samples / static_cast<std::size_t>(intervals);
    for (std::size_t i = 0; i < n; ++i) {
      rates[i] = bandwidth * link::sinr_to_se(abstraction, sinr[i][j] - backoff);
    }
    auto alloc = traffic::schedule_pf(backlogged, rates, state, resources);
    for (const auto& [ue, count] : alloc) {
      bits[ue] += rates[ue] * count / resources * interval;
    }
    if (log) log->push_back(std::move(alloc));
  }
  return bits;
}

}  // namespace

DropResult Simulator::Impl::run_drop(std::uint64_t drop) const {
  const auto g = place(drop);
  const std::size_t n_ues = g.ues.size();
  const std::size_t samples = static_cast<std::size_t>(cfg.channel.fading_time_samples);

  DropResult r;
  r.drop_index = drop;
  r.placements = g.ues;
  r.ues.resize(n_ues);
  r.iot.resize(g.n_trxp);

  std::vector<std::vector<double>> ul_interf(g.n_trxp);
  std::vector<double> ul_interf_sum(g.n_trxp, 0.0);
  const auto power = active_power(g, pc.p0);
  for (std::size_t s = 0; s < g.n_trxp; ++s) {
    ul_interf[s] = ul_interferers(g, s, power);
    for (double p : ul_interf[s]) ul_interf_sum[s] += p;
    r.iot[s] = link::linear_to_db((ul_interf_sum[s] + ul_noise_mw) / ul_noise_mw);
  }

  std::vector<std::vector<double>> dl_sinr(n_ues), ul_sinr(n_ues);
  std::vector<double> dl_interf;
  dl_interf.reserve(g.n_trxp);
  for (std::size_t u = 0; u < n_ues; ++u) {
    const auto s = static_cast<std::size_t>(g.serving[u]);
    auto& ue = r.ues[u];
    ue.ue_id = g.ues[u].ue_id;
    ue.serving = g.serving[u];
    ue.indoor = g.ues[u].indoor;
    ue.coupling_loss = g.loss(u, s);
    {
      auto rng = derive_stream(cfg.master_seed, drop, link_id(u, s, g.n_trxp));
      double z0 = 0.0;
      ue.los = budget(g.ues[u], s, g.pen[u], rng, z0).los;
    }
    const auto gain = fading(drop, g, u);
    ue.fading_gain = link::linear_to_db(mean_mw(gain));

    dl_interf.clear();
    double dl_i = 0.0;
    for (std::size_t t = 0; t < g.n_trxp; ++t) {
      if (t == s) continue;
      dl_interf.push_back(trxp_power_mw[t] * g.gain[u * g.n_trxp + t]);
      dl_i += dl_interf.back();
    }
    const double dl_s = link::dbm_to_mw(trxp_power[s] - ue.coupling_loss);
    ue.ul_tx_power = tx_power(g, u, pc.p0);
    const double ul_s = link::dbm_to_mw(ue.ul_tx_power - ue.coupling_loss);

    std::vector<double> dl_sig(samples), ul_sig(samples);
    dl_sinr[u].resize(samples);
    ul_sinr[u].resize(samples);
    for (std::size_t j = 0; j < samples; ++j) {
      dl_sig[j] = dl_s * gain[j];
      ul_sig[j] = ul_s * gain[j];
      dl_sinr[u][j] = link::linear_to_db(dl_sig[j] / (dl_i + dl_noise_mw));
      ul_sinr[u][j] = link::linear_to_db(ul_sig[j] / (ul_interf_sum[s] + ul_noise_mw));
    }
    ue.dl = link::compute_sinr(ue.ue_id, Direction::Downlink, mean_mw(dl_sig), dl_interf, dl_noise_mw);
    ue.ul = link::compute_sinr(ue.ue_id, Direction::Uplink, mean_mw(ul_sig), ul_interf[s], ul_noise_mw);
  }

  const double interval = cfg.duration_T / intervals;
  double n_mux_sum = 0.0;
  int n_mux_count = 0;
  for (std::size_t t = 0; t < g.n_trxp; ++t) {
    const auto& members = g.attached[t];
    if (members.empty()) continue;
    std::vector<std::vector<double>> dl, ul;
    for (auto u : members) {
      dl.push_back(dl_sinr[u]);
      ul.push_back(ul_sinr[u]);
    }
    const auto dl_bits = schedule(dl, cfg.link.downlink, cfg.link.sinr_backoff, cfg.bandwidth, 1,
                                  intervals, interval, cfg.scheduling.pf_beta, nullptr);
    std::vector<traffic::Allocation> log;
    const auto ul_bits = schedule(ul, cfg.link.uplink, cfg.link.sinr_backoff, ul_band, resources,
                                  intervals, interval, cfg.scheduling.pf_beta, &log);
    for (std::size_t i = 0; i < members.size(); ++i) {
      auto& ue = r.ues[members[i]];
      ue.dl_throughput = dl_bits[i] / cfg.duration_T;
      ue.ul_throughput = ul_bits[i] / cfg.duration_T;
      r.dl_bits += dl_bits[i];
      r.ul_bits += ul_bits[i];
    }
    n_mux_sum += traffic::n_mux(log);
    ++n_mux_count;
  }
  r.ul_n_mux = n_mux_count ? n_mux_sum / n_mux_count : 0.0;

  if (cfg.traffic.kind == traffic::TrafficKind::PoissonMessaging && cfg.traffic.rate > 0.0) {
    auto rng = derive_stream(cfg.master_seed, drop, stream_id::traffic(0));
    const auto arrivals = traffic::gen_arrivals(cfg.traffic, static_cast<std::uint32_t>(n_ues),
                                                cfg.duration_T, rng);
    const double rb = ul_band / resources;
    const double bits = cfg.traffic.pdu_size * 8.0;
    for (std::size_t t = 0; t < g.n_trxp; ++t) {
      std::vector<traffic::Arrival> mine;
      std::vector<double> service;
      for (const auto& a : arrivals.arrivals) {
        if (static_cast<std::size_t>(g.serving[a.ue_id]) != t) continue;
        mine.push_back(a);
        const double se =
            link::sinr_to_se(cfg.link.uplink, r.ues[a.ue_id].ul.sinr - cfg.link.sinr_backoff);
        service.push_back(se > 0.0 ? bits / (rb * se) + cfg.scheduling.message_overhead
                                   : kNeverServed);
      }
      if (mine.empty()) continue;
      const auto events = traffic::serve_fifo(mine, service, resources, kInf);
      for (const auto& ev : events) {
        const auto& a = mine[ev.packet];
        r.packets.push_back({a.ue_id, a.time, ev.service_start, ev.completion, ev.transmissions});
      }
    }
    std::sort(r.packets.begin(), r.packets.end(), [](const auto& a, const auto& b) {
      return a.arrival_time < b.arrival_time || (a.arrival_time == b.arrival_time && a.ue_id < b.ue_id);
    });
  }
  return r;
}

// ---------------------------------------------------------------------------
// Fold

namespace {

struct Accumulator {
  const EvaluationConfig& cfg;
  double ul_band;
  int resources;
  std::uint64_t drops = 0;
  std::uint64_t trxps = 0;
  double dl_bits = 0.0;
  double ul_bits = 0.0;
  metrics::BinnedCdf sinr_dl{};
  metrics::BinnedCdf sinr_ul{};
  metrics::BinnedCdf coupling{0.0, 260.0, 26000};
  metrics::BinnedCdf se_dl{0.0, 16.0, 16000};
  metrics::BinnedCdf se_ul{0.0, 16.0, 16000};
  metrics::RunningMean iot;
  metrics::RunningMean n_mux;
  metrics::RunningMean dl_drop, ul_drop;
  double b_sum = 0.0;
  std::uint64_t b_count = 0;
  std::uint64_t unserved = 0;

  Accumulator(const EvaluationConfig& c, double band, int res)
      : cfg(c), ul_band(band), resources(res) {}

  void add(const DropResult& d, std::size_t n_trxp) {
    ++drops;
    trxps = n_trxp;
    dl_bits += d.dl_bits;
    ul_bits += d.ul_bits;
    const double offered = offered_bit_rate(cfg.traffic);
    for (const auto& ue : d.ues) {
      sinr_dl.add(ue.dl.sinr);
      sinr_ul.add(ue.ul.sinr);
      coupling.add(ue.coupling_loss);
      se_dl.add(ue.dl_throughput / cfg.bandwidth);
      se_ul.add(ue.ul_throughput / ul_band);
      const double se = link::sinr_to_se(cfg.link.uplink, ue.ul.sinr - cfg.link.sinr_backoff);
      if (se > 0.0) {
        if (offered > 0.0) {
          b_sum += offered / se;
          ++b_count;
        }
      } else {
        ++unserved;
      }
    }
    for (double x : d.iot) iot.push(x);
    n_mux.push(d.ul_n_mux);
    dl_drop.push(d.mean_sinr(Direction::Downlink));
    ul_drop.push(d.mean_sinr(Direction::Uplink));
  }
};

std::string format_number(double x) { return detail::format_double(x); }

void add_kpi(RunResult& r, Metric m, Direction d, double value, std::string unit,
             std::string note = {}, std::optional<double> speed = std::nullopt) {
  r.kpis.push_back({m, d, value, std::move(unit), speed, std::move(note)});
}

metrics::CdSearchResult density_search(const EvaluationConfig& cfg, const metrics::BinnedCdf& ul_sinr,
                                       double ul_band, int resources) {
  const int n = cfg.scheduling.queue_messages;
  auto rng = derive_stream(cfg.master_seed, kQueueDrop, stream_id::traffic(0));
  std::vector<double> unit_arrivals(static_cast<std::size_t>(n));
  std::vector<double> service(static_cast<std::size_t>(n));
  const double rb = ul_band / resources;
  const double bits = cfg.traffic.pdu_size * 8.0;
  std::vector<double> ps(static_cast<std::size_t>(n));
  double clock = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    clock += rng.exponential(1.0);
    unit_arrivals[i] = clock;
    ps[i] = rng.uniform();
  }
  const auto sinr = ul_sinr.quantiles(ps);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double se = link::sinr_to_se(cfg.link.uplink, sinr[i] - cfg.link.sinr_backoff);
    service[i] = se > 0.0 ? bits / (rb * se) + cfg.scheduling.message_overhead : kNeverServed;
  }
  const double area_km2 = geometry::sector_area(cfg.isd) / 1e6;
  auto p99 = [&](double density) {
    const double lambda = density * area_km2 * cfg.traffic.rate;
    std::vector<traffic::Arrival> arrivals(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < arrivals.size(); ++i) arrivals[i] = {0, unit_arrivals[i] / lambda};
    const auto events = traffic::serve_fifo(arrivals, service, resources, kInf);
    std::vector<double> delays;
    delays.reserve(events.size());
    for (const auto& ev : events) delays.push_back(ev.completion - arrivals[ev.packet].time);
    std::sort(delays.begin(), delays.end());
    return metrics::quantile_sorted(delays, 0.99);
  };
  return metrics::connection_density_nonfullbuffer(p99, cfg.scheduling.density_min,
                                                   cfg.scheduling.density_max,
                                                   cfg.scheduling.delay_limit);
}

void finish(RunResult& r, const Accumulator& acc, const EvaluationConfig& cfg) {
  r.cdfs.emplace("sinr_dl", acc.sinr_dl);
  r.cdfs.emplace("sinr_ul", acc.sinr_ul);
  r.cdfs.emplace("coupling_loss", acc.coupling);
  r.cdfs.emplace("se_user_dl", acc.se_dl);
  r.cdfs.emplace("se_user_ul", acc.se_ul);
  r.dl_sinr_drop_mean = acc.dl_drop;
  r.ul_sinr_drop_mean = acc.ul_drop;

  const auto n_users = acc.sinr_dl.count();
  if (n_users == 0) {
    r.warnings.push_back("no users were dropped; no KPIs computed");
    return;
  }
  add_kpi(r, Metric::MeanSinr, Direction::Downlink, acc.sinr_dl.mean(), "dB");
  add_kpi(r, Metric::MeanSinr, Direction::Uplink, acc.sinr_ul.mean(), "dB");
  add_kpi(r, Metric::InterferenceOverThermal, Direction::Uplink, acc.iot.mean(), "dB",
          "p0 " + format_number(r.calibration.p0) + " dBm");
  if (acc.iot.mean() > cfg.link.iot_target + 1e-9) {
    r.warnings.push_back("mean uplink IoT " + format_number(acc.iot.mean()) +
                         " dB exceeds the target " + format_number(cfg.link.iot_target) + " dB");
  }

  const auto env = cfg.environment;
  const bool enough = n_users >= 20;
  if (!enough) r.warnings.push_back("fewer than 20 users; percentile KPIs skipped");

  if (is_embb(env)) {
    metrics::SeInputs dl{static_cast<int>(acc.drops), {acc.dl_bits}, cfg.duration_T, cfg.bandwidth,
                         static_cast<int>(acc.trxps)};
    metrics::SeInputs ul{static_cast<int>(acc.drops), {acc.ul_bits}, cfg.duration_T, acc.ul_band,
                         static_cast<int>(acc.trxps)};
    add_kpi(r, Metric::AvgSpectralEfficiency, Direction::Downlink, metrics::avg_spectral_efficiency(dl),
            "bit/s/Hz/TRxP");
    add_kpi(r, Metric::AvgSpectralEfficiency, Direction::Uplink, metrics::avg_spectral_efficiency(ul),
            "bit/s/Hz/TRxP");
    if (enough) {
      add_kpi(r, Metric::Pct5SpectralEfficiency, Direction::Downlink, acc.se_dl.quantile(0.05),
              "bit/s/Hz");
      add_kpi(r, Metric::Pct5SpectralEfficiency, Direction::Uplink, acc.se_ul.quantile(0.05),
              "bit/s/Hz");
      add_kpi(r, Metric::UserExperiencedDataRate, Direction::Downlink,
              acc.se_dl.quantile(0.05) * cfg.bandwidth, "bit/s");
      add_kpi(r, Metric::UserExperiencedDataRate, Direction::Uplink,
              acc.se_ul.quantile(0.05) * acc.ul_band, "bit/s");
    }
    for (const auto& row : RequirementSet::builtin().rows()) {
      if (row.environment != env || row.metric != Metric::Mobility || !row.speed_kmh) continue;
      const auto m = metrics::mobility_at(acc.sinr_ul.quantile(0.5) - cfg.link.sinr_backoff,
                                          *row.speed_kmh, cfg.carrier_frequency, cfg.link, row.value);
      add_kpi(r, Metric::Mobility, Direction::Uplink, m.normalized_rate, "bit/s/Hz",
              "median UL SINR " + format_number(m.sinr) + " dB, Doppler backoff " +
                  format_number(m.backoff) + " dB",
              *row.speed_kmh);
    }
  }

  if (env == Environment::UrbanMacro_URLLC && enough) {
    const auto& l = cfg.link;
    for (auto [dir, cdf] : {std::pair{Direction::Downlink, &acc.sinr_dl},
                            std::pair{Direction::Uplink, &acc.sinr_ul}}) {
      const auto rel = metrics::reliability_at(cdf->quantile(0.05) - l.sinr_backoff, l.bler, l.harq,
                                               l.latency_budget);
      add_kpi(r, Metric::Reliability, dir, rel.success, "probability",
              "5th-percentile SINR " + format_number(rel.sinr) + " dB, " +
                  std::to_string(rel.outcome.attempt_success.size()) + " attempts in budget");
    }
  }

  if (env == Environment::UrbanMacro_mMTC) {
    if (acc.unserved > 0) {
      r.warnings.push_back(std::to_string(acc.unserved) +
                           " uplink users below the rate cutoff are excluded from mean(B_i)");
    }
    if (acc.b_count > 0) {
      metrics::CdInputs in;
      in.n_mux = acc.n_mux.mean();
      in.bandwidth = cfg.scheduling.cd_bandwidth;
      in.user_bandwidth = {acc.b_sum / static_cast<double>(acc.b_count)};
      in.isd = cfg.isd;
      add_kpi(r, Metric::ConnectionDensityFullBuffer, Direction::Uplink,
              metrics::connection_density_fullbuffer(in), "devices/km^2",
              "n_mux " + format_number(in.n_mux) + ", mean B_i " +
                  format_number(in.user_bandwidth.front()) + " Hz");
    }
    if (cfg.traffic.kind == traffic::TrafficKind::PoissonMessaging && cfg.traffic.rate > 0.0) {
      const auto cd = density_search(cfg, acc.sinr_ul, acc.ul_band, acc.resources);
      r.density_search = cd;
      std::ostringstream note;
      note << "p99 delay " << format_number(cd.p99_delay) << " s, bracket ["
           << format_number(cd.bracket_low) << ", " << format_number(cd.bracket_high)
           << "], link abstraction alpha " << format_number(cfg.link.uplink.efficiency)
           << " se_max " << format_number(cfg.link.uplink.se_max) << " sinr_min "
           << format_number(cfg.link.uplink.sinr_min) << " dB";
      add_kpi(r, Metric::ConnectionDensity, Direction::Uplink, cd.density, "devices/km^2", note.str());
      if (cd.hit_upper_bound) {
        r.warnings.push_back("connection density search reached its upper bound");
      }
      if (!cd.monotone) r.warnings.push_back("p99 delay was not monotone in density");
      if (cd.density == 0.0) r.warnings.push_back("no tested density met the delay bound");
    }
  }
}

std::string stream_scheme(const EvaluationConfig& cfg) {
  std::ostringstream s;
  s << "xoshiro256** seeded by SplitMix64(master_seed=" << cfg.master_seed
    << ", drop_index, link_id); link_id = purpose<<56 | index with purposes 1 placement, "
       "2 link (ue*trxps+trxp), 3 fading, 4 coschedule, 5 traffic, 6 layout; calibration drops "
       "start at 2^62";
  return s.str();
}

}  // namespace

// ---------------------------------------------------------------------------

double DropResult::mean_sinr(Direction d) const {
  if (ues.empty()) return 0.0;
  double s = 0.0;
  for (const auto& ue : ues) s += d == Direction::Uplink ? ue.ul.sinr : ue.dl.sinr;
  return s / static_cast<double>(ues.size());
}

const KpiValue* RunResult::find(Metric m, Direction d, std::optional<double> speed_kmh) const {
  for (const auto& k : kpis) {
    if (k.metric != m) continue;
    if (d != Direction::Any && k.direction != Direction::Any && k.direction != d) continue;
    if (speed_kmh && (!k.speed_kmh || std::abs(*k.speed_kmh - *speed_kmh) > 1e-9)) continue;
    return &k;
  }
  return nullptr;
}

Simulator::Simulator(EvaluationConfig config) {
  config.validate();
  auto layout = geometry::build_layout(config);
  impl_ = std::make_unique<Impl>(std::move(config), std::move(layout));
}

Simulator::Simulator(EvaluationConfig config, geometry::NetworkLayout layout)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(layout))) {}

Simulator::~Simulator() = default;
Simulator::Simulator(Simulator&&) noexcept = default;
Simulator& Simulator::operator=(Simulator&&) noexcept = default;

const EvaluationConfig& Simulator::config() const noexcept { return impl_->cfg; }
const geometry::NetworkLayout& Simulator::layout() const noexcept { return impl_->layout; }
const link::Calibration& Simulator::calibration() const noexcept { return impl_->calibration; }

DropResult Simulator::run_drop(std::uint64_t drop_index) const { return impl_->run_drop(drop_index); }

RunResult Simulator::run(const RunOptions& options) const {
  const auto& cfg = impl_->cfg;
  RunResult r;
  r.environment = cfg.environment;
  r.variant = cfg.config_variant;
  r.config_hash = config_hash(cfg);
  r.master_seed = cfg.master_seed;
  r.drops_requested = options.drops.value_or(cfg.drops);
  r.calibration = impl_->calibration;
  r.stream_scheme = stream_scheme(cfg);
  if (!r.calibration.converged) {
    r.warnings.push_back("uplink IoT target " + format_number(cfg.link.iot_target) +
                         " dB not reachable; p0 set to the lower search bound");
  }

  const int cap = static_cast<int>(std::min<std::uint64_t>(r.drops_requested, INT_MAX));
  metrics::ConvergenceMonitor monitor(cfg.run.convergence_window, cfg.run.convergence_tolerance,
                                      std::max(1, cap));
  Accumulator acc(cfg, impl_->ul_band, impl_->resources);

  int workers = options.workers;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::uint64_t batch = static_cast<std::uint64_t>(workers) * 2;

  bool stop = false;
  std::uint64_t next = 0;
  while (!stop && next < r.drops_requested) {
    const std::uint64_t count = std::min(batch, r.drops_requested - next);
    std::vector<DropResult> results(count);
    if (workers == 1) {
      for (std::uint64_t i = 0; i < count; ++i) results[i] = impl_->run_drop(next + i);
    } else {
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (auto i = static_cast<std::uint64_t>(w); i < count;
                 i += static_cast<std::uint64_t>(workers)) {
              results[i] = impl_->run_drop(next + i);
            }
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (auto& d : results) {
      acc.add(d, impl_->layout.trxp_count());
      if (options.on_drop) options.on_drop(d);
      ++r.drops_run;
      const auto status = monitor.push(d.mean_sinr(Direction::Uplink));
      if (cfg.run.early_stop && status == metrics::ConvergenceStatus::Converged) {
        stop = true;
        break;
      }
    }
    next += count;
  }
  r.convergence = monitor.status();
  finish(r, acc, cfg);
  return r;
}

DropResult run_drop(const EvaluationConfig& config, const geometry::NetworkLayout& layout,
                    std::uint64_t drop_index) {
  return Simulator(config, layout).run_drop(drop_index);
}

RunResult run(const EvaluationConfig& config, const RunOptions& options) {
  return Simulator(config).run(options);
}

double uplink_bandwidth(const EvaluationConfig& config) noexcept {
  return config.traffic.kind == traffic::TrafficKind::PoissonMessaging ? config.scheduling.cd_bandwidth
                                                                       : config.bandwidth;
}

int uplink_resources(const EvaluationConfig& config) noexcept {
  if (config.traffic.kind != traffic::TrafficKind::PoissonMessaging) return 1;
  return std::max(1, static_cast<int>(std::lround(config.scheduling.cd_bandwidth /
                                                  config.scheduling.user_bandwidth)));
}

double offered_bit_rate(const traffic::TrafficModelSpec& spec) noexcept {
  return spec.pdu_size * 8.0 * spec.rate;
}

}  // namespace imteval::engine
