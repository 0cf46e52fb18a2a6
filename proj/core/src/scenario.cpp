// SPDX-License-Identifier: Apache-2.0
#include "imteval/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "imteval/error.hpp"
#include "ini.hpp"

namespace imteval {

namespace {

using detail::format_double;

// ---------------------------------------------------------------------------
// Field registry. Every config key is one entry: how to print it and how to
// parse it into an EvaluationConfig. Serialization walks the table in order.

struct Field {
  std::string section;
  std::string key;
  std::function<std::string(const EvaluationConfig&)> get;
  std::function<void(EvaluationConfig&, std::string_view)> set;
};

template <class Access>
Field real(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const EvaluationConfig& c) { return format_double(access(c)); },
          [access](EvaluationConfig& c, std::string_view v) { access(c) = detail::parse_double(v); }};
}

template <class Access>
Field integer(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const EvaluationConfig& c) {
            return std::to_string(access(c));
          },
          [access](EvaluationConfig& c, std::string_view v) {
            const long long x = detail::parse_integer(v);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
              throw std::invalid_argument("integer out of range");
            }
            access(c) = static_cast<int>(x);
          }};
}

template <class Access>
Field unsigned64(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const EvaluationConfig& c) {
            return std::to_string(access(c));
          },
          [access](EvaluationConfig& c, std::string_view v) {
            access(c) = static_cast<std::uint64_t>(detail::parse_unsigned(v));
          }};
}

template <class Access>
Field boolean(std::string section, std::string key, Access access) {
  return {std::move(section), std::move(key),
          [access](const EvaluationConfig& c) {
            return std::string(access(c) ? "true" : "false");
          },
          [access](EvaluationConfig& c, std::string_view v) { access(c) = detail::parse_bool(v); }};
}

std::string format_backoff(const std::vector<DopplerBackoffStep>& steps) {
  std::string out;
  for (const auto& s : steps) {
    if (!out.empty()) out += ", ";
    out += format_double(s.max_normalized_doppler) + ":" + format_double(s.backoff_db);
  }
  return out;
}

std::vector<DopplerBackoffStep> parse_backoff(std::string_view text) {
  std::vector<DopplerBackoffStep> steps;
  if (detail::trim(text).empty()) return steps;
  for (const auto& item : detail::split(text, ',')) {
    const auto parts = detail::split(item, ':');
    if (parts.size() != 2) throw std::invalid_argument("expected bound:backoff pairs");
    steps.push_back({detail::parse_double(parts[0]), detail::parse_double(parts[1])});
  }
  return steps;
}

void add_array_fields(std::vector<Field>& f, const std::string& section,
                      antenna::ArrayConfig EvaluationConfig::*member) {
  auto arr = [member](auto& c) -> auto& { return c.*member; };
  f.push_back(integer(section, "M", [arr](auto& c) -> auto& { return arr(c).M; }));
  f.push_back(integer(section, "N", [arr](auto& c) -> auto& { return arr(c).N; }));
  f.push_back(integer(section, "P", [arr](auto& c) -> auto& { return arr(c).P; }));
  f.push_back(integer(section, "Mg", [arr](auto& c) -> auto& { return arr(c).Mg; }));
  f.push_back(integer(section, "Ng", [arr](auto& c) -> auto& { return arr(c).Ng; }));
  f.push_back(integer(section, "Mp", [arr](auto& c) -> auto& { return arr(c).Mp; }));
  f.push_back(integer(section, "Np", [arr](auto& c) -> auto& { return arr(c).Np; }));
  f.push_back(real(section, "element_spacing_h",
                   [arr](auto& c) -> auto& { return arr(c).element_spacing_h; }));
  f.push_back(real(section, "element_spacing_v",
                   [arr](auto& c) -> auto& { return arr(c).element_spacing_v; }));
  f.push_back(real(section, "bearing",
                   [arr](auto& c) -> auto& { return arr(c).orientation.bearing; }));
  f.push_back(real(section, "downtilt",
                   [arr](auto& c) -> auto& { return arr(c).orientation.downtilt; }));
  f.push_back(real(section, "electrical_tilt",
                   [arr](auto& c) -> auto& { return arr(c).electrical_tilt; }));
  f.push_back(real(section, "h_3db_beamwidth",
                   [arr](auto& c) -> auto& { return arr(c).pattern.h_3db_beamwidth; }));
  f.push_back(real(section, "v_3db_beamwidth",
                   [arr](auto& c) -> auto& { return arr(c).pattern.v_3db_beamwidth; }));
  f.push_back(real(section, "front_back_ratio",
                   [arr](auto& c) -> auto& { return arr(c).pattern.front_back_ratio; }));
  f.push_back(real(section, "sidelobe_limit",
                   [arr](auto& c) -> auto& { return arr(c).pattern.sidelobe_limit; }));
  f.push_back(boolean(section, "isotropic",
                      [arr](auto& c) -> auto& { return arr(c).pattern.isotropic; }));
}

#define IMTEVAL_REAL(sec, name, expr) \
  real(sec, name, [](auto& c) -> auto& { return expr; })
#define IMTEVAL_INT(sec, name, expr) \
  integer(sec, name, [](auto& c) -> auto& { return expr; })
#define IMTEVAL_BOOL(sec, name, expr) \
  boolean(sec, name, [](auto& c) -> auto& { return expr; })

std::vector<Field> build_fields() {
  std::vector<Field> f;
  f.push_back({"scenario", "environment",
               [](const EvaluationConfig& c) { return std::string(to_string(c.environment)); },
               [](EvaluationConfig& c, std::string_view v) {
                 c.environment = parse_environment(detail::trim(v));
               }});
  f.push_back({"scenario", "variant",
               [](const EvaluationConfig& c) { return std::string(to_string(c.config_variant)); },
               [](EvaluationConfig& c, std::string_view v) {
                 c.config_variant = parse_variant(detail::trim(v));
               }});
  f.push_back(IMTEVAL_REAL("scenario", "carrier_frequency", c.carrier_frequency));
  f.push_back(IMTEVAL_REAL("scenario", "isd", c.isd));
  f.push_back(IMTEVAL_REAL("scenario", "bs_height", c.bs_height));
  f.push_back(IMTEVAL_REAL("scenario", "ue_height", c.ue_height));
  f.push_back(IMTEVAL_REAL("scenario", "bs_tx_power", c.bs_tx_power));
  f.push_back(IMTEVAL_REAL("scenario", "ue_tx_power", c.ue_tx_power));
  f.push_back(IMTEVAL_REAL("scenario", "bs_noise_figure", c.bs_noise_figure));
  f.push_back(IMTEVAL_REAL("scenario", "ue_noise_figure", c.ue_noise_figure));
  f.push_back(IMTEVAL_REAL("scenario", "bs_element_gain", c.bs_element_gain));
  f.push_back(IMTEVAL_REAL("scenario", "ue_element_gain", c.ue_element_gain));
  f.push_back(IMTEVAL_REAL("scenario", "thermal_noise_density", c.thermal_noise_density));
  f.push_back(IMTEVAL_REAL("scenario", "bandwidth", c.bandwidth));
  f.push_back(IMTEVAL_REAL("scenario", "indoor_fraction", c.indoor_fraction));
  f.push_back(IMTEVAL_REAL("scenario", "ue_speed_indoor", c.ue_speed_indoor));
  f.push_back(IMTEVAL_REAL("scenario", "ue_speed_outdoor", c.ue_speed_outdoor));
  f.push_back(IMTEVAL_INT("scenario", "ues_per_trxp", c.ues_per_trxp));
  f.push_back(IMTEVAL_REAL("scenario", "high_loss_fraction", c.high_loss_fraction));
  f.push_back(IMTEVAL_REAL("scenario", "micro_tx_power", c.micro_tx_power));
  f.push_back(IMTEVAL_REAL("scenario", "micro_height", c.micro_height));

  add_array_fields(f, "antenna.bs", &EvaluationConfig::antenna_bs);
  add_array_fields(f, "antenna.ue", &EvaluationConfig::antenna_ue);

  f.push_back({"traffic", "kind",
               [](const EvaluationConfig& c) {
                 return std::string(c.traffic.kind == traffic::TrafficKind::FullBuffer
                                        ? "full_buffer"
                                        : "poisson");
               },
               [](EvaluationConfig& c, std::string_view v) {
                 v = detail::trim(v);
                 if (v == "full_buffer") {
                   c.traffic.kind = traffic::TrafficKind::FullBuffer;
                 } else if (v == "poisson") {
                   c.traffic.kind = traffic::TrafficKind::PoissonMessaging;
                 } else {
                   throw std::invalid_argument("expected full_buffer or poisson");
                 }
               }});
  f.push_back(IMTEVAL_REAL("traffic", "pdu_size", c.traffic.pdu_size));
  f.push_back(IMTEVAL_REAL("traffic", "rate", c.traffic.rate));
  f.push_back(IMTEVAL_REAL("traffic", "pf_beta", c.scheduling.pf_beta));
  f.push_back(IMTEVAL_REAL("traffic", "scheduling_interval", c.scheduling.scheduling_interval));
  f.push_back(IMTEVAL_REAL("traffic", "cd_bandwidth", c.scheduling.cd_bandwidth));
  f.push_back(IMTEVAL_REAL("traffic", "user_bandwidth", c.scheduling.user_bandwidth));
  f.push_back(IMTEVAL_REAL("traffic", "message_overhead", c.scheduling.message_overhead));
  f.push_back(IMTEVAL_REAL("traffic", "delay_limit", c.scheduling.delay_limit));
  f.push_back(IMTEVAL_REAL("traffic", "density_min", c.scheduling.density_min));
  f.push_back(IMTEVAL_REAL("traffic", "density_max", c.scheduling.density_max));
  f.push_back(IMTEVAL_INT("traffic", "queue_messages", c.scheduling.queue_messages));

  f.push_back(IMTEVAL_REAL("link", "efficiency_dl", c.link.downlink.efficiency));
  f.push_back(IMTEVAL_REAL("link", "se_max_dl", c.link.downlink.se_max));
  f.push_back(IMTEVAL_REAL("link", "sinr_min_dl", c.link.downlink.sinr_min));
  f.push_back(IMTEVAL_REAL("link", "efficiency_ul", c.link.uplink.efficiency));
  f.push_back(IMTEVAL_REAL("link", "se_max_ul", c.link.uplink.se_max));
  f.push_back(IMTEVAL_REAL("link", "sinr_min_ul", c.link.uplink.sinr_min));
  f.push_back(IMTEVAL_REAL("link", "bler_sinr_50", c.link.bler.sinr_50));
  f.push_back(IMTEVAL_REAL("link", "bler_slope", c.link.bler.slope));
  f.push_back(IMTEVAL_REAL("link", "bler_floor", c.link.bler.bler_floor));
  f.push_back(IMTEVAL_INT("link", "harq_max_transmissions", c.link.harq.max_transmissions));
  f.push_back(IMTEVAL_REAL("link", "harq_per_transmission_time", c.link.harq.per_transmission_time));
  f.push_back(IMTEVAL_REAL("link", "harq_combining_gain", c.link.harq.combining_gain_per_retx));
  f.push_back(IMTEVAL_REAL("link", "latency_budget", c.link.latency_budget));
  f.push_back(IMTEVAL_REAL("link", "sinr_backoff", c.link.sinr_backoff));
  f.push_back(IMTEVAL_REAL("link", "pc_alpha", c.link.pc_alpha));
  f.push_back(IMTEVAL_REAL("link", "iot_target", c.link.iot_target));
  f.push_back(IMTEVAL_REAL("link", "subcarrier_spacing", c.link.subcarrier_spacing));
  f.push_back({"link", "doppler_backoff",
               [](const EvaluationConfig& c) { return format_backoff(c.link.doppler_backoff); },
               [](EvaluationConfig& c, std::string_view v) {
                 c.link.doppler_backoff = parse_backoff(v);
               }});
  f.push_back(IMTEVAL_REAL("link", "doppler_backoff_max", c.link.doppler_backoff_max));

  f.push_back({"channel", "profile", [](const EvaluationConfig& c) { return c.channel.profile; },
               [](EvaluationConfig& c, std::string_view v) {
                 c.channel.profile = std::string(detail::trim(v));
               }});
  f.push_back(IMTEVAL_INT("channel", "rays_per_cluster", c.channel.rays_per_cluster));
  f.push_back(IMTEVAL_INT("channel", "frequency_samples", c.channel.frequency_samples));
  f.push_back(IMTEVAL_INT("channel", "fading_time_samples", c.channel.fading_time_samples));
  f.push_back(IMTEVAL_BOOL("channel", "fading", c.channel.fading));

  f.push_back(unsigned64("run", "drops", [](auto& c) -> auto& { return c.drops; }));
  f.push_back(unsigned64("run", "master_seed",
                         [](auto& c) -> auto& { return c.master_seed; }));
  f.push_back(IMTEVAL_REAL("run", "duration_T", c.duration_T));
  f.push_back(IMTEVAL_BOOL("run", "early_stop", c.run.early_stop));
  f.push_back(IMTEVAL_INT("run", "convergence_window", c.run.convergence_window));
  f.push_back(IMTEVAL_REAL("run", "convergence_tolerance", c.run.convergence_tolerance));
  return f;
}

#undef IMTEVAL_REAL
#undef IMTEVAL_INT
#undef IMTEVAL_BOOL

const std::vector<Field>& fields() {
  static const std::vector<Field> table = build_fields();
  return table;
}

const Field* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

void set_field(EvaluationConfig& cfg, const Field& f, std::string_view value) {
  try {
    f.set(cfg, value);
  } catch (const UnknownPreset& e) {
    throw ConfigInvalid(f.section + "." + f.key, e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigInvalid(f.section + "." + f.key, e.what());
  }
}

// ---------------------------------------------------------------------------
// Validation helpers.

void check(bool ok, const char* field, const char* why) {
  if (!ok) throw ConfigInvalid(field, why);
}

bool in_range(double v, double lo, double hi) { return v >= lo && v <= hi; }

void validate_link(const LinkSettings& l) {
  check(in_range(l.downlink.efficiency, 1e-9, 1.0), "link.efficiency_dl", "must be in (0, 1]");
  check(in_range(l.uplink.efficiency, 1e-9, 1.0), "link.efficiency_ul", "must be in (0, 1]");
  check(in_range(l.downlink.se_max, 1e-9, 100.0), "link.se_max_dl", "must be in (0, 100]");
  check(in_range(l.uplink.se_max, 1e-9, 100.0), "link.se_max_ul", "must be in (0, 100]");
  check(in_range(l.downlink.sinr_min, -100.0, 100.0), "link.sinr_min_dl", "must be in [-100, 100]");
  check(in_range(l.uplink.sinr_min, -100.0, 100.0), "link.sinr_min_ul", "must be in [-100, 100]");
  check(in_range(l.bler.sinr_50, -100.0, 100.0), "link.bler_sinr_50", "must be in [-100, 100]");
  check(in_range(l.bler.slope, 1e-6, 100.0), "link.bler_slope", "must be in (0, 100]");
  check(in_range(l.bler.bler_floor, 0.0, 0.5), "link.bler_floor", "must be in [0, 0.5]");
  check(l.harq.max_transmissions >= 1 && l.harq.max_transmissions <= 64,
        "link.harq_max_transmissions", "must be in [1, 64]");
  check(in_range(l.harq.per_transmission_time, 1e-7, 1.0), "link.harq_per_transmission_time",
        "must be in (0, 1] s");
  check(in_range(l.harq.combining_gain_per_retx, 0.0, 20.0), "link.harq_combining_gain",
        "must be in [0, 20]");
  check(in_range(l.latency_budget, 1e-7, 10.0), "link.latency_budget", "must be in (0, 10] s");
  check(in_range(l.sinr_backoff, 0.0, 30.0), "link.sinr_backoff", "must be in [0, 30]");
  check(in_range(l.pc_alpha, 0.0, 1.0), "link.pc_alpha", "must be in [0, 1]");
  check(in_range(l.iot_target, 0.0, 60.0), "link.iot_target", "must be in [0, 60]");
  check(in_range(l.subcarrier_spacing, 1e3, 1e6), "link.subcarrier_spacing",
        "must be in [1 kHz, 1 MHz]");
  double prev = 0.0;
  for (const auto& s : l.doppler_backoff) {
    check(s.max_normalized_doppler > prev, "link.doppler_backoff",
          "bounds must be positive and increasing");
    check(in_range(s.backoff_db, 0.0, 30.0), "link.doppler_backoff", "backoff must be in [0, 30]");
    prev = s.max_normalized_doppler;
  }
  check(in_range(l.doppler_backoff_max, 0.0, 30.0), "link.doppler_backoff_max",
        "must be in [0, 30]");
}

}  // namespace

double scaled_tx_power(double at_20mhz_dbm, double bandwidth_hz) {
  return at_20mhz_dbm + 10.0 * std::log10(bandwidth_hz / 20e6);
}

antenna::ArrayConfig EvaluationConfig::bs_array() const {
  auto a = antenna_bs;
  a.pattern.max_gain = bs_element_gain;
  return a;
}

antenna::ArrayConfig EvaluationConfig::ue_array() const {
  auto a = antenna_ue;
  a.pattern.max_gain = ue_element_gain;
  return a;
}

void EvaluationConfig::validate() const {
  check(in_range(carrier_frequency, 1e8, 1e11), "scenario.carrier_frequency",
        "must be in [100 MHz, 100 GHz]");
  check(in_range(isd, 1.0, 1e5), "scenario.isd", "must be in [1, 100000] m");
  check(in_range(bs_height, 0.5, 300.0), "scenario.bs_height", "must be in [0.5, 300] m");
  check(in_range(ue_height, 0.5, 100.0), "scenario.ue_height", "must be in [0.5, 100] m");
  check(in_range(bs_tx_power, -30.0, 80.0), "scenario.bs_tx_power", "must be in [-30, 80] dBm");
  check(in_range(ue_tx_power, -30.0, 40.0), "scenario.ue_tx_power", "must be in [-30, 40] dBm");
  check(in_range(bs_noise_figure, 0.0, 30.0), "scenario.bs_noise_figure", "must be in [0, 30] dB");
  check(in_range(ue_noise_figure, 0.0, 30.0), "scenario.ue_noise_figure", "must be in [0, 30] dB");
  check(in_range(bs_element_gain, -20.0, 30.0), "scenario.bs_element_gain",
        "must be in [-20, 30] dBi");
  check(in_range(ue_element_gain, -20.0, 30.0), "scenario.ue_element_gain",
        "must be in [-20, 30] dBi");
  check(in_range(thermal_noise_density, -200.0, -100.0), "scenario.thermal_noise_density",
        "must be in [-200, -100] dBm/Hz");
  check(in_range(bandwidth, 1e3, 2e9), "scenario.bandwidth", "must be in [1 kHz, 2 GHz]");
  if (environment == Environment::UrbanMacro_URLLC) {
    const double cap = config_variant == Variant::A ? 100e6 : 40e6;
    check(bandwidth <= cap, "scenario.bandwidth",
          config_variant == Variant::A ? "must not exceed 100 MHz" : "must not exceed 40 MHz");
  }
  if (environment == Environment::UrbanMacro_mMTC) {
    const double cap = config_variant == Variant::A ? 10e6 : 50e6;
    check(bandwidth <= cap, "scenario.bandwidth",
          config_variant == Variant::A ? "must not exceed 10 MHz" : "must not exceed 50 MHz");
  }
  check(in_range(indoor_fraction, 0.0, 1.0), "scenario.indoor_fraction", "must be in [0, 1]");
  check(in_range(ue_speed_indoor, 0.0, 1000.0), "scenario.ue_speed_indoor",
        "must be in [0, 1000] km/h");
  check(in_range(ue_speed_outdoor, 0.0, 1000.0), "scenario.ue_speed_outdoor",
        "must be in [0, 1000] km/h");
  check(ues_per_trxp >= 1 && ues_per_trxp <= 10000, "scenario.ues_per_trxp",
        "must be in [1, 10000]");
  check(in_range(high_loss_fraction, 0.0, 1.0), "scenario.high_loss_fraction",
        "must be in [0, 1]");
  check(in_range(micro_tx_power, -30.0, 80.0), "scenario.micro_tx_power",
        "must be in [-30, 80] dBm");
  check(in_range(micro_height, 0.5, 300.0), "scenario.micro_height", "must be in [0.5, 300] m");

  antenna_bs.validate("antenna.bs");
  antenna_ue.validate("antenna.ue");
  if (antenna_bs.M % antenna_bs.Mp != 0) throw ConfigInvalid("antenna.bs.Mp", "must divide M");
  if (antenna_bs.N % antenna_bs.Np != 0) throw ConfigInvalid("antenna.bs.Np", "must divide N");
  if (antenna_ue.M % antenna_ue.Mp != 0) throw ConfigInvalid("antenna.ue.Mp", "must divide M");
  if (antenna_ue.N % antenna_ue.Np != 0) throw ConfigInvalid("antenna.ue.Np", "must divide N");

  traffic.validate("traffic");
  check(in_range(traffic.pdu_size, 0.0, 1e9), "traffic.pdu_size", "must be in [0, 1e9] bytes");
  check(in_range(traffic.rate, 0.0, 1e6), "traffic.rate", "must be in [0, 1e6] per second");
  check(in_range(scheduling.pf_beta, 1e-9, 1.0), "traffic.pf_beta", "must be in (0, 1]");
  check(in_range(scheduling.scheduling_interval, 1e-6, 1.0), "traffic.scheduling_interval",
        "must be in [1 us, 1 s]");
  check(in_range(scheduling.cd_bandwidth, 1.0, 1e9), "traffic.cd_bandwidth",
        "must be in [1 Hz, 1 GHz]");
  check(in_range(scheduling.user_bandwidth, 1.0, scheduling.cd_bandwidth),
        "traffic.user_bandwidth", "must be in [1 Hz, cd_bandwidth]");
  check(in_range(scheduling.message_overhead, 0.0, 100.0), "traffic.message_overhead",
        "must be in [0, 100] s");
  check(in_range(scheduling.delay_limit, 1e-6, 1e6), "traffic.delay_limit",
        "must be in (0, 1e6] s");
  check(in_range(scheduling.density_min, 1e-3, 1e12), "traffic.density_min",
        "must be in [1e-3, 1e12]");
  check(in_range(scheduling.density_max, scheduling.density_min * (1 + 1e-9), 1e12),
        "traffic.density_max", "must exceed density_min and be <= 1e12");
  check(scheduling.queue_messages >= 100 && scheduling.queue_messages <= 100000000,
        "traffic.queue_messages", "must be in [100, 1e8]");

  validate_link(link);

  check(channel.rays_per_cluster == 1 || channel.rays_per_cluster == 20,
        "channel.rays_per_cluster", "must be 1 or 20");
  check(channel.frequency_samples >= 1 && channel.frequency_samples <= 1024,
        "channel.frequency_samples", "must be in [1, 1024]");
  check(channel.fading_time_samples >= 1 && channel.fading_time_samples <= 1024,
        "channel.fading_time_samples", "must be in [1, 1024]");

  check(drops >= 1 && drops <= (1ULL << 40), "run.drops", "must be in [1, 2^40]");
  check(in_range(duration_T, 1e-4, 1e4), "run.duration_T", "must be in [1e-4, 1e4] s");
  check(scheduling.scheduling_interval <= duration_T, "traffic.scheduling_interval",
        "must not exceed run.duration_T");
  check(run.convergence_window >= 1 && run.convergence_window <= 1000000,
        "run.convergence_window", "must be in [1, 1e6]");
  check(in_range(run.convergence_tolerance, 1e-12, 1.0), "run.convergence_tolerance",
        "must be in (0, 1]");
}

// ---------------------------------------------------------------------------
// Presets

namespace {

antenna::ArrayConfig panel(int M, int N, int P, int Mg, int Ng, int Mp, int Np, double downtilt) {
  antenna::ArrayConfig a;
  a.M = M;
  a.N = N;
  a.P = P;
  a.Mg = Mg;
  a.Ng = Ng;
  a.Mp = Mp;
  a.Np = Np;
  a.orientation.downtilt = downtilt;
  return a;
}

antenna::ArrayConfig isotropic_ue(int P) {
  auto a = panel(1, 1, P, 1, 1, 1, 1, 0.0);
  a.pattern = antenna::ElementPattern::make_isotropic();
  return a;
}

EvaluationConfig base_config(Environment e, Variant v) {
  EvaluationConfig c;
  c.environment = e;
  c.config_variant = v;
  c.thermal_noise_density = -174.0;
  c.ue_height = 1.5;
  c.ue_tx_power = 23.0;
  c.bs_noise_figure = 5.0;
  c.ue_noise_figure = 7.0;
  c.ue_element_gain = 0.0;
  c.bs_element_gain = 8.0;
  c.ues_per_trxp = 10;
  c.drops = 10000;
  c.master_seed = 1;
  c.duration_T = 0.1;
  c.antenna_ue = isotropic_ue(2);
  c.traffic = {traffic::TrafficKind::FullBuffer, 32.0, 0.0};
  c.channel.frequency_samples = 8;
  c.channel.fading_time_samples = 4;
  return c;
}

}  // namespace

EvaluationConfig preset(Environment e, Variant v) {
  EvaluationConfig c = base_config(e, v);
  switch (e) {
    case Environment::UrbanMacro_mMTC:
      c.carrier_frequency = 700e6;
      c.isd = v == Variant::A ? 500.0 : 1732.0;
      c.bs_height = 25.0;
      c.bandwidth = 10e6;
      c.bs_tx_power = scaled_tx_power(49.0, c.bandwidth);
      c.indoor_fraction = 0.8;
      c.ue_speed_indoor = 3.0;
      c.ue_speed_outdoor = 3.0;
      c.high_loss_fraction = 0.2;
      c.traffic = {traffic::TrafficKind::PoissonMessaging, 32.0, 1.0 / 7200.0};
      c.antenna_bs = panel(1, 1, 2, 1, 1, 1, 1, 10.0);
      c.antenna_ue = isotropic_ue(1);
      // Narrowband uplink with repetition coverage: the rate map keeps going
      // below the broadband cutoff.
      c.link.uplink.sinr_min = -20.0;
      // Flat, static narrowband channel: one ray per cluster carries the
      // fading; intra-cluster angular structure is not observable.
      c.channel.rays_per_cluster = 1;
      c.channel.frequency_samples = 1;
      c.channel.fading_time_samples = 1;
      break;
    case Environment::UrbanMacro_URLLC:
      c.carrier_frequency = v == Variant::A ? 4e9 : 700e6;
      c.isd = 500.0;
      c.bs_height = 25.0;
      c.bandwidth = 20e6;
      c.bs_tx_power = scaled_tx_power(49.0, c.bandwidth);
      c.indoor_fraction = 0.2;
      c.ue_speed_indoor = 3.0;
      c.ue_speed_outdoor = 30.0;
      c.high_loss_fraction = 0.0;
      c.antenna_bs = v == Variant::A ? panel(4, 4, 2, 1, 1, 1, 4, 10.0)
                                     : panel(2, 4, 2, 1, 1, 1, 4, 10.0);
      c.link.subcarrier_spacing = v == Variant::A ? 30e3 : 15e3;
      break;
    case Environment::IndoorHotspot_eMBB:
      c.carrier_frequency = 4e9;
      c.isd = 20.0;
      c.bs_height = 3.0;
      c.bandwidth = 20e6;
      c.bs_tx_power = scaled_tx_power(24.0, c.bandwidth);
      c.bs_element_gain = 5.0;
      c.indoor_fraction = 1.0;
      c.ue_speed_indoor = 3.0;
      c.ue_speed_outdoor = 3.0;
      c.high_loss_fraction = 0.0;
      c.antenna_bs = panel(4, 4, 2, 1, 1, 4, 4, 90.0);
      c.link.subcarrier_spacing = 30e3;
      break;
    case Environment::DenseUrban_eMBB:
      c.carrier_frequency = 4e9;
      c.isd = 200.0;
      c.bs_height = 25.0;
      c.bandwidth = 20e6;
      c.bs_tx_power = scaled_tx_power(44.0, c.bandwidth);
      c.micro_tx_power = scaled_tx_power(33.0, c.bandwidth);
      c.micro_height = 10.0;
      c.indoor_fraction = 0.8;
      c.ue_speed_indoor = 3.0;
      c.ue_speed_outdoor = 30.0;
      c.high_loss_fraction = 0.2;
      c.antenna_bs = panel(8, 16, 2, 1, 1, 2, 8, 12.0);
      c.link.subcarrier_spacing = 30e3;
      break;
    case Environment::Rural_eMBB:
      c.carrier_frequency = 700e6;
      c.isd = 1732.0;
      c.bs_height = 35.0;
      c.bandwidth = 10e6;
      c.bs_tx_power = scaled_tx_power(49.0, c.bandwidth);
      c.indoor_fraction = 0.5;
      c.ue_speed_indoor = 3.0;
      c.ue_speed_outdoor = 120.0;
      c.high_loss_fraction = 0.0;
      c.antenna_bs = panel(4, 8, 2, 1, 1, 1, 8, 4.0);
      break;
  }
  return c;
}

std::vector<PresetInfo> list_presets() {
  std::vector<PresetInfo> out;
  for (auto e : kAllEnvironments) {
    for (auto v : {Variant::A, Variant::B}) {
      const auto c = preset(e, v);
      std::ostringstream d;
      d << "ISD " << format_double(c.isd) << " m, " << format_double(c.carrier_frequency / 1e6)
        << " MHz, " << format_double(c.bandwidth / 1e6) << " MHz bandwidth";
      switch (e) {
        case Environment::UrbanMacro_mMTC:
          d << "; connection density, Configuration " << to_string(v);
          break;
        case Environment::UrbanMacro_URLLC:
          d << "; reliability, Configuration " << to_string(v);
          break;
        default:
          d << "; spectral efficiency and mobility, channel model " << to_string(v);
          break;
      }
      out.push_back({e, v, d.str()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format

std::string serialize_config(const EvaluationConfig& cfg) {
  std::string out;
  std::string current;
  for (const auto& f : fields()) {
    if (f.section != current) {
      if (!current.empty()) out += "\n";
      out += "[" + f.section + "]\n";
      current = f.section;
    }
    out += f.key + " = " + f.get(cfg) + "\n";
  }
  return out;
}

EvaluationConfig parse_config_text(std::string_view text, const EvaluationConfig& base,
                                   std::string_view origin) {
  const auto doc = detail::parse_ini(text, origin);
  EvaluationConfig cfg = base;
  if (const auto* scenario = doc.find("scenario")) {
    Environment env = base.environment;
    Variant var = base.config_variant;
    if (const auto* e = scenario->find("environment")) {
      try {
        env = parse_environment(detail::trim(*e));
      } catch (const UnknownPreset& ex) {
        throw ConfigInvalid("scenario.environment", ex.what());
      }
    }
    if (const auto* v = scenario->find("variant")) {
      try {
        var = parse_variant(detail::trim(*v));
      } catch (const UnknownPreset& ex) {
        throw ConfigInvalid("scenario.variant", ex.what());
      }
    }
    if (env != base.environment || var != base.config_variant) cfg = preset(env, var);
  }
  for (const auto& section : doc.sections) {
    for (const auto& [key, value] : section.entries) {
      const auto* f = find_field(section.name, key);
      if (!f) throw ConfigInvalid(section.name + "." + key, "unknown key");
      set_field(cfg, *f, value);
    }
  }
  cfg.validate();
  return cfg;
}

EvaluationConfig parse_config_text(std::string_view text, std::string_view origin) {
  const auto doc = detail::parse_ini(text, origin);
  const auto* scenario = doc.find("scenario");
  const std::string* env = scenario ? scenario->find("environment") : nullptr;
  if (!env) throw ConfigInvalid("scenario.environment", "required when no preset is given");
  Environment e;
  Variant v = Variant::A;
  try {
    e = parse_environment(detail::trim(*env));
    if (const auto* var = scenario->find("variant")) v = parse_variant(detail::trim(*var));
  } catch (const UnknownPreset& ex) {
    throw ConfigInvalid("scenario.environment", ex.what());
  }
  return parse_config_text(text, preset(e, v), origin);
}

EvaluationConfig load_config(const std::string& path, std::optional<EvaluationConfig> base) {
  const auto text = detail::read_text_file(path);
  if (base) return parse_config_text(text, *base, path);
  return parse_config_text(text, path);
}

void apply_override(EvaluationConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigSyntax("override '" + std::string(assignment) + "' is not section.key=value");
  }
  const auto lhs = detail::trim(assignment.substr(0, eq));
  const auto value = detail::trim(assignment.substr(eq + 1));
  const auto dot = lhs.rfind('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == lhs.size()) {
    throw ConfigSyntax("override '" + std::string(assignment) + "' is not section.key=value");
  }
  const auto section = lhs.substr(0, dot);
  const auto key = lhs.substr(dot + 1);
  const auto* f = find_field(section, key);
  if (!f) throw ConfigInvalid(std::string(lhs), "unknown key");
  if (section == "scenario" && (key == "environment" || key == "variant")) {
    EvaluationConfig probe = cfg;
    set_field(probe, *f, value);
    if (probe.environment != cfg.environment || probe.config_variant != cfg.config_variant) {
      cfg = preset(probe.environment, probe.config_variant);
    }
    return;
  }
  set_field(cfg, *f, value);
}

std::string config_hash(const EvaluationConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace imteval
