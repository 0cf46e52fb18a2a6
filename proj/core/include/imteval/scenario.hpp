// SPDX-License-Identifier: Apache-2.0
#pragma once

// Evaluation configuration: presets per (environment, variant), validation,
// and the INI config format.
//
// Config sections and keys:
//   [scenario]    environment, variant and the physical parameters
//   [antenna.bs]  [antenna.ue]  panel geometry and element pattern
//   [traffic]     traffic model and scheduler settings
//   [link]        link abstraction, BLER, HARQ, power control
//   [channel]     channel profile selection and fading resolution
//   [run]         drops, seed, duration and convergence control
// Keys are the field names below. Unknown sections or keys are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "imteval/antenna.hpp"
#include "imteval/link.hpp"
#include "imteval/traffic.hpp"
#include "imteval/types.hpp"

namespace imteval {

struct DopplerBackoffStep {
  double max_normalized_doppler;  // Doppler shift over subcarrier spacing
  double backoff_db;
  friend bool operator==(const DopplerBackoffStep&, const DopplerBackoffStep&) = default;
};

struct LinkSettings {
  link::LinkAbstraction downlink{0.6, 7.4, -10.0};
  link::LinkAbstraction uplink{0.6, 5.5, -10.0};
  link::BlerModel bler{};
  link::HarqConfig harq{};
  double latency_budget = 1e-3;  // s
  /// Fixed SINR loss standing in for estimation and feedback imperfections.
  double sinr_backoff = 1.0;  // dB
  double pc_alpha = 0.8;
  double iot_target = 10.0;  // dB, mean uplink interference over thermal
  double subcarrier_spacing = 15e3;  // Hz
  /// Looked up with the first step whose bound is >= the normalized Doppler;
  /// beyond the last bound `doppler_backoff_max` applies.
  std::vector<DopplerBackoffStep> doppler_backoff{{1e-4, 0.0}, {1e-3, 0.5}, {1e-2, 1.5}, {1e-1, 3.0}};
  double doppler_backoff_max = 3.0;
  friend bool operator==(const LinkSettings&, const LinkSettings&) = default;
};

struct TrafficSettings {
  double pf_beta = 0.01;
  double scheduling_interval = 1e-3;  // s
  /// Uplink band used by the connection density evaluation and the per-user
  /// share of it (one scheduling resource).
  double cd_bandwidth = 180e3;    // Hz
  double user_bandwidth = 15e3;   // Hz
  double message_overhead = 0.0;  // s added to each message service
  double delay_limit = 10.0;      // s, 99th percentile QoS bound
  double density_min = 1e4;       // devices/km^2, search bracket
  double density_max = 1e8;
  int queue_messages = 20000;  // messages simulated per density point
  friend bool operator==(const TrafficSettings&, const TrafficSettings&) = default;
};

struct ChannelSettings {
  /// Channel profile family; empty selects the environment default.
  std::string profile;
  int rays_per_cluster = 20;
  int frequency_samples = 8;
  int fading_time_samples = 1;
  bool fading = true;
  friend bool operator==(const ChannelSettings&, const ChannelSettings&) = default;
};

struct RunSettings {
  bool early_stop = false;
  int convergence_window = 100;
  double convergence_tolerance = 1e-3;
  friend bool operator==(const RunSettings&, const RunSettings&) = default;
};

struct EvaluationConfig {
  Environment environment = Environment::UrbanMacro_mMTC;
  Variant config_variant = Variant::A;
  double carrier_frequency = 700e6;  // Hz
  double isd = 500.0;                // m
  double bs_height = 25.0;           // m
  double ue_height = 1.5;            // m
  double bs_tx_power = 46.0;         // dBm, total over `bandwidth`
  double ue_tx_power = 23.0;         // dBm, maximum
  double bs_noise_figure = 5.0;      // dB
  double ue_noise_figure = 7.0;      // dB
  double bs_element_gain = 8.0;      // dBi
  double ue_element_gain = 0.0;      // dBi
  double thermal_noise_density = link::kThermalNoiseDensity;  // dBm/Hz
  double bandwidth = 10e6;           // Hz
  double indoor_fraction = 0.8;
  double ue_speed_indoor = 3.0;      // km/h
  double ue_speed_outdoor = 3.0;     // km/h
  int ues_per_trxp = 10;
  double high_loss_fraction = 0.2;
  /// Dense-urban micro layer; ignored by the other layouts.
  double micro_tx_power = 33.0;  // dBm
  double micro_height = 10.0;    // m
  traffic::TrafficModelSpec traffic{};
  std::uint64_t drops = 10000;
  std::uint64_t master_seed = 1;
  double duration_T = 0.1;  // s
  antenna::ArrayConfig antenna_bs{};
  antenna::ArrayConfig antenna_ue{};
  LinkSettings link{};
  TrafficSettings scheduling{};
  ChannelSettings channel{};
  RunSettings run{};

  /// Element patterns with the configured element gains applied.
  antenna::ArrayConfig bs_array() const;
  antenna::ArrayConfig ue_array() const;

  /// Throws ConfigInvalid naming the first offending field as "section.key".
  void validate() const;

  friend bool operator==(const EvaluationConfig&, const EvaluationConfig&) = default;
};

/// Throws UnknownPreset for pairs without a preset.
EvaluationConfig preset(Environment environment, Variant variant);

struct PresetInfo {
  Environment environment;
  Variant variant;
  std::string description;
};
std::vector<PresetInfo> list_presets();

/// Total BS power for a bandwidth: `at_20mhz` + 10*log10(W / 20 MHz).
double scaled_tx_power(double at_20mhz_dbm, double bandwidth_hz);

/// Canonical INI text for `cfg`; `parse_config_text(serialize_config(c))`
/// returns `c` field for field.
std::string serialize_config(const EvaluationConfig& cfg);

/// Applies INI text on top of `base`. If the text names a different
/// environment or variant, the matching preset becomes the base first.
/// Throws ConfigSyntax, ConfigInvalid.
EvaluationConfig parse_config_text(std::string_view text, const EvaluationConfig& base,
                                   std::string_view origin = "<config>");
/// Without a base, the text must name [scenario] environment.
EvaluationConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");

/// Reads `path` and applies it as above. Throws IoError, ConfigSyntax, ConfigInvalid.
EvaluationConfig load_config(const std::string& path, std::optional<EvaluationConfig> base = {});

/// Applies one "section.key=value" override (split at the last '.' before '=').
void apply_override(EvaluationConfig& cfg, std::string_view assignment);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string config_hash(const EvaluationConfig& cfg);

}  // namespace imteval
