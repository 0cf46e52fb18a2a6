// SPDX-License-Identifier: Apache-2.0
#include "imteval/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "imteval/error.hpp"

namespace imteval {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct MetricName {
  Metric metric;
  std::string_view canonical;
};

constexpr MetricName kMetricNames[] = {
    {Metric::AvgSpectralEfficiency, "avg_SE"},
    {Metric::Pct5SpectralEfficiency, "pct5_SE"},
    {Metric::ConnectionDensity, "connection_density"},
    {Metric::ConnectionDensityFullBuffer, "connection_density_fullbuffer"},
    {Metric::Reliability, "reliability"},
    {Metric::Mobility, "mobility"},
    {Metric::UserExperiencedDataRate, "user_experienced_data_rate"},
    {Metric::UserPlaneLatency, "user_plane_latency"},
    {Metric::ControlPlaneLatency, "control_plane_latency"},
    {Metric::MobilityInterruptionTime, "mobility_interruption_time"},
    {Metric::MeanSinr, "mean_sinr"},
    {Metric::InterferenceOverThermal, "iot"},
    {Metric::SnrMargin, "snr_margin"},
};

}  // namespace

std::string_view to_string(Environment e) noexcept {
  switch (e) {
    case Environment::IndoorHotspot_eMBB: return "IndoorHotspot_eMBB";
    case Environment::DenseUrban_eMBB: return "DenseUrban_eMBB";
    case Environment::Rural_eMBB: return "Rural_eMBB";
    case Environment::UrbanMacro_mMTC: return "UrbanMacro_mMTC";
    case Environment::UrbanMacro_URLLC: return "UrbanMacro_URLLC";
  }
  return "?";
}

std::string_view short_name(Environment e) noexcept {
  switch (e) {
    case Environment::IndoorHotspot_eMBB: return "indoor";
    case Environment::DenseUrban_eMBB: return "dense-urban";
    case Environment::Rural_eMBB: return "rural";
    case Environment::UrbanMacro_mMTC: return "mmtc";
    case Environment::UrbanMacro_URLLC: return "urllc";
  }
  return "?";
}

std::string_view to_string(Variant v) noexcept { return v == Variant::A ? "A" : "B"; }

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Downlink: return "downlink";
    case Direction::Uplink: return "uplink";
    case Direction::Any: return "any";
  }
  return "?";
}

std::string_view to_string(LayoutKind k) noexcept {
  switch (k) {
    case LayoutKind::HexMacro19: return "HexMacro19";
    case LayoutKind::Indoor12: return "Indoor12";
    case LayoutKind::DenseUrbanTwoLayer: return "DenseUrbanTwoLayer";
  }
  return "?";
}

std::string_view to_string(Metric m) noexcept {
  for (const auto& n : kMetricNames) {
    if (n.metric == m) return n.canonical;
  }
  return "?";
}

Environment parse_environment(std::string_view text) {
  const auto key = lower(text);
  for (auto e : kAllEnvironments) {
    if (key == lower(to_string(e)) || key == short_name(e)) return e;
  }
  if (key == "indoorhotspot" || key == "inh") return Environment::IndoorHotspot_eMBB;
  if (key == "denseurban" || key == "dense_urban") return Environment::DenseUrban_eMBB;
  throw UnknownPreset("unknown environment '" + std::string(text) + "'");
}

Variant parse_variant(std::string_view text) {
  const auto key = lower(text);
  if (key == "a") return Variant::A;
  if (key == "b") return Variant::B;
  throw UnknownPreset("unknown variant '" + std::string(text) + "' (expected A or B)");
}

Direction parse_direction(std::string_view text) {
  const auto key = lower(text);
  if (key == "downlink" || key == "dl") return Direction::Downlink;
  if (key == "uplink" || key == "ul") return Direction::Uplink;
  if (key == "any" || key.empty() || key == "both") return Direction::Any;
  throw DomainError("unknown link direction '" + std::string(text) + "'");
}

Metric parse_metric(std::string_view text) {
  const auto key = lower(text);
  for (const auto& n : kMetricNames) {
    if (key == lower(n.canonical)) return n.metric;
  }
  if (key == "average_se" || key == "avg_spectral_efficiency") return Metric::AvgSpectralEfficiency;
  if (key == "5th_percentile_se" || key == "pct5_spectral_efficiency") {
    return Metric::Pct5SpectralEfficiency;
  }
  if (key == "uedr") return Metric::UserExperiencedDataRate;
  if (key == "normalized_link_rate") return Metric::Mobility;
  throw SchemaError(0, "unknown metric '" + std::string(text) + "'");
}

LayoutKind layout_for(Environment e) noexcept {
  switch (e) {
    case Environment::IndoorHotspot_eMBB: return LayoutKind::Indoor12;
    case Environment::DenseUrban_eMBB: return LayoutKind::DenseUrbanTwoLayer;
    default: return LayoutKind::HexMacro19;
  }
}

bool is_embb(Environment e) noexcept {
  return e == Environment::IndoorHotspot_eMBB || e == Environment::DenseUrban_eMBB ||
         e == Environment::Rural_eMBB;
}

}  // namespace imteval
