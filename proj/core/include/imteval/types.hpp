// SPDX-License-Identifier: Apache-2.0
#pragma once

// Vocabulary shared by every module: environments, variants, link
// directions and KPI names, with their canonical text forms.

#include <array>
#include <string>
#include <string_view>

namespace imteval {

enum class Environment {
  IndoorHotspot_eMBB,
  DenseUrban_eMBB,
  Rural_eMBB,
  UrbanMacro_mMTC,
  UrbanMacro_URLLC,
};

inline constexpr std::array<Environment, 5> kAllEnvironments{
    Environment::IndoorHotspot_eMBB, Environment::DenseUrban_eMBB, Environment::Rural_eMBB,
    Environment::UrbanMacro_mMTC, Environment::UrbanMacro_URLLC};

enum class Variant { A, B };

enum class Direction { Downlink, Uplink, Any };

enum class LayoutKind { HexMacro19, Indoor12, DenseUrbanTwoLayer };

enum class Metric {
  AvgSpectralEfficiency,
  Pct5SpectralEfficiency,
  ConnectionDensity,
  ConnectionDensityFullBuffer,
  Reliability,
  Mobility,
  UserExperiencedDataRate,
  UserPlaneLatency,
  ControlPlaneLatency,
  MobilityInterruptionTime,
  MeanSinr,
  InterferenceOverThermal,
  /// Reported SINR margin over the mobility operating point; informational.
  SnrMargin,
};

std::string_view to_string(Environment e) noexcept;
std::string_view to_string(Variant v) noexcept;
std::string_view to_string(Direction d) noexcept;
std::string_view to_string(LayoutKind k) noexcept;
std::string_view to_string(Metric m) noexcept;

/// Accepts canonical names and the short aliases shown by `list-scenarios`
/// (case-insensitive). Throws UnknownPreset.
Environment parse_environment(std::string_view text);
/// Throws UnknownPreset.
Variant parse_variant(std::string_view text);
/// "downlink"/"dl", "uplink"/"ul", "any"/"" (case-insensitive). Throws DomainError.
Direction parse_direction(std::string_view text);
/// Canonical metric names plus common spellings. Throws SchemaError(0, ...).
Metric parse_metric(std::string_view text);

/// Short alias used on the command line, e.g. "mmtc".
std::string_view short_name(Environment e) noexcept;
LayoutKind layout_for(Environment e) noexcept;
bool is_embb(Environment e) noexcept;

}  // namespace imteval
