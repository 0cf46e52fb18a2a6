// SPDX-License-Identifier: Apache-2.0
#pragma once

// Network layouts, UE drops, wrap-around distances and cell attachment.
//
// Coordinates are meters with x pointing east and y north. Azimuths are
// degrees counter-clockwise from east. Sector boresights of the hexagonal
// layouts are 30, 150 and 270 degrees.

#include <cstdint>
#include <functional>
#include <vector>

#include "imteval/random.hpp"
#include "imteval/scenario.hpp"
#include "imteval/types.hpp"

namespace imteval::geometry {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
  double norm() const noexcept;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec2 xy() const noexcept { return {x, y}; }
};

struct Site {
  Vec2 position;
  int site_id = 0;
};

struct Trxp {
  int site_id = 0;
  int sector_index = 0;     // 0..2 for macro sectors; 0 for indoor and micro TRxPs
  double boresight_azimuth = 0.0;  // degrees
  double height = 0.0;      // m
  Vec2 position;
  bool micro = false;
};

struct NetworkLayout {
  LayoutKind layout_kind = LayoutKind::HexMacro19;
  double isd = 0.0;
  std::vector<Site> sites;
  std::vector<Trxp> trxps;
  /// Always contains {0, 0}; closed under negation.
  std::vector<Vec2> wrap_translations;
  /// Rectangle used by Indoor12 drops: [0, width] x [0, depth].
  double width = 0.0;
  double depth = 0.0;
  /// Sites whose hexagonal cells make up the drop region (hex layouts).
  std::vector<int> drop_sites;

  std::size_t trxp_count() const noexcept { return trxps.size(); }
};

/// Area served by one sector of a three-sector hexagonal site, ISD^2*sqrt(3)/6.
double sector_area(double isd) noexcept;

/// Builds the layout for `config`'s environment. The dense-urban micro layer
/// is placed with a stream derived from `config.master_seed`, so it is fixed
/// for a run.
NetworkLayout build_layout(const EvaluationConfig& config);

/// One omnidirectional-sector TRxP at the origin, no wrap-around. Used for
/// interference-free checks.
NetworkLayout single_trxp_layout(const EvaluationConfig& config);

struct WrapResult {
  double distance;
  Vec2 translation;  // added to b
};

/// min over translations t of |a - (b + t)|; ties keep the first translation.
WrapResult wrap_distance(const NetworkLayout& layout, Vec2 a, Vec2 b) noexcept;

struct UePlacement {
  std::uint32_t ue_id = 0;
  Vec3 position;
  bool indoor = false;
  bool high_loss = false;   // building type for penetration loss
  double indoor_distance = 0.0;  // m, 2D distance inside the building
  double speed = 0.0;       // km/h
  double direction = 0.0;   // radians in [0, 2*pi)
  int serving_trxp = -1;
};

/// Minimum 2D BS-UE distances.
inline constexpr double kMinDistanceMacro = 35.0;
inline constexpr double kMinDistanceMicro = 10.0;
inline constexpr double kMinDistanceIndoor = 0.0;

/// ues_per_trxp * TRxP count placements, uniform over the drop region.
std::vector<UePlacement> drop_ues(const NetworkLayout& layout, const EvaluationConfig& config,
                                  RngStream& rng);

/// TRxP index minimizing `coupling_loss(ue, trxp)` (dB); ties go to the lower index.
int attach(const UePlacement& ue, const NetworkLayout& layout,
           const std::function<double(const UePlacement&, std::size_t)>& coupling_loss);

/// Axial coordinates (q, r) of the 19 hexagonal sites, center first.
std::vector<std::pair<int, int>> hex19_axial();

}  // namespace imteval::geometry
