// SPDX-License-Identifier: Apache-2.0
#include "imteval/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "imteval/error.hpp"

namespace imteval::geometry {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSectorBoresights[3] = {30.0, 150.0, 270.0};
// Separation between micro TRxPs and macro sites, and between the micro
// TRxPs of one macro sector.
constexpr double kMicroSeparation = 57.9;
constexpr int kMicrosPerSector = 3;

Vec2 axial_to_xy(int q, int r, double isd) {
  return {isd * (q + 0.5 * r), isd * r * kSqrt3 / 2.0};
}

// Translations mapping the 19-site cluster onto its six neighbours.
constexpr std::pair<int, int> kWrapAxial[6] = {{5, -2}, {2, 3}, {-3, 5}, {-5, 2}, {-2, -3}, {3, -5}};

// Point inside the site's hexagonal cell (pointy-top, inradius isd/2),
// relative to the site.
bool in_hex_cell(Vec2 p, double isd) {
  const double a = isd / 2.0 * (1.0 + 1e-12);
  const double s = kSqrt3 / 2.0;
  return std::abs(p.x) <= a && std::abs(0.5 * p.x + s * p.y) <= a &&
         std::abs(-0.5 * p.x + s * p.y) <= a;
}

Vec2 uniform_in_hex(double isd, RngStream& rng) {
  const double a = isd / 2.0;
  const double r = isd / kSqrt3;
  while (true) {
    const Vec2 p{rng.uniform(-a, a), rng.uniform(-r, r)};
    if (in_hex_cell(p, isd)) return p;
  }
}

double angle_difference(double a_deg, double b_deg) {
  return std::fmod(a_deg - b_deg + 540.0, 360.0) - 180.0;
}

void add_hex_sites(NetworkLayout& layout, double isd, double height) {
  const auto axial = hex19_axial();
  for (std::size_t i = 0; i < axial.size(); ++i) {
    const auto [q, r] = axial[i];
    layout.sites.push_back({axial_to_xy(q, r, isd), static_cast<int>(i)});
    layout.drop_sites.push_back(static_cast<int>(i));
  }
  for (const auto& site : layout.sites) {
    for (int s = 0; s < 3; ++s) {
      layout.trxps.push_back({site.site_id, s, kSectorBoresights[s], height, site.position, false});
    }
  }
  layout.wrap_translations.push_back({0.0, 0.0});
  for (const auto& [q, r] : kWrapAxial) layout.wrap_translations.push_back(axial_to_xy(q, r, isd));
}

void add_micro_layer(NetworkLayout& layout, const EvaluationConfig& cfg) {
  auto rng = derive_stream(cfg.master_seed, stream_id::kReservedDropBase, stream_id::layout());
  const auto macros = layout.trxps;
  constexpr int kRestarts = 1000;
  constexpr int kDrawsPerMicro = 5000;
  for (const auto& macro : macros) {
    bool placed = false;
    for (int attempt = 0; attempt < kRestarts && !placed; ++attempt) {
      std::vector<Vec2> mine;
      for (int k = 0; k < kMicrosPerSector; ++k) {
        bool ok = false;
        for (int draw = 0; draw < kDrawsPerMicro && !ok; ++draw) {
          const Vec2 rel = uniform_in_hex(layout.isd, rng);
          const double az = std::atan2(rel.y, rel.x) * 180.0 / std::numbers::pi;
          if (std::abs(angle_difference(az, macro.boresight_azimuth)) > 60.0) continue;
          const Vec2 p = macro.position + rel;
          bool clear = true;
          for (const auto& site : layout.sites) {
            if (wrap_distance(layout, p, site.position).distance < kMicroSeparation) {
              clear = false;
              break;
            }
          }
          for (const auto& other : mine) {
            if (!clear) break;
            if (wrap_distance(layout, p, other).distance < kMicroSeparation) clear = false;
          }
          if (!clear) continue;
          mine.push_back(p);
          ok = true;
        }
        if (!ok) break;
      }
      if (static_cast<int>(mine.size()) == kMicrosPerSector) {
        for (const auto& p : mine) {
          layout.trxps.push_back({macro.site_id, 0, macro.boresight_azimuth, cfg.micro_height, p, true});
        }
        placed = true;
      }
    }
    if (!placed) throw InternalError("could not place the micro layer with the required separation");
  }
}

}  // namespace

double Vec2::norm() const noexcept { return std::sqrt(x * x + y * y); }

double sector_area(double isd) noexcept { return isd * isd * kSqrt3 / 6.0; }

std::vector<std::pair<int, int>> hex19_axial() {
  std::vector<std::pair<int, int>> cells;
  for (int q = -2; q <= 2; ++q) {
    for (int r = -2; r <= 2; ++r) {
      if (std::abs(q + r) <= 2) cells.emplace_back(q, r);
    }
  }
  auto ring = [](std::pair<int, int> c) {
    return std::max({std::abs(c.first), std::abs(c.second), std::abs(c.first + c.second)});
  };
  auto angle = [](std::pair<int, int> c) {
    const Vec2 p = axial_to_xy(c.first, c.second, 1.0);
    double a = std::atan2(p.y, p.x);
    if (a < -1e-12) a += 2.0 * std::numbers::pi;
    return a;
  };
  std::sort(cells.begin(), cells.end(), [&](auto a, auto b) {
    if (ring(a) != ring(b)) return ring(a) < ring(b);
    return angle(a) < angle(b);
  });
  return cells;
}

NetworkLayout build_layout(const EvaluationConfig& cfg) {
  NetworkLayout layout;
  layout.layout_kind = layout_for(cfg.environment);
  layout.isd = cfg.isd;
  switch (layout.layout_kind) {
    case LayoutKind::HexMacro19:
      add_hex_sites(layout, cfg.isd, cfg.bs_height);
      break;
    case LayoutKind::DenseUrbanTwoLayer:
      add_hex_sites(layout, cfg.isd, cfg.bs_height);
      add_micro_layer(layout, cfg);
      break;
    case LayoutKind::Indoor12: {
      // Two rows of six, 20 m apart, in a 120 m x 50 m floor.
      layout.width = 120.0;
      layout.depth = 50.0;
      int id = 0;
      for (double y : {15.0, 35.0}) {
        for (int i = 0; i < 6; ++i) {
          const Vec2 p{10.0 + 20.0 * i, y};
          layout.sites.push_back({p, id});
          layout.trxps.push_back({id, 0, 0.0, cfg.bs_height, p, false});
          ++id;
        }
      }
      layout.wrap_translations.push_back({0.0, 0.0});
      break;
    }
  }
  return layout;
}

NetworkLayout single_trxp_layout(const EvaluationConfig& cfg) {
  NetworkLayout layout;
  layout.layout_kind = LayoutKind::Indoor12;
  layout.isd = cfg.isd;
  layout.width = cfg.isd;
  layout.depth = cfg.isd;
  const Vec2 centre{cfg.isd / 2.0, cfg.isd / 2.0};
  layout.sites.push_back({centre, 0});
  layout.trxps.push_back({0, 0, 0.0, cfg.bs_height, centre, false});
  layout.wrap_translations.push_back({0.0, 0.0});
  return layout;
}

WrapResult wrap_distance(const NetworkLayout& layout, Vec2 a, Vec2 b) noexcept {
  WrapResult best{std::numeric_limits<double>::infinity(), {0.0, 0.0}};
  for (const auto& t : layout.wrap_translations) {
    const Vec2 d = a - (b + t);
    const double d2 = d.x * d.x + d.y * d.y;
    if (d2 < best.distance) best = {d2, t};
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

namespace {

// Minimum BS-UE distance against every TRxP, with wrap-around.
bool clear_of_trxps(const NetworkLayout& layout, Vec2 p) {
  if (layout.layout_kind == LayoutKind::Indoor12) return true;
  for (const auto& t : layout.trxps) {
    const double limit = t.micro ? kMinDistanceMicro : kMinDistanceMacro;
    if (wrap_distance(layout, p, t.position).distance < limit) return false;
  }
  return true;
}

}  // namespace

std::vector<UePlacement> drop_ues(const NetworkLayout& layout, const EvaluationConfig& cfg,
                                  RngStream& rng) {
  if (cfg.ues_per_trxp < 1) throw DomainError("ues_per_trxp must be >= 1");
  const std::size_t count = static_cast<std::size_t>(cfg.ues_per_trxp) * layout.trxp_count();
  const bool hex = layout.layout_kind != LayoutKind::Indoor12;
  // Building depth distribution for penetration loss.
  const double indoor_depth = cfg.environment == Environment::Rural_eMBB ? 10.0 : 25.0;
  const bool o2i = cfg.environment != Environment::IndoorHotspot_eMBB;

  // Macro-only layouts only need the serving site's distance, which is the
  // cheap path; layouts with micro TRxPs check every TRxP.
  const bool check_all = layout.layout_kind == LayoutKind::DenseUrbanTwoLayer;

  std::vector<UePlacement> ues;
  ues.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    UePlacement ue;
    ue.ue_id = static_cast<std::uint32_t>(i);
    Vec2 p;
    while (true) {
      if (hex) {
        const auto& sites = layout.drop_sites;
        const auto& site = layout.sites[static_cast<std::size_t>(
            sites[static_cast<std::size_t>(rng.below(sites.size()))])];
        const Vec2 rel = uniform_in_hex(layout.isd, rng);
        p = site.position + rel;
        if (check_all) {
          if (!clear_of_trxps(layout, p)) continue;
        } else if (rel.norm() < kMinDistanceMacro) {
          continue;
        }
      } else {
        p = {rng.uniform(0.0, layout.width), rng.uniform(0.0, layout.depth)};
      }
      break;
    }
    ue.position = {p.x, p.y, cfg.ue_height};
    ue.indoor = rng.bernoulli(cfg.indoor_fraction);
    const bool high = rng.bernoulli(cfg.high_loss_fraction);
    const double d1 = rng.uniform(0.0, indoor_depth);
    const double d2 = rng.uniform(0.0, indoor_depth);
    if (ue.indoor && o2i) {
      ue.high_loss = high;
      ue.indoor_distance = std::min(d1, d2);
    }
    ue.speed = ue.indoor ? cfg.ue_speed_indoor : cfg.ue_speed_outdoor;
    ue.direction = rng.uniform(0.0, 2.0 * std::numbers::pi);
    ues.push_back(ue);
  }
  return ues;
}

int attach(const UePlacement& ue, const NetworkLayout& layout,
           const std::function<double(const UePlacement&, std::size_t)>& coupling_loss) {
  int best = -1;
  double best_loss = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < layout.trxp_count(); ++t) {
    const double loss = coupling_loss(ue, t);
    if (best < 0 || loss < best_loss) {
      best = static_cast<int>(t);
      best_loss = loss;
    }
  }
  return best;
}

}  // namespace imteval::geometry
