// SPDX-License-Identifier: Apache-2.0
#pragma once

// IMT-2020 minimum requirements keyed by (environment, direction, metric),
// loaded from CSV. The library ships the default rows.
//
// CSV header:
//   environment,direction,metric,value,unit,sense,speed_kmh,group,source
// `sense` is "min" (measured must reach the value) or "max" (must not exceed
// it). `speed_kmh` is set on mobility rows only.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imteval/types.hpp"

namespace imteval {

enum class Sense { AtLeast, AtMost };

struct Requirement {
  Environment environment = Environment::IndoorHotspot_eMBB;
  Direction direction = Direction::Any;
  Metric metric = Metric::AvgSpectralEfficiency;
  double value = 0.0;
  std::string unit;
  Sense sense = Sense::AtLeast;
  std::optional<double> speed_kmh;
  std::string group;
  std::string source;

  /// Boundary-inclusive: measured >= value (AtLeast) or <= value (AtMost).
  bool satisfied_by(double measured) const noexcept;
  friend bool operator==(const Requirement&, const Requirement&) = default;
};

class RequirementSet {
 public:
  RequirementSet() = default;
  explicit RequirementSet(std::vector<Requirement> rows) : rows_(std::move(rows)) {}

  /// Throws SchemaError with the 1-based line on a malformed header or row.
  static RequirementSet parse_csv(std::string_view text);
  static RequirementSet load(const std::string& path);
  static const RequirementSet& builtin();

  const std::vector<Requirement>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t count_group(std::string_view group) const noexcept;

  /// Row for (env, direction, metric); a row stored with Direction::Any
  /// matches every direction. Mobility rows are selected by `speed_kmh`
  /// (the only row for that environment when omitted and unique).
  /// Throws UnknownRequirement when no row matches.
  const Requirement& find(Environment env, Direction dir, Metric metric,
                          std::optional<double> speed_kmh = std::nullopt) const;
  /// Rows for one environment, in file order.
  std::vector<const Requirement*> for_environment(Environment env) const;

  std::string to_csv() const;
  friend bool operator==(const RequirementSet&, const RequirementSet&) = default;

 private:
  std::vector<Requirement> rows_;
};

/// Threshold value of the matching row.
double requirement_for(const RequirementSet& set, Environment env, Direction dir, Metric metric,
                       std::optional<double> speed_kmh = std::nullopt);

/// Requirement metric that judges `m`: full-buffer connection density uses
/// the connection density row, every other metric maps to itself.
Metric requirement_metric(Metric m) noexcept;

}  // namespace imteval
