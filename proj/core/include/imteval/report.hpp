// SPDX-License-Identifier: Apache-2.0
#pragma once

// Compliance checking of simulated or externally reported KPIs against a
// RequirementSet, ingestion of external result tables, and output files.
//
// External result CSV header:
//   table,evaluator,environment,technology,antenna,numerology,bandwidth,direction,metric,speed_kmh,value
// Fields may be double-quoted. `value` accepts thousands separators
// ("2,314,259"), percentages ("99.9999%", divided by 100) and data rates
// with a unit ("152.482 Mbit/s", converted to bit/s). Entries that
// cannot be read as a plain non-negative number ("> 0.5", "n/a"), and
// reliability percentages below 50%, are kept verbatim and flagged suspect.
//
// Output bundle written by emit():
//   manifest.json    run provenance, KPI values and warnings
//   kpi.json         KPI values with units and notes
//   compliance.csv   one row per KPI or requirement
//   cdf_<name>.csv   percentile,value for each distribution of the run

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imteval/engine.hpp"
#include "imteval/requirements.hpp"
#include "imteval/types.hpp"

namespace imteval::report {

enum class Status { Pass, Fail, NotEvaluated };
std::string_view to_string(Status s) noexcept;

struct ComplianceRow {
  Environment environment = Environment::IndoorHotspot_eMBB;
  std::optional<Variant> variant;
  std::string evaluator;  // "simulation" for engine results
  Direction direction = Direction::Any;
  Metric metric = Metric::AvgSpectralEfficiency;
  std::optional<double> speed_kmh;
  std::optional<double> requirement;
  std::optional<double> measured;
  std::string unit;
  Status status = Status::NotEvaluated;
  std::string source;  // requirement citation
  std::vector<std::string> footnotes;

  bool pass() const noexcept { return status == Status::Pass; }
};

struct ComplianceReport {
  std::vector<ComplianceRow> rows;

  std::size_t count(Status s) const noexcept;
  /// True when no evaluated row failed.
  bool all_pass() const noexcept { return count(Status::Fail) == 0; }
  std::string to_csv() const;
};

struct ExternalRow {
  std::string table;
  std::string evaluator;
  Environment environment = Environment::IndoorHotspot_eMBB;
  std::string technology;
  std::string antenna;
  std::string numerology;
  std::string bandwidth;  // verbatim, with its unit
  Direction direction = Direction::Any;
  Metric metric = Metric::AvgSpectralEfficiency;
  std::optional<double> speed_kmh;
  std::string raw_value;
  double value = 0.0;  // NaN when suspect and unreadable
  bool suspect = false;
  std::size_t line = 0;
};

struct ExternalResultTable {
  std::string name;
  std::vector<ExternalRow> rows;

  std::vector<std::string> evaluators() const;
  /// Rows of one evaluator, in file order.
  std::vector<const ExternalRow*> by_evaluator(std::string_view evaluator) const;
};

inline constexpr std::string_view kExternalHeader =
    "table,evaluator,environment,technology,antenna,numerology,bandwidth,direction,metric,"
    "speed_kmh,value";

/// Reads a reported value. Returns nullopt when it is not a plain number,
/// percentage, thousands-separated number or data rate with a unit.
std::optional<double> parse_reported_value(std::string_view raw);

/// Throws SchemaError with the 1-based line on a malformed header or row.
ExternalResultTable parse_table(std::string_view text, std::string_view name = "<table>");
/// Throws IoError or SchemaError.
ExternalResultTable ingest_table(const std::string& path);

/// One row per KPI; requirement rows of the environment without a KPI are
/// listed as not evaluated.
ComplianceReport check_compliance(const engine::RunResult& results, const RequirementSet& reqs);
/// One row per table row. Suspect rows and rows without a requirement are
/// not evaluated. Reliability values are compared after rounding to 10
/// decimals.
ComplianceReport check_compliance(const ExternalResultTable& table, const RequirementSet& reqs);

std::string manifest_json(const engine::RunResult& results);
std::string kpi_json(const engine::RunResult& results);
/// percentile,value rows at 0, 0.5, ..., 100.
std::string cdf_csv(const metrics::BinnedCdf& cdf);

/// Writes the bundle into `out_dir` (created when missing) and returns the
/// file names in write order. Throws IoError naming the path on failure.
std::vector<std::string> emit(const engine::RunResult& results, const ComplianceReport& report,
                              const std::string& out_dir);

/// Process exit code for a report: 0 when every evaluated row passes, else 1.
int exit_code(const ComplianceReport& report) noexcept;

}  // namespace imteval::report
