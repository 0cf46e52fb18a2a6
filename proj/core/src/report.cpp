// SPDX-License-Identifier: Apache-2.0
#include "imteval/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "imteval/error.hpp"
#include "imteval/metrics.hpp"
#include "ini.hpp"

#ifndef IMTEVAL_VERSION
#define IMTEVAL_VERSION "unknown"
#endif

namespace imteval::report {

namespace {

using json = nlohmann::ordered_json;

constexpr double kMinPlausibleReliability = 0.5;

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// Splits one CSV record; fields may be double-quoted with "" escapes.
std::vector<std::string> split_csv(std::string_view line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty()) throw SchemaError(line_no, "quote inside an unquoted field");
      quoted = was_quoted = true;
    } else if (c == ',') {
      out.push_back(was_quoted ? field : std::string(detail::trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw SchemaError(line_no, "unterminated quoted field");
  out.push_back(was_quoted ? field : std::string(detail::trim(field)));
  return out;
}

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return detail::format_double(x);
}

json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

double round10(double x) { return std::round(x * 1e10) / 1e10; }

ComplianceRow judge(ComplianceRow row, const RequirementSet& reqs, double measured) {
  row.measured = measured;
  try {
    const auto& req = reqs.find(row.environment, row.direction, requirement_metric(row.metric),
                                row.speed_kmh);
    row.requirement = req.value;
    row.source = req.source;
    const double m = row.metric == Metric::Reliability ? round10(measured) : measured;
    const double v = row.metric == Metric::Reliability ? round10(req.value) : req.value;
    Requirement r = req;
    r.value = v;
    row.status = r.satisfied_by(m) ? Status::Pass : Status::Fail;
    if (row.unit.empty()) row.unit = req.unit;
  } catch (const UnknownRequirement&) {
    row.status = Status::NotEvaluated;
    row.footnotes.push_back("no requirement row");
  }
  return row;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string_view convergence_name(metrics::ConvergenceStatus s) {
  switch (s) {
    case metrics::ConvergenceStatus::Continue: return "running";
    case metrics::ConvergenceStatus::Converged: return "converged";
    case metrics::ConvergenceStatus::Capped: return "capped";
  }
  return "?";
}

json kpi_array(const engine::RunResult& r) {
  json a = json::array();
  for (const auto& k : r.kpis) {
    json o;
    o["metric"] = to_string(k.metric);
    o["direction"] = to_string(k.direction);
    if (k.speed_kmh) o["speed_kmh"] = *k.speed_kmh;
    o["value"] = json_number(k.value);
    o["unit"] = k.unit;
    if (!k.note.empty()) o["note"] = k.note;
    a.push_back(std::move(o));
  }
  return a;
}

}  // namespace

std::string_view to_string(Status s) noexcept {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::NotEvaluated: return "not evaluated";
  }
  return "?";
}

std::size_t ComplianceReport::count(Status s) const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.status == s ? 1 : 0;
  return n;
}

std::string ComplianceReport::to_csv() const {
  std::ostringstream out;
  out << "environment,variant,evaluator,direction,metric,speed_kmh,requirement,measured,unit,"
         "status,source,footnotes\n";
  for (const auto& r : rows) {
    std::string notes;
    for (const auto& f : r.footnotes) {
      if (!notes.empty()) notes += "; ";
      notes += f;
    }
    out << to_string(r.environment) << ',' << (r.variant ? to_string(*r.variant) : "") << ','
        << csv_field(r.evaluator) << ',' << to_string(r.direction) << ',' << to_string(r.metric)
        << ',' << (r.speed_kmh ? number(*r.speed_kmh) : "") << ','
        << (r.requirement ? number(*r.requirement) : "") << ','
        << (r.measured ? number(*r.measured) : "") << ',' << csv_field(r.unit) << ','
        << to_string(r.status) << ',' << csv_field(r.source) << ',' << csv_field(notes) << '\n';
  }
  return out.str();
}

std::vector<std::string> ExternalResultTable::evaluators() const {
  std::vector<std::string> out;
  for (const auto& r : rows) {
    if (std::find(out.begin(), out.end(), r.evaluator) == out.end()) out.push_back(r.evaluator);
  }
  return out;
}

std::vector<const ExternalRow*> ExternalResultTable::by_evaluator(std::string_view evaluator) const {
  std::vector<const ExternalRow*> out;
  for (const auto& r : rows) {
    if (r.evaluator == evaluator) out.push_back(&r);
  }
  return out;
}

std::optional<double> parse_reported_value(std::string_view raw) {
  auto s = std::string(detail::trim(raw));
  double scale = 1.0;
  if (!s.empty() && s.back() == '%') {
    s.pop_back();
    scale = 0.01;
  } else {
    static constexpr std::pair<std::string_view, double> kRateUnits[] = {
        {"Gbit/s", 1e9}, {"Mbit/s", 1e6}, {"kbit/s", 1e3}, {"bit/s", 1.0}};
    for (const auto& [unit, factor] : kRateUnits) {
      if (s.size() > unit.size() && s.ends_with(unit)) {
        s = std::string(detail::trim(std::string_view(s).substr(0, s.size() - unit.size())));
        scale = factor;
        break;
      }
    }
  }
  std::string digits;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == ',') {
      // Thousands separator: exactly three digits must follow before the
      // next separator or the decimal point.
      std::size_t j = i + 1;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j - i - 1 != 3 || digits.empty()) return std::nullopt;
      continue;
    }
    digits += c;
  }
  if (digits.empty()) return std::nullopt;
  try {
    const double v = detail::parse_double(digits);
    if (!std::isfinite(v)) return std::nullopt;
    return v * scale;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

ExternalResultTable parse_table(std::string_view text, std::string_view name) {
  ExternalResultTable table;
  table.name = std::string(name);
  std::size_t line_no = 0;
  bool header = false;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) continue;
    if (!header) {
      if (detail::trim(line) != kExternalHeader) {
        throw SchemaError(line_no, "expected header '" + std::string(kExternalHeader) + "'");
      }
      header = true;
      continue;
    }
    const auto f = split_csv(line, line_no);
    if (f.size() != 11) {
      throw SchemaError(line_no, "expected 11 fields, got " + std::to_string(f.size()));
    }
    ExternalRow row;
    row.line = line_no;
    row.table = f[0];
    row.evaluator = f[1];
    try {
      row.environment = parse_environment(f[2]);
      row.direction = parse_direction(f[7]);
    } catch (const Error& e) {
      throw SchemaError(line_no, e.what());
    }
    try {
      row.metric = parse_metric(f[8]);
    } catch (const SchemaError& e) {
      throw SchemaError(line_no, e.what());
    }
    row.technology = f[3];
    row.antenna = f[4];
    row.numerology = f[5];
    row.bandwidth = f[6];
    if (!f[9].empty()) {
      try {
        row.speed_kmh = detail::parse_double(f[9]);
      } catch (const std::exception&) {
        throw SchemaError(line_no, "speed_kmh is not a number: '" + f[9] + "'");
      }
    }
    row.raw_value = f[10];
    const auto v = parse_reported_value(row.raw_value);
    if (!v) {
      row.suspect = true;
      row.value = std::numeric_limits<double>::quiet_NaN();
    } else {
      if (*v < 0.0) throw SchemaError(line_no, "negative value '" + row.raw_value + "'");
      row.value = *v;
      if (row.metric == Metric::Reliability && row.value < kMinPlausibleReliability) {
        row.suspect = true;
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!header) throw SchemaError(line_no ? line_no : 1, "missing header");
  return table;
}

ExternalResultTable ingest_table(const std::string& path) {
  return parse_table(detail::read_text_file(path), path);
}

ComplianceReport check_compliance(const engine::RunResult& results, const RequirementSet& reqs) {
  ComplianceReport report;
  std::vector<const Requirement*> used;
  for (const auto& k : results.kpis) {
    ComplianceRow row;
    row.environment = results.environment;
    row.variant = results.variant;
    row.evaluator = "simulation";
    row.direction = k.direction;
    row.metric = k.metric;
    row.speed_kmh = k.speed_kmh;
    row.unit = k.unit;
    if (!k.note.empty()) row.footnotes.push_back(k.note);
    row = judge(std::move(row), reqs, k.value);
    if (row.requirement) {
      used.push_back(&reqs.find(row.environment, row.direction, requirement_metric(row.metric),
                                row.speed_kmh));
    }
    report.rows.push_back(std::move(row));
  }
  for (const auto* req : reqs.for_environment(results.environment)) {
    if (std::find(used.begin(), used.end(), req) != used.end()) continue;
    ComplianceRow row;
    row.environment = req->environment;
    row.variant = results.variant;
    row.evaluator = "simulation";
    row.direction = req->direction;
    row.metric = req->metric;
    row.speed_kmh = req->speed_kmh;
    row.requirement = req->value;
    row.unit = req->unit;
    row.source = req->source;
    row.status = Status::NotEvaluated;
    row.footnotes.push_back("not computed by the simulator");
    report.rows.push_back(std::move(row));
  }
  return report;
}

ComplianceReport check_compliance(const ExternalResultTable& table, const RequirementSet& reqs) {
  ComplianceReport report;
  for (const auto& r : table.rows) {
    ComplianceRow row;
    row.environment = r.environment;
    row.evaluator = r.evaluator;
    row.direction = r.direction;
    row.metric = r.metric;
    row.speed_kmh = r.speed_kmh;
    if (!r.table.empty()) row.footnotes.push_back("reported in " + r.table);
    if (!r.technology.empty()) row.footnotes.push_back(r.technology);
    if (r.suspect) {
      try {
        const auto& req =
            reqs.find(r.environment, r.direction, requirement_metric(r.metric), r.speed_kmh);
        row.requirement = req.value;
        row.source = req.source;
        row.unit = req.unit;
      } catch (const UnknownRequirement&) {
      }
      if (std::isfinite(r.value)) row.measured = r.value;
      row.status = Status::NotEvaluated;
      row.footnotes.push_back("suspect entry '" + r.raw_value + "'");
      report.rows.push_back(std::move(row));
      continue;
    }
    report.rows.push_back(judge(std::move(row), reqs, r.value));
  }
  return report;
}

std::string manifest_json(const engine::RunResult& r) {
  json m;
  m["software"] = "imteval";
  m["version"] = IMTEVAL_VERSION;
  m["config_hash"] = r.config_hash;
  m["master_seed"] = r.master_seed;
  m["environment"] = to_string(r.environment);
  m["variant"] = to_string(r.variant);
  m["drops_requested"] = r.drops_requested;
  m["drops_run"] = r.drops_run;
  m["convergence"] = convergence_name(r.convergence);
  m["calibration"] = {{"p0_dbm", json_number(r.calibration.p0)},
                      {"achieved_iot_db", json_number(r.calibration.achieved_iot)},
                      {"converged", r.calibration.converged},
                      {"iterations", r.calibration.iterations}};
  m["random_streams"] = r.stream_scheme;
  m["kpis"] = kpi_array(r);
  m["warnings"] = r.warnings;
  json cdfs = json::array();
  for (const auto& [name, cdf] : r.cdfs) {
    if (cdf.count() > 0) cdfs.push_back("cdf_" + name + ".csv");
  }
  m["cdf_files"] = std::move(cdfs);
  return m.dump(2) + "\n";
}

std::string kpi_json(const engine::RunResult& r) { return kpi_array(r).dump(2) + "\n"; }

std::string cdf_csv(const metrics::BinnedCdf& cdf) {
  std::ostringstream out;
  out << "percentile,value\n";
  for (int i = 0; i <= 200; ++i) {
    out << number(i * 0.5) << ',' << number(cdf.quantile(i / 200.0)) << '\n';
  }
  return out.str();
}

std::vector<std::string> emit(const engine::RunResult& results, const ComplianceReport& report,
                              const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + out_dir + "'" +
                  (ec ? ": " + ec.message() : std::string()));
  }
  std::vector<std::string> files;
  auto put = [&](const std::string& name, const std::string& text) {
    write_file(dir / name, text);
    files.push_back(name);
  };
  put("manifest.json", manifest_json(results));
  put("kpi.json", kpi_json(results));
  put("compliance.csv", report.to_csv());
  for (const auto& [name, cdf] : results.cdfs) {
    if (cdf.count() > 0) put("cdf_" + name + ".csv", cdf_csv(cdf));
  }
  return files;
}

int exit_code(const ComplianceReport& report) noexcept { return report.all_pass() ? 0 : 1; }

}  // namespace imteval::report
