// SPDX-License-Identifier: Apache-2.0
#include "imteval/requirements.hpp"

#include <cmath>
#include <sstream>

#include "imteval/error.hpp"
#include "imteval/metrics.hpp"
#include "ini.hpp"

namespace imteval::detail {
std::string_view embedded_requirements();
}

namespace imteval {

namespace {

constexpr std::string_view kHeader = "environment,direction,metric,value,unit,sense,speed_kmh,group,source";

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    auto line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

}  // namespace

bool Requirement::satisfied_by(double measured) const noexcept {
  if (sense == Sense::AtLeast) return metrics::meets(measured, value);
  return metrics::meets(-measured, -value);
}

RequirementSet RequirementSet::parse_csv(std::string_view text) {
  const auto lines = lines_of(text);
  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
  if (first == lines.size() || detail::trim(lines[first]) != kHeader) {
    throw SchemaError(first + 1, "expected header '" + std::string(kHeader) + "'");
  }
  std::vector<Requirement> rows;
  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    const auto line = detail::trim(lines[i]);
    if (line.empty()) continue;
    const std::size_t no = i + 1;
    const auto f = detail::split(line, ',');
    if (f.size() != 9) {
      throw SchemaError(no, "expected 9 fields, got " + std::to_string(f.size()));
    }
    Requirement r;
    try {
      r.environment = parse_environment(f[0]);
      r.direction = parse_direction(f[1]);
    } catch (const Error& e) {
      throw SchemaError(no, e.what());
    }
    try {
      r.metric = parse_metric(f[2]);
    } catch (const SchemaError& e) {
      throw SchemaError(no, e.what());
    }
    try {
      r.value = detail::parse_double(f[3]);
    } catch (const std::exception&) {
      throw SchemaError(no, "value is not a number: '" + f[3] + "'");
    }
    r.unit = f[4];
    if (f[5] == "min") {
      r.sense = Sense::AtLeast;
    } else if (f[5] == "max") {
      r.sense = Sense::AtMost;
    } else {
      throw SchemaError(no, "sense must be 'min' or 'max'");
    }
    if (!f[6].empty()) {
      try {
        r.speed_kmh = detail::parse_double(f[6]);
      } catch (const std::exception&) {
        throw SchemaError(no, "speed_kmh is not a number: '" + f[6] + "'");
      }
    }
    r.group = f[7];
    r.source = f[8];
    rows.push_back(std::move(r));
  }
  return RequirementSet(std::move(rows));
}

RequirementSet RequirementSet::load(const std::string& path) {
  return parse_csv(detail::read_text_file(path));
}

const RequirementSet& RequirementSet::builtin() {
  static const RequirementSet set = parse_csv(detail::embedded_requirements());
  return set;
}

std::size_t RequirementSet::count_group(std::string_view group) const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.group == group ? 1 : 0;
  return n;
}

const Requirement& RequirementSet::find(Environment env, Direction dir, Metric metric,
                                        std::optional<double> speed_kmh) const {
  const Requirement* found = nullptr;
  int matches = 0;
  for (const auto& r : rows_) {
    if (r.environment != env || r.metric != metric) continue;
    if (r.direction != Direction::Any && dir != Direction::Any && r.direction != dir) continue;
    if (speed_kmh && (!r.speed_kmh || std::abs(*r.speed_kmh - *speed_kmh) > 1e-9)) continue;
    if (!found) found = &r;
    ++matches;
  }
  if (!found || (matches > 1 && !speed_kmh && metric == Metric::Mobility)) {
    std::string what = std::string(to_string(env)) + " " + std::string(to_string(dir)) + " " +
                       std::string(to_string(metric));
    if (speed_kmh) {
      std::ostringstream s;
      s << " at " << *speed_kmh << " km/h";
      what += s.str();
    }
    throw UnknownRequirement("no requirement row for " + what);
  }
  return *found;
}

std::vector<const Requirement*> RequirementSet::for_environment(Environment env) const {
  std::vector<const Requirement*> out;
  for (const auto& r : rows_) {
    if (r.environment == env) out.push_back(&r);
  }
  return out;
}

std::string RequirementSet::to_csv() const {
  std::ostringstream out;
  out << kHeader << '\n';
  for (const auto& r : rows_) {
    out << to_string(r.environment) << ',' << to_string(r.direction) << ',' << to_string(r.metric)
        << ',' << detail::format_double(r.value) << ',' << r.unit << ','
        << (r.sense == Sense::AtLeast ? "min" : "max") << ','
        << (r.speed_kmh ? detail::format_double(*r.speed_kmh) : "") << ',' << r.group << ','
        << r.source << '\n';
  }
  return out.str();
}

double requirement_for(const RequirementSet& set, Environment env, Direction dir, Metric metric,
                       std::optional<double> speed_kmh) {
  return set.find(env, dir, metric, speed_kmh).value;
}

Metric requirement_metric(Metric m) noexcept {
  return m == Metric::ConnectionDensityFullBuffer ? Metric::ConnectionDensity : m;
}

}  // namespace imteval
