// SPDX-License-Identifier: Apache-2.0
#pragma once

// Thin wrapper over Boost.PropertyTree's INI reader. Sections keep file order;
// section names may contain dots ("antenna.bs").

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace imteval::detail {

struct IniSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(std::string_view key) const;
};

struct IniDocument {
  std::vector<IniSection> sections;

  const IniSection* find(std::string_view name) const;
};

/// Throws ConfigSyntax naming `origin` on malformed input. Keys outside any
/// section are rejected.
IniDocument parse_ini(std::string_view text, std::string_view origin);

std::string read_text_file(const std::string& path);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Strict numeric parsing used by config and CSV readers. Throw std::invalid_argument.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);
unsigned long long parse_unsigned(std::string_view text);
bool parse_bool(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

}  // namespace imteval::detail
