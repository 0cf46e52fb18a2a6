// SPDX-License-Identifier: Apache-2.0
#include "imteval/profiles.hpp"

#include <array>
#include <functional>
#include <sstream>
#include <string_view>

#include "imteval/error.hpp"
#include "ini.hpp"

namespace imteval::detail {
std::string_view embedded_channel_profiles();
}

namespace imteval::channel {

namespace {

using detail::format_double;
using detail::parse_double;

constexpr std::array<std::pair<const char*, Condition>, 3> kConditions{
    {{"LOS", Condition::LOS}, {"NLOS", Condition::NLOS}, {"O2I", Condition::O2I}}};

constexpr std::array<std::pair<const char*, LosModel>, 6> kLosModels{{{"UMa", LosModel::UMa},
                                                                      {"UMi", LosModel::UMi},
                                                                      {"RMa", LosModel::RMa},
                                                                      {"InH", LosModel::InH},
                                                                      {"always", LosModel::AlwaysLos},
                                                                      {"never", LosModel::NeverLos}}};

constexpr std::array<std::pair<const char*, BreakpointModel>, 3> kBreakpoints{
    {{"standard", BreakpointModel::Standard},
     {"rural", BreakpointModel::Rural},
     {"none", BreakpointModel::None}}};

template <typename T, std::size_t N>
T lookup(const std::array<std::pair<const char*, T>, N>& table, std::string_view text,
         const std::string& field) {
  for (const auto& [name, value] : table) {
    if (text == name) return value;
  }
  throw ConfigInvalid(field, "unrecognised value '" + std::string(text) + "'");
}

template <typename T, std::size_t N>
const char* name_of(const std::array<std::pair<const char*, T>, N>& table, T value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "";
}

struct ConditionField {
  const char* key;
  std::function<double&(ConditionProfile&)> get;
};

const std::vector<ConditionField>& condition_fields() {
  static const std::vector<ConditionField> fields = {
      {"pl_n", [](ConditionProfile& c) -> double& { return c.pl_exponent; }},
      {"pl_n_far", [](ConditionProfile& c) -> double& { return c.pl_exponent_far; }},
      {"pl_offset", [](ConditionProfile& c) -> double& { return c.pl_offset; }},
      {"ds_mu", [](ConditionProfile& c) -> double& { return c.ds.mu; }},
      {"ds_sigma", [](ConditionProfile& c) -> double& { return c.ds.sigma; }},
      {"asd_mu", [](ConditionProfile& c) -> double& { return c.asd.mu; }},
      {"asd_sigma", [](ConditionProfile& c) -> double& { return c.asd.sigma; }},
      {"asa_mu", [](ConditionProfile& c) -> double& { return c.asa.mu; }},
      {"asa_sigma", [](ConditionProfile& c) -> double& { return c.asa.sigma; }},
      {"zsd_mu", [](ConditionProfile& c) -> double& { return c.zsd.mu; }},
      {"zsd_sigma", [](ConditionProfile& c) -> double& { return c.zsd.sigma; }},
      {"zsa_mu", [](ConditionProfile& c) -> double& { return c.zsa.mu; }},
      {"zsa_sigma", [](ConditionProfile& c) -> double& { return c.zsa.sigma; }},
      {"sf_sigma", [](ConditionProfile& c) -> double& { return c.sf_sigma; }},
      {"k_mu", [](ConditionProfile& c) -> double& { return c.k.mu; }},
      {"k_sigma", [](ConditionProfile& c) -> double& { return c.k.sigma; }},
      {"r_tau", [](ConditionProfile& c) -> double& { return c.delay_scaling; }},
      {"zeta", [](ConditionProfile& c) -> double& { return c.cluster_shadowing; }},
      {"xpr_mu", [](ConditionProfile& c) -> double& { return c.xpr.mu; }},
      {"xpr_sigma", [](ConditionProfile& c) -> double& { return c.xpr.sigma; }},
      {"c_asd", [](ConditionProfile& c) -> double& { return c.c_asd; }},
      {"c_asa", [](ConditionProfile& c) -> double& { return c.c_asa; }},
      {"c_zsa", [](ConditionProfile& c) -> double& { return c.c_zsa; }},
  };
  return fields;
}

struct PenetrationField {
  const char* key;
  double PenetrationModel::*member;
};

constexpr std::array<PenetrationField, 5> kPenetrationFields{
    {{"low_glass_fraction", &PenetrationModel::low_glass_fraction},
     {"high_glass_fraction", &PenetrationModel::high_glass_fraction},
     {"sigma_low", &PenetrationModel::sigma_low},
     {"sigma_high", &PenetrationModel::sigma_high},
     {"indoor_loss_per_m", &PenetrationModel::indoor_loss_per_m}}};

int lsp_index(std::string_view name) {
  for (int i = 0; i < kLspCount; ++i) {
    if (name == kLspNames[static_cast<std::size_t>(i)]) return i;
  }
  return -1;
}

double number(std::string_view text, const std::string& field) {
  try {
    return parse_double(text);
  } catch (const std::exception&) {
    throw ConfigInvalid(field, "not a number: '" + std::string(text) + "'");
  }
}

void read_condition(const detail::IniSection& section, const std::string& prefix,
                    ConditionProfile& c) {
  for (const auto& [key, value] : section.entries) {
    const std::string field = prefix + "." + key;
    bool known = false;
    for (const auto& f : condition_fields()) {
      if (key == f.key) {
        f.get(c) = number(value, field);
        known = true;
        break;
      }
    }
    if (known) continue;
    if (key == "n_clusters") {
      const double n = number(value, field);
      if (n < 1 || n != static_cast<int>(n)) throw ConfigInvalid(field, "must be a positive integer");
      c.n_clusters = static_cast<int>(n);
      continue;
    }
    if (key.starts_with("rho_")) {
      const auto parts = detail::split(std::string_view(key).substr(4), '_');
      const int i = parts.size() == 2 ? lsp_index(parts[0]) : -1;
      const int j = parts.size() == 2 ? lsp_index(parts[1]) : -1;
      if (i < 0 || j < 0 || i == j) throw ConfigInvalid(field, "unknown correlation pair");
      const double rho = number(value, field);
      if (rho < -1.0 || rho > 1.0) throw ConfigInvalid(field, "must lie in [-1, 1]");
      c.correlation(i, j) = rho;
      c.correlation(j, i) = rho;
      continue;
    }
    throw ConfigInvalid(field, "unknown key");
  }
  const std::array<std::pair<const char*, double>, 7> nonneg{{{"ds_sigma", c.ds.sigma},
                                                              {"asd_sigma", c.asd.sigma},
                                                              {"asa_sigma", c.asa.sigma},
                                                              {"zsd_sigma", c.zsd.sigma},
                                                              {"zsa_sigma", c.zsa.sigma},
                                                              {"sf_sigma", c.sf_sigma},
                                                              {"k_sigma", c.k.sigma}}};
  for (const auto& [key, v] : nonneg) {
    if (v < 0.0) throw ConfigInvalid(prefix + "." + key, "must be >= 0");
  }
  if (c.delay_scaling <= 1.0) throw ConfigInvalid(prefix + ".r_tau", "must be > 1");
  c.prepare(prefix);
}

void write_condition(std::ostringstream& out, const ConditionProfile& c, bool los) {
  auto& fields = condition_fields();
  auto copy = c;
  for (const auto& f : fields) {
    const std::string_view key = f.key;
    if (!los && (key == "k_mu" || key == "k_sigma")) continue;
    out << key << " = " << format_double(f.get(copy)) << '\n';
  }
  out << "n_clusters = " << c.n_clusters << '\n';
  for (int i = 0; i < kLspCount; ++i) {
    for (int j = 0; j < i; ++j) {
      if (c.correlation(i, j) == 0.0) continue;
      out << "rho_" << kLspNames[static_cast<std::size_t>(i)] << '_'
          << kLspNames[static_cast<std::size_t>(j)] << " = " << format_double(c.correlation(i, j))
          << '\n';
    }
  }
}

}  // namespace

ProfileLibrary ProfileLibrary::parse(std::string_view text, std::string_view origin) {
  const auto doc = detail::parse_ini(text, origin);
  ProfileLibrary lib;
  // Base sections first, then condition sections attach to them.
  for (const auto& section : doc.sections) {
    if (section.name.find('.') != std::string::npos) continue;
    ChannelProfile p;
    p.name = section.name;
    for (const auto& [key, value] : section.entries) {
      const std::string field = section.name + "." + key;
      if (key == "los_model") {
        p.los_model = lookup(kLosModels, value, field);
      } else if (key == "breakpoint") {
        p.breakpoint = lookup(kBreakpoints, value, field);
      } else if (key == "env_height") {
        p.env_height = number(value, field);
      } else if (key == "min_distance") {
        p.min_distance = number(value, field);
        if (p.min_distance <= 0.0) throw ConfigInvalid(field, "must be > 0");
      } else if (key == "has_o2i") {
        try {
          p.has_o2i = detail::parse_bool(value);
        } catch (const std::exception&) {
          throw ConfigInvalid(field, "not a boolean");
        }
      } else {
        bool known = false;
        for (const auto& f : kPenetrationFields) {
          if (key == f.key) {
            p.penetration.*f.member = number(value, field);
            known = true;
          }
        }
        if (!known) throw ConfigInvalid(field, "unknown key");
      }
    }
    lib.profiles_.emplace(p.name, std::move(p));
  }
  std::map<std::string, std::array<bool, 3>, std::less<>> seen;
  for (const auto& section : doc.sections) {
    const auto dot = section.name.rfind('.');
    if (dot == std::string::npos) continue;
    const std::string base = section.name.substr(0, dot);
    const std::string cond = section.name.substr(dot + 1);
    auto it = lib.profiles_.find(base);
    if (it == lib.profiles_.end()) {
      throw ConfigInvalid(section.name, "condition section without a base section [" + base + "]");
    }
    const Condition c = lookup(kConditions, cond, section.name);
    ConditionProfile& target = c == Condition::LOS    ? it->second.los
                               : c == Condition::NLOS ? it->second.nlos
                                                      : it->second.o2i;
    read_condition(section, section.name, target);
    seen[base][static_cast<std::size_t>(c)] = true;
  }
  for (const auto& [name, p] : lib.profiles_) {
    const auto flags = seen[name];
    if (!flags[0]) throw ConfigInvalid(name + ".LOS", "missing section");
    if (!flags[1]) throw ConfigInvalid(name + ".NLOS", "missing section");
    if (p.has_o2i && !flags[2]) throw ConfigInvalid(name + ".O2I", "missing section");
  }
  return lib;
}

ProfileLibrary ProfileLibrary::load(const std::string& path) {
  return parse(detail::read_text_file(path), path);
}

const ProfileLibrary& ProfileLibrary::builtin() {
  static const ProfileLibrary lib = parse(detail::embedded_channel_profiles(), "<builtin profiles>");
  return lib;
}

const ChannelProfile* ProfileLibrary::find(std::string_view name) const {
  if (auto it = profiles_.find(name); it != profiles_.end()) return &it->second;
  if (auto it = profiles_.find(std::string(name) + "_A"); it != profiles_.end()) return &it->second;
  return nullptr;
}

const ChannelProfile& ProfileLibrary::get(std::string_view name) const {
  if (const auto* p = find(name)) return *p;
  throw ConfigInvalid("channel.profile", "unknown channel profile '" + std::string(name) + "'");
}

bool ProfileLibrary::contains(std::string_view name) const { return find(name) != nullptr; }

std::vector<std::string> ProfileLibrary::names() const {
  std::vector<std::string> out;
  for (const auto& [name, p] : profiles_) out.push_back(name);
  return out;
}

namespace {

void dump_profile(std::ostringstream& out, const std::string& name, const ChannelProfile& p) {
  out << '[' << name << "]\n";
  out << "los_model = " << name_of(kLosModels, p.los_model) << '\n';
  out << "breakpoint = " << name_of(kBreakpoints, p.breakpoint) << '\n';
  out << "env_height = " << format_double(p.env_height) << '\n';
  out << "min_distance = " << format_double(p.min_distance) << '\n';
  out << "has_o2i = " << (p.has_o2i ? "true" : "false") << '\n';
  for (const auto& f : kPenetrationFields) {
    out << f.key << " = " << format_double(p.penetration.*f.member) << '\n';
  }
  out << '\n';
  for (const auto& [cond_name, cond] : kConditions) {
    if (cond == Condition::O2I && !p.has_o2i) continue;
    out << '[' << name << '.' << cond_name << "]\n";
    write_condition(out, p.condition(cond), cond == Condition::LOS);
    out << '\n';
  }
}

}  // namespace

std::string ProfileLibrary::dump() const {
  std::ostringstream out;
  for (const auto& [name, p] : profiles_) dump_profile(out, name, p);
  return out.str();
}

std::string ProfileLibrary::dump(std::string_view name) const {
  const auto& p = get(name);
  std::ostringstream out;
  dump_profile(out, p.name, p);
  return out.str();
}

std::string macro_profile_name(Environment env, Variant variant, std::string_view override_name) {
  if (!override_name.empty()) return std::string(override_name);
  const char* suffix = is_embb(env) && variant == Variant::B ? "_B" : "_A";
  switch (env) {
    case Environment::IndoorHotspot_eMBB:
      return std::string("InH") + suffix;
    case Environment::Rural_eMBB:
      return std::string("RMa") + suffix;
    default:
      return std::string("UMa") + suffix;
  }
}

std::string micro_profile_name(Variant variant) {
  return variant == Variant::B ? "UMi_B" : "UMi_A";
}

}  // namespace imteval::channel
