// SPDX-License-Identifier: Apache-2.0
#pragma once

// Named channel profiles loaded from INI text. Each profile has a base
// section ("[UMa_A]") and one section per propagation condition
// ("[UMa_A.LOS]", "[UMa_A.NLOS]", "[UMa_A.O2I]"). The library ships a default
// file; callers may load their own with the same layout.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "imteval/channel.hpp"
#include "imteval/types.hpp"

namespace imteval::channel {

class ProfileLibrary {
 public:
  /// Throws ConfigSyntax on malformed INI and ConfigInvalid naming
  /// "<profile>.<condition>.<key>" on bad or unknown values.
  static ProfileLibrary parse(std::string_view text, std::string_view origin);
  static ProfileLibrary load(const std::string& path);
  /// The profiles compiled into the library.
  static const ProfileLibrary& builtin();

  /// Exact name, or a family name ("UMi") resolving to its "_A" variant.
  /// Throws ConfigInvalid("channel.profile", ...) when absent.
  const ChannelProfile& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;

  /// INI text that parses back to an equal library.
  std::string dump() const;
  /// INI text of one profile (resolved as in get()).
  std::string dump(std::string_view name) const;

 private:
  const ChannelProfile* find(std::string_view name) const;
  std::map<std::string, ChannelProfile, std::less<>> profiles_;
};

/// Profile serving an environment's macro layer: "InH", "UMa" or "RMa" with
/// the channel-model suffix for eMBB and "_A" otherwise, or `override_name`
/// when it is not empty.
std::string macro_profile_name(Environment env, Variant variant, std::string_view override_name);
/// Profile for micro TRxPs of the two-layer layout.
std::string micro_profile_name(Variant variant);

}  // namespace imteval::channel
