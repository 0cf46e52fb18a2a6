// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>

#include "imteval/error.hpp"
#include "imteval/scenario.hpp"

namespace imteval {
namespace {

TEST(Scenario, EveryPresetValidates) {
  const auto presets = list_presets();
  EXPECT_EQ(presets.size(), 10u);
  for (const auto& p : presets) {
    const auto cfg = preset(p.environment, p.variant);
    EXPECT_NO_THROW(cfg.validate()) << to_string(p.environment) << ' ' << to_string(p.variant);
    EXPECT_EQ(cfg.environment, p.environment);
    EXPECT_EQ(cfg.config_variant, p.variant);
  }
}

TEST(Scenario, MmtcPresetParameters) {
  const auto a = preset(Environment::UrbanMacro_mMTC, Variant::A);
  EXPECT_EQ(a.isd, 500.0);
  EXPECT_EQ(a.carrier_frequency, 700e6);
  EXPECT_EQ(a.traffic.kind, traffic::TrafficKind::PoissonMessaging);
  EXPECT_EQ(a.traffic.pdu_size, 32.0);
  // One 32-byte message every two hours.
  EXPECT_NEAR(a.traffic.rate, 1.0 / 7200.0, 1e-15);
  const auto b = preset(Environment::UrbanMacro_mMTC, Variant::B);
  EXPECT_EQ(b.isd, 1732.0);
}

TEST(Scenario, TxPowerScalesWithBandwidth) {
  EXPECT_NEAR(scaled_tx_power(49.0, 10e6), 49.0 + 10.0 * std::log10(0.5), 1e-12);
  EXPECT_DOUBLE_EQ(scaled_tx_power(49.0, 20e6), 49.0);
  EXPECT_NEAR(scaled_tx_power(44.0, 40e6), 44.0 + 10.0 * std::log10(2.0), 1e-12);
}

TEST(Scenario, SerializeParseRoundTripForEveryPreset) {
  for (const auto& p : list_presets()) {
    auto cfg = preset(p.environment, p.variant);
    cfg.master_seed = 977;
    cfg.link.sinr_backoff = 0.1 + 0.2;  // not exactly representable in short decimal
    const auto text = serialize_config(cfg);
    const auto back = parse_config_text(text);
    EXPECT_TRUE(back == cfg) << text;
    EXPECT_EQ(serialize_config(back), text);
  }
}

TEST(Scenario, ConfigTextOverridesPreset) {
  const auto base = preset(Environment::UrbanMacro_mMTC, Variant::A);
  const auto cfg = parse_config_text("[scenario]\nisd = 400\n[run]\ndrops = 7\n", base);
  EXPECT_EQ(cfg.isd, 400.0);
  EXPECT_EQ(cfg.drops, 7u);
  EXPECT_EQ(cfg.bandwidth, base.bandwidth);
}

TEST(Scenario, ConfigTextSwitchesPresetByEnvironment) {
  const auto base = preset(Environment::UrbanMacro_mMTC, Variant::A);
  const auto cfg = parse_config_text("[scenario]\nenvironment = rural\nvariant = B\n", base);
  EXPECT_TRUE(cfg == preset(Environment::Rural_eMBB, Variant::B));
}

TEST(Scenario, UnknownKeysAndSectionsAreRejected) {
  const auto base = preset(Environment::UrbanMacro_mMTC, Variant::A);
  EXPECT_THROW(parse_config_text("[scenario]\nisd_m = 5\n", base), ConfigInvalid);
  EXPECT_THROW(parse_config_text("[weather]\nrain = 1\n", base), ConfigInvalid);
  EXPECT_THROW(parse_config_text("[scenario\nisd = 5\n", base), ConfigSyntax);
  EXPECT_THROW(parse_config_text("isd = 5\n"), ConfigSyntax);
}

TEST(Scenario, ValidationNamesTheField) {
  auto expect_field = [](EvaluationConfig cfg, const std::string& field) {
    try {
      cfg.validate();
      ADD_FAILURE() << "no error for " << field;
    } catch (const ConfigInvalid& e) {
      EXPECT_EQ(e.field(), field);
    }
  };
  const auto base = preset(Environment::UrbanMacro_mMTC, Variant::A);
  auto c = base;
  c.isd = -1.0;
  expect_field(c, "scenario.isd");
  c = base;
  c.indoor_fraction = 1.5;
  expect_field(c, "scenario.indoor_fraction");
  c = base;
  c.bandwidth = 0.0;
  expect_field(c, "scenario.bandwidth");
  c = base;
  c.ues_per_trxp = 0;
  expect_field(c, "scenario.ues_per_trxp");
  c = base;
  c.traffic.rate = -1.0;
  expect_field(c, "traffic.rate");
  c = base;
  c.antenna_bs.Mp = 3;
  expect_field(c, "antenna.bs.Mp");
}

TEST(Scenario, ApplyOverride) {
  auto cfg = preset(Environment::UrbanMacro_mMTC, Variant::A);
  apply_override(cfg, "run.master_seed=42");
  apply_override(cfg, "antenna.bs.downtilt=12");
  apply_override(cfg, "link.doppler_backoff=0.001:1, 0.1:2");
  EXPECT_EQ(cfg.master_seed, 42u);
  EXPECT_EQ(cfg.antenna_bs.orientation.downtilt, 12.0);
  ASSERT_EQ(cfg.link.doppler_backoff.size(), 2u);
  EXPECT_EQ(cfg.link.doppler_backoff[1].backoff_db, 2.0);
  EXPECT_ANY_THROW(apply_override(cfg, "run.master_seed"));
  EXPECT_THROW(apply_override(cfg, "run.speed=1"), ConfigInvalid);
}

TEST(Scenario, ConfigHashTracksContent) {
  const auto a = preset(Environment::UrbanMacro_mMTC, Variant::A);
  auto b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.master_seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
  std::set<std::string> hashes;
  for (const auto& p : list_presets()) hashes.insert(config_hash(preset(p.environment, p.variant)));
  EXPECT_EQ(hashes.size(), 10u);
}

}  // namespace
}  // namespace imteval
