// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "imteval/channel.hpp"
#include "imteval/error.hpp"
#include "imteval/profiles.hpp"
#include "imteval/random.hpp"

namespace imteval::channel {
namespace {

const ChannelProfile& uma() { return ProfileLibrary::builtin().get("UMa_A"); }

TEST(Channel, LosProbabilityShape) {
  for (auto m : {LosModel::UMa, LosModel::UMi, LosModel::RMa, LosModel::InH}) {
    EXPECT_DOUBLE_EQ(los_probability(m, 0.0), 1.0);
    double prev = 1.0;
    for (double d = 0.5; d < 3000.0; d *= 1.1) {
      const double p = los_probability(m, d);
      ASSERT_LE(p, prev + 1e-15);
      ASSERT_GE(p, 0.0);
      prev = p;
    }
  }
  // Urban macro curve: 18/d + exp(-d/63)(1 - 18/d) beyond 18 m.
  EXPECT_NEAR(los_probability(LosModel::UMa, 200.0), 0.09 + std::exp(-200.0 / 63.0) * 0.91, 1e-15);
  EXPECT_DOUBLE_EQ(los_probability(LosModel::NeverLos, 5.0), 0.0);
}

TEST(Channel, LosFrequencyMatchesProbability) {
  const auto& p = uma();
  auto rng = derive_stream(31, 0, 0);
  for (double d : {30.0, 100.0, 300.0}) {
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += assign_los(p, d, rng).los ? 1 : 0;
    const double q = los_probability(LosModel::UMa, d);
    EXPECT_NEAR(hits / static_cast<double>(n), q, 3.0 * std::sqrt(q * (1 - q) / n)) << d;
  }
}

TEST(Channel, FreeSpaceAtOneMeter) {
  EXPECT_NEAR(free_space_1m(700e6), 20.0 * std::log10(4.0 * std::numbers::pi * 700e6 / 299792458.0),
              1e-12);
  EXPECT_NEAR(free_space_1m(1e9), 32.4478, 1e-4);
}

// Urban macro NLOS: 13.54 + 39.08 log10(d3d) + 20 log10(fc / 1 GHz) at a
// 1.5 m terminal.
TEST(Channel, NlosPathlossMatchesUrbanMacroFormula) {
  const auto& p = uma();
  for (double d : {50.0, 200.0, 1000.0}) {
    const double fc = 4e9;
    const double oracle = 13.54 + 39.08 * std::log10(d) + 20.0 * std::log10(fc / 1e9);
    const double pl = pathloss(p, false, fc, d, 25.0, 1.5);
    EXPECT_GE(pl, pathloss(p, true, fc, d, 25.0, 1.5));
    EXPECT_NEAR(pl, std::max(oracle, pathloss(p, true, fc, d, 25.0, 1.5)), 0.01) << d;
  }
}

TEST(Channel, LosPathlossBendsAtBreakpoint) {
  const auto& p = uma();
  const double fc = 700e6;
  const double bp = breakpoint_distance(p, fc, 25.0, 1.5);
  EXPECT_NEAR(bp, 4.0 * 24.0 * 0.5 * fc / 299792458.0, 1e-9);
  const double fs = free_space_1m(fc);
  EXPECT_NEAR(pathloss(p, true, fc, bp / 2, 25.0, 1.5), fs + 22.0 * std::log10(bp / 2), 1e-9);
  EXPECT_NEAR(pathloss(p, true, fc, bp, 25.0, 1.5), fs + 22.0 * std::log10(bp), 1e-9);
  EXPECT_NEAR(pathloss(p, true, fc, 4 * bp, 25.0, 1.5),
              fs + 22.0 * std::log10(bp) + 40.0 * std::log10(4.0), 1e-9);
  EXPECT_THROW(pathloss(p, true, fc, 0.5, 25.0, 1.5), DomainError);
}

TEST(Channel, PenetrationLossOrdering) {
  const PenetrationModel m;
  const double low = penetration_loss(m, 4e9, false, 0.0, 0.0);
  const double high = penetration_loss(m, 4e9, true, 0.0, 0.0);
  EXPECT_GT(high, low);
  EXPECT_NEAR(penetration_loss(m, 4e9, false, 10.0, 0.0), low + 5.0, 1e-12);
  EXPECT_NEAR(penetration_loss(m, 4e9, false, 0.0, 1.0), low + 4.4, 1e-12);
}

TEST(Channel, ShadowingComesFromFirstNormal) {
  const auto& c = uma().nlos;
  auto a = derive_stream(32, 4, stream_id::link(9));
  auto b = a;
  const auto lsp = gen_lsp(c, Condition::NLOS, a);
  EXPECT_NEAR(lsp.sf, shadowing_from_normal(c, b.normal()), 1e-9);
}

TEST(Channel, LspMarginalsMatchProfile) {
  const auto& c = uma().nlos;
  auto rng = derive_stream(33, 0, 0);
  const int n = 40000;
  double sf = 0.0, sf2 = 0.0, lds = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto l = gen_lsp(c, Condition::NLOS, rng);
    sf += l.sf;
    sf2 += l.sf * l.sf;
    lds += std::log10(l.ds);
  }
  EXPECT_NEAR(sf / n, 0.0, 0.1);
  EXPECT_NEAR(std::sqrt(sf2 / n), c.sf_sigma, 0.05 * c.sf_sigma);
  EXPECT_NEAR(lds / n, c.ds.mu, 0.01);
}

TEST(Channel, ClusterPowersSumToOne) {
  const auto& p = uma();
  auto rng = derive_stream(34, 0, 0);
  for (int i = 0; i < 5000; ++i) {
    const auto cond = i % 2 ? Condition::LOS : Condition::NLOS;
    const auto& c = p.condition(cond);
    const auto lsp = gen_lsp(c, cond, rng);
    const auto cs = gen_clusters(lsp, c, c.n_clusters, 1, {}, rng);
    ASSERT_NEAR(std::accumulate(cs.powers.begin(), cs.powers.end(), 0.0), 1.0, 1e-12);
    ASSERT_EQ(cs.delays.front(), 0.0);
    ASSERT_TRUE(std::is_sorted(cs.delays.begin(), cs.delays.end()));
  }
}

TEST(Channel, ClusterRaysStayInRange) {
  const auto& c = uma().los;
  auto rng = derive_stream(35, 0, 0);
  const auto lsp = gen_lsp(c, Condition::LOS, rng);
  const auto cs = gen_clusters(lsp, c, c.n_clusters, 20, {10.0, 95.0, -170.0, 85.0}, rng);
  ASSERT_EQ(cs.ray_aoa.size(), static_cast<std::size_t>(c.n_clusters * 20));
  EXPECT_NEAR(cs.aod[0], 10.0, 1e-9);
  EXPECT_GT(cs.k_factor, 0.0);
  for (std::size_t i = 0; i < cs.ray_aoa.size(); ++i) {
    EXPECT_GT(cs.ray_aoa[i], -180.0);
    EXPECT_LE(cs.ray_aoa[i], 180.0);
    EXPECT_GE(cs.ray_zod[i], 0.0);
    EXPECT_LE(cs.ray_zod[i], 180.0);
  }
  EXPECT_THROW(gen_clusters(lsp, c, 0, 20, {}, rng), DomainError);
  EXPECT_THROW(gen_clusters(lsp, c, 4, 7, {}, rng), DomainError);
}

TEST(Channel, RmsDelaySpreadOfTwoTaps) {
  // Equal taps at 0 and 2 us: spread 1 us.
  EXPECT_NEAR(rms_delay_spread({0.0, 2e-6}, {0.5, 0.5}), 1e-6, 1e-18);
  EXPECT_NEAR(rms_delay_spread({0.0, 1e-6}, {1.0, 0.0}), 0.0, 1e-18);
  EXPECT_THROW(rms_delay_spread({}, {}), DomainError);
}

TEST(Channel, NlosDelaySpreadMatchesInput) {
  const auto& c = uma().nlos;
  auto rng = derive_stream(36, 0, 0);
  LargeScaleParams lsp;
  lsp.condition = Condition::NLOS;
  lsp.ds = 363e-9;
  const int n = 20000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto cs = gen_clusters(lsp, c, c.n_clusters, 1, {}, rng);
    sum += rms_delay_spread(cs.delays, cs.powers);
  }
  EXPECT_NEAR(sum / n / lsp.ds, 1.0, 0.10);
}

TEST(Channel, CoefficientsHaveUnitPower) {
  const auto& c = uma().nlos;
  auto rng = derive_stream(37, 0, 0);
  const auto tx = PortArray::single_isotropic();
  const auto rx = PortArray::single_isotropic();
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    ChannelRealization real;
    real.lsp = gen_lsp(c, Condition::NLOS, rng);
    real.clusters = gen_clusters(real.lsp, c, c.n_clusters, 20, {}, rng);
    real.carrier = 700e6;
    const CoefficientGenerator g(real, tx, rx);
    ASSERT_NEAR(g.expected_power(0, 0), 1.0, 1e-9);
    sum += std::norm(g.at(0.0)(0, 0));
  }
  EXPECT_NEAR(sum / n, 1.0, 0.02);
}

TEST(Channel, ClusterCoefficientsSumToChannel) {
  const auto& c = uma().los;
  auto rng = derive_stream(38, 0, 0);
  antenna::ArrayConfig bs;
  bs.M = 2;
  bs.P = 2;
  bs.pattern.max_gain = 8.0;
  ChannelRealization real;
  real.lsp = gen_lsp(c, Condition::LOS, rng);
  real.clusters = gen_clusters(real.lsp, c, c.n_clusters, 20, {30.0, 95.0, -150.0, 85.0}, rng);
  real.carrier = 4e9;
  real.speed = 30.0;
  real.distance_3d = 120.0;
  real.pathloss = 100.0;
  real.shadow = 3.0;
  const auto tx = PortArray::element_level(bs);
  const auto rx = PortArray::single_isotropic();
  const auto parts = cluster_coefficients(real, tx, rx, 1e-3);
  CoefficientMatrix total = CoefficientMatrix::Zero(1, 4);
  for (const auto& h : parts) total += h;
  const auto h = channel_coeff(real, tx, rx, 1e-3);
  ASSERT_EQ(h.rows(), 1);
  ASSERT_EQ(h.cols(), 4);
  EXPECT_LT((h - total).norm(), 1e-12 * std::max(1.0, h.norm()));
  const auto scaled = apply_pl_sf(real, h);
  EXPECT_NEAR(scaled.norm() / h.norm(), std::pow(10.0, -103.0 / 20.0), 1e-18);
}

TEST(Channel, ProfileLibraryDumpRoundTrip) {
  const auto& lib = ProfileLibrary::builtin();
  const auto names = lib.names();
  EXPECT_EQ(names.size(), 8u);
  const auto again = ProfileLibrary::parse(lib.dump(), "dump");
  EXPECT_EQ(again.dump(), lib.dump());
  EXPECT_EQ(&lib.get("UMi"), &lib.get("UMi_A"));
  EXPECT_THROW(lib.get("Moon_A"), ConfigInvalid);
}

TEST(Channel, ProfileRejectsIndefiniteCorrelation) {
  auto text = ProfileLibrary::builtin().dump("UMa_A");
  const std::string key = "rho_ASA_DS = 0.8";
  const auto at = text.find(key);
  ASSERT_NE(at, std::string::npos);
  text.replace(at, key.size(), "rho_ASA_DS = 0.8\nrho_ASA_ASD = -0.99");
  try {
    ProfileLibrary::parse(text, "edited");
    ADD_FAILURE() << "indefinite correlation accepted";
  } catch (const ConfigInvalid& e) {
    EXPECT_NE(e.field().find("correlation"), std::string::npos) << e.field();
  }
}

TEST(Channel, ProfileNamesPerEnvironment) {
  EXPECT_EQ(macro_profile_name(Environment::UrbanMacro_mMTC, Variant::B, ""), "UMa_A");
  EXPECT_EQ(macro_profile_name(Environment::Rural_eMBB, Variant::B, ""), "RMa_B");
  EXPECT_EQ(macro_profile_name(Environment::IndoorHotspot_eMBB, Variant::A, ""), "InH_A");
  EXPECT_EQ(macro_profile_name(Environment::UrbanMacro_URLLC, Variant::A, "UMi_B"), "UMi_B");
  EXPECT_EQ(micro_profile_name(Variant::B), "UMi_B");
}

}  // namespace
}  // namespace imteval::channel
