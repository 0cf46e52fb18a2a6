// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "imteval/error.hpp"
#include "imteval/link.hpp"
#include "imteval/random.hpp"

namespace imteval::link {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TEST(Link, DecibelConversions) {
  EXPECT_DOUBLE_EQ(db_to_linear(10.0), 10.0);
  EXPECT_DOUBLE_EQ(linear_to_db(100.0), 20.0);
  EXPECT_EQ(linear_to_db(0.0), -kInf);
  EXPECT_DOUBLE_EQ(dbm_to_mw(0.0), 1.0);
  EXPECT_NEAR(mw_to_dbm(dbm_to_mw(-97.3)), -97.3, 1e-12);
}

TEST(Link, NoisePower) {
  // -174 dBm/Hz over 10 MHz with a 5 dB noise figure.
  EXPECT_NEAR(noise_power(10e6, 5.0), -174.0 + 70.0 + 5.0, 1e-12);
  EXPECT_NEAR(noise_power(180e3, 5.0), -174.0 + 10.0 * std::log10(180e3) + 5.0, 1e-12);
  EXPECT_THROW(noise_power(0.0, 5.0), DomainError);
}

TEST(Link, SinrOfKnownPowers) {
  const std::vector<double> interferers{1e-9, 3e-9};
  const auto s = compute_sinr(4, Direction::Uplink, 1e-8, interferers, 1e-9);
  EXPECT_NEAR(s.sinr, 10.0 * std::log10(2.0), 1e-12);
  EXPECT_NEAR(s.interference, 10.0 * std::log10(4e-9), 1e-12);
  EXPECT_EQ(s.ue_id, 4u);
  EXPECT_TRUE(linearly_consistent(s));
}

TEST(Link, SinrWithoutInterferenceIsSnr) {
  const auto s = compute_sinr(0, Direction::Downlink, 2e-10, {}, 1e-11);
  EXPECT_EQ(s.interference, -kInf);
  EXPECT_NEAR(s.sinr, s.signal - s.noise, 1e-12);
  EXPECT_TRUE(linearly_consistent(s));
}

TEST(Link, LinearConsistencyOnRandomSamples) {
  auto rng = derive_stream(41, 0, 0);
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> interferers(rng.below(60));
    for (auto& p : interferers) p = dbm_to_mw(rng.uniform(-160, -60));
    const auto s = compute_sinr(0, Direction::Downlink, dbm_to_mw(rng.uniform(-140, -40)),
                                interferers, dbm_to_mw(rng.uniform(-130, -95)));
    ASSERT_TRUE(linearly_consistent(s));
  }
  SinrSample broken;
  broken.signal = -80.0;
  broken.noise = -100.0;
  broken.interference = -kInf;
  broken.sinr = 19.0;
  EXPECT_FALSE(linearly_consistent(broken));
}

TEST(Link, SinrRejectsInvalidPowers) {
  const std::vector<double> bad{-1.0};
  EXPECT_THROW(compute_sinr(0, Direction::Downlink, 1.0, bad, 1.0), DomainError);
  EXPECT_THROW(compute_sinr(0, Direction::Downlink, 1.0, {}, 0.0), DomainError);
}

TEST(Link, MaximumRatioCombiningAddsBranches) {
  const std::vector<double> branches{1.0, 2.5, 0.5};
  EXPECT_DOUBLE_EQ(combine_mrc(branches), 4.0);
  EXPECT_THROW(combine_mrc({}), DomainError);
}

TEST(Link, SpectralEfficiencyMap) {
  const LinkAbstraction a{0.6, 5.5, -10.0};
  EXPECT_EQ(sinr_to_se(a, -10.5), 0.0);
  EXPECT_NEAR(sinr_to_se(a, 0.0), 0.6, 1e-12);
  EXPECT_NEAR(sinr_to_se(a, -10.0), 0.6 * std::log2(1.1), 1e-12);
  EXPECT_DOUBLE_EQ(sinr_to_se(a, 60.0), 5.5);
  double prev = 0.0;
  for (double s = -20.0; s < 50.0; s += 0.25) {
    ASSERT_GE(sinr_to_se(a, s), prev);
    prev = sinr_to_se(a, s);
  }
}

TEST(Link, BlerCurve) {
  const BlerModel m{-3.0, 1.0, 1e-9};
  EXPECT_NEAR(m.bler(-3.0), 0.5, 1e-15);
  EXPECT_NEAR(m.bler(-2.0), 0.05, 1e-15);
  EXPECT_DOUBLE_EQ(m.bler(-30.0), 1.0);
  EXPECT_DOUBLE_EQ(m.bler(30.0), 1e-9);
}

TEST(Link, HarqAccumulatesAttemptsWithinBudget) {
  BlerModel m;
  m.bler_floor = 0.1;
  HarqConfig h{4, 0.25e-3, 0.0};
  const auto out = harq_outcome(m, h, 40.0, 1e-3);
  ASSERT_EQ(out.attempt_success.size(), 4u);
  EXPECT_NEAR(out.success_probability, 1.0 - 1e-4, 1e-15);
  EXPECT_NEAR(out.attempt_success[1], 0.1 * 0.9, 1e-15);
  EXPECT_NEAR(out.attempt_delay[3], 1e-3, 1e-18);
  // Only two transmissions fit in half a millisecond.
  EXPECT_EQ(harq_outcome(m, h, 40.0, 0.5e-3).attempt_success.size(), 2u);
  EXPECT_TRUE(harq_outcome(m, h, 40.0, 0.1e-3).degenerate_budget);
  EXPECT_THROW(harq_outcome(m, h, 40.0, 0.0), DomainError);
}

TEST(Link, HarqCombiningGainLowersLaterBler) {
  const BlerModel m{-3.0, 1.0, 1e-9};
  const HarqConfig h{2, 0.5e-3, 3.0};
  const auto out = harq_outcome(m, h, -3.0, 1e-3);
  EXPECT_NEAR(out.success_probability, 1.0 - 0.5 * m.bler(0.0), 1e-15);
}

TEST(Link, UplinkPowerIsFractionalAndCapped) {
  const PowerControl pc{-90.0, 0.8, 23.0};
  EXPECT_DOUBLE_EQ(uplink_power(pc, 100.0), -10.0);
  EXPECT_DOUBLE_EQ(uplink_power(pc, 200.0), 23.0);
}

TEST(Link, CalibrationFindsLargestFeasibleP0) {
  // Mean IoT rising one for one with p0, crossing 10 dB at p0 = -84.
  const auto iot = [](double p0) { return p0 + 94.0; };
  const auto c = calibrate_p0(iot, 10.0, -110.0, -40.0, 60);
  EXPECT_TRUE(c.converged);
  EXPECT_NEAR(c.p0, -84.0, 1e-9);
  EXPECT_LE(c.achieved_iot, 10.0);
  const auto high = calibrate_p0(iot, 10.0, -110.0, -90.0, 60);
  EXPECT_DOUBLE_EQ(high.p0, -90.0);
  const auto never = calibrate_p0(iot, 10.0, -70.0, -40.0, 60);
  EXPECT_FALSE(never.converged);
  EXPECT_DOUBLE_EQ(never.p0, -70.0);
}

}  // namespace
}  // namespace imteval::link
