// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "imteval/antenna.hpp"
#include "imteval/channel.hpp"
#include "imteval/error.hpp"
#include "imteval/random.hpp"

namespace imteval::antenna {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

ElementPattern sector(double max_gain = 8.0) {
  ElementPattern p;
  p.max_gain = max_gain;
  return p;
}

TEST(Antenna, ElementGainAtBoresightAndHalfPowerPoints) {
  const auto p = sector();
  EXPECT_DOUBLE_EQ(element_gain(p, 0.0, 90.0), 8.0);
  EXPECT_NEAR(element_gain(p, 32.5, 90.0), 8.0 - 3.0, 1e-12);
  EXPECT_NEAR(element_gain(p, -32.5, 90.0), 8.0 - 3.0, 1e-12);
  EXPECT_NEAR(element_gain(p, 0.0, 90.0 + 32.5), 8.0 - 3.0, 1e-12);
  EXPECT_NEAR(element_gain(p, 32.5, 90.0 + 32.5), 8.0 - 6.0, 1e-12);
}

TEST(Antenna, ElementGainIsClampedByFrontToBackRatio) {
  const auto p = sector();
  EXPECT_DOUBLE_EQ(element_gain(p, 180.0, 90.0), 8.0 - 30.0);
  EXPECT_DOUBLE_EQ(element_gain(p, 180.0, 0.0), 8.0 - 30.0);
  auto rng = derive_stream(21, 0, 0);
  for (int i = 0; i < 2000; ++i) {
    const double g = element_gain(p, rng.uniform(-180, 180), rng.uniform(0, 180));
    ASSERT_LE(g, 8.0);
    ASSERT_GE(g, 8.0 - 30.0);
  }
}

TEST(Antenna, ElementGainRejectsOutOfRangeAngles) {
  EXPECT_THROW(element_gain(sector(), 181.0, 90.0), DomainError);
  EXPECT_THROW(element_gain(sector(), 0.0, -1.0), DomainError);
  EXPECT_DOUBLE_EQ(element_gain(ElementPattern::make_isotropic(2.0), 170.0, 10.0), 2.0);
}

TEST(Antenna, ToLocalUndoesBearingAndTilt) {
  const Orientation o{30.0, 10.0};
  const auto boresight = to_local(o, 30.0, 100.0);
  EXPECT_NEAR(boresight.azimuth, 0.0, 1e-9);
  EXPECT_NEAR(boresight.zenith, 90.0, 1e-9);
  const auto side = to_local(Orientation{90.0, 0.0}, 0.0, 90.0);
  EXPECT_NEAR(side.azimuth, -90.0, 1e-9);
  const auto identity = to_local(Orientation{}, -120.0, 40.0);
  EXPECT_NEAR(identity.azimuth, -120.0, 1e-9);
  EXPECT_NEAR(identity.zenith, 40.0, 1e-9);
}

TEST(Antenna, FrameOverloadMatchesAngleOverload) {
  auto rng = derive_stream(22, 0, 0);
  for (int i = 0; i < 1000; ++i) {
    const Orientation o{rng.uniform(-180, 180), rng.uniform(-20, 20)};
    const double az = rng.uniform(-180, 180);
    const double zen = rng.uniform(1, 179);
    const double st = std::sin(zen * kDeg);
    const auto a = to_local(o, az, zen);
    const auto b = to_local(Frame::of(o), st * std::cos(az * kDeg), st * std::sin(az * kDeg),
                            std::cos(zen * kDeg));
    ASSERT_NEAR(a.azimuth, b.azimuth, 1e-9);
    ASSERT_NEAR(a.zenith, b.zenith, 1e-9);
  }
}

TEST(Antenna, PortArrayGainOverloadsAgree) {
  ArrayConfig cfg;
  cfg.M = 4;
  cfg.Mp = 1;
  cfg.P = 2;
  cfg.pattern = sector();
  cfg.orientation = {150.0, 9.0};
  cfg.electrical_tilt = 99.0;
  const auto ports = channel::PortArray::port_level(cfg);
  const auto frame = Frame::of(cfg.orientation);
  auto rng = derive_stream(23, 0, 0);
  for (int i = 0; i < 500; ++i) {
    const double az = rng.uniform(-180, 180);
    const double zen = rng.uniform(1, 179);
    const double st = std::sin(zen * kDeg);
    ASSERT_NEAR(ports.gain_db(az, zen),
                ports.gain_db(frame, st * std::cos(az * kDeg), st * std::sin(az * kDeg),
                              std::cos(zen * kDeg)),
                1e-9);
  }
  EXPECT_FALSE(ports.omnidirectional());
  EXPECT_TRUE(channel::PortArray::single_isotropic().omnidirectional());
}

TEST(Antenna, ElementSitesFollowIndexOrder) {
  ArrayConfig cfg;
  cfg.M = 2;
  cfg.N = 3;
  cfg.P = 2;
  cfg.Mg = 1;
  cfg.Ng = 2;
  const auto sites = element_sites(cfg);
  ASSERT_EQ(static_cast<int>(sites.size()), cfg.total_elements());
  const auto& s = sites[static_cast<std::size_t>(element_index(cfg, 0, 1, 1, 1, 2))];
  EXPECT_DOUBLE_EQ(s.y, (1 * 3 + 2) * 0.5);
  EXPECT_DOUBLE_EQ(s.z, 1 * 0.8);
  EXPECT_EQ(s.polarization, 1);
  EXPECT_DOUBLE_EQ(s.slant_deg, -45.0);
}

TEST(Antenna, ArrayResponseIsUnitModulus) {
  ArrayConfig cfg;
  cfg.M = 4;
  cfg.N = 4;
  for (const auto& a : array_response(cfg, 37.0, 71.0)) EXPECT_NEAR(std::abs(a), 1.0, 1e-12);
}

TEST(Antenna, TxruMappingPartitionsThePanel) {
  ArrayConfig cfg;
  cfg.M = 8;
  cfg.N = 4;
  cfg.P = 2;
  cfg.Mp = 2;
  cfg.Np = 4;
  const auto map = map_txru(cfg);
  EXPECT_EQ(map.vertical_span, 4);
  EXPECT_EQ(map.horizontal_span, 1);
  ASSERT_EQ(static_cast<int>(map.ports.size()), cfg.ports());
  std::vector<int> used(static_cast<std::size_t>(cfg.total_elements()), 0);
  for (const auto& port : map.ports) {
    double power = 0.0;
    for (const auto& [e, w] : port.weights) {
      ++used[static_cast<std::size_t>(e)];
      power += std::norm(w);
    }
    EXPECT_NEAR(power, 1.0, 1e-12);
  }
  for (int u : used) EXPECT_EQ(u, 1);
  std::vector<std::complex<double>> signals(map.ports.size(), {1.0, 0.0});
  EXPECT_EQ(map.apply(signals).size(), static_cast<std::size_t>(cfg.total_elements()));
}

TEST(Antenna, TxruMappingRejectsUnevenGrid) {
  ArrayConfig cfg;
  cfg.M = 4;
  cfg.Mp = 3;
  EXPECT_THROW(map_txru(cfg), MappingError);
  cfg.Mp = 2;
  const auto map = map_txru(cfg);
  std::vector<std::complex<double>> wrong(1);
  EXPECT_THROW(map.apply(wrong), MappingError);
}

TEST(Antenna, SubarrayGainPeaksAtElectricalTilt) {
  ArrayConfig cfg;
  cfg.M = 10;
  cfg.Mp = 1;
  cfg.electrical_tilt = 102.0;
  EXPECT_NEAR(subarray_gain(cfg, 0.0, 102.0), 10.0, 1e-9);
  EXPECT_LT(subarray_gain(cfg, 0.0, 80.0), 10.0);
  cfg.Mp = 10;
  EXPECT_EQ(subarray_gain(cfg, 0.0, 50.0), 0.0);
}

// Mean of |1 + exp(i k d r)|^2 / 2 over the sphere is 1 + sin(k d)/(k d).
TEST(Antenna, TwoElementRadiatedPowerMatchesClosedForm) {
  for (double d : {0.5, 0.8, 1.3}) {
    ArrayConfig cfg;
    cfg.N = 2;
    cfg.element_spacing_h = d;
    const auto iso = ElementPattern::make_isotropic();
    const double kd = 2.0 * kPi * d;
    const double expected = 1.0 + std::sin(kd) / kd;
    EXPECT_NEAR(radiated_power(cfg, iso, 0.5), expected, 2e-4) << d;
    EXPECT_NEAR(directivity(cfg, iso, 0.5), 10.0 * std::log10(2.0 / expected), 1e-3) << d;
  }
}

TEST(Antenna, IsotropicDirectivityIsZero) {
  ArrayConfig cfg;
  EXPECT_NEAR(directivity(cfg, ElementPattern::make_isotropic(), 1.0), 0.0, 1e-3);
  EXPECT_THROW(directivity(cfg, ElementPattern::make_isotropic(), 7.0), DomainError);
}

// Independent midpoint rule on a finer grid with the pattern written out here.
TEST(Antenna, ElementDirectivityMatchesIndependentQuadrature) {
  const auto p = sector(0.0);
  auto gain = [](double az, double zen) {
    const double ah = std::min(12.0 * std::pow(az / 65.0, 2), 30.0);
    const double av = std::min(12.0 * std::pow((zen - 90.0) / 65.0, 2), 30.0);
    return std::pow(10.0, -std::min(ah + av, 30.0) / 10.0);
  };
  const int n = 720;
  const double h = kPi / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double zen = (i + 0.5) * h;
    for (int j = 0; j < 2 * n; ++j) {
      const double az = -kPi + (j + 0.5) * h;
      sum += gain(az / kDeg, zen / kDeg) * std::sin(zen);
    }
  }
  const double mean = sum * h * h / (4.0 * kPi);
  const double oracle = 10.0 * std::log10(1.0 / mean);
  EXPECT_NEAR(directivity(ArrayConfig{}, p, 1.0), oracle, 0.02);
}

TEST(Antenna, ArrayValidationNamesTheField) {
  ArrayConfig cfg;
  cfg.P = 3;
  try {
    cfg.validate("antenna.bs");
    ADD_FAILURE();
  } catch (const ConfigInvalid& e) {
    EXPECT_EQ(e.field(), "antenna.bs.P");
  }
}

}  // namespace
}  // namespace imteval::antenna
