// SPDX-License-Identifier: Apache-2.0
#pragma once

// Link budget, SINR bookkeeping, combining, uplink power control and the
// SINR-to-rate / SINR-to-BLER abstraction with HARQ.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "imteval/types.hpp"

namespace imteval::link {

inline constexpr double kThermalNoiseDensity = -174.0;  // dBm/Hz

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;  // -inf for 0
double dbm_to_mw(double dbm) noexcept;
double mw_to_dbm(double mw) noexcept;

/// Thermal noise plus receiver noise figure over `bandwidth_hz`, in dBm.
/// Throws DomainError when the bandwidth is not positive.
double noise_power(double bandwidth_hz, double noise_figure_db,
                   double density_dbm_per_hz = kThermalNoiseDensity);

struct SinrSample {
  std::uint32_t ue_id = 0;
  Direction direction = Direction::Downlink;
  double sinr = 0.0;          // dB
  double signal = 0.0;        // dBm
  double interference = 0.0;  // dBm, -inf when there is none
  double noise = 0.0;         // dBm
};

/// Powers in mW. Interference is summed in the order given.
SinrSample compute_sinr(std::uint32_t ue_id, Direction direction, double signal_mw,
                        std::span<const double> interferer_mw, double noise_mw);

/// True when 10^(sinr/10) equals S/(I+N) to `rel_tol`.
bool linearly_consistent(const SinrSample& s, double rel_tol = 1e-9) noexcept;

/// Maximum ratio combining on per-branch linear SINRs (interference treated
/// as spatially white): the sum. Throws DomainError on an empty list.
double combine_mrc(std::span<const double> branch_sinr_linear);

struct LinkAbstraction {
  double efficiency = 0.6;  // alpha
  double se_max = 7.4;      // bit/s/Hz
  double sinr_min = -10.0;  // dB; SE is zero below
  friend bool operator==(const LinkAbstraction&, const LinkAbstraction&) = default;
};

/// 0 below sinr_min, else min(alpha*log2(1+sinr), se_max).
double sinr_to_se(const LinkAbstraction& a, double sinr_db) noexcept;

/// log10(BLER) falls linearly in SINR (dB) through 0.5 at sinr_50, clipped to
/// [bler_floor, 1].
struct BlerModel {
  double sinr_50 = -3.0;     // dB
  double slope = 1.0;        // dB per decade
  double bler_floor = 1e-9;

  double bler(double sinr_db) const noexcept;
  friend bool operator==(const BlerModel&, const BlerModel&) = default;
};

struct HarqConfig {
  int max_transmissions = 4;
  double per_transmission_time = 0.25e-3;  // s
  double combining_gain_per_retx = 3.0;    // dB
  friend bool operator==(const HarqConfig&, const HarqConfig&) = default;
};

struct HarqOutcome {
  double success_probability = 0.0;
  /// Probability that the packet succeeds exactly at attempt i+1.
  std::vector<double> attempt_success;
  /// Completion delay for a success at attempt i+1.
  std::vector<double> attempt_delay;
  bool degenerate_budget = false;
};

/// Throws DomainError when latency_budget <= 0.
HarqOutcome harq_outcome(const BlerModel& bler, const HarqConfig& harq, double sinr_db,
                         double latency_budget);

struct PowerControl {
  double p0 = -90.0;   // dBm
  double alpha = 0.8;
  double p_max = 23.0;  // dBm
};

/// Open-loop fractional power control, min(p_max, p0 + alpha*pathloss).
double uplink_power(const PowerControl& pc, double pathloss_db) noexcept;

struct Calibration {
  double p0 = 0.0;
  double achieved_iot = 0.0;  // dB
  bool converged = false;
  int iterations = 0;
};

/// Finds the largest p0 in [lo, hi] whose mean IoT (returned by `mean_iot`,
/// assumed non-decreasing in p0) stays at or below `target_db`, by
/// bisection. `converged` is false when even `lo` exceeds the target.
Calibration calibrate_p0(const std::function<double(double)>& mean_iot, double target_db,
                         double lo, double hi, int iterations);

}  // namespace imteval::link
