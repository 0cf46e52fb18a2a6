// SPDX-License-Identifier: Apache-2.0
#include "imteval/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "imteval/error.hpp"

namespace imteval::link {

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) noexcept {
  if (linear <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(linear);
}

double dbm_to_mw(double dbm) noexcept { return db_to_linear(dbm); }
double mw_to_dbm(double mw) noexcept { return linear_to_db(mw); }

double noise_power(double bandwidth_hz, double noise_figure_db, double density_dbm_per_hz) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be > 0");
  return density_dbm_per_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

SinrSample compute_sinr(std::uint32_t ue_id, Direction direction, double signal_mw,
                        std::span<const double> interferer_mw, double noise_mw) {
  if (!(noise_mw > 0.0)) throw DomainError("noise power must be > 0");
  if (!(signal_mw >= 0.0)) throw DomainError("signal power must be >= 0");
  double interference = 0.0;
  for (double p : interferer_mw) {
    if (!(p >= 0.0)) throw DomainError("interferer power must be >= 0");
    interference += p;
  }
  SinrSample s;
  s.ue_id = ue_id;
  s.direction = direction;
  s.signal = mw_to_dbm(signal_mw);
  s.interference = mw_to_dbm(interference);
  s.noise = mw_to_dbm(noise_mw);
  s.sinr = linear_to_db(signal_mw / (interference + noise_mw));
  return s;
}

bool linearly_consistent(const SinrSample& s, double rel_tol) noexcept {
  const double lhs = db_to_linear(s.sinr);
  const double rhs = dbm_to_mw(s.signal) / (dbm_to_mw(s.interference) + dbm_to_mw(s.noise));
  if (lhs == rhs) return true;
  return std::abs(lhs - rhs) <= rel_tol * std::max(std::abs(lhs), std::abs(rhs));
}

double combine_mrc(std::span<const double> branch_sinr_linear) {
  if (branch_sinr_linear.empty()) throw DomainError("MRC needs at least one branch");
  double sum = 0.0;
  for (double s : branch_sinr_linear) {
    if (!(s >= 0.0)) throw DomainError("branch SINR must be >= 0");
    sum += s;
  }
  return sum;
}

double sinr_to_se(const LinkAbstraction& a, double sinr_db) noexcept {
  if (!(sinr_db >= a.sinr_min)) return 0.0;
  return std::min(a.efficiency * std::log2(1.0 + db_to_linear(sinr_db)), a.se_max);
}

double BlerModel::bler(double sinr_db) const noexcept {
  const double log_bler = std::log10(0.5) - (sinr_db - sinr_50) / slope;
  return std::clamp(std::pow(10.0, log_bler), bler_floor, 1.0);
}

HarqOutcome harq_outcome(const BlerModel& bler, const HarqConfig& harq, double sinr_db,
                         double latency_budget) {
  if (!(latency_budget > 0.0)) throw DomainError("latency budget must be > 0");
  HarqOutcome out;
  const auto fitting = static_cast<long long>(
      std::floor(latency_budget / harq.per_transmission_time * (1.0 + 1e-12)));
  const int k = static_cast<int>(std::min<long long>(harq.max_transmissions, fitting));
  if (k <= 0) {
    out.degenerate_budget = true;
    return out;
  }
  double residual = 1.0;
  for (int i = 0; i < k; ++i) {
    const double p = bler.bler(sinr_db + i * harq.combining_gain_per_retx);
    out.attempt_success.push_back(residual * (1.0 - p));
    out.attempt_delay.push_back((i + 1) * harq.per_transmission_time);
    residual *= p;
  }
  out.success_probability = 1.0 - residual;
  return out;
}

double uplink_power(const PowerControl& pc, double pathloss_db) noexcept {
  return std::min(pc.p_max, pc.p0 + pc.alpha * pathloss_db);
}

Calibration calibrate_p0(const std::function<double(double)>& mean_iot, double target_db,
                         double lo, double hi, int iterations) {
  Calibration c;
  const double at_hi = mean_iot(hi);
  if (at_hi <= target_db) {
    c = {hi, at_hi, true, 1};
    return c;
  }
  double iot_lo = mean_iot(lo);
  c.iterations = 2;
  if (iot_lo > target_db) {
    c = {lo, iot_lo, false, 2};
    return c;
  }
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double iot = mean_iot(mid);
    ++c.iterations;
    if (iot <= target_db) {
      lo = mid;
      iot_lo = iot;
    } else {
      hi = mid;
    }
  }
  c.p0 = lo;
  c.achieved_iot = iot_lo;
  c.converged = true;
  return c;
}

}  // namespace imteval::link
