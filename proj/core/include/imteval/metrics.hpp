// SPDX-License-Identifier: Apache-2.0
#pragma once

// KPI formulas, empirical distributions and convergence monitoring.
//
// Quantile convention: linear interpolation between order statistics at the
// 0-based position p*(n-1), so samples {1..100} give 5.95 at p = 0.05.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "imteval/link.hpp"
#include "imteval/scenario.hpp"

namespace imteval::metrics {

/// Boundary-inclusive comparison used by every pass/fail decision: a >= b,
/// allowing a relative rounding slack of 1e-10.
bool meets(double measured, double threshold) noexcept;

/// Interpolated quantile of ascending `sorted`. Throws InsufficientSamples on
/// an empty span and DomainError for p outside [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

/// Exact empirical distribution over a sample buffer.
class CdfEstimator {
 public:
  void add(double x);
  void add(std::span<const double> xs);
  void merge(const CdfEstimator& other);
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double quantile(double p) const;
  double mean() const;
  double min() const { return quantile(0.0); }
  double max() const { return quantile(1.0); }
  /// Ascending copy of the samples.
  std::vector<double> sorted() const;

 private:
  void sort() const;
  mutable std::vector<double> samples_;
  mutable bool sorted_ = true;
};

/// Fixed-bin histogram with the same quantile convention, treating the k
/// samples in a bin as evenly spread across it. Memory is independent of the
/// sample count. Values outside [lo, hi] land in the edge bins; the exact
/// extremes are tracked so quantile(0) and quantile(1) are exact.
class BinnedCdf {
 public:
  BinnedCdf() : BinnedCdf(-50.0, 80.0, 13000) {}
  BinnedCdf(double lo, double hi, std::size_t bins);

  void add(double x);
  /// Both operands must share the binning. Throws DomainError otherwise.
  void merge(const BinnedCdf& other);
  std::uint64_t count() const noexcept { return count_; }
  double quantile(double p) const;
  /// quantile() for each entry of `ps`, in one pass over the bins.
  std::vector<double> quantiles(std::span<const double> ps) const;
  double mean() const;
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  double bin_width() const noexcept { return width_; }

 private:
  double value_at_rank(std::uint64_t k) const;
  double lo_;
  double width_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t count_ = 0;
  double sum_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

// ---------------------------------------------------------------------------
// Spectral efficiency

struct SeInputs {
  int n_drops = 1;
  /// Correctly received bits per user over T, all drops concatenated.
  std::vector<double> bits;
  double duration = 1.0;   // T, s
  double bandwidth = 1.0;  // W, Hz
  int trxps = 1;           // M
};

/// Sum of bits over (n_drops * T * W * M), bit/s/Hz per TRxP. Throws
/// DomainError on non-positive counts, durations or bandwidth, or negative bits.
double avg_spectral_efficiency(const SeInputs& in);

/// 5th percentile of per-user normalized throughput. Throws
/// InsufficientSamples below 20 samples.
double pct5_user_se(std::span<const double> per_user_se);

// ---------------------------------------------------------------------------
// Connection density

/// B_i = T / (R_i / W_user).
double bandwidth_per_user(double duration, double rate, double user_bandwidth);

struct CdInputs {
  double n_mux = 1.0;
  double bandwidth = 1.0;             // W
  std::vector<double> user_bandwidth;  // B_i values
  double isd = 500.0;                 // m
};

/// C = (n_mux * W / mean(B_i)) / (ISD^2 * sqrt(3) / 6), per km^2. Throws
/// DomainError on a non-positive area or mean(B_i).
double connection_density_fullbuffer(const CdInputs& in);

struct CdSearchResult {
  double density = 0.0;        // largest tested density meeting the QoS, /km^2
  double p99_delay = 0.0;      // s, at `density`
  double bracket_low = 0.0;    // passing edge of the final bracket
  double bracket_high = 0.0;   // failing edge; +inf when the upper bound passed
  bool hit_upper_bound = false;
  bool monotone = true;        // false when a pass was seen above a fail
  int evaluations = 0;
};

/// Log-scale bisection over density in [lo, hi] for the largest density
/// whose 99th-percentile delay (from `p99_delay_at`) is at most
/// `delay_limit`. Stops when hi/lo <= 1 + `rel_step`. When delays are not
/// monotone in density, the widest interval between the lowest failing and
/// highest passing density seen is reported.
CdSearchResult connection_density_nonfullbuffer(const std::function<double(double)>& p99_delay_at,
                                                double lo, double hi, double delay_limit,
                                                double rel_step = 0.01);

// ---------------------------------------------------------------------------
// Reliability, mobility, user-experienced data rate

struct ReliabilityResult {
  double sinr = 0.0;  // dB, evaluation point
  link::HarqOutcome outcome;
  double success = 0.0;
  bool pass = false;
};

inline constexpr double kReliabilityTarget = 1.0 - 1e-5;

/// HARQ success at the 5th-percentile SINR of `sinr_db`.
template <typename Dist>
ReliabilityResult reliability(const Dist& sinr_db, const link::BlerModel& bler,
                              const link::HarqConfig& harq, double budget,
                              double target = kReliabilityTarget);
ReliabilityResult reliability_at(double sinr_db, const link::BlerModel& bler,
                                 const link::HarqConfig& harq, double budget,
                                 double target = kReliabilityTarget);

/// SINR backoff in dB for a normalized Doppler v*fc/c divided by the
/// subcarrier spacing: the first step whose bound is not exceeded, else
/// `beyond`.
double doppler_backoff(std::span<const DopplerBackoffStep> steps, double beyond,
                       double normalized_doppler) noexcept;
double normalized_doppler(double speed_kmh, double carrier_hz, double subcarrier_spacing_hz) noexcept;

struct MobilityResult {
  double speed = 0.0;          // km/h
  double sinr = 0.0;           // dB, median before backoff
  double backoff = 0.0;        // dB
  double normalized_rate = 0.0;  // bit/s/Hz
  double requirement = 0.0;
  bool pass = false;
};

MobilityResult mobility_at(double median_sinr_db, double speed_kmh, double carrier_hz,
                           const LinkSettings& link, double requirement);
template <typename Dist>
MobilityResult mobility_check(const Dist& ul_sinr_db, double speed_kmh, double carrier_hz,
                              const LinkSettings& link, double requirement) {
  return mobility_at(ul_sinr_db.quantile(0.5), speed_kmh, carrier_hz, link, requirement);
}

/// 5th percentile of per-user throughput in bit/s. Throws
/// InsufficientSamples below 20 samples.
double user_experienced_data_rate(std::span<const double> throughput_bps);

// ---------------------------------------------------------------------------
// Convergence

enum class ConvergenceStatus { Continue, Converged, Capped };

/// Watches the running mean of per-drop means. Declares convergence once the
/// running mean moved by less than `tolerance` (relative) over the last
/// `window` drops, or when `cap` drops were seen.
class ConvergenceMonitor {
 public:
  ConvergenceMonitor(int window, double tolerance, int cap = 10000);
  ConvergenceStatus push(double drop_mean);
  int drops() const noexcept { return static_cast<int>(running_.size()); }
  double running_mean() const noexcept { return running_.empty() ? 0.0 : running_.back(); }
  ConvergenceStatus status() const noexcept { return status_; }

 private:
  int window_;
  double tolerance_;
  int cap_;
  double sum_ = 0.0;
  std::vector<double> running_;
  ConvergenceStatus status_ = ConvergenceStatus::Continue;
};

/// Welford accumulator of per-drop means with the standard error of the
/// running mean.
class RunningMean {
 public:
  void push(double x) noexcept;
  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;  // sample variance
  double standard_error() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

template <typename Dist>
ReliabilityResult reliability(const Dist& sinr_db, const link::BlerModel& bler,
                              const link::HarqConfig& harq, double budget, double target) {
  return reliability_at(sinr_db.quantile(0.05), bler, harq, budget, target);
}

}  // namespace imteval::metrics
