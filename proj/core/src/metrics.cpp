// SPDX-License-Identifier: Apache-2.0
#include "imteval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "imteval/error.hpp"
#include "imteval/geometry.hpp"

namespace imteval::metrics {

namespace {

constexpr std::size_t kMinPercentileSamples = 20;

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile probability must lie in [0, 1]");
}

}  // namespace

bool meets(double measured, double threshold) noexcept {
  if (measured >= threshold) return true;
  return std::abs(measured - threshold) <= 1e-10 * std::max(1.0, std::abs(threshold));
}

double quantile_sorted(std::span<const double> sorted, double p) {
  check_probability(p);
  if (sorted.empty()) throw InsufficientSamples("quantile of an empty sample");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

void CdfEstimator::add(double x) {
  if (!samples_.empty() && x < samples_.back()) sorted_ = false;
  samples_.push_back(x);
}

void CdfEstimator::add(std::span<const double> xs) {
  for (double x : xs) add(x);
}

void CdfEstimator::merge(const CdfEstimator& other) {
  for (double x : other.samples_) add(x);
}

void CdfEstimator::sort() const {
  if (!sorted_) {
    std::sort(samples_.begin(), samples_.end());
    sorted_ = true;
  }
}

double CdfEstimator::quantile(double p) const {
  sort();
  return quantile_sorted(samples_, p);
}

double CdfEstimator::mean() const {
  if (samples_.empty()) throw InsufficientSamples("mean of an empty sample");
  sort();
  return std::accumulate(samples_.begin(), samples_.end(), 0.0) /
         static_cast<double>(samples_.size());
}

std::vector<double> CdfEstimator::sorted() const {
  sort();
  return samples_;
}

BinnedCdf::BinnedCdf(double lo, double hi, std::size_t bins)
    : lo_(lo), width_((hi - lo) / static_cast<double>(bins)), counts_(bins, 0) {
  if (!(hi > lo) || bins == 0) throw DomainError("binned CDF needs hi > lo and at least one bin");
}

void BinnedCdf::add(double x) {
  if (std::isnan(x)) throw DomainError("NaN sample");
  const double pos = (x - lo_) / width_;
  std::size_t b = 0;
  if (pos >= static_cast<double>(counts_.size())) {
    b = counts_.size() - 1;
  } else if (pos > 0.0) {
    b = static_cast<std::size_t>(pos);
  }
  ++counts_[b];
  if (count_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++count_;
  sum_ += x;
}

void BinnedCdf::merge(const BinnedCdf& other) {
  if (other.lo_ != lo_ || other.width_ != width_ || other.counts_.size() != counts_.size()) {
    throw DomainError("cannot merge binned CDFs with different binning");
  }
  if (other.count_ == 0) return;
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  if (count_ == 0) {
    min_ = other.min_;
    max_ = other.max_;
  } else {
    min_ = std::min(min_, other.min_);
    max_ = std::max(max_, other.max_);
  }
  count_ += other.count_;
  sum_ += other.sum_;
}

double BinnedCdf::value_at_rank(std::uint64_t k) const {
  if (k == 0) return min_;
  if (k + 1 == count_) return max_;
  std::uint64_t before = 0;
  for (std::size_t b = 0; b < counts_.size(); ++b) {
    const std::uint64_t c = counts_[b];
    if (k < before + c) {
      const double within = (static_cast<double>(k - before) + 0.5) / static_cast<double>(c);
      const double v = lo_ + (static_cast<double>(b) + within) * width_;
      return std::clamp(v, min_, max_);
    }
    before += c;
  }
  return max_;
}

double BinnedCdf::quantile(double p) const {
  check_probability(p);
  if (count_ == 0) throw InsufficientSamples("quantile of an empty sample");
  const double h = p * static_cast<double>(count_ - 1);
  const auto lo = static_cast<std::uint64_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  const double a = value_at_rank(lo);
  if (frac == 0.0 || lo + 1 >= count_) return a;
  return a + frac * (value_at_rank(lo + 1) - a);
}

std::vector<double> BinnedCdf::quantiles(std::span<const double> ps) const {
  for (double p : ps) check_probability(p);
  if (count_ == 0) throw InsufficientSamples("quantile of an empty sample");
  // Ranks needed, visited in ascending order with a single bin cursor.
  struct Need {
    std::uint64_t rank;
    std::size_t slot;
  };
  std::vector<Need> needs;
  needs.reserve(ps.size() * 2);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double h = ps[i] * static_cast<double>(count_ - 1);
    const auto lo = static_cast<std::uint64_t>(std::floor(h));
    needs.push_back({lo, 2 * i});
    needs.push_back({std::min(lo + 1, count_ - 1), 2 * i + 1});
  }
  std::sort(needs.begin(), needs.end(),
            [](const Need& a, const Need& b) { return a.rank < b.rank; });
  std::vector<double> at(ps.size() * 2);
  std::size_t b = 0;
  std::uint64_t before = 0;
  for (const auto& n : needs) {
    if (n.rank == 0) {
      at[n.slot] = min_;
      continue;
    }
    if (n.rank + 1 == count_) {
      at[n.slot] = max_;
      continue;
    }
    while (b < counts_.size() && n.rank >= before + counts_[b]) before += counts_[b++];
    const double within =
        (static_cast<double>(n.rank - before) + 0.5) / static_cast<double>(counts_[b]);
    at[n.slot] = std::clamp(lo_ + (static_cast<double>(b) + within) * width_, min_, max_);
  }
  std::vector<double> out(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double h = ps[i] * static_cast<double>(count_ - 1);
    const double frac = h - std::floor(h);
    const double a = at[2 * i];
    out[i] = frac == 0.0 ? a : a + frac * (at[2 * i + 1] - a);
  }
  return out;
}

double BinnedCdf::mean() const {
  if (count_ == 0) throw InsufficientSamples("mean of an empty sample");
  return sum_ / static_cast<double>(count_);
}

double avg_spectral_efficiency(const SeInputs& in) {
  if (in.n_drops < 1) throw DomainError("n_drops must be >= 1");
  if (!(in.duration > 0.0)) throw DomainError("T must be > 0");
  if (!(in.bandwidth > 0.0)) throw DomainError("W must be > 0");
  if (in.trxps < 1) throw DomainError("M must be >= 1");
  double total = 0.0;
  for (double b : in.bits) {
    if (b < 0.0) throw DomainError("received bits must be >= 0");
    total += b;
  }
  return total / (static_cast<double>(in.n_drops) * in.duration * in.bandwidth *
                  static_cast<double>(in.trxps));
}

double pct5_user_se(std::span<const double> per_user_se) {
  if (per_user_se.size() < kMinPercentileSamples) {
    throw InsufficientSamples("5th percentile needs at least 20 samples, got " +
                              std::to_string(per_user_se.size()));
  }
  std::vector<double> s(per_user_se.begin(), per_user_se.end());
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, 0.05);
}

double bandwidth_per_user(double duration, double rate, double user_bandwidth) {
  if (!(rate > 0.0) || !(user_bandwidth > 0.0)) {
    throw DomainError("rate and per-user bandwidth must be > 0");
  }
  return duration / (rate / user_bandwidth);
}

double connection_density_fullbuffer(const CdInputs& in) {
  if (in.user_bandwidth.empty()) throw InsufficientSamples("no B_i values");
  const double mean_b = std::accumulate(in.user_bandwidth.begin(), in.user_bandwidth.end(), 0.0) /
                        static_cast<double>(in.user_bandwidth.size());
  if (!(mean_b > 0.0)) throw DomainError("mean(B_i) must be > 0");
  const double area_km2 = geometry::sector_area(in.isd) / 1e6;
  if (!(area_km2 > 0.0)) throw DomainError("sector area must be > 0");
  return in.n_mux * in.bandwidth / mean_b / area_km2;
}

CdSearchResult connection_density_nonfullbuffer(const std::function<double(double)>& p99_delay_at,
                                                double lo, double hi, double delay_limit,
                                                double rel_step) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("density search needs 0 < lo < hi");
  if (!(rel_step > 0.0)) throw DomainError("rel_step must be > 0");
  CdSearchResult r;
  double highest_pass = 0.0, highest_pass_delay = 0.0;
  double lowest_fail = std::numeric_limits<double>::infinity();
  auto probe = [&](double d) {
    const double delay = p99_delay_at(d);
    ++r.evaluations;
    const bool ok = delay <= delay_limit;
    if (ok) {
      if (d > highest_pass) {
        highest_pass = d;
        highest_pass_delay = delay;
      }
    } else {
      lowest_fail = std::min(lowest_fail, d);
    }
    if (highest_pass > lowest_fail) r.monotone = false;
    return ok;
  };

  if (probe(hi)) {
    r.hit_upper_bound = true;
  } else if (probe(lo)) {
    double a = lo, b = hi;
    while (b / a > 1.0 + rel_step) {
      const double mid = std::sqrt(a * b);
      if (probe(mid)) {
        a = mid;
      } else {
        b = mid;
      }
    }
  }
  r.density = highest_pass;
  r.p99_delay = highest_pass_delay;
  if (r.monotone) {
    r.bracket_low = highest_pass;
    r.bracket_high = lowest_fail;
  } else {
    r.bracket_low = lowest_fail;
    r.bracket_high = highest_pass;
  }
  return r;
}

ReliabilityResult reliability_at(double sinr_db, const link::BlerModel& bler,
                                 const link::HarqConfig& harq, double budget, double target) {
  ReliabilityResult r;
  r.sinr = sinr_db;
  r.outcome = link::harq_outcome(bler, harq, sinr_db, budget);
  r.success = r.outcome.success_probability;
  r.pass = meets(r.success, target);
  return r;
}

double normalized_doppler(double speed_kmh, double carrier_hz, double subcarrier_spacing_hz) noexcept {
  constexpr double c = 299792458.0;
  return speed_kmh / 3.6 * carrier_hz / c / subcarrier_spacing_hz;
}

double doppler_backoff(std::span<const DopplerBackoffStep> steps, double beyond,
                       double nd) noexcept {
  for (const auto& s : steps) {
    if (nd <= s.max_normalized_doppler) return s.backoff_db;
  }
  return beyond;
}

MobilityResult mobility_at(double median_sinr_db, double speed_kmh, double carrier_hz,
                           const LinkSettings& link, double requirement) {
  MobilityResult r;
  r.speed = speed_kmh;
  r.sinr = median_sinr_db;
  r.backoff = doppler_backoff(link.doppler_backoff, link.doppler_backoff_max,
                              normalized_doppler(speed_kmh, carrier_hz, link.subcarrier_spacing));
  r.normalized_rate = link::sinr_to_se(link.uplink, median_sinr_db - r.backoff);
  r.requirement = requirement;
  r.pass = meets(r.normalized_rate, requirement);
  return r;
}

double user_experienced_data_rate(std::span<const double> throughput_bps) {
  if (throughput_bps.size() < kMinPercentileSamples) {
    throw InsufficientSamples("user-experienced data rate needs at least 20 samples, got " +
                              std::to_string(throughput_bps.size()));
  }
  std::vector<double> s(throughput_bps.begin(), throughput_bps.end());
  std::sort(s.begin(), s.end());
  return quantile_sorted(s, 0.05);
}

ConvergenceMonitor::ConvergenceMonitor(int window, double tolerance, int cap)
    : window_(window), tolerance_(tolerance), cap_(cap) {
  if (window < 1) throw DomainError("convergence window must be >= 1");
  if (!(tolerance >= 0.0)) throw DomainError("convergence tolerance must be >= 0");
  if (cap < 1) throw DomainError("drop cap must be >= 1");
}

ConvergenceStatus ConvergenceMonitor::push(double drop_mean) {
  if (status_ != ConvergenceStatus::Continue) return status_;
  sum_ += drop_mean;
  running_.push_back(sum_ / static_cast<double>(running_.size() + 1));
  const auto n = running_.size();
  if (n > static_cast<std::size_t>(window_)) {
    const double now = running_[n - 1];
    const double then = running_[n - 1 - static_cast<std::size_t>(window_)];
    const double scale = std::max(std::abs(then), std::numeric_limits<double>::min());
    if (std::abs(now - then) < tolerance_ * scale || now == then) {
      status_ = ConvergenceStatus::Converged;
      return status_;
    }
  }
  if (n >= static_cast<std::size_t>(cap_)) status_ = ConvergenceStatus::Capped;
  return status_;
}

void RunningMean::push(double x) noexcept {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

double RunningMean::variance() const noexcept {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double RunningMean::standard_error() const noexcept {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

}  // namespace imteval::metrics
