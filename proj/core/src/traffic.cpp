// SPDX-License-Identifier: Apache-2.0
#include "imteval/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <string>

#include "imteval/error.hpp"

namespace imteval::traffic {

void TrafficModelSpec::validate(std::string_view prefix) const {
  if (kind != TrafficKind::PoissonMessaging) return;
  if (!(pdu_size > 0.0)) throw ConfigInvalid(std::string(prefix) + ".pdu_size", "must be > 0");
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ConfigInvalid(std::string(prefix) + ".rate", "must be > 0");
  }
}

ArrivalList gen_arrivals(const TrafficModelSpec& spec, std::uint32_t n_ues, double horizon,
                         RngStream& rng) {
  if (!(horizon > 0.0)) throw DomainError("arrival horizon must be > 0");
  ArrivalList out;
  if (spec.kind == TrafficKind::FullBuffer) {
    out.always_backlogged = true;
    return out;
  }
  for (std::uint32_t ue = 0; ue < n_ues; ++ue) {
    double t = rng.exponential(spec.rate);
    while (t < horizon) {
      out.arrivals.push_back({ue, t});
      t += rng.exponential(spec.rate);
    }
  }
  std::sort(out.arrivals.begin(), out.arrivals.end(), [](const Arrival& a, const Arrival& b) {
    return a.time < b.time || (a.time == b.time && a.ue_id < b.ue_id);
  });
  return out;
}

Allocation schedule_pf(std::span<const std::uint32_t> backlogged, std::span<const double> rates,
                       SchedulerState& state, int resources) {
  if (state.average.size() < rates.size()) {
    state.average.resize(rates.size(), 0.0);
    state.resources_granted.resize(rates.size(), 0);
  }
  struct Candidate {
    std::uint32_t ue;
    double metric;
  };
  std::vector<Candidate> ranked;
  ranked.reserve(backlogged.size());
  for (auto ue : backlogged) {
    if (ue >= rates.size()) throw DomainError("backlogged UE has no rate entry");
    const double r = rates[ue];
    if (!(r >= 0.0)) throw DomainError("instantaneous rate must be >= 0");
    if (r == 0.0) continue;
    const double avg = state.average[ue];
    ranked.push_back({ue, avg > 0.0 ? r / avg : std::numeric_limits<double>::infinity()});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Candidate& a, const Candidate& b) {
    return a.metric > b.metric || (a.metric == b.metric && a.ue < b.ue);
  });

  Allocation alloc;
  if (!ranked.empty() && resources > 0) {
    const auto n = static_cast<int>(ranked.size());
    const int each = resources / n;
    const int extra = resources % n;
    for (int i = 0; i < n; ++i) {
      const int count = each + (i < extra ? 1 : 0);
      if (count == 0) break;
      alloc.emplace_back(ranked[static_cast<std::size_t>(i)].ue, count);
    }
  }

  std::vector<double> served(rates.size(), 0.0);
  for (const auto& [ue, count] : alloc) {
    served[ue] = rates[ue] * count / resources;
    state.resources_granted[ue] += static_cast<std::uint64_t>(count);
  }
  for (std::size_t ue = 0; ue < rates.size(); ++ue) {
    state.average[ue] = (1.0 - state.beta) * state.average[ue] + state.beta * served[ue];
  }
  return alloc;
}

double n_mux(std::span<const Allocation> log) {
  if (log.empty()) throw DomainError("allocation log is empty");
  double sum = 0.0;
  for (const auto& a : log) sum += static_cast<double>(a.size());
  return sum / static_cast<double>(log.size());
}

DelayReport track_delays(std::span<const Arrival> arrivals, std::span<const ServiceEvent> log,
                         std::uint32_t n_ues) {
  DelayReport report;
  report.per_ue_delays.resize(n_ues);
  std::vector<const ServiceEvent*> by_packet(arrivals.size(), nullptr);
  for (const auto& ev : log) {
    if (ev.packet >= arrivals.size()) {
      throw InternalError("service event for unknown packet " + std::to_string(ev.packet));
    }
    if (by_packet[ev.packet]) {
      throw InternalError("packet " + std::to_string(ev.packet) + " served twice");
    }
    const auto& a = arrivals[ev.packet];
    if (ev.service_start < a.time || ev.completion < ev.service_start) {
      throw InternalError("packet " + std::to_string(ev.packet) +
                          " has service times inconsistent with its arrival");
    }
    by_packet[ev.packet] = &ev;
  }
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const auto* ev = by_packet[i];
    if (!ev) {
      ++report.backlog;
      continue;
    }
    const auto& a = arrivals[i];
    if (a.ue_id >= n_ues) throw InternalError("arrival for UE outside the population");
    report.records.push_back({a.ue_id, a.time, ev->service_start, ev->completion, ev->transmissions});
    report.per_ue_delays[a.ue_id].push_back(ev->completion - a.time);
  }
  return report;
}

std::vector<ServiceEvent> serve_fifo(std::span<const Arrival> arrivals,
                                     std::span<const double> service_times, int servers,
                                     double horizon) {
  if (servers < 1) throw DomainError("need at least one server");
  if (service_times.size() != arrivals.size()) {
    throw DomainError("one service time per arrival is required");
  }
  std::priority_queue<double, std::vector<double>, std::greater<>> free_at;
  for (int i = 0; i < servers; ++i) free_at.push(0.0);
  std::vector<ServiceEvent> log;
  log.reserve(arrivals.size());
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    const double start = std::max(arrivals[i].time, free_at.top());
    if (start >= horizon) break;
    free_at.pop();
    const double done = start + service_times[i];
    free_at.push(done);
    log.push_back({i, start, done, 1});
  }
  return log;
}

}  // namespace imteval::traffic
