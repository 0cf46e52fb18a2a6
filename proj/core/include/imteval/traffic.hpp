// SPDX-License-Identifier: Apache-2.0
#pragma once

// Traffic generation, proportional-fair scheduling, FIFO queueing and delay
// accounting.

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "imteval/random.hpp"

namespace imteval::traffic {

enum class TrafficKind { FullBuffer, PoissonMessaging };

struct TrafficModelSpec {
  TrafficKind kind = TrafficKind::FullBuffer;
  double pdu_size = 32.0;  // bytes
  double rate = 0.0;       // messages per second per device

  /// Throws ConfigInvalid naming `prefix`.<field>.
  void validate(std::string_view prefix) const;
  friend bool operator==(const TrafficModelSpec&, const TrafficModelSpec&) = default;
};

struct Arrival {
  std::uint32_t ue_id;
  double time;  // s
};

struct ArrivalList {
  /// Full-buffer sentinel: every UE always has data.
  bool always_backlogged = false;
  std::vector<Arrival> arrivals;  // ordered by time, then ue_id
};

/// Independent Poisson processes, one per UE, on [0, horizon). Throws
/// DomainError when horizon <= 0.
ArrivalList gen_arrivals(const TrafficModelSpec& spec, std::uint32_t n_ues, double horizon,
                         RngStream& rng);

struct SchedulerState {
  double beta = 0.01;            // averaging constant per interval
  std::vector<double> average;   // bit/s per UE; 0 until first service
  std::vector<std::uint64_t> resources_granted;

  explicit SchedulerState(std::size_t n_ues = 0, double beta_ = 0.01)
      : beta(beta_), average(n_ues, 0.0), resources_granted(n_ues, 0) {}
};

/// (ue_id, resource count) pairs, in grant order.
using Allocation = std::vector<std::pair<std::uint32_t, int>>;

/// Grants `resources` units for one interval. Backlogged UEs with a positive
/// rate are ranked by rate/average (an unserved UE ranks first), ties by
/// ue_id, and resources are dealt round-robin down that ranking. Averages of
/// all UEs in `rates` are then updated with the throughput they received.
Allocation schedule_pf(std::span<const std::uint32_t> backlogged, std::span<const double> rates,
                       SchedulerState& state, int resources);

/// Average number of distinct UEs holding resources per interval. Throws
/// DomainError on an empty log.
double n_mux(std::span<const Allocation> log);

struct ServiceEvent {
  std::size_t packet;  // index into the arrival list
  double service_start;
  double completion;
  int transmissions = 1;
};

struct PacketRecord {
  std::uint32_t ue_id;
  double arrival_time;
  double service_start;
  double completion_time;
  int transmissions_used;

  double delay() const noexcept { return completion_time - arrival_time; }
};

struct DelayReport {
  std::vector<PacketRecord> records;  // in arrival order
  std::vector<std::vector<double>> per_ue_delays;
  std::size_t backlog = 0;  // arrivals without a service event
};

/// Joins arrivals with the service log. Throws InternalError when an event
/// starts before its arrival, finishes before it starts, or is duplicated.
DelayReport track_delays(std::span<const Arrival> arrivals, std::span<const ServiceEvent> log,
                         std::uint32_t n_ues);

/// First-come first-served service on `servers` identical servers. Packets
/// whose start would be at or after `horizon` stay in the backlog.
std::vector<ServiceEvent> serve_fifo(std::span<const Arrival> arrivals,
                                     std::span<const double> service_times, int servers,
                                     double horizon);

}  // namespace imteval::traffic
