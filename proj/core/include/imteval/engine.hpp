// SPDX-License-Identifier: Apache-2.0
#pragma once

// Drop-based system-level simulation: UE placement, link budgets with
// wrap-around, serving-link fading, SINR, scheduling and KPI accumulation.
//
// Per drop, every UE-TRxP pair gets a coupling loss (pathloss, shadowing,
// penetration and antenna gains toward the line of sight). UEs attach to the
// smallest coupling loss. The serving link additionally gets a full cluster
// channel whose dominant-eigenmode gain, normalized to unit conditional mean,
// scales the serving signal. Interfering links use their coupling loss.
//
// Downlink: every TRxP transmits at full power. Uplink: each TRxP schedules
// one randomly chosen attached UE on a resource; those UEs interfere with the
// other TRxPs. UE power follows open-loop fractional control with p0
// calibrated so that the mean interference over thermal meets its target.
//
// Drops are independent and run on a worker pool. Results are folded in
// drop-index order, so every output is independent of the worker count.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "imteval/geometry.hpp"
#include "imteval/link.hpp"
#include "imteval/metrics.hpp"
#include "imteval/scenario.hpp"
#include "imteval/traffic.hpp"
#include "imteval/types.hpp"

namespace imteval::engine {

/// Reserved calibration drops used to set p0.
inline constexpr int kCalibrationDrops = 10;

struct UeResult {
  std::uint32_t ue_id = 0;
  int serving = -1;  // TRxP index
  bool indoor = false;
  bool los = false;  // serving link
  double coupling_loss = 0.0;  // dB, serving link
  double fading_gain = 0.0;    // dB, serving-link combining gain averaged over time
  link::SinrSample dl;
  link::SinrSample ul;
  double ul_tx_power = 0.0;    // dBm
  double dl_throughput = 0.0;  // bit/s over the drop duration
  double ul_throughput = 0.0;
};

struct DropResult {
  std::uint64_t drop_index = 0;
  std::vector<UeResult> ues;
  std::vector<geometry::UePlacement> placements;  // geometry snapshot
  std::vector<double> iot;  // dB per TRxP, uplink
  double dl_bits = 0.0;     // received over the drop duration, all TRxPs
  double ul_bits = 0.0;
  double ul_n_mux = 0.0;    // mean distinct uplink UEs per interval per TRxP
  std::vector<traffic::PacketRecord> packets;  // Poisson traffic only

  double mean_sinr(Direction d) const;
};

struct KpiValue {
  Metric metric = Metric::MeanSinr;
  Direction direction = Direction::Any;
  double value = 0.0;
  std::string unit;
  std::optional<double> speed_kmh;
  std::string note;
};

struct RunResult {
  Environment environment = Environment::UrbanMacro_mMTC;
  Variant variant = Variant::A;
  std::string config_hash;
  std::uint64_t master_seed = 0;
  std::uint64_t drops_requested = 0;
  std::uint64_t drops_run = 0;
  metrics::ConvergenceStatus convergence = metrics::ConvergenceStatus::Continue;
  link::Calibration calibration;
  std::vector<KpiValue> kpis;
  /// Keyed by name: sinr_dl, sinr_ul, coupling_loss, se_user_dl, se_user_ul.
  std::map<std::string, metrics::BinnedCdf> cdfs;
  metrics::RunningMean dl_sinr_drop_mean;
  metrics::RunningMean ul_sinr_drop_mean;
  std::optional<metrics::CdSearchResult> density_search;
  std::vector<std::string> warnings;
  /// How the random streams of this run were derived.
  std::string stream_scheme;

  /// First KPI with this metric, direction and speed; nullptr when absent.
  const KpiValue* find(Metric m, Direction d = Direction::Any,
                       std::optional<double> speed_kmh = std::nullopt) const;
};

struct RunOptions {
  /// 0 uses the hardware concurrency.
  int workers = 1;
  /// Overrides config.drops when set.
  std::optional<std::uint64_t> drops;
  /// Called for every folded drop, in drop-index order.
  std::function<void(const DropResult&)> on_drop;
};

class Simulator {
 public:
  /// Validates the config, builds the layout and calibrates p0.
  explicit Simulator(EvaluationConfig config);
  Simulator(EvaluationConfig config, geometry::NetworkLayout layout);
  ~Simulator();
  Simulator(Simulator&&) noexcept;
  Simulator& operator=(Simulator&&) noexcept;

  const EvaluationConfig& config() const noexcept;
  const geometry::NetworkLayout& layout() const noexcept;
  const link::Calibration& calibration() const noexcept;

  /// Fully determined by (config, layout, drop_index).
  DropResult run_drop(std::uint64_t drop_index) const;
  RunResult run(const RunOptions& options = {}) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DropResult run_drop(const EvaluationConfig& config, const geometry::NetworkLayout& layout,
                    std::uint64_t drop_index);
RunResult run(const EvaluationConfig& config, const RunOptions& options = {});

/// Uplink bandwidth shared by the scheduled UEs of one TRxP, and the number of
/// scheduling resources it is split into.
double uplink_bandwidth(const EvaluationConfig& config) noexcept;
int uplink_resources(const EvaluationConfig& config) noexcept;

/// Message arrival rate times message size, in bit/s per device.
double offered_bit_rate(const traffic::TrafficModelSpec& spec) noexcept;

}  // namespace imteval::engine
