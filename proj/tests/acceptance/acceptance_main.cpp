// SPDX-License-Identifier: Apache-2.0
// Runs the acceptance criteria and prints one PASS/FAIL line each. Exits
// nonzero when a gating criterion fails; the last criterion is advisory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "imteval/channel.hpp"
#include "imteval/engine.hpp"
#include "imteval/geometry.hpp"
#include "imteval/link.hpp"
#include "imteval/metrics.hpp"
#include "imteval/profiles.hpp"
#include "imteval/random.hpp"
#include "imteval/report.hpp"
#include "imteval/requirements.hpp"
#include "imteval/scenario.hpp"

namespace {

using namespace imteval;
namespace fs = std::filesystem;

const std::string kFixtures = IMTEVAL_FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

EvaluationConfig mmtc_a() { return preset(Environment::UrbanMacro_mMTC, Variant::A); }

// Formula oracles.
Outcome formulas() {
  Outcome o;
  const double se = metrics::avg_spectral_efficiency({1, {5e6, 15e6}, 1.0, 10e6, 1});
  o.check(se == 2.0, "average SE " + fmt(se) + " != 2.0");
  metrics::CdInputs cd;
  cd.n_mux = 10.0;
  cd.bandwidth = 180e3;
  cd.user_bandwidth = {1.8e3};
  cd.isd = 500.0;
  const double fb = metrics::connection_density_fullbuffer(cd);
  o.check(std::abs(fb - 13856.4) <= 0.1, "full-buffer density " + fmt(fb));
  const double bi = metrics::bandwidth_per_user(10.0, 1000.0, 100.0);
  o.check(bi == 1.0, "B_i " + fmt(bi));
  o.note("SE " + fmt(se) + ", CD " + fmt(fb) + ", B_i " + fmt(bi));
  return o;
}

// Layout counts, sector area and wrap-around distance.
Outcome layout() {
  Outcome o;
  const auto cfg = mmtc_a();
  const auto net = geometry::build_layout(cfg);
  o.check(net.trxp_count() == 57, "TRxP count " + std::to_string(net.trxp_count()));

  // The wrap translations span the lattice of 19-site clusters; one lattice
  // cell holds all 57 sectors.
  double cell = std::numeric_limits<double>::infinity();
  for (const auto& a : net.wrap_translations) {
    for (const auto& b : net.wrap_translations) {
      const double det = std::abs(a.x * b.y - a.y * b.x);
      if (det > 1.0) cell = std::min(cell, det);
    }
  }
  const double expected = cfg.isd * cfg.isd * std::sqrt(3.0) / 6.0;
  const double from_lattice = cell / static_cast<double>(net.trxp_count());
  const double rel_lattice = std::abs(from_lattice / expected - 1.0);
  const double rel_fn = std::abs(geometry::sector_area(cfg.isd) / expected - 1.0);
  o.check(rel_lattice <= 1e-6, "lattice area per TRxP off by " + fmt(rel_lattice));
  o.check(rel_fn <= 1e-6, "sector_area off by " + fmt(rel_fn));

  auto rng = derive_stream(2024, 0, 0);
  int bad = 0;
  const double span = 3.0 * cfg.isd;
  for (int i = 0; i < 10000; ++i) {
    const geometry::Vec2 a{rng.uniform(-span, span), rng.uniform(-span, span)};
    const geometry::Vec2 b{rng.uniform(-span, span), rng.uniform(-span, span)};
    const double ab = geometry::wrap_distance(net, a, b).distance;
    const double ba = geometry::wrap_distance(net, b, a).distance;
    if (std::abs(ab - ba) > 1e-9 * std::max(1.0, ab) || ab > (a - b).norm() + 1e-9) ++bad;
  }
  o.check(bad == 0, std::to_string(bad) + " wrap pairs asymmetric or longer than direct");
  o.note("57 TRxPs, area rel err " + fmt(rel_lattice) + ", 1e4 wrap pairs");
  return o;
}

// Cluster powers, coefficient power, delay spread and LOS frequency.
Outcome channel_statistics() {
  Outcome o;
  const auto& prof = channel::ProfileLibrary::builtin().get("UMa_A");

  auto rng = derive_stream(3001, 0, 0);
  double worst_sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto cond = i % 2 ? channel::Condition::LOS : channel::Condition::NLOS;
    const auto& c = prof.condition(cond);
    const auto lsp = channel::gen_lsp(c, cond, rng);
    const auto cs = channel::gen_clusters(lsp, c, c.n_clusters, 1, {}, rng);
    worst_sum = std::max(
        worst_sum, std::abs(std::accumulate(cs.powers.begin(), cs.powers.end(), 0.0) - 1.0));
  }
  o.check(worst_sum <= 1e-12, "cluster power sum off by " + fmt(worst_sum));

  const auto tx = channel::PortArray::single_isotropic();
  const auto rx = channel::PortArray::single_isotropic();
  double power = 0.0;
  const int n_real = 10000;
  for (int i = 0; i < n_real; ++i) {
    const auto cond = i % 2 ? channel::Condition::LOS : channel::Condition::NLOS;
    const auto& c = prof.condition(cond);
    channel::ChannelRealization real;
    real.lsp = channel::gen_lsp(c, cond, rng);
    real.clusters = channel::gen_clusters(real.lsp, c, c.n_clusters, 20, {}, rng);
    real.carrier = 700e6;
    const channel::CoefficientGenerator g(real, tx, rx);
    power += std::norm(g.at(0.0)(0, 0));
  }
  power /= n_real;
  o.check(std::abs(power - 1.0) <= 0.02, "mean coefficient power " + fmt(power));

  double worst_ds = 0.0;
  for (double ds : {100e-9, 363e-9, 1e-6}) {
    channel::LargeScaleParams lsp;
    lsp.condition = channel::Condition::NLOS;
    lsp.ds = ds;
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const auto cs = channel::gen_clusters(lsp, prof.nlos, prof.nlos.n_clusters, 1, {}, rng);
      sum += channel::rms_delay_spread(cs.delays, cs.powers);
    }
    worst_ds = std::max(worst_ds, std::abs(sum / n / ds - 1.0));
  }
  o.check(worst_ds <= 0.10, "delay spread off by " + fmt(worst_ds));

  double worst_sigma = 0.0;
  for (double d : {30.0, 100.0, 300.0, 1000.0}) {
    const int n = 100000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += channel::assign_los(prof, d, rng).los ? 1 : 0;
    const double q = channel::los_probability(prof.los_model, d);
    const double sigma = std::sqrt(q * (1.0 - q) / n);
    if (sigma > 0.0) worst_sigma = std::max(worst_sigma, std::abs(hits / double(n) - q) / sigma);
  }
  o.check(worst_sigma <= 3.0, "LOS frequency " + fmt(worst_sigma) + " sigma off");
  o.note("power sum err " + fmt(worst_sum) + ", mean |h|^2 " + fmt(power) + ", DS err " +
         fmt(worst_ds) + ", LOS " + fmt(worst_sigma) + " sigma");
  return o;
}

// SINR linear consistency, interference-free SNR and IoT.
Outcome sinr_pipeline() {
  Outcome o;
  auto cfg = mmtc_a();
  cfg.drops = 100;
  const engine::Simulator sim(cfg);
  std::size_t samples = 0, broken = 0;
  engine::RunOptions opts;
  opts.on_drop = [&](const engine::DropResult& d) {
    for (const auto& ue : d.ues) {
      samples += 2;
      if (!link::linearly_consistent(ue.dl)) ++broken;
      if (!link::linearly_consistent(ue.ul)) ++broken;
    }
  };
  const auto r = sim.run(opts);
  o.check(broken == 0, std::to_string(broken) + " inconsistent samples");

  const engine::Simulator single(cfg, geometry::single_trxp_layout(cfg));
  double worst = 0.0;
  bool clean = true;
  for (std::uint64_t d = 0; d < 5; ++d) {
    for (const auto& ue : single.run_drop(d).ues) {
      for (const auto* s : {&ue.dl, &ue.ul}) {
        clean = clean && s->interference == -std::numeric_limits<double>::infinity();
        worst = std::max(worst, std::abs(s->sinr - (s->signal - s->noise)));
      }
    }
  }
  o.check(clean && worst <= 1e-9, "single-site SINR differs from SNR by " + fmt(worst));

  const auto* iot = r.find(Metric::InterferenceOverThermal, Direction::Uplink);
  o.check(iot != nullptr && iot->value <= 10.0,
          "mean IoT " + (iot ? fmt(iot->value) : std::string("missing")));
  o.note(std::to_string(samples) + " samples, SINR-SNR " + fmt(worst) + " dB, IoT " +
         (iot ? fmt(iot->value) : "-") + " dB");
  return o;
}

struct LongRun {
  engine::RunResult result;
  double se_at_100 = 0.0;
  double se_at_10000 = 0.0;
};

// Standard error of the running mean UL SINR, and the constant-stream monitor.
Outcome convergence(LongRun& run) {
  Outcome o;
  auto cfg = mmtc_a();
  metrics::RunningMean mean;
  engine::RunOptions opts{0, 10000, [&](const engine::DropResult& d) {
                            mean.push(d.mean_sinr(Direction::Uplink));
                            if (mean.count() == 100) run.se_at_100 = mean.standard_error();
                          }};
  run.result = engine::run(cfg, opts);
  run.se_at_10000 = mean.standard_error();
  const double ratio = run.se_at_100 / run.se_at_10000;
  o.check(ratio >= 7.0 && ratio <= 13.0, "SE shrink ratio " + fmt(ratio));

  for (int k : {1, 10, 100}) {
    metrics::ConvergenceMonitor m(k, 1e-3, 100000);
    int pushes = 0;
    auto status = metrics::ConvergenceStatus::Continue;
    while (status == metrics::ConvergenceStatus::Continue) {
      status = m.push(4.2);
      ++pushes;
    }
    o.check(status == metrics::ConvergenceStatus::Converged && pushes == k + 1,
            "monitor K=" + std::to_string(k) + " stopped after " + std::to_string(pushes));
  }
  o.note("SE " + fmt(run.se_at_100) + " -> " + fmt(run.se_at_10000) + ", ratio " + fmt(ratio));
  return o;
}

// Reliability with HARQ.
Outcome harq() {
  Outcome o;
  link::BlerModel bler;
  bler.bler_floor = 0.01;
  const link::HarqConfig two{2, 0.5e-3, 0.0};
  const auto r = metrics::reliability_at(100.0, bler, two, 1e-3);
  o.check(std::abs(r.success - 0.9999) <= 1e-12, "two attempts at 1% give " + fmt(r.success));
  bler.bler_floor = 0.0;
  const auto perfect =
      metrics::reliability_at(std::numeric_limits<double>::infinity(), bler, two, 1e-3);
  o.check(perfect.success == 1.0, "zero BLER gives " + fmt(perfect.success));
  o.check(metrics::meets(0.99999, 0.99999), "boundary value 99.999% rejected");
  o.check(!metrics::meets(0.99999 - 1e-9, 0.99999), "value below 99.999% accepted");
  o.note("2 attempts " + fmt(r.success) + ", zero BLER " + fmt(perfect.success));
  return o;
}

// Compliance of reported tables.
Outcome compliance() {
  Outcome o;
  const auto& reqs = RequirementSet::builtin();
  auto status_of = [&](const report::ExternalResultTable& t, const std::string& evaluator,
                       const std::string& raw) {
    const auto rep = report::check_compliance(t, reqs);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.rows[i].evaluator == evaluator && t.rows[i].raw_value == raw) return rep.rows[i].status;
    }
    return report::Status::NotEvaluated;
  };
  const auto se = report::ingest_table(kFixtures + "/reported/se_indoor_12trxp_4ghz_a.csv");
  o.check(status_of(se, "Univ of Toronto", "9.812") == report::Status::Pass, "9.812 >= 9");
  o.check(status_of(se, "Univ of Toronto", "0.359") == report::Status::Pass, "0.359 >= 0.3");
  const auto cd = report::ingest_table(kFixtures + "/reported/cd_1732m_16rx_second.csv");
  o.check(status_of(cd, "Univ of Toronto", "2,314,259") == report::Status::Pass,
          "2,314,259 >= 1e6");

  // Every mobility threshold has a passing row.
  const auto mobility = RequirementSet::load(kFixtures + "/requirements/mobility.csv");
  const std::vector<std::pair<std::string, std::string>> mob{
      {"mobility_indoor_4ghz_12trxp_a", "1.63"},
      {"mobility_dense_urban_4ghz_a", "2.03"},
      {"mobility_rural_700mhz_120kmh_a", "2.13"},
      {"mobility_700mhz_500kmh_a", "1.28"}};
  std::size_t thresholds_hit = 0;
  std::vector<report::ExternalResultTable> tables{se, cd};
  for (const auto& [name, raw] : mob) {
    const auto t = report::ingest_table(kFixtures + "/reported/" + name + ".csv");
    const auto rep = report::check_compliance(t, mobility);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.rows[i].evaluator == "Univ of Toronto" && t.rows[i].raw_value == raw) {
        o.check(rep.rows[i].status == report::Status::Pass, name + " " + raw);
        ++thresholds_hit;
      }
    }
    tables.push_back(t);
  }
  o.check(thresholds_hit == mobility.size(),
          "mobility thresholds covered " + std::to_string(thresholds_hit) + " of " +
              std::to_string(mobility.size()));

  // Any passing value edited below its threshold fails.
  std::size_t flipped = 0, edited = 0;
  for (const auto& t : tables) {
    const auto before = report::check_compliance(t, reqs);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (before.rows[i].status != report::Status::Pass) continue;
      auto copy = t;
      copy.rows[i].value = *before.rows[i].requirement * (1.0 - 1e-6);
      ++edited;
      if (report::check_compliance(copy, reqs).rows[i].status == report::Status::Fail) ++flipped;
    }
  }
  o.check(edited > 0 && flipped == edited,
          std::to_string(flipped) + " of " + std::to_string(edited) + " edits flipped");
  o.note(std::to_string(thresholds_hit) + " mobility thresholds, " + std::to_string(flipped) +
         " edited rows flipped");
  return o;
}

std::vector<std::pair<std::string, std::string>> bundle(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    files.emplace_back(e.path().filename().string(), ss.str());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// Same (config, seed) on different worker counts.
Outcome reproducibility() {
  Outcome o;
  auto cfg = mmtc_a();
  cfg.drops = 100;
  const auto root = fs::temp_directory_path() / "imteval_acceptance_repro";
  fs::remove_all(root);
  std::vector<std::vector<std::pair<std::string, std::string>>> bundles;
  for (int workers : {1, 4}) {
    const auto r = engine::run(cfg, {workers, std::nullopt, {}});
    const auto rep = report::check_compliance(r, RequirementSet::builtin());
    const auto dir = root / ("w" + std::to_string(workers));
    report::emit(r, rep, dir.string());
    bundles.push_back(bundle(dir));
  }
  fs::remove_all(root);
  o.check(!bundles[0].empty() && bundles[0] == bundles[1], "bundles differ between 1 and 4 workers");
  o.note(std::to_string(bundles[0].size()) + " files byte-identical for 1 and 4 workers");
  return o;
}

// Non-full-buffer connection density of the long run.
Outcome density_target(const LongRun& run) {
  Outcome o;
  const auto* cd = run.result.find(Metric::ConnectionDensity, Direction::Uplink);
  o.check(cd != nullptr, "no connection density KPI");
  if (!cd) return o;
  o.check(cd->value >= 1e6 && cd->value <= 1e7, "density " + fmt(cd->value) + " outside 1e6..1e7");
  const auto& link = mmtc_a().link;
  o.note("density " + fmt(cd->value) + " /km^2 over " + std::to_string(run.result.drops_run) +
         " drops; UL map alpha " + fmt(link.uplink.efficiency) + ", max SE " +
         fmt(link.uplink.se_max) + ", min SINR " + fmt(link.uplink.sinr_min) +
         " dB, SINR backoff " + fmt(link.sinr_backoff) + " dB");
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double limit_s;  // 0 for no limit
  bool gating;
  std::function<Outcome()> body;
};

}  // namespace

int main() {
  LongRun long_run;
  const std::vector<Criterion> criteria{
      {1, "formula oracles", 1.0, true, formulas},
      {2, "geometry", 5.0, true, layout},
      {3, "channel statistics", 120.0, true, channel_statistics},
      {4, "SINR pipeline", 300.0, true, sinr_pipeline},
      {5, "convergence", 0.0, true, [&] { return convergence(long_run); }},
      {6, "HARQ reliability", 0.0, true, harq},
      {7, "compliance on reported tables", 1.0, true, compliance},
      {8, "reproducibility across workers", 300.0, true, reproducibility},
      {9, "connection density target (advisory)", 0.0, false,
       [&] { return density_target(long_run); }},
  };
  bool gating_failed = false;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.limit_s > 0.0) o.check(secs < c.limit_s, "runtime over " + fmt(c.limit_s) + " s");
    if (!o.pass && c.gating) gating_failed = true;
    std::printf("%s %d %s (%.2f s)%s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                c.gating ? "" : " [non-gating]", o.detail.c_str());
    std::fflush(stdout);
  }
  return gating_failed ? 1 : 0;
}
