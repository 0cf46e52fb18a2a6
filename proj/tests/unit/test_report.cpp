// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "imteval/engine.hpp"
#include "imteval/error.hpp"
#include "imteval/report.hpp"
#include "imteval/requirements.hpp"
#include "imteval/scenario.hpp"

namespace imteval::report {
namespace {

const std::string kFixtures = IMTEVAL_FIXTURE_DIR;

ExternalResultTable fixture(const std::string& name) {
  return ingest_table(kFixtures + "/reported/" + name + ".csv");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Report, ParsesReportedValueFormats) {
  EXPECT_EQ(parse_reported_value("2,314,259"), 2314259.0);
  EXPECT_NEAR(*parse_reported_value("99.9999%"), 0.999999, 1e-15);
  EXPECT_NEAR(*parse_reported_value("152.482 Mbit/s"), 152.482e6, 1e-6);
  EXPECT_NEAR(*parse_reported_value("9.812"), 9.812, 1e-15);
  EXPECT_FALSE(parse_reported_value("> 0.5").has_value());
  EXPECT_FALSE(parse_reported_value(">").has_value());
  EXPECT_FALSE(parse_reported_value("n/a").has_value());
  EXPECT_FALSE(parse_reported_value("52.11 62.9103 Mbit/s").has_value());
}

TEST(Report, MalformedTableNamesTheLine) {
  const std::string text = std::string(kExternalHeader) +
                           "\nt,E,IndoorHotspot_eMBB,NR,a,n,,downlink,avg_SE,,1.0"
                           "\nt,E,Nowhere,NR,a,n,,downlink,avg_SE,,1.0\n";
  try {
    parse_table(text, "bad");
    ADD_FAILURE();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_table("table,evaluator\n"), SchemaError);
  EXPECT_THROW(ingest_table(kFixtures + "/reported/missing.csv"), IoError);
}

TEST(Report, IngestsQuotedFields) {
  const auto t = fixture("se_indoor_12trxp_4ghz_a");
  ASSERT_EQ(t.rows.size(), 16u);
  EXPECT_EQ(t.rows[0].antenna,
            "gNB: (M,N,P,Mg,Ng; Mp,Np) = (4,4,2,1,1,4,4); 32x4 MU-MIMO Type II Codebook");
  EXPECT_EQ(t.rows[0].line, 2u);
  EXPECT_EQ(t.by_evaluator("Univ of Toronto").size(), 6u);
}

TEST(Report, TorontoSpectralEfficiencyRowsPass) {
  const auto t = fixture("se_indoor_12trxp_4ghz_a");
  const auto rep = check_compliance(t, RequirementSet::builtin());
  ASSERT_EQ(rep.rows.size(), t.rows.size());
  bool saw_avg = false, saw_pct5 = false;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].evaluator != "Univ of Toronto") continue;
    EXPECT_EQ(rep.rows[i].status, Status::Pass) << t.rows[i].raw_value;
    if (t.rows[i].raw_value == "9.812") saw_avg = true;
    if (t.rows[i].raw_value == "0.359") saw_pct5 = true;
  }
  EXPECT_TRUE(saw_avg && saw_pct5);
  EXPECT_EQ(exit_code(rep), 0);
}

TEST(Report, SuspectRowsAreNotEvaluated) {
  const auto t = fixture("reliability_urllc");
  const auto rep = check_compliance(t, RequirementSet::builtin());
  std::size_t suspect = 0;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].raw_value == ">" || t.rows[i].raw_value == "9.9992%") {
      EXPECT_TRUE(t.rows[i].suspect);
      EXPECT_EQ(rep.rows[i].status, Status::NotEvaluated);
      ++suspect;
    }
  }
  EXPECT_EQ(suspect, 7u);
}

TEST(Report, ConnectionDensityRowPasses) {
  const auto t = fixture("cd_1732m_16rx_second");
  const auto rep = check_compliance(t, RequirementSet::builtin());
  bool found = false;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (t.rows[i].raw_value == "2,314,259") {
      found = true;
      EXPECT_EQ(t.rows[i].value, 2314259.0);
      EXPECT_EQ(rep.rows[i].status, Status::Pass);
    }
  }
  EXPECT_TRUE(found);
}

// Every Toronto mobility row passes apart from the TDD NLOS indoor 1.38.
TEST(Report, TorontoMobilityRows) {
  const auto& reqs = RequirementSet::builtin();
  for (const char* name : {"mobility_indoor_4ghz_12trxp_a", "mobility_dense_urban_4ghz_a",
                           "mobility_rural_700mhz_120kmh_a", "mobility_700mhz_500kmh_a"}) {
    const auto t = fixture(name);
    const auto rep = check_compliance(t, reqs);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (t.rows[i].evaluator != "Univ of Toronto") continue;
      const auto expected = t.rows[i].raw_value == "1.38" ? Status::Fail : Status::Pass;
      EXPECT_EQ(rep.rows[i].status, expected) << name << " line " << t.rows[i].line;
    }
  }
}

TEST(Report, EditingBelowThresholdFlipsToFail) {
  const auto& reqs = RequirementSet::builtin();
  for (const char* name : {"se_indoor_12trxp_4ghz_a", "cd_1732m_16rx_second",
                           "mobility_rural_700mhz_120kmh_a"}) {
    auto t = fixture(name);
    const auto before = check_compliance(t, reqs);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (before.rows[i].status != Status::Pass) continue;
      auto edited = t;
      edited.rows[i].value = *before.rows[i].requirement * (1.0 - 1e-6);
      EXPECT_EQ(check_compliance(edited, reqs).rows[i].status, Status::Fail) << name << i;
      edited.rows[i].value = *before.rows[i].requirement;
      EXPECT_EQ(check_compliance(edited, reqs).rows[i].status, Status::Pass) << name << i;
    }
  }
}

TEST(Report, ExitCodeFollowsFailures) {
  ComplianceReport rep;
  EXPECT_EQ(exit_code(rep), 0);
  rep.rows.push_back({});
  EXPECT_EQ(exit_code(rep), 0);
  rep.rows.back().status = Status::Pass;
  EXPECT_EQ(exit_code(rep), 0);
  rep.rows.push_back({});
  rep.rows.back().status = Status::Fail;
  EXPECT_EQ(exit_code(rep), 1);
  EXPECT_EQ(to_string(Status::Fail), "fail");
}

TEST(Report, CdfCsvIsMonotone) {
  metrics::BinnedCdf cdf;
  for (int i = 0; i < 1000; ++i) cdf.add(std::sin(i * 0.37) * 20.0);
  std::istringstream in(cdf_csv(cdf));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "percentile,value");
  double prev_p = -1.0, prev_v = -1e300;
  int rows = 0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double p = std::stod(line.substr(0, comma));
    const double v = std::stod(line.substr(comma + 1));
    EXPECT_GT(p, prev_p);
    EXPECT_GE(v, prev_v);
    prev_p = p;
    prev_v = v;
    ++rows;
  }
  EXPECT_EQ(rows, 201);
}

TEST(Report, EmitWritesTheBundle) {
  auto cfg = preset(Environment::UrbanMacro_mMTC, Variant::A);
  cfg.ues_per_trxp = 2;
  cfg.scheduling.queue_messages = 2000;
  const auto r = engine::run(cfg, {2, 2, {}});
  const auto rep = check_compliance(r, RequirementSet::builtin());
  EXPECT_GT(rep.count(Status::Pass) + rep.count(Status::Fail), 0u);
  const auto dir = std::filesystem::temp_directory_path() / "imteval_emit_test";
  std::filesystem::remove_all(dir);
  const auto files = emit(r, rep, dir.string());
  for (const char* f : {"manifest.json", "kpi.json", "compliance.csv", "cdf_sinr_dl.csv",
                        "cdf_sinr_ul.csv", "cdf_coupling_loss.csv"}) {
    EXPECT_NE(std::find(files.begin(), files.end(), f), files.end()) << f;
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  EXPECT_EQ(slurp(dir / "compliance.csv"), rep.to_csv());
  EXPECT_NE(slurp(dir / "manifest.json").find(r.config_hash), std::string::npos);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace imteval::report
