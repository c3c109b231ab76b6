#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "detsum/experiments.hpp"
#include "detsum/report.hpp"

using namespace detsum;

namespace {

Report sample_report() {
  Report r;
  r.experiment = "demo";
  r.field = "5^1:0,1";
  r.params = {{"q", 5}, {"i", "2"}, {"seed", 1}};
  r.check("first-claim", 3, 4, true, "ok detail");
  r.check("second-claim", num(1.5), num(1.0), false, "broken");
  r.check("cyclotomic-value", to_json(CycInt::zeta_pow(5, 2)), 0, true);
  r.add_row({"ratio-claim", 5, "2", "3", 10, 20, "t=1", 1.25, 2.5, 0.5, true});
  r.add_row({"ratio-claim", 5, "2", "3", 10, 20, "t=2", 0, 0, std::numeric_limits<double>::infinity(), true});
  r.flags.push_back("a note");
  r.runtime_ms = 12.5;
  return r;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Report, PassIsConjunctionOfAssertions) {
  auto r = sample_report();
  EXPECT_FALSE(r.pass());
  EXPECT_EQ(r.failed_claims(), std::vector<std::string>{"second-claim"});
  r.assertions[1].pass = true;
  EXPECT_TRUE(r.pass());
  r.table[0].pass = false;
  EXPECT_TRUE(r.pass());
}

TEST(Report, JsonRoundTrip) {
  const auto r = sample_report();
  const auto j = report_to_json(r);
  EXPECT_FALSE(j.contains("runtime_ms"));
  EXPECT_TRUE(report_to_json(r, true).contains("runtime_ms"));
  const auto back = report_from_json(json::parse(j.dump()));
  EXPECT_EQ(back, r);
  EXPECT_EQ(report_to_json(back).dump(), j.dump());
  EXPECT_EQ(cyc_from_json(to_json(CycInt::zeta_pow(5, 2))), CycInt::zeta_pow(5, 2));
}

TEST(Report, JsonRejectsInconsistentPass) {
  auto j = report_to_json(sample_report());
  j["pass"] = true;
  EXPECT_THROW(report_from_json(j), std::invalid_argument);
}

TEST(Report, FloatsAreRoundedToTwelveDigits) {
  EXPECT_EQ(round12(1.0 / 3.0), 0.333333333333);
  EXPECT_EQ(num(2.0 / 3.0).dump(), "0.666666666667");
}

TEST(Report, CsvHasOneRowPerTableEntry) {
  const auto csv = render(sample_report(), Format::csv);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "claim,q,i,j,|E|,|F|,t-or-l,lhs,rhs,ratio,pass");
  std::getline(in, line);
  EXPECT_EQ(line, "ratio-claim,5,2,3,10,20,t=1,1.25,2.5,0.5,true");
  int rows = 1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
}

TEST(Report, TextListsFailuresFirst) {
  const auto text = render(sample_report(), Format::text);
  const auto fail = text.find("FAIL second-claim");
  const auto ok = text.find("ok   first-claim");
  ASSERT_NE(fail, std::string::npos) << text;
  ASSERT_NE(ok, std::string::npos) << text;
  EXPECT_LT(fail, ok);
  EXPECT_NE(text.find("note: a note"), std::string::npos);
}

TEST(Report, EmitReportsPathOnFailure) {
  try {
    emit(sample_report(), Format::json, "/nonexistent-dir/out.json");
    FAIL() << "write to a missing directory succeeded";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.json"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_format("yaml"), std::invalid_argument);
}

TEST(Report, AbsorbAppends) {
  auto a = sample_report();
  const auto b = sample_report();
  a.absorb(b);
  EXPECT_EQ(a.assertions.size(), 6u);
  EXPECT_EQ(a.table.size(), 4u);
  EXPECT_EQ(a.flags.size(), 2u);
}

TEST(Experiments, GoldenSharpnessReport) {
  Params p;
  p.q = {"5"};
  p.i = "2";
  const auto text = render(run("sharpness", p), Format::json);
  EXPECT_EQ(text, read_file(std::string(DETSUM_GOLDEN_DIR) + "/sharpness_q5_i2.json"));
}

TEST(Experiments, NamesAndErrors) {
  const auto& names = experiment_names();
  for (const char* n : {"identities", "main1", "mainthm-bound", "sharpness", "alexset", "prop71", "w0", "bigcor",
                        "energy-report", "thm0-growth", "thm0-sharp", "auditors", "spectral-xcheck", "run-all"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
  EXPECT_THROW(run("no-such-experiment", {}), std::invalid_argument);
  Params bad;
  bad.q = {"12"};
  EXPECT_THROW(run("sharpness", bad), std::invalid_argument);
  Params square;
  square.q = {"5"};
  square.i = "1";
  EXPECT_THROW(run("sharpness", square), std::invalid_argument);
}

TEST(Experiments, DeterministicAcrossRunsAndWorkers) {
  for (const char* name : {"mainthm-bound", "energy-report", "spectral-xcheck", "w0"}) {
    Params p;
    p.q = {"3", "5"};
    p.trials = 3;
    p.threads = 1;
    const auto first = report_to_json(run(name, p)).dump();
    EXPECT_EQ(report_to_json(run(name, p)).dump(), first) << name;
    p.threads = 4;
    EXPECT_EQ(report_to_json(run(name, p)).dump(), first) << name;
  }
}

TEST(RatioPolicy, KindsAndFlags) {
  EXPECT_EQ(ratio_kind("energy-upper"), RatioKind::upper);
  EXPECT_EQ(ratio_kind("experiment/sumset-lower-3"), RatioKind::lower);
  EXPECT_EQ(ratio_kind("units-threshold"), RatioKind::threshold);
  EXPECT_EQ(ratio_kind("deviation-bound"), RatioKind::none);

  Report r;
  r.add_row({"max-N", 3, "1", "1", 5, 5, "", 1, 1, 1.0, true});
  r.add_row({"max-N", 5, "1", "1", 5, 5, "", 9, 1, 9.0, true});
  apply_ratio_policy(r, std::nullopt);
  EXPECT_TRUE(r.pass());
  bool growth = false;
  for (const auto& f : r.flags) growth = growth || f.rfind("ratio growth max-N", 0) == 0;
  EXPECT_TRUE(growth);

  Report limited;
  limited.add_row({"max-N", 3, "1", "1", 5, 5, "", 1, 1, 2.0, true});
  apply_ratio_policy(limited, 1.5);
  EXPECT_FALSE(limited.pass());
  Report lower;
  lower.add_row({"sumset-lower-2", 3, "1", "1", 5, 5, "", 1, 1, 4.0, true});
  apply_ratio_policy(lower, 0.5);
  EXPECT_TRUE(lower.pass());
}
