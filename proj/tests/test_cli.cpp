#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run_cli(const std::string& args) {
  const std::string cmd = std::string(DETSUM_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) o.out.append(buf.data(), n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

}  // namespace

TEST(Cli, PassingRunExitsZeroWithJson) {
  const auto o = run_cli("sharpness --q 5 --i 2");
  EXPECT_EQ(o.code, 0);
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_TRUE(j.at("pass").get<bool>());
  EXPECT_EQ(j.at("experiment"), "sharpness");
  EXPECT_FALSE(j.contains("runtime_ms"));
  EXPECT_TRUE(nlohmann::json::parse(run_cli("sharpness --q 3 --timing").out).contains("runtime_ms"));
}

TEST(Cli, FailedAssertionExitsOne) {
  EXPECT_EQ(run_cli("energy-report --q 3 --trials 1 --assert-ratio 0.000001").code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("no-such-experiment").code, 2);
  EXPECT_EQ(run_cli("").code, 2);
  EXPECT_EQ(run_cli("sharpness --q 12").code, 2);
  EXPECT_EQ(run_cli("sharpness --q 5 --format yaml").code, 2);
  EXPECT_EQ(run_cli("w0 --q 3 --size abc").code, 2);
  EXPECT_EQ(run_cli("sharpness --bogus").code, 2);
}

TEST(Cli, SizingErrorExitsTwo) {
  EXPECT_EQ(run_cli("w0 --q 11 --size 14641 --trials 1").code, 2);
}

TEST(Cli, OutputIsByteIdenticalAcrossRunsAndWorkers) {
  const auto a = run_cli("mainthm-bound --q 5 --trials 4 --threads 1");
  const auto b = run_cli("mainthm-bound --q 5 --trials 4 --threads 1");
  const auto c = run_cli("mainthm-bound --q 5 --trials 4 --threads 8");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, CsvAndFileOutput) {
  const auto csv = run_cli("energy-report --q 3 --trials 1 --format csv");
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("claim,q,i,j,|E|,|F|,t-or-l,lhs,rhs,ratio,pass\n", 0), 0u);
  const std::string path = std::string(DETSUM_SCRATCH_DIR) + "/cli_text_out.txt";
  const auto o = run_cli("thm0-sharp --q 9 --k 3 --format text --out " + path);
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str().rfind("thm0-sharp [3^2:1,0,1] PASS", 0), 0u) << ss.str();
}
