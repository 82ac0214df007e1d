#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gateminer/cli.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using gateminer::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden(const std::string& name) { return (fs::path(GATEMINER_GOLDEN_DIR) / name).string(); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("gateminer_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

void expect_error_line(const Result& r, int code, const std::string& kind) {
  EXPECT_EQ(r.code, code) << r.err;
  EXPECT_EQ(r.err.rfind("error: code=" + std::to_string(code) + " kind=" + kind + " msg=", 0), 0u) << r.err;
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1) << r.err;
}

}  // namespace

TEST(Cli, MinimizeNandPlain) {
  auto r = cli({"minimize", "--n", "2", "--bits", "1110", "--format", "plain"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "A' + B'\n");
  EXPECT_EQ(cli({"minimize", "--n", "2", "--bits", "1110"}).out, "A' + B'\n");
}

TEST(Cli, MinimizeTexAndJson) {
  EXPECT_EQ(cli({"minimize", "--n", "2", "--bits", "0110", "--format", "tex"}).out,
            "(A \\cdot \\overline{B}) + (B \\cdot \\overline{A})\n");
  auto r = cli({"minimize", "--n", "2", "--bits", "1000", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["n_inputs"], 2);
  EXPECT_EQ(j["terms"].size(), 1u);
}

TEST_F(CliTest, MinimizeFromTableFile) {
  std::ofstream(path("t.json")) << R"({"n_inputs":2,"bits":"0111"})";
  EXPECT_EQ(cli({"minimize", "--table", path("t.json")}).out, "A + B\n");
  std::ofstream(path("bad.json")) << R"({"n_inputs":2})";
  expect_error_line(cli({"minimize", "--table", path("bad.json")}), 4, "bad_table");
}

TEST(Cli, BadBitsIsMalformedInput) {
  expect_error_line(cli({"minimize", "--n", "2", "--bits", "11x0"}), 4, "bad_character");
  expect_error_line(cli({"minimize", "--n", "2", "--bits", "110"}), 4, "length_mismatch");
}

TEST(Cli, UsageErrors) {
  expect_error_line(cli({"frobnicate"}), 2, "unknown_subcommand");
  expect_error_line(cli({}), 2, "usage");
  expect_error_line(cli({"minimize", "--bogus"}), 2, "usage");
  expect_error_line(cli({"gen", "--n", "2", "--bits", "1110", "--out", "x.csv"}), 2, "missing_seed");
  expect_error_line(cli({"minimize", "--n", "2", "--bits", "1110", "--format", "svg"}), 2, "bad_flag");
}

TEST(Cli, HelpListsFlagsAndExitCodes) {
  for (const char* sub : {"gen", "extract", "minimize", "census", "graph", "netlist", "bandgap"}) {
    auto r = cli({sub, "--help"});
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("Exit codes"), std::string::npos) << sub;
    EXPECT_NE(r.out.find("  5  analysis failure"), std::string::npos) << sub;
    EXPECT_NE(r.out.find("--help"), std::string::npos) << sub;
  }
  auto top = cli({"--help"});
  EXPECT_EQ(top.code, 0);
  EXPECT_NE(top.out.find("census"), std::string::npos);
  EXPECT_NE(cli({"extract", "--help"}).out.find("--thresholds"), std::string::npos);
}

TEST(Cli, Bandgap) {
  EXPECT_EQ(cli({"bandgap", "372"}).out, "3.333 eV\n");
  EXPECT_EQ(cli({"bandgap", "1240"}).out, "1.000 eV\n");
  expect_error_line(cli({"bandgap", "0"}), 4, "bad_input");
}

TEST_F(CliTest, GenExtractNandCarriesId7) {
  auto g = cli({"gen", "--seed", "11", "--n", "2", "--bits", "1110", "--noise-mv", "0", "--out", path("nand.csv")});
  ASSERT_EQ(g.code, 0) << g.err;
  ASSERT_TRUE(fs::exists(path("nand.manifest.json")));
  // Spikes span 400..500 mV, so every threshold up to 400 mV sees them all.
  auto e = cli({"extract", path("nand.csv"), "--thresholds", "100,150,200,250,300,350,400"});
  ASSERT_EQ(e.code, 0) << e.err;
  auto records = nlohmann::json::parse(e.out);
  ASSERT_EQ(records.size(), 7u);
  for (const auto& r : records) {
    EXPECT_EQ(r["id"], "7");
    EXPECT_EQ(r["sop"], "A' + B'");
    EXPECT_EQ(r["channel"], "ch0");
  }
  auto one = cli({"extract", path("nand.csv"), "--thresholds", "200,300", "--channel", "all"});
  EXPECT_EQ(nlohmann::json::parse(one.out).size(), 2u);
}

TEST_F(CliTest, GenIsByteDeterministic) {
  for (const char* name : {"a.csv", "b.csv"}) {
    ASSERT_EQ(cli({"gen", "--seed", "5", "--n", "4", "--bits", "0110100110010110", "--bits", "0000000011111111",
                   "--flip", "0.1", "--out", path(name)})
                  .code,
              0);
  }
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.manifest.json")), slurp(path("b.manifest.json")));
}

TEST_F(CliTest, CensusOverTopTenFixtureMatchesGolden) {
  auto g = cli({"gen", "--seed", "1", "--fixture", golden("top10_fixture.json"), "--out-dir", path("recs")});
  ASSERT_EQ(g.code, 0) << g.err;
  auto e = cli({"extract", path("recs"), "--thresholds", "300", "--out-dir", path("records")});
  ASSERT_EQ(e.code, 0) << e.err;
  auto c = cli({"census", path("records"), "--csv", path("hist.csv"), "--report", path("report.json")});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(c.out, slurp(golden("top10_report.txt")));
  EXPECT_NE(slurp(path("hist.csv")).find("\n7,73\n"), std::string::npos);
  auto report = nlohmann::json::parse(slurp(path("report.json")));
  EXPECT_EQ(report["total"], 214);
}

TEST_F(CliTest, ExtractOutputIndependentOfThreadCount) {
  for (int i = 0; i < 6; ++i) {
    ASSERT_EQ(cli({"gen", "--seed", std::to_string(i), "--n", "2", "--bits", i % 2 ? "0110" : "1001", "--repeat",
                   std::to_string(i), "--out", path("r" + std::to_string(i) + ".csv")})
                  .code,
              0);
  }
  ::setenv("GATEMINER_THREADS", "1", 1);
  EXPECT_EQ(gateminer::cli::worker_count(), 1u);
  auto serial = cli({"extract", dir_.string()});
  ::setenv("GATEMINER_THREADS", "4", 1);
  EXPECT_EQ(gateminer::cli::worker_count(), 4u);
  auto parallel = cli({"extract", dir_.string()});
  ::unsetenv("GATEMINER_THREADS");
  ASSERT_EQ(serial.code, 0) << serial.err;
  EXPECT_EQ(serial.out, parallel.out);
  auto records = nlohmann::json::parse(serial.out);
  ASSERT_EQ(records.size(), 60u);
  for (std::size_t i = 0; i < records.size(); ++i) EXPECT_EQ(records[i]["repeat_index"], i / 10);
}

TEST_F(CliTest, IoAndAnalysisErrors) {
  expect_error_line(cli({"extract", path("missing.csv")}), 3, "bad_path");
  std::ofstream(path("orphan.csv")) << "t,ch0,sync\n0,0,5\n";
  expect_error_line(cli({"extract", path("orphan.csv")}), 3, "missing_manifest");

  std::ofstream(path("ragged.csv")) << "t,ch0,sync\n0,0,5\n1,0\n";
  std::ofstream(path("ragged.manifest.json")) << R"({"n_inputs":1,"state_duration_s":1,"sample_rate_hz":1,"output_channel":"ch0"})";
  expect_error_line(cli({"extract", path("ragged.csv")}), 4, "ragged_row");

  // Two states but only one sync edge.
  std::ofstream(path("edges.csv")) << "t,ch0,sync\n0,0,5\n1,0,5\n2,0,5\n";
  std::ofstream(path("edges.manifest.json")) << R"({"n_inputs":1,"state_duration_s":1,"sample_rate_hz":1,"output_channel":"ch0"})";
  expect_error_line(cli({"extract", path("edges.csv")}), 5, "edge_count_mismatch");

  ASSERT_EQ(cli({"gen", "--seed", "1", "--n", "2", "--bits", "1110", "--out", path("m2.csv")}).code, 0);
  ASSERT_EQ(cli({"gen", "--seed", "1", "--n", "3", "--bits", "11101000", "--out", path("m3.csv")}).code, 0);
  ASSERT_EQ(cli({"extract", path("m2.csv"), path("m3.csv"), "--out-dir", path("mixed")}).code, 0);
  expect_error_line(cli({"census", path("mixed")}), 5, "census");

  expect_error_line(cli({"gen", "--seed", "1", "--n", "2", "--bits", "1110", "--out", path("no/such/dir/x.csv")}), 3,
                    "io");
}

TEST_F(CliTest, GraphAndNetlistEmitDot) {
  ASSERT_EQ(cli({"gen", "--seed", "3", "--n", "2", "--bits", "1110", "--bits", "0001", "--noise-mv", "0", "--out",
                 path("g.csv")})
                .code,
            0);
  auto g = cli({"graph", path("g.csv"), "--threshold", "300"});
  ASSERT_EQ(g.code, 0) << g.err;
  auto parsed = oracle::parse_dot(g.out);
  ASSERT_TRUE(parsed.ok) << parsed.error;
  // Outputs per state: 10, 10, 10, 01.
  EXPECT_EQ(parsed.nodes, 2);
  EXPECT_EQ(parsed.edges, 3);
  EXPECT_EQ(g.out, cli({"graph", path("g.csv"), "--threshold", "300"}).out);

  auto n = cli({"netlist", "--expr", "A·B", "--n", "2"});
  ASSERT_EQ(n.code, 0) << n.err;
  auto nd = oracle::parse_dot(n.out);
  ASSERT_TRUE(nd.ok) << nd.error;
  EXPECT_EQ(nd.nodes, 4);

  std::ofstream(path("nand.json")) << cli({"minimize", "--n", "2", "--bits", "1110", "--format", "json"}).out;
  auto j = cli({"netlist", "--sop", path("nand.json"), "--format", "json"});
  ASSERT_EQ(j.code, 0) << j.err;
  EXPECT_EQ(nlohmann::json::parse(j.out)["gates"].size(), 6u);
  expect_error_line(cli({"netlist", "--n", "2", "--bits", "0000"}), 4, "circuit");
}

TEST(CliBinary, ExitStatusReachesShell) {
  const std::string bin = GATEMINER_CLI_PATH;
  EXPECT_EQ(std::system((bin + " bandgap 620 > /dev/null").c_str()), 0);
  const int status = std::system((bin + " frobnicate 2> /dev/null").c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}
