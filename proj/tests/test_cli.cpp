// End-to-end tests for the seqlab command-line tool.  The test binary takes
// the CLI path as argv[1] and the golden-artifact directory as argv[2]; both
// are stripped before GoogleTest parses the remaining flags.
#include "seqlab/seqlab.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

using namespace seqlab;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string g_cli;
std::string g_golden;
fs::path g_tmp;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  const fs::path so = g_tmp / "stdout.txt";
  const fs::path se = g_tmp / "stderr.txt";
  const std::string cmd =
      "\"" + g_cli + "\" " + args + " > " + so.string() + " 2> " + se.string();
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

TEST(CliBasics, VersionPrintsCodeVersion) {
  RunResult r = run_cli("--version");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(kCodeVersion), std::string::npos);
}

TEST(CliBasics, HelpListsSubcommands) {
  RunResult r = run_cli("--help");
  EXPECT_EQ(r.code, 0);
  for (const char* name : {"generate", "encode", "group", "percolate",
                           "witness", "verify", "dimension", "montecarlo",
                           "pipeline"}) {
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  }
}

TEST(CliBasics, UsageErrorsExitWithOne) {
  EXPECT_EQ(run_cli("generate --bogus 3").code, 1);
  EXPECT_EQ(run_cli("dimension --L 1").code, 1);
  EXPECT_EQ(run_cli("verify").code, 1);                        // --in required
  EXPECT_EQ(run_cli("verify --in /nonexistent/w.json").code, 1);
  EXPECT_EQ(run_cli("generate --format csv").code, 1);
  EXPECT_EQ(run_cli("encode").code, 1);  // needs --bits xor --in
  EXPECT_EQ(run_cli("encode --bits 01a").code, 1);
  EXPECT_EQ(run_cli("pipeline --p 2.0").code, 1);
  EXPECT_EQ(run_cli("").code, 1);  // a subcommand is required
}

TEST(Generate, DeterministicAcrossInvocations) {
  RunResult a = run_cli("generate --window 256 --p 0.3 --seed 12");
  RunResult b = run_cli("generate --window 256 --p 0.3 --seed 12");
  RunResult c = run_cli("generate --window 256 --p 0.3 --seed 13");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(Generate, ArtifactMatchesLibrarySampler) {
  RunResult r = run_cli("generate --window 256 --p 0.3 --seed 12");
  ASSERT_EQ(r.code, 0);
  ojson j = ojson::parse(r.out);
  EXPECT_EQ(j.at("kind"), "generate");
  ASSERT_EQ(j.at("length").get<std::int64_t>(), 256);
  const Bits want = sample_bernoulli(256, 0.3, 12);
  const Bits got =
      unpack_bits_base64(j.at("bits_base64").get<std::string>(), 256);
  EXPECT_EQ(got, want);
  std::int64_t ones = 0;
  for (std::uint8_t v : want) ones += v;
  EXPECT_EQ(j.at("ones").get<std::int64_t>(), ones);
}

TEST(Encode, MatchesLibraryOnGeneratedArtifact) {
  const fs::path gen = g_tmp / "gen.json";
  ASSERT_EQ(
      run_cli("generate --window 300 --p 0.2 --seed 5 --out " + gen.string())
          .code,
      0);
  RunResult r = run_cli("encode --in " + gen.string());
  ASSERT_EQ(r.code, 0);
  ojson j = ojson::parse(r.out);
  const WeightedWord want = encode(sample_bernoulli(300, 0.2, 5));
  EXPECT_EQ(j.at("word").at("w").get<std::vector<std::int64_t>>(), want.w);
  EXPECT_EQ(j.at("word").at("last_run_complete").get<bool>(),
            want.last_run_complete);
  EXPECT_EQ(j.at("decoded_length").get<std::int64_t>(), decoded_length(want.w));
}

TEST(Group, DerivesScaleFromBranchingParameter) {
  RunResult r = run_cli("group --window 1000 --p 0 --seed 1 --L 3");
  ASSERT_EQ(r.code, 0);
  ojson j = ojson::parse(r.out);
  EXPECT_EQ(j.at("config").at("M").get<std::int64_t>(), 12);
  EXPECT_TRUE(j.at("chi").at("determined").get<bool>());
  EXPECT_EQ(j.at("chi").at("value").get<std::int64_t>(), 0);
  EXPECT_TRUE(j.at("psi").at("nonzero").empty());
  EXPECT_EQ(j.at("thinning").at("deletions").get<std::int64_t>(), 0);

  // An explicit --M wins over the derived value.
  RunResult r2 = run_cli("group --window 1000 --p 0 --seed 1 --L 3 --M 5");
  ASSERT_EQ(r2.code, 0);
  ojson j2 = ojson::parse(r2.out);
  EXPECT_EQ(j2.at("config").at("M").get<std::int64_t>(), 5);
}

TEST(Dimension, SmallWindowEstimatesAreStable) {
  RunResult r = run_cli("dimension --L 2 --n-max 6561");
  ASSERT_EQ(r.code, 0);
  ojson j = ojson::parse(r.out);
  EXPECT_EQ(j.at("config").at("M").get<std::int64_t>(), 9);
  EXPECT_NEAR(j.at("mass").at("lower").get<double>(), 0.3943310959821609,
              1e-12);
  EXPECT_NEAR(j.at("mass").at("upper").get<double>(), 0.473197315178593,
              1e-12);
  EXPECT_NEAR(j.at("hausdorff").at("estimate").get<double>(), 0.27, 0.005);
  EXPECT_NEAR(j.at("entropy").at("estimate").get<double>(), 0.27, 0.005);
  ASSERT_FALSE(j.at("growth").at("origin").is_null());
  EXPECT_TRUE(j.at("growth").at("origin").at("holds").get<bool>());
  EXPECT_TRUE(j.at("growth").at("pointwise").at("holds").get<bool>());
}

TEST(Pipeline, GoldenArtifactIsByteStable) {
  const fs::path fresh = g_tmp / "pipeline_small.json";
  ASSERT_EQ(run_cli("pipeline --L 2 --p 0.0001 --window 20000 --trials 5 "
                    "--seed 11 --out " +
                    fresh.string())
                .code,
            0);
  const std::string golden = slurp(fs::path(g_golden) / "pipeline_small.json");
  ASSERT_FALSE(golden.empty());
  EXPECT_EQ(slurp(fresh), golden);
}

TEST(Pipeline, DensityZeroSucceedsEverywhere) {
  RunResult r = run_cli("pipeline --p 0 --window 1000 --trials 5 --seed 3");
  ASSERT_EQ(r.code, 0);
  ojson j = ojson::parse(r.out);
  EXPECT_DOUBLE_EQ(j.at("summary").at("success_fraction").get<double>(), 1.0);
  EXPECT_TRUE(j.at("config").at("in_regime").get<bool>());
  EXPECT_EQ(j.at("trials").size(), 5u);
}

TEST(Pipeline, OutOfRegimeRunsAreLabeledNotRejected) {
  RunResult r = run_cli("pipeline --p 0.4 --window 200 --trials 2 --seed 1");
  ASSERT_EQ(r.code, 0);
  ojson j = ojson::parse(r.out);
  EXPECT_FALSE(j.at("config").at("in_regime").get<bool>());
}

TEST(Pipeline, CsvFormatEmitsHeaderAndSummaryRow) {
  RunResult r = run_cli(
      "pipeline --p 0 --window 500 --trials 4 --seed 2 --format csv");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("code_version,", 0), 0u);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 2);
}

TEST(ConfigFile, ValuesApplyAndExplicitFlagsWin) {
  const fs::path cfg = g_tmp / "run.cfg";
  spit(cfg, "# experiment setup\nwindow = 500\nseed = 9\ntrials = 25\n");
  RunResult r = run_cli("montecarlo --config " + cfg.string() +
                        " --trials 10 --seed 4 --p 0");
  ASSERT_EQ(r.code, 0) << r.err;
  ojson j = ojson::parse(r.out);
  EXPECT_EQ(j.at("config").at("window_length").get<std::int64_t>(), 500);
  EXPECT_EQ(j.at("config").at("seed").get<std::uint64_t>(), 4u);
  EXPECT_EQ(j.at("config").at("trials").get<std::int64_t>(), 10);
}

TEST(ConfigFile, MissingFileAndUnknownKeysAreErrors) {
  EXPECT_EQ(run_cli("montecarlo --config /nonexistent/run.cfg").code, 1);
  const fs::path cfg = g_tmp / "bad.cfg";
  spit(cfg, "wibble = 3\n");
  RunResult r = run_cli("montecarlo --config " + cfg.string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("wibble"), std::string::npos);
}

TEST(WitnessVerify, WeightedRoundTrip) {
  const fs::path w = g_tmp / "w_weighted.json";
  RunResult make = run_cli(
      "witness --level weighted --L 2 --window 3000 --p 0.003 --seed 11 "
      "--out " +
      w.string());
  ASSERT_EQ(make.code, 0);
  ojson a = ojson::parse(slurp(w));
  ASSERT_EQ(a.at("status"), "ok");
  EXPECT_GT(a.at("schedule").at("target_length").get<std::int64_t>(), 0);
  RunResult ver = run_cli("verify --in " + w.string());
  ASSERT_EQ(ver.code, 0);
  ojson v = ojson::parse(ver.out);
  EXPECT_EQ(v.at("level"), "weighted");
  EXPECT_TRUE(v.at("replay_ok").get<bool>());
  EXPECT_EQ(v.at("target_length"), a.at("schedule").at("target_length"));
}

TEST(WitnessVerify, BinaryRoundTripAndTamperDetection) {
  const fs::path w = g_tmp / "w_binary.json";
  RunResult make = run_cli(
      "witness --level binary --L 2 --window 3000 --p 0.003 --seed 11 "
      "--out " +
      w.string());
  ASSERT_EQ(make.code, 0);
  ojson a = ojson::parse(slurp(w));
  ASSERT_EQ(a.at("status"), "ok");
  RunResult ver = run_cli("verify --in " + w.string());
  ASSERT_EQ(ver.code, 0);
  EXPECT_TRUE(ojson::parse(ver.out).at("replay_ok").get<bool>());

  // Inflating the certified length past the available material must be
  // caught by the replay, not trusted.
  ojson tampered = a;
  tampered["schedule"]["target_length"] =
      tampered["schedule"]["target_length"].get<std::int64_t>() + 100000;
  const fs::path t = g_tmp / "w_tampered.json";
  spit(t, tampered.dump(2) + "\n");
  RunResult bad = run_cli("verify --in " + t.string());
  ASSERT_EQ(bad.code, 0);
  EXPECT_FALSE(ojson::parse(bad.out).at("replay_ok").get<bool>());

  // Artifacts of the wrong kind are rejected outright.
  const fs::path gen = g_tmp / "gen2.json";
  ASSERT_EQ(run_cli("generate --window 64 --out " + gen.string()).code, 0);
  EXPECT_EQ(run_cli("verify --in " + gen.string()).code, 1);
}

TEST(Percolate, SvgRenderingAndSizeCap) {
  const fs::path svg = g_tmp / "grid.svg";
  RunResult r = run_cli(
      "percolate --L 2 --window 3000 --p 0.003 --seed 11 --svg " +
      svg.string());
  ASSERT_EQ(r.code, 0);
  ojson j = ojson::parse(r.out);
  EXPECT_EQ(j.at("status"), "ok");
  EXPECT_TRUE(j.at("path").at("found").get<bool>());
  const std::string body = slurp(svg);
  EXPECT_EQ(body.rfind("<svg", 0), 0u);
  EXPECT_NE(body.find("polyline"), std::string::npos);

  RunResult big = run_cli(
      "percolate --L 2 --window 2001 --p 0 --seed 1 --depth 2000 --svg " +
      (g_tmp / "big.svg").string());
  EXPECT_EQ(big.code, 1);
}

TEST(Montecarlo, SweepProducesOnePointPerDensity) {
  RunResult r = run_cli(
      "montecarlo --window 1000 --trials 20 --seed 4 --sweep 0,0.005");
  ASSERT_EQ(r.code, 0);
  ojson j = ojson::parse(r.out);
  EXPECT_EQ(j.at("kind"), "chi_zero");
  ASSERT_EQ(j.at("points").size(), 2u);
  EXPECT_DOUBLE_EQ(j.at("points")[0].at("zero_fraction").get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(j.at("points")[0].at("p").get<double>(), 0.0);
  EXPECT_DOUBLE_EQ(j.at("points")[1].at("p").get<double>(), 0.005);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr,
                 "usage: %s <seqlab_cli path> <golden dir> [gtest args]\n",
                 argv[0]);
    return 2;
  }
  g_cli = argv[1];
  g_golden = argv[2];
  for (int i = 1; i + 2 < argc; ++i) argv[i] = argv[i + 2];
  argc -= 2;
  g_tmp = fs::temp_directory_path() /
          ("seqlab_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(g_tmp);
  ::testing::InitGoogleTest(&argc, argv);
  const int rc = RUN_ALL_TESTS();
  std::error_code ec;
  fs::remove_all(g_tmp, ec);
  return rc;
}
