#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string(ROBSUB_CLI_PATH) + " " + args + " 2>/dev/null";
  Outcome r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "robsub_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, HelpAndParseErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("no-such-task --generator '{\"type\":\"identity\",\"n\":3}'").code, 1);
  EXPECT_EQ(run("pca-frob --generator '{\"type\":\"nope\",\"n\":3}' --kappa 1").code, 1);
  EXPECT_EQ(run("pca-frob --generator '{not json' --kappa 1").code, 1);
  EXPECT_EQ(run("pca-frob --config /nonexistent/config.json").code, 1);
}

TEST(Cli, BadConfigFile) {
  const fs::path cfg = scratch("bad.json");
  std::ofstream(cfg) << R"({"task": "pca-frob", "kappa": "x", "generator": {"type": "identity", "n": 3}})";
  EXPECT_EQ(run("pca-frob --config " + cfg.string()).code, 1);
  std::ofstream(cfg) << R"({"input": "a.csv", "generator": {"type": "identity", "n": 3}, "kappa": 1})";
  EXPECT_EQ(run("pca-frob --config " + cfg.string()).code, 1);
}

TEST(Cli, PcaFrobOnPlant) {
  const Outcome r = run("pca-frob --generator '{\"type\":\"planted\",\"n\":8,\"m\":20,\"support\":2}' --rank 1 --seed 3");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j["trials"].size(), 1u);
  const json& t = j["trials"][0];
  EXPECT_LE(t["relative_error"].get<double>(), 1e-3);
  EXPECT_LE(t["certified_q_to_2"].get<double>(), 2.0 * std::sqrt(2.0));
  EXPECT_EQ(j["seed"].get<int>(), 3);
  EXPECT_FALSE(j["bad_input"].get<bool>());
}

TEST(Cli, PoisonedIdentityIsBadInput) {
  const Outcome r = run("poison --generator '{\"type\":\"identity\",\"n\":4,\"scale\":5}' --kappa 1 --tau 0.1 --rank 1");
  EXPECT_EQ(r.code, 2);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["trials"][0]["status"], "bad-input");
  EXPECT_TRUE(j["bad_input"].get<bool>());
}

TEST(Cli, MeanLowerBoundGenerator) {
  const Outcome r = run("mean --generator '{\"type\":\"mean-lb\",\"n\":100,\"sigma\":0.05,\"m\":100}' --seed 2");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["trials"][0]["separation"].get<double>(), std::sqrt(0.15), 1e-9);
  EXPECT_EQ(j["trials"][0]["first_status"], "solved");
  EXPECT_EQ(j["trials"][0]["second_status"], "solved");
}

TEST(Cli, SpikeDetectNullRate) {
  const Outcome r = run(
      "spike-detect --generator '{\"type\":\"spike\",\"n\":12,\"m\":400,\"support\":2,\"theta_min\":2,\"null\":true}' "
      "--trials 20 --seed 5");
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  ASSERT_EQ(j["trials"].size(), 20u);
  int yes = 0;
  for (const auto& t : j["trials"]) yes += t["yes"].get<bool>();
  EXPECT_LE(yes, 2);
}

TEST(Cli, DeterministicReportsAndCsv) {
  const std::string args =
      "pca-spec --generator '{\"type\":\"planted\",\"n\":6,\"m\":12,\"noise\":0.1}' --rank 1 --trials 3 --seed 9";
  const fs::path csv1 = scratch("one.csv"), csv2 = scratch("two.csv");
  const Outcome a = run(args + " --csv " + csv1.string());
  const Outcome b = run(args + " --csv " + csv2.string());
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  const json ja = json::parse(a.out), jb = json::parse(b.out);
  EXPECT_EQ(ja["trials"], jb["trials"]);
  EXPECT_EQ(ja["aggregate"], jb["aggregate"]);
  EXPECT_NE(ja["trials"][0]["seed"], ja["trials"][1]["seed"]);
  const std::string c1 = slurp(csv1);
  EXPECT_EQ(c1, slurp(csv2));
  EXPECT_EQ(c1.rfind("trial,metric,value\n", 0), 0u);
  EXPECT_NE(c1.find("\n2,error,"), std::string::npos);
}

TEST(Cli, InputFileAndSavedProjection) {
  const fs::path in = scratch("in.csv"), proj = scratch("proj.csv"), rep = scratch("report.json");
  std::ofstream(in) << "1,2,3\n1,2,3\n0,0,0\n";
  const Outcome r = run("pca-frob --input " + in.string() + " --kappa 1.5 --rank 1 --out " + rep.string() +
                    " --save-projection " + proj.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  const json j = json::parse(slurp(rep));
  EXPECT_EQ(j["trials"][0]["n"], 3);
  EXPECT_EQ(j["trials"][0]["m"], 3);
  EXPECT_FALSE(slurp(proj).empty());
  EXPECT_EQ(run("pca-frob --input " + scratch("missing.csv").string() + " --kappa 1").code, 1);
}
