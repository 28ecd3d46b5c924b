#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"
#include "scalekit/cli.hpp"

using Json = nlohmann::json;

namespace {

const std::string kCli = SCALEKIT_CLI_PATH;
const std::string kFixtures = SCALEKIT_FIXTURE_DIR;

struct Result {
  int code = -1;
  std::string out;
};

/// Runs the installed binary; stderr is discarded.
Result shell(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + kCli + " " + args +
                          " 2>/dev/null";
  Result r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

/// In-process run over argv.
Result inproc(std::vector<const char*> args) {
  args.insert(args.begin(), "scalekit");
  std::ostringstream out, err;
  Result r;
  r.code = scalekit::cli::main(static_cast<int>(args.size()), args.data(), out, err);
  r.out = out.str();
  return r;
}

}  // namespace

TEST(CliEndToEnd, SummabilityExample) {
  const auto r = shell("summability --family 'pow(k,n)' --max-m 6 --K 100000");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out);
  EXPECT_EQ(j["schema"], 1);
  EXPECT_TRUE(j.contains("seed"));
  for (const auto& e : j["result"]["entries"]) {
    EXPECT_EQ(e["verdict"], "certified");
    EXPECT_EQ(e["m"].get<int>(), e["n"].get<int>() + 2);
    const double s = std::exp(e["partial_sum_log"].get<double>());
    EXPECT_NEAR(s, 1.6449340668482264, 1e-4);
  }
}

TEST(CliEndToEnd, DeterministicJson) {
  for (const std::string args :
       {"ideal-check --family 'pow(k,n)' --trials 300 --seed 9",
        "ideal-check --family 'pow(k,n)' --dims k --K 8 --trials 50 --seed 9",
        "renorm --kind paired --trials 60 --seed 4",
        "counterexample b4 --trials 200 --seed 5",
        "counterexample b7"}) {
    const auto a = shell(args);
    const auto b = shell(args);
    EXPECT_EQ(a.code, b.code) << args;
    EXPECT_FALSE(a.out.empty()) << args;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(CliEndToEnd, SeedChangesRandomOutput) {
  const auto a = shell("ideal-check --family 'pow(k,n)' --trials 50 --seed 1");
  const auto b = shell("ideal-check --family 'pow(k,n)' --trials 50 --seed 2");
  EXPECT_NE(a.out, b.out);
}

TEST(CliEndToEnd, EnvironmentSeedOverrides) {
  const auto a = shell("counterexample b4 --trials 20 --seed 1", "SCALEKIT_SEED=77");
  const auto b = shell("counterexample b4 --trials 20 --seed 2", "SCALEKIT_SEED=77");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(Json::parse(a.out)["seed"], 77);
  // only the recorded --seed differs, and it is overridden
  EXPECT_EQ(a.out, b.out);
}

TEST(CliEndToEnd, ExpectFailFlipsViolations) {
  const std::string g = "growth --dims 'exp(k^k)' --K 8";
  EXPECT_EQ(shell(g).code, 1);
  EXPECT_EQ(shell(g + " --expect-fail").code, 0);
  const auto j = Json::parse(shell(g).out);
  EXPECT_FALSE(j["contract_holds"]);
  EXPECT_TRUE(j.contains("witness"));
  for (const auto& c : j["result"]["conditions"]) {
    EXPECT_EQ(c["verdict"], "refuted-by-trend");
  }
  // a passing contract with --expect-fail is a failure
  EXPECT_EQ(shell("counterexample cantor --pmax 10").code, 0);
  EXPECT_EQ(shell("counterexample cantor --pmax 10 --expect-fail").code, 1);
  for (const std::string ce : {"b1", "b2", "b5", "b7"}) {
    EXPECT_EQ(shell("counterexample " + ce).code, 1) << ce;
    EXPECT_EQ(shell("counterexample " + ce + " --expect-fail").code, 0) << ce;
  }
}

TEST(CliEndToEnd, ExpectFailDoesNotMaskInputErrors) {
  EXPECT_EQ(shell("growth --dims 'exp(k^' --expect-fail").code, 2);
  EXPECT_EQ(shell("counterexample cantor --pmax 40 --expect-fail").code, 2);
}

TEST(CliEndToEnd, ParseErrorsExitTwo) {
  EXPECT_EQ(shell("summability --family 'pow(k,'").code, 2);
  EXPECT_EQ(shell("summability").code, 2);
  EXPECT_EQ(shell("nonsense").code, 2);
  EXPECT_EQ(shell("counterexample b9").code, 2);
  EXPECT_EQ(shell("growth --dims k --format xml").code, 2);
  EXPECT_EQ(shell("growth --dims-file /nonexistent/dims.txt").code, 2);
  EXPECT_EQ(shell("ideal-check --family k --f " + fixture("bad_sparse.txt") +
                  " --g " + fixture("g.txt"))
                .code,
            2);
  EXPECT_EQ(shell("--help").code, 0);
}

TEST(CliEndToEnd, CantorExample) {
  const auto r = shell("counterexample cantor --pmax 10");
  ASSERT_EQ(r.code, 0);
  const auto j = Json::parse(r.out)["result"];
  EXPECT_TRUE(j["bijective"]);
  EXPECT_TRUE(j["sandwich"]);
  EXPECT_LT(j["c_sigma_gamma"].get<double>(), 2.0);
}

TEST(CliEndToEnd, Fixtures) {
  const auto d = shell("growth --dims-file " + fixture("dims.txt") +
                       " --theta-file " + fixture("theta.txt"));
  EXPECT_EQ(d.code, 0);
  EXPECT_EQ(Json::parse(d.out)["result"]["K"], 6);

  const auto c = shell("classify-standard-schwartz --dims-file " + fixture("dims.txt"));
  EXPECT_EQ(c.code, 0);
  // 1 + 4 + 9 + 4 + 16 + 36
  EXPECT_EQ(Json::parse(c.out)["result"]["total"], 70);

  const auto p = shell("ideal-check --family 'pow(k,n)' --trials 10 --f " +
                       fixture("f.txt") + " --g " + fixture("g.txt"));
  ASSERT_EQ(p.code, 0);
  EXPECT_EQ(Json::parse(p.out)["result"]["fixture"].size(), 4u);

  const auto b = shell("ideal-check --family 'pow(k,n)' --trials 10 --dims-file " +
                       fixture("dims.txt") + " --f " + fixture("blocks_f.txt") +
                       " --g " + fixture("blocks_phi.txt"));
  ASSERT_EQ(b.code, 0);
  for (const auto& e : Json::parse(b.out)["result"]["fixture"]) {
    EXPECT_LE(e["left"].get<double>(), 1 + 1e-9);
    EXPECT_LE(e["right"].get<double>(), 1 + 1e-9);
  }

  const auto t = shell("counterexample torus --order 1 --phi " + fixture("phi.txt"));
  ASSERT_EQ(t.code, 0);
  EXPECT_DOUBLE_EQ(Json::parse(t.out)["result"]["lhs"].get<double>(), 2.0);

  const auto f5 = shell("counterexample b5 --f " + fixture("b5_f.txt") + " --d 3");
  EXPECT_EQ(f5.code, 1);
  EXPECT_EQ(Json::parse(f5.out)["result"]["p"], 2);
}

TEST(CliEndToEnd, CsvAndMarkdown) {
  const auto csv = shell("counterexample b1 --format csv");
  EXPECT_EQ(csv.code, 1);
  EXPECT_NE(csv.out.find("K,"), std::string::npos);
  EXPECT_EQ(csv.out.rfind("# schema 1", 0), 0u);
  const auto md = shell("renorm --kind trivial --trials 20 --format md");
  EXPECT_EQ(md.code, 0);
  EXPECT_NE(md.out.find("| n | inequality | worst ratio |"), std::string::npos);
}

TEST(CliInProcess, MatchesBinary) {
  const auto a = inproc({"counterexample", "b2", "--K", "50"});
  const auto b = shell("counterexample b2 --K 50");
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliInProcess, RunRejectsUnknownFormat) {
  scalekit::cli::RunConfig c;
  c.subcommand = "growth";
  c.dims = "k";
  c.format = "yaml";
  std::ostringstream out, err;
  EXPECT_EQ(scalekit::cli::run(c, out, err), 2);
  EXPECT_TRUE(out.str().empty());
}

TEST(CliInProcess, ContractErrorExitsOne) {
  // σ_d χ^p bounded: the example's hypothesis fails
  const auto r = inproc({"counterexample", "b5", "--d", "1", "--f",
                         (kFixtures + "/b5_f.txt").c_str()});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(r.out.empty());
}
