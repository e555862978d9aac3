#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "scw/scenario.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kSource = fs::path(SCW_SOURCE_DIR);
const fs::path kWork = fs::temp_directory_path() / "scw-cli-test";

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SCW_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string scenario(const char* name) {
  return (kSource / "scenarios" / name).string();
}

}  // namespace

TEST_CASE("scenario schema") {
  const std::string text = scw::read_file(scenario("stop_at_28.json"));
  const scw::EpisodeConfig cfg = scw::parse_scenario_text(text);
  CHECK(cfg.model == scw::ModelId::M1);
  CHECK(cfg.params.a_s_min == 5.0);
  CHECK(cfg.depth == 200);
  CHECK(cfg.duration_policy == scw::DurationPolicy::AlwaysT);
  CHECK(cfg.constraint_policy.kind == scw::ConstraintPolicy::Kind::Fixed);
  CHECK(cfg.constraint_policy.fixed.x_c == 28.0);
  CHECK(cfg.nominal_policy.schedule == std::vector<double>{2.0});

  CHECK_THROWS_AS(scw::parse_scenario_text("{\"model\": \"m1\"}"), scw::ScenarioError);
  CHECK_THROWS_AS(scw::parse_scenario_text("not json"), scw::ScenarioError);

  std::string unknown = text;
  unknown.insert(1, "\"bogus_key\": 1,");
  CHECK_THROWS_AS(scw::parse_scenario_text(unknown), scw::ScenarioError);

  // Round trip through the serializer.
  const scw::EpisodeConfig back = scw::parse_scenario_text(scw::scenario_to_text(cfg));
  CHECK(back.model == cfg.model);
  CHECK(back.seed == cfg.seed);
  CHECK(back.constraint_policy.fixed.x_c == cfg.constraint_policy.fixed.x_c);
}

TEST_CASE("trace CSV format") {
  scw::Trace t{{0.0, {0, 1}, -3, -3, {0.1, 0}, false}};
  const std::string csv = scw::trace_to_csv(t);
  CHECK(csv.rfind("t,x,v,a_n,a_s,x_c,v_c,intervened\n", 0) == 0);
  CHECK(csv.find("0,0,1,-3,-3,0.10000000000000001,0,0\n") != std::string::npos);
}

TEST_CASE("atomic writes round trip") {
  fs::create_directories(kWork);
  const std::string path = (kWork / "report.txt").string();
  scw::write_file_atomic(path, "payload\n");
  CHECK(scw::read_file(path) == "payload\n");
  CHECK(!fs::exists(path + ".tmp"));
}

TEST_CASE("ranges files") {
  const scw::ParamRanges r =
      scw::parse_ranges_text("{\"a_s_min\": [3, 6], \"v\": [0, 10]}");
  CHECK(r.a_s_min.lo == 3.0);
  CHECK(r.v.hi == 10.0);
  CHECK_THROWS_AS(scw::parse_ranges_text("{\"nope\": [1, 2]}"), scw::ScenarioError);
  CHECK_THROWS_AS(scw::parse_ranges_text("{\"v\": [1]}"), scw::ScenarioError);
}

TEST_CASE("cli exit codes") {
  fs::create_directories(kWork);

  // 1 = violation found, 0 = safe, 2 = usage/config error.
  CHECK(run_cli("simulate " + scenario("witness_m3_wrong.json")) == 1);
  CHECK(run_cli("simulate " + scenario("witness_m3.json")) == 0);
  CHECK(run_cli("simulate " + scenario("stop_at_28.json")) == 0);
  CHECK(run_cli("simulate /nonexistent/scenario.json") == 2);
  CHECK(run_cli("simulate") == 2);
  CHECK(run_cli("--bogus-flag") == 2);

  CHECK(run_cli("check --model m1 --episodes 2000 --seed 3 --violation-out " +
                (kWork / "v.json").string()) == 0);
  CHECK(run_cli("check --model m3-wrong --episodes 2000 --seed 3 --violation-out " +
                (kWork / "v.json").string()) == 1);
  CHECK(fs::exists(kWork / "v.json"));
  CHECK(run_cli("check --model m9") == 2);

  scw::write_file_atomic((kWork / "bad_ranges.json").string(),
                         "{\"a_n_min\": [1, 6], \"a_s_min\": [2, 10]}");
  CHECK(run_cli("compare --samples 1000 --seed 1 --out " + (kWork / "r.txt").string() +
                " --ranges " + (kWork / "bad_ranges.json").string()) == 2);
  CHECK(run_cli("compare --samples 2000 --seed 1 --out " + (kWork / "r.txt").string()) ==
        0);
  CHECK(fs::exists(kWork / "r.txt"));
}

TEST_CASE("cli violation scenario reproduces the violation") {
  fs::create_directories(kWork);
  const std::string repro = (kWork / "repro.json").string();
  REQUIRE(run_cli("check --model m3-wrong --episodes 500 --seed 11 --violation-out " +
                  repro) == 1);
  CHECK(run_cli("simulate " + repro) == 1);
}

TEST_CASE("cli hp subcommands") {
  fs::create_directories(kWork);
  const std::string corpus = (kSource / "corpus").string();
  const std::string cex = (kWork / "cex.replay").string();

  CHECK(run_cli("hp run " + corpus + "/model1.hp --state x=0,v=0,asmin=5,anmax=2,anmin=3,T=0.5 --loop-depth 1") == 0);
  CHECK(run_cli("hp run /nonexistent.hp --state x=0") == 2);

  scw::write_file_atomic((kWork / "broken.hp").string(), "x := ;");
  CHECK(run_cli("hp run " + (kWork / "broken.hp").string() + " --state x=0") == 2);

  const std::string ranges =
      " --range x=0:0 --range v=1:1 --range xc=0.1:0.1 --range asmin=5:5"
      " --range anmax=2:2 --range anmin=3:3 --range T=1:1 --init-samples 1";
  CHECK(run_cli("hp check " + corpus + "/model3_wrong.hp --init-file " + corpus +
                "/model3_wrong.init --post-file " + corpus + "/model3_wrong.post" +
                ranges + " --loop-depth 2 --monitor-points 21 --replay-out " + cex) ==
        1);
  CHECK(fs::exists(cex));
  CHECK(run_cli("hp replay " + corpus + "/model3_wrong.hp --replay " + cex +
                " --post-file " + corpus + "/model3_wrong.post") == 1);

  CHECK(run_cli("hp check " + corpus + "/model3.hp --init-file " + corpus +
                "/model3.init --post-file " + corpus + "/model3.post" + ranges +
                " --loop-depth 2 --monitor-points 21") == 0);

  // Bounded search of the full conservative model comes up clean.
  CHECK(run_cli("hp check " + corpus + "/model1.hp --init-file " + corpus +
                "/model1.init --post-file " + corpus +
                "/model1.post --range x=0:0 --range v=0:20 --range xc=0:40"
                " --range asmin=5:5 --range anmax=2:2 --range anmin=3:3"
                " --range T=0.5:0.5 --init-samples 16 --loop-depth 2"
                " --monitor-points 21 --seed 11") == 0);
}

TEST_CASE("identical invocations write byte-identical outputs") {
  fs::create_directories(kWork);
  const std::string a = (kWork / "a.csv").string();
  const std::string b = (kWork / "b.csv").string();
  REQUIRE(run_cli("simulate " + scenario("witness_m3_wrong.json") + " --out " + a) ==
          1);
  REQUIRE(run_cli("simulate " + scenario("witness_m3_wrong.json") + " --out " + b) ==
          1);
  CHECK(scw::read_file(a) == scw::read_file(b));

  const std::string ra = (kWork / "ra.txt").string();
  const std::string rb = (kWork / "rb.txt").string();
  REQUIRE(run_cli("compare --samples 3000 --seed 5 --out " + ra) == 0);
  REQUIRE(run_cli("compare --samples 3000 --seed 5 --out " + rb) == 0);
  CHECK(scw::read_file(ra) == scw::read_file(rb));
}
