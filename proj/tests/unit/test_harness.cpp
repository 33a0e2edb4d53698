#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "grinder/error.hpp"
#include "grinder/harness.hpp"

using namespace grinder;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("grinder-harness-test-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

ExperimentConfig small_discrete() {
  return parse_config(R"({
    "learners": ["grinder", "exp3"],
    "action_set": {"size": 10, "seed": 2},
    "horizon": 40, "repetitions": 3, "seed": 4
  })");
}

}  // namespace

TEST_CASE("three rounds, one action, truthful agents") {
  ExperimentConfig c = parse_config(R"({
    "agent": {"family": "truthful"},
    "learners": ["grinder"],
    "action_set": {"actions": [[1, 1, -1]]},
    "horizon": 3, "repetitions": 1
  })");
  c.output = scratch("tiny");
  const auto result = run_experiment(c);
  REQUIRE(result.runs.size() == 1);
  CHECK(result.runs[0].ledger.size() == 3);
  CHECK(result.runs[0].external_regret.back() == 0.0);
  CHECK(result.runs[0].stackelberg_regret.back() == 0.0);
  const auto rec = lines(c.output / "records.csv");
  REQUIRE(rec.size() == 4);
  CHECK(rec[0] ==
        "run_id,repetition,t,learner,action_0,action_1,action_2,report_0,report_1,label,loss,cumulative_loss,"
        "partition_size,oracle_value");
  CHECK(lines(c.output / "summary.csv")[0] == kSummaryColumns);
  CHECK(lines(c.output / "timing.csv")[0] == "run_id,t,wall_us");
  CHECK(lines(c.output / "runs.csv")[0] ==
        "run_id,repetition,learner,seed,rounds,partial,stop_reason,second_order_lhs,second_order_rhs");
  CHECK(lines(c.output / "actions.csv")[0] == "index,coord_0,coord_1,coord_2");
  fs::remove_all(c.output);
}

TEST_CASE("same config, byte-identical records, whatever the worker count") {
  ExperimentConfig a = small_discrete();
  a.output = scratch("det-a");
  ExperimentConfig b = small_discrete();
  b.output = scratch("det-b");
  b.workers = 3;
  run_experiment(a);
  run_experiment(b);
  for (const char* f : {"records.csv", "summary.csv", "runs.csv", "actions.csv"})
    CHECK_MESSAGE(slurp(a.output / f) == slurp(b.output / f), f);
  fs::remove_all(a.output);
  fs::remove_all(b.output);
}

TEST_CASE("summary rows are ordered by learner, t, metric") {
  ExperimentConfig c = small_discrete();
  c.output = scratch("summary");
  run_experiment(c);
  const auto rows = lines(c.output / "summary.csv");
  // Two learners x 40 rounds x three metrics, plus the header.
  REQUIRE(rows.size() == 1 + 2 * 40 * 3);
  CHECK(rows[1].rfind("grinder-exact,1,stackelberg_regret,", 0) == 0);
  CHECK(rows[2].rfind("grinder-exact,1,external_regret,", 0) == 0);
  CHECK(rows[3].rfind("grinder-exact,1,cumulative_loss,", 0) == 0);
  CHECK(rows[4].rfind("grinder-exact,2,stackelberg_regret,", 0) == 0);
  CHECK(rows[121].rfind("exp3,1,stackelberg_regret,", 0) == 0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::stringstream s(rows[i]);
    std::string learner, t, metric, mean, p10, p90;
    std::getline(s, learner, ',');
    std::getline(s, t, ',');
    std::getline(s, metric, ',');
    std::getline(s, mean, ',');
    std::getline(s, p10, ',');
    std::getline(s, p90, ',');
    CHECK(std::stod(p10) <= std::stod(p90));
  }
  fs::remove_all(c.output);
}

TEST_CASE("repetitions get distinct seeds and learners share the stream") {
  const ExperimentConfig c = small_discrete();
  const auto result = run_all(c);
  REQUIRE(result.runs.size() == 6);
  CHECK(result.runs[0].seed != result.runs[2].seed);
  // Common random numbers: both learners of a repetition see the same points.
  for (std::size_t t = 0; t < 40; ++t)
    CHECK(result.runs[0].ledger.entries()[t].sigma.x == result.runs[1].ledger.entries()[t].sigma.x);
  CHECK(repetition_seed(1, 0) != repetition_seed(1, 1));
}

TEST_CASE("cumulative loss is non-decreasing and losses are binary") {
  const auto result = run_all(small_discrete());
  for (const auto& run : result.runs) {
    double prev = 0.0;
    for (std::size_t t = 0; t < run.cumulative_loss.size(); ++t) {
      CHECK(run.rounds[t].loss >= 0);
      CHECK(run.rounds[t].loss <= 1);
      CHECK(run.cumulative_loss[t] >= prev);
      prev = run.cumulative_loss[t];
    }
    if (run.label == "grinder-exact") {
      REQUIRE(run.second_order);
      CHECK(run.second_order->holds());
    }
  }
}

TEST_CASE("lower-bound stream forces truthful agents") {
  const ExperimentConfig c = parse_config(R"({"stream": {"kind": "lower_bound"}, "agent": {"family": "indicator"}})");
  CHECK(effective_agent(c).family == AgentFamily::Truthful);
  CHECK(effective_agent(small_discrete()).family == AgentFamily::IndicatorValue);
}

TEST_CASE("budget guard ends a run early with the partial flag") {
  ExperimentConfig c = parse_config(R"({
    "learners": [{"kind": "grinder", "volume_floor": 0, "oracle": {"mc_samples": 2000}}],
    "action_set": {"mode": "continuous"},
    "budget": {"max_polytopes": 20},
    "horizon": 50, "repetitions": 1
  })");
  c.output = scratch("budget");
  const auto result = run_experiment(c);
  CHECK(result.partial);
  REQUIRE(result.runs.size() == 1);
  CHECK(result.runs[0].partial);
  CHECK(result.runs[0].ledger.size() < 50);
  CHECK_FALSE(result.runs[0].stop_reason.empty());
  const auto runs = lines(c.output / "runs.csv");
  REQUIRE(runs.size() == 2);
  CHECK(runs[1].find(",1,\"") != std::string::npos);
  fs::remove_all(c.output);
}

TEST_CASE("continuous runs respect the cell-count bound and BGD stays in the box") {
  ExperimentConfig c = parse_config(R"({
    "learners": [{"kind": "grinder", "oracle": {"mc_samples": 2000}}, "bgd"],
    "action_set": {"mode": "continuous", "candidates": 50},
    "horizon": 12, "repetitions": 1
  })");
  const auto result = run_all(c);
  CHECK_FALSE(result.partial);
  for (const auto& run : result.runs) {
    CHECK(run.stackelberg_regret.size() == 12);
    for (std::size_t t = 0; t < run.rounds.size(); ++t) {
      CHECK(run.rounds[t].action.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
      if (run.label == "grinder-exact")
        CHECK(static_cast<double>(run.rounds[t].partition_size) <= partition_bound(2, t + 1));
    }
  }
}

TEST_CASE("unwritable output is an I/O error") {
  ExperimentConfig c = small_discrete();
  c.horizon = 2;
  c.repetitions = 1;
  c.output = "/proc/definitely/not/here";
  CHECK_THROWS_AS(run_experiment(c), IoError);
}
