#include "grinder/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>
#include <unistd.h>

#include "grinder/baselines.hpp"
#include "grinder/error.hpp"

namespace grinder {

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double resident_mb() {
  std::ifstream statm("/proc/self/statm");
  long pages = 0, resident = 0;
  if (!(statm >> pages >> resident)) return 0.0;
  return static_cast<double>(resident) * static_cast<double>(sysconf(_SC_PAGESIZE)) / (1024.0 * 1024.0);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("output: cannot write " + path.string());
  return out;
}

}  // namespace

std::uint64_t repetition_seed(std::uint64_t master, std::size_t rep) { return derive_seed(master, rep); }

AgentModel effective_agent(const ExperimentConfig& config) {
  return config.stream.kind == StreamKind::LowerBound ? AgentModel::truthful() : config.agent;
}

std::unique_ptr<Learner> make_learner(const ExperimentConfig& config, std::size_t index, const std::vector<Vector>& actions) {
  const LearnerConfig& l = config.learners.at(index);
  const bool discrete = config.action_set.mode == ActionMode::Discrete;
  switch (l.kind) {
    case LearnerKind::Grinder: {
      GrinderParams p;
      p.dimension = config.dimension;
      p.delta = l.delta.value_or(effective_agent(config).radius());
      p.volume_floor = discrete ? 0.0 : l.volume_floor;
      p.max_polytopes = config.budget.max_polytopes;
      const double v_floor = l.volume_floor > 0.0 ? l.volume_floor : 0.01;
      const double ratio = discrete ? static_cast<double>(actions.size()) : std::pow(2.0, config.dimension + 1) / v_floor;
      const double rate = default_rate(ratio, config.horizon);
      p.eta = l.eta.value_or(rate);
      p.gamma = l.gamma.value_or(rate);
      auto oracle = make_oracle(l.oracle, discrete);
      if (discrete) return std::make_unique<GrinderDiscrete>(actions, p, std::move(oracle));
      return std::make_unique<GrinderContinuous>(p, std::move(oracle));
    }
    case LearnerKind::Exp3:
      return std::make_unique<Exp3>(Exp3::tuned(actions, config.horizon));
    case LearnerKind::Bgd:
      return std::make_unique<Bgd>(BgdParams{l.step, l.radius, config.dimension});
  }
  throw ConfigError("learners.kind: unsupported");
}

RunOutcome run_single(const ExperimentConfig& config, std::size_t repetition, std::size_t learner,
                      const std::vector<Vector>& actions, const std::vector<Vector>& candidates) {
  RunOutcome out;
  out.repetition = repetition;
  out.learner = learner;
  out.label = config.learner_labels().at(learner);
  out.seed = repetition_seed(config.seed, repetition);

  // Every learner of a repetition sees the same stream seed.
  Stream stream(config.stream, config.dimension, config.horizon, derive_seed(out.seed, 0));
  Rng rng(derive_seed(out.seed, 1 + learner));
  const AgentModel model = effective_agent(config);
  auto agent_learner = make_learner(config, learner, actions);
  const bool continuous = config.action_set.mode == ActionMode::Continuous;

  out.rounds.reserve(config.horizon);
  out.wall_us.reserve(config.horizon);
  for (std::size_t t = 1; t <= config.horizon; ++t) {
    const auto start = std::chrono::steady_clock::now();
    LabeledPoint sigma;
    try {
      sigma = stream.next();
    } catch (const StreamExhausted& e) {
      out.partial = true;
      out.stop_reason = e.what();
      break;
    }
    const Vector alpha = agent_learner->select(rng);
    const Vector report = best_response(alpha, sigma, model);
    RoundDiagnostics diag;
    try {
      diag = agent_learner->update(report, sigma, model, rng);
    } catch (const BudgetExceeded& e) {
      out.partial = true;
      out.stop_reason = e.what();
      break;
    }
    stream.record_prediction(sgn(score(alpha, report)));
    out.ledger.record(alpha, report, sigma, diag.loss);
    out.max_partition = std::max(out.max_partition, diag.partition_size);
    out.rounds.push_back(std::move(diag));
    out.wall_us.push_back(std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count());

    if (continuous && static_cast<double>(out.rounds.back().partition_size) > partition_bound(config.dimension, t)) {
      out.partial = true;
      out.stop_reason = "partition size exceeds the cell-count bound at t=" + std::to_string(t);
      break;
    }
    if (t % 16 == 0 && resident_mb() > config.budget.memory_mb) {
      out.partial = true;
      out.stop_reason = "memory cap exceeded at t=" + std::to_string(t);
      break;
    }
  }

  if (auto* g = dynamic_cast<GrinderDiscrete*>(agent_learner.get())) out.second_order = g->second_order();
  if (auto* g = dynamic_cast<GrinderContinuous*>(agent_learner.get())) out.second_order = g->second_order();

  out.cumulative_loss = cumulative_loss_curve(out.ledger);
  if (!candidates.empty()) {
    out.external_regret = external_regret_curve(out.ledger, candidates);
    out.stackelberg_regret = stackelberg_regret_curve(out.ledger, candidates, model);
  }
  return out;
}

ExperimentResult run_all(const ExperimentConfig& config) {
  config.validate();
  const auto actions = build_action_set(config);
  const auto candidates = build_candidates(config);
  // Construct every learner once up front so configuration errors surface
  // before any thread starts.
  for (std::size_t l = 0; l < config.learners.size(); ++l) make_learner(config, l, actions);

  const std::size_t n_learners = config.learners.size();
  const std::size_t tasks = config.repetitions * n_learners;
  ExperimentResult result;
  result.output = config.output;
  result.runs.resize(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < tasks; k = next++) {
      try {
        result.runs[k] = run_single(config, k / n_learners, k % n_learners, actions, candidates);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(config.workers, tasks);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (const auto& r : result.runs) result.partial = result.partial || r.partial;
  return result;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
  const auto& dir = config.output;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("output: cannot create directory " + dir.string());
  const int d = config.dimension;
  const std::size_t n_learners = config.learners.size();

  {
    auto out = open_for_write(dir / "records.csv");
    out << "run_id,repetition,t,learner";
    for (int k = 0; k <= d; ++k) out << ",action_" << k;
    for (int k = 0; k < d; ++k) out << ",report_" << k;
    out << ",label,loss,cumulative_loss,partition_size,oracle_value\n";
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      const auto& run = result.runs[i];
      for (std::size_t t = 0; t < run.rounds.size(); ++t) {
        const auto& r = run.rounds[t];
        out << i << ',' << run.repetition << ',' << t + 1 << ',' << run.label;
        for (int k = 0; k <= d; ++k) out << ',' << fmt(r.action(k));
        for (int k = 0; k < d; ++k) out << ',' << fmt(r.report(k));
        out << ',' << sign(r.y) << ',' << r.loss << ',' << fmt(run.cumulative_loss[t]) << ',' << r.partition_size << ','
            << fmt(r.oracle_value) << '\n';
      }
    }
  }
  {
    auto out = open_for_write(dir / "timing.csv");
    out << "run_id,t,wall_us\n";
    for (std::size_t i = 0; i < result.runs.size(); ++i)
      for (std::size_t t = 0; t < result.runs[i].wall_us.size(); ++t)
        out << i << ',' << t + 1 << ',' << fmt(result.runs[i].wall_us[t]) << '\n';
  }
  {
    auto out = open_for_write(dir / "runs.csv");
    out << "run_id,repetition,learner,seed,rounds,partial,stop_reason,second_order_lhs,second_order_rhs\n";
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      const auto& run = result.runs[i];
      out << i << ',' << run.repetition << ',' << run.label << ',' << run.seed << ',' << run.rounds.size() << ','
          << (run.partial ? 1 : 0) << ",\"" << run.stop_reason << "\",";
      if (run.second_order) out << fmt(run.second_order->lhs()) << ',' << fmt(run.second_order->rhs());
      else out << ',';
      out << '\n';
    }
  }
  {
    auto out = open_for_write(dir / "summary.csv");
    out << kSummaryColumns << '\n';
    const auto labels = config.learner_labels();
    for (std::size_t l = 0; l < n_learners; ++l) {
      for (std::size_t t = 0; t < config.horizon; ++t) {
        auto emit = [&](const char* metric, auto curve_of) {
          std::vector<double> values;
          for (const auto& run : result.runs) {
            const std::vector<double>& curve = curve_of(run);
            if (run.learner == l && t < curve.size()) values.push_back(curve[t]);
          }
          if (values.empty()) return;
          const SummaryStats s = summarize(values);
          out << labels[l] << ',' << t + 1 << ',' << metric << ',' << fmt(s.mean) << ',' << fmt(s.p10) << ','
              << fmt(s.p90) << '\n';
        };
        emit("stackelberg_regret", [](const RunOutcome& r) -> const std::vector<double>& { return r.stackelberg_regret; });
        emit("external_regret", [](const RunOutcome& r) -> const std::vector<double>& { return r.external_regret; });
        emit("cumulative_loss", [](const RunOutcome& r) -> const std::vector<double>& { return r.cumulative_loss; });
      }
    }
  }
  if (config.action_set.mode == ActionMode::Discrete) {
    auto out = open_for_write(dir / "actions.csv");
    out << "index";
    for (int k = 0; k <= d; ++k) out << ",coord_" << k;
    out << '\n';
    const auto actions = build_action_set(config);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      out << i;
      for (int k = 0; k <= d; ++k) out << ',' << fmt(actions[i](k));
      out << '\n';
    }
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  // Fail on an unwritable destination before spending time on the runs.
  std::error_code ec;
  std::filesystem::create_directories(config.output, ec);
  if (ec || !std::filesystem::is_directory(config.output))
    throw IoError("output: cannot create directory " + config.output.string());
  ExperimentResult result = run_all(config);
  write_outputs(config, result);
  return result;
}

}  // namespace grinder
