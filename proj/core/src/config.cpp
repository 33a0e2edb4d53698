#include "grinder/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "grinder/error.hpp"

namespace grinder {

namespace {

using nlohmann::json;

// Reads fields of one JSON object and rejects the ones nobody asked for.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + ": expected an object");
  }

  std::string where(std::string_view key) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    seen_.insert(std::string(key));
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void read(std::string_view key, T& out) {
    if (const json* v = find(key)) out = convert<T>(*v, key);
  }

  template <class T>
  void read(std::string_view key, std::optional<T>& out) {
    if (const json* v = find(key); v && !v->is_null()) out = convert<T>(*v, key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown field");
  }

 private:
  template <class T>
  T convert(const json& v, std::string_view key) const {
    try {
      if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t> || std::is_same_v<T, int>) {
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        if constexpr (!std::is_same_v<T, int>)
          if (v.get<long long>() < 0) throw ConfigError(where(key) + ": must be non-negative");
      }
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(where(key) + ": wrong type");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<Vector> read_vectors(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected a list of vectors");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& row = j[i];
    if (!row.is_array()) throw ConfigError(path + "[" + std::to_string(i) + "]: expected a list of numbers");
    Vector v(static_cast<Eigen::Index>(row.size()));
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!row[k].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]: expected numbers");
      v(static_cast<Eigen::Index>(k)) = row[k].get<double>();
    }
    out.push_back(std::move(v));
  }
  return out;
}

void parse_stream(const json& j, StreamConfig& s) {
  Fields f(j, "stream");
  std::string kind = std::string(to_string(s.kind));
  f.read("kind", kind);
  s.kind = stream_kind_from_string(kind);
  if (const json* g = f.find("gaussian")) {
    Fields gf(*g, "stream.gaussian");
    if (const json* preset = gf.find("preset")) {
      if (*preset != "hard" && *preset != "default") throw ConfigError("stream.gaussian.preset: expected 'default' or 'hard'");
      if (*preset == "hard") s.gaussian = GaussianParams::hard();
    }
    gf.read("pos_mean", s.gaussian.pos_mean);
    gf.read("pos_sd", s.gaussian.pos_sd);
    gf.read("neg_mean", s.gaussian.neg_mean);
    gf.read("neg_sd", s.gaussian.neg_sd);
    gf.read("pos_prob", s.gaussian.pos_prob);
    gf.finish();
  }
  f.read("p", s.spam_p);
  f.read("phases", s.phases);
  std::optional<std::string> regime;
  f.read("forced_regime", regime);
  if (regime) {
    if (*regime == "U") s.forced_regime = Regime::U;
    else if (*regime == "L") s.forced_regime = Regime::L;
    else throw ConfigError("stream.forced_regime: expected 'U' or 'L'");
  }
  f.finish();
}

void parse_oracle(const json& j, OracleConfig& o, const std::string& path) {
  Fields f(j, path);
  std::string kind = std::string(to_string(o.kind));
  f.read("kind", kind);
  o.kind = oracle_kind_from_string(kind);
  f.read("epsilon", o.epsilon);
  f.read("mc_samples", o.mc_samples);
  f.read("recency", o.logistic.recency);
  f.read("window", o.logistic.window);
  f.read("iterations", o.logistic.iterations);
  f.read("step", o.logistic.step);
  f.read("l2", o.logistic.l2);
  f.finish();
}

LearnerConfig parse_learner(const json& j, const OracleConfig& shared, const std::string& path) {
  LearnerConfig l;
  l.oracle = shared;
  if (j.is_string()) {
    l.kind = learner_kind_from_string(j.get<std::string>());
    return l;
  }
  Fields f(j, path);
  std::string kind = std::string(to_string(l.kind));
  f.read("kind", kind);
  l.kind = learner_kind_from_string(kind);
  f.read("label", l.label);
  f.read("eta", l.eta);
  f.read("gamma", l.gamma);
  f.read("volume_floor", l.volume_floor);
  f.read("delta", l.delta);
  if (const json* o = f.find("oracle")) parse_oracle(*o, l.oracle, path + ".oracle");
  f.read("step", l.step);
  f.read("radius", l.radius);
  f.finish();
  return l;
}

}  // namespace

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("GRINDER_OUT_DIR"); env && *env) return env;
  return "grinder-out";
}

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Grinder: return "grinder";
    case LearnerKind::Exp3: return "exp3";
    case LearnerKind::Bgd: return "bgd";
  }
  return "grinder";
}

LearnerKind learner_kind_from_string(std::string_view name) {
  if (name == "grinder") return LearnerKind::Grinder;
  if (name == "exp3") return LearnerKind::Exp3;
  if (name == "bgd") return LearnerKind::Bgd;
  throw ConfigError("learners.kind: unknown learner '" + std::string(name) + "'");
}

std::vector<std::string> ExperimentConfig::learner_labels() const {
  std::vector<std::string> out;
  for (const auto& l : learners) {
    if (!l.label.empty()) out.push_back(l.label);
    else if (l.kind == LearnerKind::Grinder) out.push_back("grinder-" + std::string(to_string(l.oracle.kind)));
    else out.push_back(std::string(to_string(l.kind)));
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (dimension < 1 || dimension + 1 > kMaxExactDim) throw ConfigError("dimension: must lie in [1, 3]");
  if (horizon < 1) throw ConfigError("horizon: must be at least 1");
  if (repetitions < 1) throw ConfigError("repetitions: must be at least 1");
  if (workers < 1) throw ConfigError("workers: must be at least 1");
  if (learners.empty()) throw ConfigError("learners: at least one learner is required");
  stream.validate(dimension);
  agent.validate();
  if (budget.max_polytopes == 0) throw ConfigError("budget.max_polytopes: must be positive");
  if (!(budget.memory_mb > 0.0)) throw ConfigError("budget.memory_mb: must be positive");

  if (action_set.mode == ActionMode::Discrete) {
    if (action_set.explicit_actions.empty() && action_set.size == 0) throw ConfigError("action_set.size: must be positive");
    for (const auto& a : action_set.explicit_actions)
      if (a.size() != dimension + 1) throw ConfigError("action_set.actions: every action needs dimension + 1 coordinates");
  }

  const auto labels = learner_labels();
  for (std::size_t i = 0; i < learners.size(); ++i) {
    const auto& l = learners[i];
    const std::string path = "learners[" + std::to_string(i) + "]";
    for (std::size_t k = 0; k < i; ++k)
      if (labels[k] == labels[i]) throw ConfigError(path + ".label: duplicate label '" + labels[i] + "'");
    try {
      l.oracle.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(path + "." + e.what());
    }
    if (l.eta && !(*l.eta > 0.0 && *l.eta <= 0.5)) throw ConfigError(path + ".eta: must lie in (0, 1/2]");
    if (l.gamma && !(*l.gamma >= 0.0 && *l.gamma <= 1.0)) throw ConfigError(path + ".gamma: must lie in [0, 1]");
    if (!(l.volume_floor >= 0.0)) throw ConfigError(path + ".volume_floor: must be non-negative");
    if (l.delta && !(*l.delta >= 0.0)) throw ConfigError(path + ".delta: must be non-negative");
    if (l.kind == LearnerKind::Exp3 && action_set.mode != ActionMode::Discrete)
      throw ConfigError(path + ".kind: exp3 needs a discrete action set");
    if (l.kind == LearnerKind::Bgd) {
      if (!(l.step > 0.0)) throw ConfigError(path + ".step: must be positive");
      if (!(l.radius > 0.0 && l.radius < 1.0)) throw ConfigError(path + ".radius: must lie in (0, 1)");
    }
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
  }
  ExperimentConfig c;
  Fields f(j, "");
  if (const json* s = f.find("stream")) parse_stream(*s, c.stream);
  if (const json* a = f.find("agent")) {
    Fields af(*a, "agent");
    std::string family = std::string(to_string(c.agent.family));
    af.read("family", family);
    c.agent.family = agent_family_from_string(family);
    af.read("delta", c.agent.delta);
    c.agent.value_coeff = c.agent.delta;
    af.read("value_coeff", c.agent.value_coeff);
    af.finish();
  }
  OracleConfig shared;
  if (const json* o = f.find("oracle")) parse_oracle(*o, shared, "oracle");
  if (const json* ls = f.find("learners")) {
    if (!ls->is_array()) throw ConfigError("learners: expected a list");
    c.learners.clear();
    for (std::size_t i = 0; i < ls->size(); ++i)
      c.learners.push_back(parse_learner((*ls)[i], shared, "learners[" + std::to_string(i) + "]"));
  } else {
    c.learners.front().oracle = shared;
  }
  if (const json* a = f.find("action_set")) {
    Fields af(*a, "action_set");
    std::string mode = "discrete";
    af.read("mode", mode);
    if (mode == "discrete") c.action_set.mode = ActionMode::Discrete;
    else if (mode == "continuous") c.action_set.mode = ActionMode::Continuous;
    else throw ConfigError("action_set.mode: expected 'discrete' or 'continuous'");
    af.read("size", c.action_set.size);
    af.read("seed", c.action_set.seed);
    af.read("candidates", c.action_set.candidates);
    if (const json* acts = af.find("actions")) c.action_set.explicit_actions = read_vectors(*acts, "action_set.actions");
    af.finish();
  }
  if (const json* b = f.find("budget")) {
    Fields bf(*b, "budget");
    bf.read("max_polytopes", c.budget.max_polytopes);
    bf.read("memory_mb", c.budget.memory_mb);
    bf.finish();
  }
  f.read("horizon", c.horizon);
  f.read("repetitions", c.repetitions);
  f.read("seed", c.seed);
  f.read("dimension", c.dimension);
  std::string output = c.output.string();
  f.read("output", output);
  c.output = output;
  f.read("workers", c.workers);
  f.finish();
  c.stream.seed = c.seed;
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::vector<Vector> build_action_set(const ExperimentConfig& config) {
  if (config.action_set.mode != ActionMode::Discrete) return {};
  if (!config.action_set.explicit_actions.empty()) return config.action_set.explicit_actions;
  Rng rng(config.action_set.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vector> actions;
  actions.reserve(config.action_set.size);
  for (std::size_t i = 0; i < config.action_set.size; ++i) {
    Vector a(config.dimension + 1);
    for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = u(rng);
    actions.push_back(std::move(a));
  }
  return actions;
}

std::vector<Vector> build_candidates(const ExperimentConfig& config) {
  if (config.action_set.mode == ActionMode::Discrete) return build_action_set(config);
  ExperimentConfig grid = config;
  grid.action_set.mode = ActionMode::Discrete;
  grid.action_set.explicit_actions.clear();
  grid.action_set.size = config.action_set.candidates;
  return config.action_set.candidates == 0 ? std::vector<Vector>{} : build_action_set(grid);
}

}  // namespace grinder
