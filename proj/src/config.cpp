#include "cvarbandit/config.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace cvarbandit {

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(violations.empty() ? "invalid configuration"
                                            : "invalid configuration: " + violations.front()),
      violations_(std::move(violations)) {}

namespace {

class Reader {
 public:
  std::vector<std::string> violations;

  void fail(const YAML::Node& at, const std::string& message) {
    const int line = at.Mark().line;
    violations.push_back(line >= 0 ? fmt::format("line {}: {}", line + 1, message) : message);
  }

  bool expect_map(const YAML::Node& node, const std::string& what,
                  std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) {
      fail(node, what + " must be a mapping");
      return false;
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!keys.contains(key)) fail(kv.first, fmt::format("unknown key '{}' in {}", key, what));
    }
    return true;
  }

  template <typename T>
  std::optional<T> get(const YAML::Node& parent, const char* key, bool required) {
    const YAML::Node node = parent[key];
    if (!node) {
      if (required) fail(parent, fmt::format("missing required key '{}'", key));
      return std::nullopt;
    }
    return convert<T>(node, key);
  }

  template <typename T>
  std::optional<T> convert(const YAML::Node& node, const std::string& what) {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, fmt::format("'{}' has the wrong type", what));
      return std::nullopt;
    }
  }
};

std::optional<DiscreteDistribution> read_atoms(Reader& r, const YAML::Node& node, int arm) {
  if (!node.IsSequence()) {
    r.fail(node, fmt::format("arm {}: atoms must be a list of [value, mass] pairs", arm));
    return std::nullopt;
  }
  std::vector<Atom> atoms;
  for (const auto& pair : node) {
    const auto vm = r.convert<std::vector<double>>(pair, fmt::format("arm {} atom", arm));
    if (!vm) return std::nullopt;
    if (vm->size() != 2) {
      r.fail(pair, fmt::format("arm {}: each atom is a [value, mass] pair", arm));
      return std::nullopt;
    }
    atoms.push_back({(*vm)[0], (*vm)[1]});
  }
  try {
    return DiscreteDistribution(std::move(atoms));
  } catch (const std::invalid_argument& e) {
    r.fail(node, fmt::format("arm {}: {}", arm, e.what()));
    return std::nullopt;
  }
}

std::optional<BoundedArmLaw> read_bounded_arm(Reader& r, const YAML::Node& node, int arm) {
  if (!r.expect_map(node, fmt::format("arm {}", arm), {"atoms", "bernoulli", "beta"})) {
    return std::nullopt;
  }
  if (node.size() != 1) {
    r.fail(node, fmt::format("arm {}: give exactly one of atoms, bernoulli, beta", arm));
    return std::nullopt;
  }
  if (node["atoms"]) {
    if (auto d = read_atoms(r, node["atoms"], arm)) return BoundedArmLaw(*d);
    return std::nullopt;
  }
  if (node["bernoulli"]) {
    const auto p = r.get<double>(node, "bernoulli", true);
    if (!p) return std::nullopt;
    if (!(*p >= 0.0 && *p <= 1.0)) {
      r.fail(node["bernoulli"], fmt::format("arm {}: bernoulli parameter not in [0, 1]", arm));
      return std::nullopt;
    }
    return BoundedArmLaw(DiscreteDistribution::bernoulli(*p));
  }
  const auto ab = r.get<std::vector<double>>(node, "beta", true);
  if (!ab) return std::nullopt;
  if (ab->size() != 2) {
    r.fail(node["beta"], fmt::format("arm {}: beta takes [a, b]", arm));
    return std::nullopt;
  }
  return BoundedArmLaw(BetaLaw{(*ab)[0], (*ab)[1]});
}

std::optional<GaussianParams> read_gaussian_arm(Reader& r, const YAML::Node& node, int arm) {
  if (!r.expect_map(node, fmt::format("arm {}", arm), {"mean", "std_dev"})) return std::nullopt;
  const auto mean = r.get<double>(node, "mean", true);
  const auto sd = r.get<double>(node, "std_dev", true);
  if (!mean || !sd) return std::nullopt;
  try {
    return GaussianParams(*mean, *sd);
  } catch (const std::invalid_argument& e) {
    r.fail(node, fmt::format("arm {}: {}", arm, e.what()));
    return std::nullopt;
  }
}

std::optional<ActionSet> read_action_set(Reader& r, const YAML::Node& parent) {
  const YAML::Node node = parent["action_set"];
  if (!node) {
    r.fail(parent, "missing required key 'action_set'");
    return std::nullopt;
  }
  if (!node.IsSequence()) {
    r.fail(node, "action_set must be a list of arm-id lists");
    return std::nullopt;
  }
  std::vector<SuperArm> arms;
  bool ok = true;
  int index = 0;
  for (const auto& entry : node) {
    const auto ids = r.convert<std::vector<int>>(entry, fmt::format("super arm {}", index));
    if (!ids) {
      ok = false;
    } else {
      try {
        arms.emplace_back(*ids);
      } catch (const std::invalid_argument& e) {
        r.fail(entry, fmt::format("super arm {}: {}", index, e.what()));
        ok = false;
      }
    }
    ++index;
  }
  if (!ok) return std::nullopt;
  return ActionSet(std::move(arms));
}

std::optional<EnvironmentInstance> read_environment(Reader& r, const YAML::Node& root) {
  const YAML::Node node = root["environment"];
  if (!node) {
    r.fail(root, "missing required key 'environment'");
    return std::nullopt;
  }
  if (!r.expect_map(node, "environment", {"kind", "arms", "action_set", "variance_bounds"})) {
    return std::nullopt;
  }
  const auto kind = r.get<std::string>(node, "kind", true);
  if (!kind) return std::nullopt;
  if (*kind != "bounded" && *kind != "gaussian") {
    r.fail(node["kind"], fmt::format("unknown environment kind '{}'", *kind));
    return std::nullopt;
  }
  const bool gaussian = *kind == "gaussian";

  const YAML::Node arms = node["arms"];
  if (!arms || !arms.IsSequence()) {
    r.fail(arms ? arms : node, "environment needs an 'arms' list");
    return std::nullopt;
  }
  std::vector<GaussianParams> gaussian_arms;
  std::vector<BoundedArmLaw> bounded_arms;
  bool ok = true;
  int index = 0;
  for (const auto& arm : arms) {
    if (gaussian) {
      if (auto p = read_gaussian_arm(r, arm, index)) gaussian_arms.push_back(*p); else ok = false;
    } else {
      if (auto law = read_bounded_arm(r, arm, index)) bounded_arms.push_back(*law); else ok = false;
    }
    ++index;
  }
  const auto actions = read_action_set(r, node);

  std::optional<VarianceBounds> bounds;
  if (gaussian) {
    const YAML::Node vb = node["variance_bounds"];
    if (!vb) {
      r.fail(node, "gaussian environments need variance_bounds {lower: N, upper: M}");
    } else if (r.expect_map(vb, "variance_bounds", {"lower", "upper"})) {
      const auto lower = r.get<double>(vb, "lower", true);
      const auto upper = r.get<double>(vb, "upper", true);
      if (lower && upper) bounds = VarianceBounds{*lower, *upper};
    }
    if (!bounds) ok = false;
  } else if (node["variance_bounds"]) {
    r.fail(node["variance_bounds"], "variance_bounds only applies to gaussian environments");
  }
  if (!ok || !actions) return std::nullopt;

  EnvironmentInstance env =
      gaussian ? EnvironmentInstance::gaussian(std::move(gaussian_arms), *actions, *bounds)
               : EnvironmentInstance::bounded(std::move(bounded_arms), *actions);
  for (const std::string& v : validate(env)) r.fail(node, "environment: " + v);
  return env;
}

std::optional<AlgorithmSpec> read_algorithm(Reader& r, const YAML::Node& node, int index) {
  if (!r.expect_map(node, fmt::format("algorithm {}", index),
                    {"name", "epsilon", "round_convention"})) {
    return std::nullopt;
  }
  const auto name = r.get<std::string>(node, "name", true);
  if (!name) return std::nullopt;
  const auto kind = parse_algorithm_kind(*name);
  if (!kind) {
    r.fail(node["name"], fmt::format("unknown algorithm '{}' (known: cucb-g, sdcb, d-sdcb, naive)",
                                     *name));
    return std::nullopt;
  }
  AlgorithmSpec spec{*kind, std::nullopt, RoundConvention::kLiteral};
  if (node["epsilon"]) {
    if (*kind != AlgorithmKind::kDSdcb) {
      r.fail(node["epsilon"], fmt::format("epsilon only applies to d-sdcb, not {}", *name));
    } else if (const auto eps = r.get<double>(node, "epsilon", true)) {
      if (!(*eps > 0.0)) r.fail(node["epsilon"], "epsilon must be positive");
      spec.epsilon = *eps;
    }
  }
  if (node["round_convention"]) {
    const auto rc = r.get<std::string>(node, "round_convention", true);
    if (*kind != AlgorithmKind::kCucbG) {
      r.fail(node["round_convention"], "round_convention only applies to cucb-g");
    } else if (rc == "unified") {
      spec.rounds = RoundConvention::kUnified;
    } else if (rc != "literal") {
      r.fail(node["round_convention"], "round_convention must be literal or unified");
    }
  }
  return spec;
}

ExperimentConfig read_config(const YAML::Node& root) {
  Reader r;
  if (!root.IsMap()) throw ConfigError({"configuration must be a mapping"});
  r.expect_map(root, "configuration",
               {"environment", "alpha", "horizon", "seeds", "algorithms", "workers", "thinning",
                "ground_truth", "output"});

  const auto env = read_environment(r, root);

  std::optional<RiskLevel> alpha;
  if (const auto a = r.get<double>(root, "alpha", true)) {
    if (*a > 0.0 && *a < 1.0) {
      alpha = RiskLevel(*a);
    } else {
      r.fail(root["alpha"], fmt::format("alpha out of range: {} not in (0, 1)", *a));
    }
  }
  const auto horizon = r.get<std::int64_t>(root, "horizon", true);
  if (horizon && *horizon < 1) r.fail(root["horizon"], "horizon must be at least 1");

  int seed_count = 20;
  std::uint64_t master_seed = 0;
  if (const YAML::Node seeds = root["seeds"]) {
    if (r.expect_map(seeds, "seeds", {"count", "master_seed"})) {
      if (auto c = r.get<int>(seeds, "count", false)) seed_count = *c;
      if (auto m = r.get<std::uint64_t>(seeds, "master_seed", false)) master_seed = *m;
      if (seed_count < 1) r.fail(seeds, "seeds.count must be at least 1");
    }
  }

  std::vector<AlgorithmSpec> algorithms;
  const YAML::Node algs = root["algorithms"];
  if (!algs || !algs.IsSequence() || algs.size() == 0) {
    r.fail(algs ? algs : root, "'algorithms' must be a non-empty list");
  } else {
    int index = 0;
    for (const auto& a : algs) {
      if (auto spec = read_algorithm(r, a, index)) {
        if (env) {
          const bool gaussian_alg = spec->kind == AlgorithmKind::kCucbG;
          const bool gaussian_env = env->kind() == EnvironmentKind::kGaussian;
          if (gaussian_alg != gaussian_env) {
            r.fail(a, fmt::format("algorithm/environment kind mismatch: {} on a {} environment",
                                  algorithm_name(spec->kind),
                                  gaussian_env ? "gaussian" : "bounded"));
          }
        }
        const bool repeated = std::any_of(algorithms.begin(), algorithms.end(),
                                          [&](const AlgorithmSpec& s) { return s.kind == spec->kind; });
        if (repeated) {
          r.fail(a, fmt::format("algorithm {} listed more than once", algorithm_name(spec->kind)));
        }
        algorithms.push_back(*spec);
      }
      ++index;
    }
  }

  const int workers = r.get<int>(root, "workers", false).value_or(1);
  if (workers < 1) r.fail(root["workers"], "workers must be at least 1");
  const std::int64_t thinning = r.get<std::int64_t>(root, "thinning", false).value_or(1);
  if (thinning < 1) r.fail(root["thinning"], "thinning must be at least 1");

  GroundTruthOptions truth;
  if (const YAML::Node gt = root["ground_truth"]) {
    if (r.expect_map(gt, "ground_truth",
                     {"monte_carlo_samples", "monte_carlo_seed", "support_cap"})) {
      if (auto n = r.get<std::int64_t>(gt, "monte_carlo_samples", false)) {
        truth.monte_carlo_samples = *n;
        if (*n < 1000) r.fail(gt, "ground_truth.monte_carlo_samples must be at least 1000");
      }
      if (auto s = r.get<std::uint64_t>(gt, "monte_carlo_seed", false)) truth.monte_carlo_seed = *s;
      if (auto c = r.get<std::size_t>(gt, "support_cap", false)) truth.support_cap = *c;
    }
  }

  OutputPaths output;
  if (const YAML::Node out = root["output"]) {
    if (r.expect_map(out, "output", {"directory", "trace_file", "summary_file"})) {
      if (auto d = r.get<std::string>(out, "directory", false)) output.directory = *d;
      if (auto t = r.get<std::string>(out, "trace_file", false)) output.trace_file = *t;
      if (auto s = r.get<std::string>(out, "summary_file", false)) output.summary_file = *s;
    }
  }

  if (env && alpha && horizon && *horizon >= 1 && r.violations.empty()) {
    for (const AlgorithmSpec& a : algorithms) {
      const std::size_t init = make_policy(a, *env, *alpha, *horizon)->init_plan().size();
      if (static_cast<std::size_t>(*horizon) < init) {
        r.fail(root["horizon"], fmt::format("horizon {} is shorter than the {}-round init "
                                            "phase of {}",
                                            *horizon, init, algorithm_name(a.kind)));
      }
    }
  }

  if (!r.violations.empty()) throw ConfigError(std::move(r.violations));
  return ExperimentConfig{
      ExperimentSpec{*env, *alpha, *horizon, std::move(algorithms), seed_count, master_seed,
                     workers, thinning, truth},
      output};
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError({fmt::format("line {}: malformed document: {}", e.mark.line + 1, e.msg)});
  }
  return read_config(root);
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({fmt::format("cannot read configuration file '{}'", path)});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str());
}

nlohmann::json config_to_json(const ExperimentConfig& config) {
  using nlohmann::json;
  const ExperimentSpec& spec = config.experiment;
  const EnvironmentInstance& env = spec.environment;

  json arms = json::array();
  if (env.kind() == EnvironmentKind::kGaussian) {
    for (const GaussianParams& p : env.gaussian_arms()) {
      arms.push_back({{"mean", p.mean}, {"std_dev", p.std_dev}});
    }
  } else {
    for (const BoundedArmLaw& law : env.bounded_arms()) {
      if (const auto* d = std::get_if<DiscreteDistribution>(&law)) {
        json atoms = json::array();
        for (const Atom& a : d->atoms()) atoms.push_back({a.value, a.mass});
        arms.push_back({{"atoms", atoms}});
      } else {
        const auto& b = std::get<BetaLaw>(law);
        arms.push_back({{"beta", {b.a, b.b}}});
      }
    }
  }
  json actions = json::array();
  for (const SuperArm& a : env.action_set().super_arms()) {
    actions.push_back(std::vector<int>(a.arms().begin(), a.arms().end()));
  }
  json environment = {
      {"kind", env.kind() == EnvironmentKind::kGaussian ? "gaussian" : "bounded"},
      {"arms", arms},
      {"action_set", actions}};
  if (env.kind() == EnvironmentKind::kGaussian) {
    environment["variance_bounds"] = {{"lower", env.variance_bounds().lower},
                                      {"upper", env.variance_bounds().upper}};
  }

  json algorithms = json::array();
  for (const AlgorithmSpec& a : spec.algorithms) {
    json entry = {{"name", std::string(algorithm_name(a.kind))}};
    if (a.epsilon) entry["epsilon"] = *a.epsilon;
    if (a.kind == AlgorithmKind::kCucbG) {
      entry["round_convention"] = a.rounds == RoundConvention::kLiteral ? "literal" : "unified";
    }
    algorithms.push_back(entry);
  }

  return {
      {"environment", environment},
      {"alpha", spec.alpha.value()},
      {"horizon", spec.horizon},
      {"seeds", {{"count", spec.seed_count}, {"master_seed", spec.master_seed}}},
      {"algorithms", algorithms},
      {"workers", spec.workers},
      {"thinning", spec.thinning},
      {"ground_truth",
       {{"monte_carlo_samples", spec.ground_truth.monte_carlo_samples},
        {"monte_carlo_seed", spec.ground_truth.monte_carlo_seed},
        {"support_cap", spec.ground_truth.support_cap}}},
      {"output",
       {{"directory", config.output.directory},
        {"trace_file", config.output.trace_file},
        {"summary_file", config.output.summary_file}}},
  };
}

}  // namespace cvarbandit
