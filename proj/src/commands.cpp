#include "cvarbandit/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "cvarbandit/config.hpp"
#include "cvarbandit/output.hpp"

namespace cvarbandit {

namespace {

void print_violations(const ConfigError& e, const std::string& path, std::ostream& err) {
  for (const std::string& v : e.violations()) err << path << ": " << v << '\n';
}

struct AlgorithmInfo {
  AlgorithmKind kind;
  const char* environment;
  const char* summary;
  std::vector<const char*> required;
  std::vector<const char*> optional;
};

std::vector<AlgorithmInfo> algorithm_catalog() {
  return {
      {AlgorithmKind::kCucbG, "gaussian",
       "UCB on means and LCB on variances, closed-form Gaussian CVaR index",
       {"environment.variance_bounds.lower", "environment.variance_bounds.upper"},
       {"round_convention"}},
      {AlgorithmKind::kSdcb, "bounded",
       "dominant empirical CDFs convolved per super arm, exact CVaR index", {}, {}},
      {AlgorithmKind::kDSdcb, "bounded", "SDCB with each bound rounded up to an epsilon grid",
       {}, {"epsilon"}},
      {AlgorithmKind::kNaive, "bounded",
       "one empirical law per super arm, ignoring shared arms", {}, {}},
  };
}

}  // namespace

int cmd_run(const std::string& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err) {
  std::optional<ExperimentConfig> parsed;
  try {
    parsed = parse_config_file(config_path);
  } catch (const ConfigError& e) {
    print_violations(e, config_path, err);
    return 1;
  }
  ExperimentConfig& config = *parsed;
  if (overrides.output_directory) config.output.directory = *overrides.output_directory;
  if (overrides.workers) config.experiment.workers = *overrides.workers;
  if (overrides.thinning) config.experiment.thinning = *overrides.thinning;

  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  try {
    result = run_experiment(config.experiment);
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return 1;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path dir(config.output.directory);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    err << "cannot create output directory " << dir << ": " << ec.message() << '\n';
    return 1;
  }
  const auto trace_path = dir / config.output.trace_file;
  const auto summary_path = dir / config.output.summary_file;
  {
    std::ofstream trace(trace_path, std::ios::binary);
    write_trace_csv(trace, result);
    if (!trace.flush()) {
      err << "cannot write " << trace_path << '\n';
      return 1;
    }
  }
  {
    std::ofstream summary(summary_path, std::ios::binary);
    summary << summary_json(config, result).dump(2) << '\n';
    if (!summary.flush()) {
      err << "cannot write " << summary_path << '\n';
      return 1;
    }
  }

  if (!overrides.quiet) {
    out << fmt::format("{} runs in {:.1f} s\n", result.traces.size(), seconds);
    for (const AlgorithmAggregate& a : result.aggregates) {
      out << fmt::format("  {:<7} mean final regret {:.4f}, final-decile optimal rate {:.3f}\n",
                         a.algorithm, a.mean_final_regret, a.final_decile_optimal_rate);
    }
    out << "trace:   " << trace_path.string() << '\n'
        << "summary: " << summary_path.string() << '\n';
  }
  return 0;
}

int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig config = parse_config_file(config_path);
    const ExperimentSpec& s = config.experiment;
    out << fmt::format("{}: ok ({} arms, {} super arms, L = {}, alpha = {}, T = {}, {} seeds)\n",
                       config_path, s.environment.num_arms(), s.environment.action_set().size(),
                       s.environment.action_set().max_size(), s.alpha.value(), s.horizon,
                       s.seed_count);
    return 0;
  } catch (const ConfigError& e) {
    print_violations(e, config_path, err);
    return 1;
  }
}

int cmd_verify(verify::Scale scale, std::ostream& out, const verify::PrimaryOps& ops) {
  const auto results = verify::run_verification(scale, ops);
  int failures = 0;
  for (const verify::CheckResult& r : results) {
    out << fmt::format("[{}] {} ({:.2f} s): {}\n", r.passed ? "PASS" : "FAIL", r.name, r.seconds,
                       r.detail);
    if (!r.passed) ++failures;
  }
  out << fmt::format("{} of {} checks passed\n", results.size() - failures, results.size());
  return failures == 0 ? 0 : 1;
}

int cmd_list(bool json, std::ostream& out) {
  const auto catalog = algorithm_catalog();
  if (json) {
    nlohmann::json list = nlohmann::json::array();
    for (const AlgorithmInfo& a : catalog) {
      list.push_back({{"name", std::string(algorithm_name(a.kind))},
                      {"environment", a.environment},
                      {"description", a.summary},
                      {"required_fields", a.required},
                      {"optional_fields", a.optional}});
    }
    out << list.dump(2) << '\n';
    return 0;
  }
  for (const AlgorithmInfo& a : catalog) {
    out << fmt::format("{:<7} [{}] {}\n", algorithm_name(a.kind), a.environment, a.summary);
    if (!a.required.empty()) out << fmt::format(
          "        requires: {}\n", fmt::join(a.required, ", "));
    if (!a.optional.empty()) out << fmt::format(
          "        optional: {}\n", fmt::join(a.optional, ", "));
  }
  return 0;
}

}  // namespace cvarbandit
