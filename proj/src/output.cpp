#include "cvarbandit/output.hpp"

#include <iterator>

#include <fmt/format.h>

namespace cvarbandit {

void write_trace_csv(std::ostream& out, const ExperimentResult& result) {
  std::string buffer;
  buffer.reserve(1 << 16);
  buffer += kTraceHeader;
  buffer += '\n';
  for (const RegretTrace& trace : result.traces) {
    for (const RoundRecord& r : trace.records) {
      fmt::format_to(std::back_inserter(buffer), "{},{},{},{},{},{}\n", trace.run_id,
                     trace.algorithm, r.t, r.chosen, r.instant_regret, r.cumulative_regret);
      if (buffer.size() > (1 << 16) - 256) {
        out << buffer;
        buffer.clear();
      }
    }
  }
  out << buffer;
}

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result) {
  using nlohmann::json;
  const GapTable& g = result.gaps;
  json super_arms = json::array();
  const ActionSet& actions = config.experiment.environment.action_set();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    super_arms.push_back({{"index", i},
                          {"arms", std::vector<int>(actions[i].arms().begin(),
                                                    actions[i].arms().end())},
                          {"cvar", g.cvar[i]},
                          {"cvar_standard_error", g.cvar_standard_error[i]},
                          {"gap", g.gap[i]}});
  }
  json gaps = {{"best_cvar", g.best_cvar},
               {"optimal", g.optimal},
               {"min_gap", g.min_gap ? json(*g.min_gap) : json(nullptr)},
               {"max_gap", g.max_gap},
               {"super_arms", super_arms}};

  json algorithms = json::array();
  for (const AlgorithmAggregate& a : result.aggregates) {
    json per_seed = json::array();
    for (const RegretTrace& tr : result.traces) {
      if (tr.algorithm != a.algorithm) continue;
      per_seed.push_back(
          {{"run_id", tr.run_id},
           {"final_regret", tr.final_regret},
           {"regret_first_half", tr.regret_first_half},
           {"regret_second_half", tr.regret_second_half},
           {"suboptimal_first_half", tr.suboptimal_first_half},
           {"suboptimal_second_half", tr.suboptimal_second_half},
           {"final_decile_optimal_rate",
            tr.final_decile_rounds > 0
                ? static_cast<double>(tr.final_decile_optimal) / tr.final_decile_rounds
                : 0.0},
           {"pulls", tr.pulls}});
    }
    algorithms.push_back({{"name", a.algorithm},
                          {"runs", a.runs},
                          {"mean_final_regret", a.mean_final_regret},
                          {"final_decile_optimal_rate", a.final_decile_optimal_rate},
                          {"curve", {{"t", a.t}, {"mean", a.mean}, {"std_dev", a.std_dev}}},
                          {"per_seed", per_seed}});
  }
  return {{"config", config_to_json(config)}, {"gap_table", gaps}, {"algorithms", algorithms}};
}

}  // namespace cvarbandit
