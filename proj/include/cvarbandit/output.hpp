#pragma once

// Serialization of experiment results: the per-round trace file and the
// summary document.

#include <ostream>

#include "json.hpp"

#include "cvarbandit/config.hpp"
#include "cvarbandit/harness.hpp"

namespace cvarbandit {

inline constexpr const char* kTraceHeader =
    "run_id,algorithm,t,chosen_super_arm,instant_regret,cum_regret";

// Header line, then one comma-separated row per recorded round. Numbers use
// the shortest representation that round-trips, so reruns are byte-identical.
void write_trace_csv(std::ostream& out, const ExperimentResult& result);

nlohmann::json summary_json(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace cvarbandit
