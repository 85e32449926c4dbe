#pragma once

// Subcommand bodies behind the command-line tool. Each returns a process
// exit status and writes human-readable progress to the given streams.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "cvarbandit/verification.hpp"

namespace cvarbandit {

struct RunOverrides {
  std::optional<std::string> output_directory;
  std::optional<int> workers;
  std::optional<std::int64_t> thinning;
  bool quiet = false;
};

int cmd_run(const std::string& config_path, const RunOverrides& overrides, std::ostream& out,
            std::ostream& err);
int cmd_validate(const std::string& config_path, std::ostream& out, std::ostream& err);
int cmd_verify(verify::Scale scale, std::ostream& out, const verify::PrimaryOps& ops = {});
int cmd_list(bool json, std::ostream& out);

}  // namespace cvarbandit
