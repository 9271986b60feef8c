#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace wpt {

/// Commands understood by run().
const std::vector<std::string> &runner_commands();

struct RunRequest {
  std::string command;
  std::string config_path;
  std::string out_path;                // CSV; the summary goes to out_path + ".json"
  std::optional<std::uint64_t> seed;   // overrides the config's seed
  std::optional<int> threads;          // overrides the config's threads
};

/// Runs one experiment. Returns 0 on success, 2 on a validation or
/// configuration error and 3 on a solver failure; the reason goes to `log`.
int run(const RunRequest &request, std::ostream &log);

}  // namespace wpt
