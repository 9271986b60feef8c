#include <iostream>

#include "CLI11.hpp"
#include "wpt/runner.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Wasserstein parallel transport experiments"};
  wpt::RunRequest req;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("command", req.command, "experiment to run")->required()->check(CLI::IsMember(wpt::runner_commands()));
  app.add_option("--config", req.config_path, "INI configuration file")->required();
  app.add_option("--out", req.out_path, "CSV output path; the JSON summary goes next to it")->required();
  auto *seed_opt = app.add_option("--seed", seed, "random seed, overrides the config");
  auto *threads_opt = app.add_option("--threads", threads, "worker thread cap")->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*seed_opt) req.seed = seed;
  if (*threads_opt) req.threads = threads;
  return wpt::run(req, std::cerr);
}
