// Command-line front end: run, validate, verify, list.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cvarbandit/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"CVaR combinatorial semi-bandit experiments"};
  app.require_subcommand(1);

  std::string config_path;
  cvarbandit::RunOverrides overrides;
  std::optional<std::string> output_directory;
  std::optional<int> workers;
  std::optional<std::int64_t> thinning;

  auto* run = app.add_subcommand("run", "Run an experiment and write trace and summary files");
  run->add_option("-c,--config", config_path, "Experiment configuration file")->required();
  run->add_option("-o,--output-dir", output_directory, "Overrides output.directory");
  run->add_option("-w,--workers", workers, "Overrides workers")->check(CLI::PositiveNumber);
  run->add_option("--thinning", thinning, "Overrides thinning")->check(CLI::PositiveNumber);
  run->add_flag("-q,--quiet", overrides.quiet, "Suppress the run report");

  auto* validate = app.add_subcommand("validate", "Check a configuration file");
  validate->add_option("-c,--config", config_path, "Experiment configuration file")->required();

  std::string scale = "quick";
  auto* verify = app.add_subcommand("verify", "Cross-check the distribution arithmetic");
  verify->add_option("-s,--scale", scale, "quick or full")
      ->check(CLI::IsMember({"quick", "full"}));

  bool json = false;
  auto* list = app.add_subcommand("list", "List algorithms and their config fields");
  list->add_flag("--json", json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << '\n' << app.help();
    return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
  }

  try {
    if (run->parsed()) {
      overrides.output_directory = output_directory;
      overrides.workers = workers;
      overrides.thinning = thinning;
      return cvarbandit::cmd_run(config_path, overrides, std::cout, std::cerr);
    }
    if (validate->parsed()) return cvarbandit::cmd_validate(config_path, std::cout, std::cerr);
    if (verify->parsed()) {
      return cvarbandit::cmd_verify(
          scale == "full" ? cvarbandit::verify::Scale::kFull : cvarbandit::verify::Scale::kQuick,
          std::cout);
    }
    return cvarbandit::cmd_list(json, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
