#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace shadowctl;
  CLI::App app{"shadowctl: run shadowing experiments from a JSON config"};
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> command;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "base seed, overrides the config");
  app.add_option("--command", command, "subcommand, overrides the config")->check(CLI::IsMember(kCommands));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const auto doc = ConfigDoc::load(config_path);
    RunRequest req;
    req.command = command ? *command : doc.get_or<std::string>("/command", "");
    if (req.command.empty()) doc.fail("", "no command given (set \"command\" or pass --command)");
    req.seed = seed ? *seed : doc.get_or<std::uint64_t>("/seed", 0);
    req.out = out_dir;
    std::filesystem::create_directories(req.out);
    return run_command(doc, req, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
