#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "htx/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "htx: truncated expansions, bounds, and Monte Carlo checks for "
      "differential equations driven by Holder paths"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;

  CLI::App* run =
      app.add_subcommand("run", "Execute the experiment named in a config");
  run->add_option("--config", config_path, "JSON config file")->required();
  run->add_option("--threads", threads, "Worker thread cap")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory override");

  CLI::App* validate =
      app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("--config", config_path, "JSON config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const nlohmann::json cfg = htx::load_config(config_path);
    if (validate->parsed()) {
      const auto warnings = htx::validate_config(cfg);
      nlohmann::json ok{{"ok", true}};
      if (!warnings.empty()) ok["warnings"] = warnings;
      std::cout << ok.dump(2) << "\n";
      return 0;
    }
    const htx::RunResult res = htx::run_experiment(cfg, out_dir, threads);
    nlohmann::json ok{{"ok", res.status == 0}, {"outputs", res.outputs}};
    if (!res.warnings.empty()) ok["warnings"] = res.warnings;
    std::cout << ok.dump(2) << "\n";
    return res.status;
  } catch (const std::exception& e) {
    const nlohmann::json err{{"ok", false}, {"error", e.what()}};
    std::cerr << err.dump(2) << "\n";
    return 1;
  }
}
