#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "experiment.hpp"

int main(int argc, char** argv) {
  namespace cli = rdlab::cli;
  CLI::App app{"rdlab: reaction-diffusion attractor experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "rdlab_out";
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::optional<double> tau;

  for (const auto& name : cli::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "64-bit seed (overrides the config)");
    sub->add_option("--override", overrides, "key=value, repeatable");
    if (name == "ladder") sub->add_option("--tau", tau, "total ladder wait");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    cli::Config cfg = config_path.empty() ? cli::Config{} : cli::Config::load(config_path);
    for (const auto& o : overrides) cfg.apply_override(o);
    if (seed) cfg.set("seed", std::to_string(*seed), "--seed");
    if (tau) {
      std::ostringstream v;
      v.precision(17);
      v << *tau;
      cfg.set("ladder.tau", v.str(), "--tau");
    }
    const auto outcome = cli::run(command, cfg, out_dir);
    std::cout << command << ": " << (outcome.status == 0 ? "ok" : "failed") << ", report in "
              << out_dir << "\n";
    return outcome.status;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) {
      const nlohmann::json diag = {{"schema_version", cli::kSchemaVersion},
                                   {"command", command},
                                   {"error", e.what()}};
      std::ofstream(std::filesystem::path(out_dir) / "error.json") << diag.dump(2) << "\n";
    }
    return 1;
  }
}
