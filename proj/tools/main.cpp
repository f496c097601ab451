#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "config.hpp"
#include "itmcmc/errors.hpp"
#include "runner.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 runtime/numeric error.
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is)
    throw itmcmc::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive Metropolis / interacting tempering sampler"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed_override = 0;
  bool have_seed = false;

  const char* names[] = {"run-am", "run-it", "toy", "diagnose"};
  const char* descs[] = {
      "Adaptive Metropolis run (trace CSV + summary)",
      "K-stage interacting tempering run (one trace CSV per level)",
      "Two-state schedule chain (trace CSV + exact diagnostics CSV)",
      "Numerical checks battery (report CSV + summary)"};
  for (int i = 0; i < 4; ++i) {
    auto* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", config_path, "Run configuration file")
        ->required();
    sub->add_option("--seed", seed_override, "Override the config seed");
    sub->add_option("--out", out_dir, "Override the output directory");
    sub->callback([&, i] {
      have_seed = app.get_subcommand(names[i])
                      ->get_option("--seed")
                      ->count() > 0;
    });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    itmcmc::cli::RunConfig cfg =
        itmcmc::cli::parse_config(read_file(config_path));
    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub != itmcmc::cli::to_string(cfg.command))
      throw itmcmc::ConfigError("config declares command '" +
                                std::string(itmcmc::cli::to_string(cfg.command)) +
                                "' but subcommand '" + sub + "' was invoked");
    if (have_seed) cfg.seed = seed_override;
    if (!out_dir.empty()) cfg.output_path = out_dir;

    const auto outputs = itmcmc::cli::run(cfg);
    for (const auto& f : outputs.files_written) std::cout << f << "\n";
    return 0;
  } catch (const itmcmc::ConfigError& e) {
    std::cerr << "itmcmc: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "itmcmc: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "itmcmc: run: " << e.what() << "\n";
    return kExitRuntime;
  }
}
