#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace itmcmc::cli {

enum class Command { kRunAm, kRunIt, kToy, kDiagnose };

const char* to_string(Command c);
Command command_from_string(const std::string& s);  // throws ConfigError

/// Fully validated run configuration. Parsing is strict: unknown keys,
/// duplicate keys, malformed values, and constraint violations are all
/// reported with the offending line and field. emit_config produces a
/// canonical text form (shortest round-trip decimals) whose re-parse yields
/// an identical RunConfig.
struct RunConfig {
  Command command = Command::kToy;

  // target selection
  std::string target_name;          // gaussian | gaussian_mixture | toy_uniform
  int dim = 1;
  std::vector<double> target_mean;  // gaussian; canonicalized to dim entries
  std::vector<double> target_sd;    // gaussian: dim entries; mixture: 1 entry
  double mixture_mode = 5.0;

  // common run parameters
  long long steps = 1000;
  long long burn_in = 0;
  long long thinning = 1;
  std::uint64_t seed = 0;
  int replicates = 1;
  std::string output_path = ".";
  std::vector<double> x0;  // canonicalized to dim entries

  // run-am
  double kappa = 0.1;
  double gamma0_scale = 0.0;  // Gamma_0 = gamma0_scale * Id

  // run-it
  std::vector<double> temperatures;
  double upsilon = 0.1;
  std::vector<double> proposal_sds;  // one scalar sd per level -> sd^2 * Id

  // toy
  std::string schedule = "default";  // default | constant:<v> | power:<p>
  double toy_eps = 0.1;
  int toy_x0 = 0;

  // diagnose
  std::string checks = "all";
  int instances = 20;
  long long mc_reps = 100000;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(const std::string& text);
std::string emit_config(const RunConfig& cfg);

/// FNV-1a hash of the canonical emitted form, as fixed-width hex.
std::string config_hash(const RunConfig& cfg);

/// Shortest round-trip decimal representation of a binary64 value.
std::string format_double(double v);

}  // namespace itmcmc::cli
