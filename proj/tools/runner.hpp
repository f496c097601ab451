#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace itmcmc::cli {

struct RunOutputs {
  std::vector<std::string> files_written;
};

/// Execute a validated RunConfig: seeds one RNG stream per replicate,
/// dispatches to the samplers/toy/diagnostics modules, and writes trace
/// CSVs plus a flat key-value summary per replicate under
/// cfg.output_path. Outputs are byte-identical across invocations with the
/// same config, except for the wall_time_s summary line.
RunOutputs run(const RunConfig& cfg);

}  // namespace itmcmc::cli
