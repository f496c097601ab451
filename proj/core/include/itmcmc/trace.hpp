#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "itmcmc/adaptive.hpp"

namespace itmcmc {

enum class MoveKind : std::uint8_t { kLocal = 0, kInteraction = 1 };

inline const char* to_string(MoveKind k) {
  return k == MoveKind::kLocal ? "local" : "interaction";
}

/// Time-indexed record of one chain: states, acceptance flags, move kinds,
/// and (for adaptive runs) thinned parameter snapshots. All per-step lists
/// share the same length.
struct ChainTrace {
  std::vector<Eigen::VectorXd> states;
  std::vector<std::uint8_t> accepted;
  std::vector<MoveKind> move_kind;

  std::vector<AdaptiveState> param_snapshots;  // AM only, thinned
  long long snapshot_stride = 0;               // 0 = no snapshots

  long long size() const { return static_cast<long long>(states.size()); }

  double acceptance_rate() const {
    if (accepted.empty()) return 0.0;
    long long acc = 0;
    for (auto a : accepted) acc += a;
    return static_cast<double>(acc) / static_cast<double>(accepted.size());
  }

  long long count_move_kind(MoveKind k) const {
    long long c = 0;
    for (auto m : move_kind) c += (m == k);
    return c;
  }
};

}  // namespace itmcmc
