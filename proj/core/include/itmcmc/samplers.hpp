#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

#include "itmcmc/adaptive.hpp"
#include "itmcmc/empirical.hpp"
#include "itmcmc/rng.hpp"
#include "itmcmc/target.hpp"
#include "itmcmc/trace.hpp"

namespace itmcmc {

// ---------------------------------------------------------------------------
// Random-walk Metropolis
// ---------------------------------------------------------------------------

struct StepResult {
  Eigen::VectorXd state;
  bool accepted = false;
};

/// One symmetric random-walk Metropolis step: propose y = x + L z with
/// L L^T = proposal_cov and z standard normal (d normal draws), then accept
/// iff log U < min(0, log pi(y) - log pi(x)) (one uniform draw, after the
/// normals). Throws ConfigError if the Cholesky factorization fails.
StepResult rwm_step(const Eigen::VectorXd& x,
                    const Eigen::MatrixXd& proposal_cov,
                    const TargetDensity& target, RngStream& rng);
StepResult rwm_step(const Eigen::VectorXd& x,
                    const Eigen::MatrixXd& proposal_cov,
                    const TemperedDensity& target, RngStream& rng);

/// Plain SRWM chain with fixed proposal covariance; records every step.
ChainTrace run_srwm(const TargetDensity& target, const Eigen::VectorXd& x0,
                    const Eigen::MatrixXd& proposal_cov, long long steps,
                    RngStream& rng);
ChainTrace run_srwm(const TemperedDensity& target, const Eigen::VectorXd& x0,
                    const Eigen::MatrixXd& proposal_cov, long long steps,
                    RngStream& rng);

/// Adaptive Metropolis run: at each step, sample X_{n+1} with the proposal
/// built from theta_n, then update theta_n -> theta_{n+1} with X_{n+1}.
/// When snapshot_stride > 0, every stride-th AdaptiveState is recorded in
/// the trace (plus the final one).
ChainTrace run_am(const TargetDensity& target, const Eigen::VectorXd& x0,
                  const Eigen::MatrixXd& gamma0, double kappa, long long steps,
                  RngStream& rng, long long snapshot_stride = 0);

// ---------------------------------------------------------------------------
// Interacting tempering
// ---------------------------------------------------------------------------

/// Acceptance probability of an interaction move x -> y,
///   alpha(x,y) = 1 ^ (pi(y)/pi(x))^beta = exp(min(0, beta (log pi(y) -
///   log pi(x)))),
/// computed on the base (untempered) density. For the two-level sampler
/// beta = 1 - 1/T; for the move from level k against level-(k+1) history,
/// beta = 1/T_k - 1/T_{k+1}.
double it_acceptance(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     const TargetDensity& target, double beta);

struct ItStepResult {
  Eigen::VectorXd state;
  MoveKind kind = MoveKind::kLocal;
  bool accepted = false;
  bool empty_history_fallback = false;
};

/// One interacting-tempering step for the chain at tempered target `level`.
/// Draw order is fixed: one uniform decides the branch; on the interaction
/// branch one more uniform (acceptance) and one discrete uniform (history
/// index) follow, in that order. With probability 1-upsilon the move is a
/// local rwm_step against `level`; with probability upsilon a candidate is
/// drawn uniformly from the first hist_limit history entries and accepted
/// with it_acceptance(x, z, level.base(), beta). An empty history makes the
/// interaction branch fall back to the local branch (flagged in the result).
ItStepResult it_step(const Eigen::VectorXd& x, const EmpiricalMeasure& hist,
                     std::size_t hist_limit,
                     const Eigen::MatrixXd& local_proposal_cov,
                     const TemperedDensity& level, double beta, double upsilon,
                     RngStream& branch_rng, RngStream& move_rng);

/// Single-stream variant (branch and move draws share one stream).
ItStepResult it_step(const Eigen::VectorXd& x, const EmpiricalMeasure& hist,
                     const Eigen::MatrixXd& local_proposal_cov,
                     const TemperedDensity& level, double beta, double upsilon,
                     RngStream& rng);

/// Temperature ladder T_1 = 1 < ... < T_K, interaction probability upsilon,
/// one SPD local proposal covariance per level.
struct LadderConfig {
  std::vector<double> temperatures;
  double upsilon = 0.1;
  std::vector<Eigen::MatrixXd> proposal_covs;
  long long steps = 0;
  long long burn_in = 0;

  int levels() const { return static_cast<int>(temperatures.size()); }
  void validate(int dim) const;  // throws ConfigError
};

/// K-stage interacting tempering. Level K runs as a plain SRWM chain
/// targeting pi^{1/T_K}; each level k < K interacts with the history of
/// level k+1. One synchronized sweep per time step, level K first, then
/// K-1 down to 1; every level's move at time n+1 reads only history entries
/// of its upper level with time index <= n (initial states count as time 0).
///
/// Streams: level k draws local moves from rng.substream(2k) and branch
/// decisions from rng.substream(2k+1), so a level's local-move sequence is
/// reproducible in isolation. Returns one trace per level (levels 1..K, in
/// order), with the first burn_in steps omitted from the traces only --
/// histories always see every sample.
std::vector<ChainTrace> run_it_ladder(const LadderConfig& cfg,
                                      const TargetDensity& target,
                                      const std::vector<Eigen::VectorXd>& x0s,
                                      const RngStream& rng);

}  // namespace itmcmc
