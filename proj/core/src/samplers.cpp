#include "itmcmc/samplers.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "itmcmc/errors.hpp"

namespace itmcmc {

namespace {

constexpr double kRwmScale = 2.38 * 2.38;  // optimal-scaling constant, squared

Eigen::MatrixXd cholesky_or_throw(const Eigen::MatrixXd& cov,
                                  const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw ConfigError(std::string(what) +
                      ": proposal covariance is not positive definite");
  return llt.matrixL();
}

// Shared RWM core working on a prefactored Cholesky factor and a generic
// log-density callable.
template <typename LogDens>
StepResult rwm_step_chol(const Eigen::VectorXd& x, const Eigen::MatrixXd& L,
                         const LogDens& logd, RngStream& rng) {
  const Eigen::VectorXd z = rng.normal_vector(x.size());
  const Eigen::VectorXd y = x + L * z;
  const double lx = logd(x);
  const double ly = logd(y);
  if (lx == -std::numeric_limits<double>::infinity())
    throw NumericError("rwm_step: current state has zero density");
  const double log_u = std::log(rng.uniform01());
  if (log_u < std::min(0.0, ly - lx)) return {y, true};
  return {x, false};
}

template <typename Density>
StepResult rwm_step_impl(const Eigen::VectorXd& x,
                         const Eigen::MatrixXd& proposal_cov,
                         const Density& target, RngStream& rng) {
  if (x.size() != target.dim())
    throw std::invalid_argument("rwm_step: state dimension mismatch");
  const Eigen::MatrixXd L = cholesky_or_throw(proposal_cov, "rwm_step");
  return rwm_step_chol(
      x, L, [&](const Eigen::VectorXd& p) { return target.log_density(p); },
      rng);
}

template <typename Density>
ChainTrace run_srwm_impl(const Density& target, const Eigen::VectorXd& x0,
                         const Eigen::MatrixXd& proposal_cov, long long steps,
                         RngStream& rng) {
  if (steps < 1) throw ConfigError("run_srwm: steps must be >= 1");
  const Eigen::MatrixXd L = cholesky_or_throw(proposal_cov, "run_srwm");
  ChainTrace trace;
  trace.states.reserve(steps);
  trace.accepted.reserve(steps);
  trace.move_kind.reserve(steps);
  Eigen::VectorXd x = x0;
  for (long long n = 0; n < steps; ++n) {
    auto [y, acc] = rwm_step_chol(
        x, L, [&](const Eigen::VectorXd& p) { return target.log_density(p); },
        rng);
    x = std::move(y);
    trace.states.push_back(x);
    trace.accepted.push_back(acc);
    trace.move_kind.push_back(MoveKind::kLocal);
  }
  return trace;
}

}  // namespace

AdaptiveState AdaptiveState::initial(int dim, double kappa,
                                     const Eigen::MatrixXd& gamma0) {
  if (!(kappa > 0.0)) throw ConfigError("AdaptiveState: kappa must be > 0");
  if (gamma0.rows() != dim || gamma0.cols() != dim)
    throw ConfigError("AdaptiveState: gamma0 has wrong shape");
  return {Eigen::VectorXd::Zero(dim), gamma0, 0, kappa};
}

AdaptiveState AdaptiveState::initial_zero(int dim, double kappa) {
  return initial(dim, kappa, Eigen::MatrixXd::Zero(dim, dim));
}

AdaptiveState am_update(const AdaptiveState& s, const Eigen::VectorXd& x_new) {
  if (x_new.size() != s.mean.size())
    throw std::invalid_argument("am_update: sample dimension mismatch");
  const double np1 = static_cast<double>(s.count + 1);
  const Eigen::VectorXd delta = x_new - s.mean;  // uses the old mean
  AdaptiveState out;
  out.mean = s.mean + delta / np1;
  out.cov = (static_cast<double>(s.count) / np1) * s.cov +
            (delta * delta.transpose() +
             s.kappa * Eigen::MatrixXd::Identity(s.dim(), s.dim())) /
                np1;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  out.count = s.count + 1;
  out.kappa = s.kappa;
  return out;
}

Eigen::MatrixXd am_proposal_cov(const AdaptiveState& s) {
  Eigen::LLT<Eigen::MatrixXd> llt(s.cov);
  if (llt.info() != Eigen::Success)
    throw ConfigError("am_proposal_cov: Gamma is not SPD (no update yet?)");
  return (kRwmScale / static_cast<double>(s.dim())) * s.cov;
}

StepResult rwm_step(const Eigen::VectorXd& x,
                    const Eigen::MatrixXd& proposal_cov,
                    const TargetDensity& target, RngStream& rng) {
  return rwm_step_impl(x, proposal_cov, target, rng);
}

StepResult rwm_step(const Eigen::VectorXd& x,
                    const Eigen::MatrixXd& proposal_cov,
                    const TemperedDensity& target, RngStream& rng) {
  return rwm_step_impl(x, proposal_cov, target, rng);
}

ChainTrace run_srwm(const TargetDensity& target, const Eigen::VectorXd& x0,
                    const Eigen::MatrixXd& proposal_cov, long long steps,
                    RngStream& rng) {
  return run_srwm_impl(target, x0, proposal_cov, steps, rng);
}

ChainTrace run_srwm(const TemperedDensity& target, const Eigen::VectorXd& x0,
                    const Eigen::MatrixXd& proposal_cov, long long steps,
                    RngStream& rng) {
  return run_srwm_impl(target, x0, proposal_cov, steps, rng);
}

ChainTrace run_am(const TargetDensity& target, const Eigen::VectorXd& x0,
                  const Eigen::MatrixXd& gamma0, double kappa, long long steps,
                  RngStream& rng, long long snapshot_stride) {
  if (steps < 1) throw ConfigError("run_am: steps must be >= 1");
  const int d = target.dim();
  if (x0.size() != d) throw ConfigError("run_am: x0 dimension mismatch");
  AdaptiveState state = AdaptiveState::initial(d, kappa, gamma0);

  ChainTrace trace;
  trace.states.reserve(steps);
  trace.accepted.reserve(steps);
  trace.move_kind.reserve(steps);
  trace.snapshot_stride = snapshot_stride;

  const Eigen::MatrixXd fallback_cov =
      (kRwmScale / d) * kappa * Eigen::MatrixXd::Identity(d, d);

  Eigen::VectorXd x = x0;
  for (long long n = 0; n < steps; ++n) {
    Eigen::MatrixXd cov;
    if (state.count == 0) {
      // Gamma_0 may be 0 (or otherwise singular); kappa*Id is the documented
      // fallback before the first update.
      try {
        cov = am_proposal_cov(state);
      } catch (const ConfigError&) {
        cov = fallback_cov;
      }
    } else {
      cov = am_proposal_cov(state);
    }
    auto [y, acc] = rwm_step(x, cov, target, rng);
    x = std::move(y);
    state = am_update(state, x);
    trace.states.push_back(x);
    trace.accepted.push_back(acc);
    trace.move_kind.push_back(MoveKind::kLocal);
    if (snapshot_stride > 0 &&
        ((n + 1) % snapshot_stride == 0 || n + 1 == steps))
      trace.param_snapshots.push_back(state);
  }
  return trace;
}

double it_acceptance(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                     const TargetDensity& target, double beta) {
  const double lx = target.log_density(x);
  const double ly = target.log_density(y);
  if (lx == -std::numeric_limits<double>::infinity())
    throw NumericError("it_acceptance: current state has zero density");
  if (ly == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::exp(std::min(0.0, beta * (ly - lx)));
}

ItStepResult it_step(const Eigen::VectorXd& x, const EmpiricalMeasure& hist,
                     std::size_t hist_limit,
                     const Eigen::MatrixXd& local_proposal_cov,
                     const TemperedDensity& level, double beta, double upsilon,
                     RngStream& branch_rng, RngStream& move_rng) {
  const double u_branch = branch_rng.uniform01();
  const bool want_interaction = u_branch < upsilon;
  const std::size_t avail = std::min(hist_limit, hist.count());
  if (want_interaction && avail >= 1) {
    const double u_accept = branch_rng.uniform01();
    const std::size_t idx =
        static_cast<std::size_t>(branch_rng.uniform_index(avail));
    const Eigen::VectorXd& z = hist.at(idx);
    const double alpha = it_acceptance(x, z, level.base(), beta);
    if (u_accept < alpha) return {z, MoveKind::kInteraction, true, false};
    return {x, MoveKind::kInteraction, false, false};
  }
  auto [y, acc] = rwm_step(x, local_proposal_cov, level, move_rng);
  return {std::move(y), MoveKind::kLocal, acc, want_interaction};
}

ItStepResult it_step(const Eigen::VectorXd& x, const EmpiricalMeasure& hist,
                     const Eigen::MatrixXd& local_proposal_cov,
                     const TemperedDensity& level, double beta, double upsilon,
                     RngStream& rng) {
  return it_step(x, hist, hist.count(), local_proposal_cov, level, beta,
                 upsilon, rng, rng);
}

void LadderConfig::validate(int dim) const {
  if (temperatures.empty())
    throw ConfigError("LadderConfig: temperatures must be nonempty");
  if (temperatures.front() != 1.0)
    throw ConfigError("LadderConfig: first temperature must be exactly 1");
  for (std::size_t i = 1; i < temperatures.size(); ++i)
    if (!(temperatures[i] > temperatures[i - 1]))
      throw ConfigError("LadderConfig: temperatures must be strictly ascending");
  if (!(upsilon > 0.0 && upsilon < 1.0))
    throw ConfigError("LadderConfig: upsilon must lie strictly inside (0,1)");
  if (proposal_covs.size() != temperatures.size())
    throw ConfigError("LadderConfig: need one proposal covariance per level");
  for (const auto& c : proposal_covs)
    if (c.rows() != dim || c.cols() != dim)
      throw ConfigError("LadderConfig: proposal covariance has wrong shape");
  if (steps < 1) throw ConfigError("LadderConfig: steps must be >= 1");
  if (burn_in < 0 || burn_in >= steps)
    throw ConfigError("LadderConfig: burn_in must lie in [0, steps)");
}

std::vector<ChainTrace> run_it_ladder(const LadderConfig& cfg,
                                      const TargetDensity& target,
                                      const std::vector<Eigen::VectorXd>& x0s,
                                      const RngStream& rng) {
  const int d = target.dim();
  cfg.validate(d);
  const int K = cfg.levels();
  if (static_cast<int>(x0s.size()) != K)
    throw ConfigError("run_it_ladder: need one initial state per level");
  for (const auto& x0 : x0s)
    if (x0.size() != d)
      throw ConfigError("run_it_ladder: initial state dimension mismatch");

  // Per-level tempered targets, Cholesky factors, and streams.
  std::vector<TemperedDensity> levels;
  levels.reserve(K);
  std::vector<Eigen::MatrixXd> chols;
  std::vector<RngStream> move_rngs, branch_rngs;
  for (int k = 1; k <= K; ++k) {
    levels.emplace_back(target, cfg.temperatures[k - 1]);
    chols.push_back(
        cholesky_or_throw(cfg.proposal_covs[k - 1], "run_it_ladder"));
    move_rngs.push_back(rng.substream(2 * static_cast<std::uint64_t>(k)));
    branch_rngs.push_back(
        rng.substream(2 * static_cast<std::uint64_t>(k) + 1));
  }
  // Acceptance exponent for the move from level k against level-(k+1)
  // history: beta_k = 1/T_k - 1/T_{k+1}.
  std::vector<double> betas(K, 0.0);
  for (int k = 1; k < K; ++k)
    betas[k - 1] = 1.0 / cfg.temperatures[k - 1] - 1.0 / cfg.temperatures[k];

  std::vector<Eigen::VectorXd> x = x0s;
  std::vector<EmpiricalMeasure> hist(K);
  for (int k = 0; k < K; ++k) hist[k].append(x[k]);  // time-0 entries

  std::vector<ChainTrace> traces(K);
  const long long recorded = cfg.steps - cfg.burn_in;
  for (auto& t : traces) {
    t.states.reserve(recorded);
    t.accepted.reserve(recorded);
    t.move_kind.reserve(recorded);
  }

  for (long long n = 0; n < cfg.steps; ++n) {
    // Sweep for time n+1; upper-level histories are read only up to time n,
    // i.e. the first n+1 entries, even though level K has already appended
    // its time-(n+1) state by the time lower levels move.
    const std::size_t hist_limit = static_cast<std::size_t>(n) + 1;
    for (int k = K; k >= 1; --k) {
      bool acc;
      MoveKind kind;
      if (k == K) {
        auto r = rwm_step_chol(
            x[k - 1], chols[k - 1],
            [&](const Eigen::VectorXd& p) {
              return levels[k - 1].log_density(p);
            },
            move_rngs[k - 1]);
        x[k - 1] = std::move(r.state);
        acc = r.accepted;
        kind = MoveKind::kLocal;
      } else {
        auto r = it_step(x[k - 1], hist[k], hist_limit,
                         cfg.proposal_covs[k - 1], levels[k - 1], betas[k - 1],
                         cfg.upsilon, branch_rngs[k - 1], move_rngs[k - 1]);
        x[k - 1] = std::move(r.state);
        acc = r.accepted;
        kind = r.kind;
      }
      hist[k - 1].append(x[k - 1]);
      if (n >= cfg.burn_in) {
        traces[k - 1].states.push_back(x[k - 1]);
        traces[k - 1].accepted.push_back(acc);
        traces[k - 1].move_kind.push_back(kind);
      }
    }
  }
  return traces;
}

}  // namespace itmcmc
