#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <vector>

#include "itmcmc/empirical.hpp"
#include "itmcmc/rng.hpp"
#include "itmcmc/samplers.hpp"
#include "itmcmc/target.hpp"
#include "itmcmc/trace.hpp"

namespace itmcmc {

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

/// Total variation between two discrete distributions in the sup-norm
/// convention ||p - q|| = sup_{|f|<=1} |p(f) - q(f)| = sum_i |p_i - q_i|,
/// so disjoint point masses are at distance 2. This convention makes the
/// two-state kernel distance reproduce 2|theta - theta'| exactly.
double tv_distance_discrete(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Row-stochastic kernel on a small discrete space, used as an exact oracle.
struct DiscreteKernelOracle {
  Eigen::MatrixXd matrix;

  int n_states() const { return static_cast<int>(matrix.rows()); }
  void validate() const;  // rows sum to 1 within 1e-12, entries >= 0
};

/// sup over rows of the TV distance between corresponding rows (the kernel
/// V-variation with V == 1).
double kernel_tv_sup(const DiscreteKernelOracle& p1,
                     const DiscreteKernelOracle& p2);

/// Adaptive-Metropolis kernel-distance bound 2 d kappa^{-1} |Gamma1 -
/// Gamma2| with the Frobenius matrix norm.
double dv_bound_am(const Eigen::MatrixXd& gamma1, const Eigen::MatrixXd& gamma2,
                   double kappa, int d);

/// Exact one-step interacting-tempering kernel (1-upsilon) P + upsilon
/// K_theta on a small space, with
///   K_theta(x,y) = alpha(x,y) theta(y)                      for y != x,
///   K_theta(x,x) = theta(x) + sum_y (1 - alpha(x,y)) theta(y),
///   alpha(x,y)   = 1 ^ (pi(y)/pi(x))^beta.
/// upsilon may take the closed endpoints here (the oracle covers the
/// degenerate cases).
DiscreteKernelOracle brute_force_it_kernel(const Eigen::VectorXd& pi,
                                           const Eigen::VectorXd& theta,
                                           const Eigen::MatrixXd& p_local,
                                           double upsilon, double beta);

/// Randomized small-space instance for exact interacting-tempering checks:
/// a strictly positive target pi, a pi-reversible Metropolized local kernel,
/// and the limit parameter theta* proportional to pi^{1/T}.
struct ItOracleInstance {
  Eigen::VectorXd pi;
  Eigen::MatrixXd p_local;
  Eigen::VectorXd theta_star;
  double temperature = 1.0;
  double upsilon = 0.0;
};

ItOracleInstance make_random_it_instance(int n_states, double temperature,
                                         double upsilon, RngStream& rng);

// ---------------------------------------------------------------------------
// Drift-constant estimation
// ---------------------------------------------------------------------------

using OneStepSampler =
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, RngStream&)>;

/// Fitted pair for the drift inequality P W <= lambda W + b over a set of
/// test points. lambda is chosen on the grid {0.50, 0.51, ..., 0.99}; for
/// each candidate, b is the smallest value making the inequality hold at
/// every test point against the upper Monte Carlo confidence band, and the
/// reported pair minimizes b (ties broken toward smaller lambda).
///
/// degenerate is set when no test point shows contraction (upper band of
/// P W never falls below W), e.g. for the identity kernel; feasible is
/// cleared when some P W estimate is infinite.
struct DriftEstimate {
  double lambda_hat = 1.0;
  double b_hat = 0.0;
  bool feasible = false;
  bool degenerate = false;
  int mc_reps = 0;

  std::vector<Eigen::VectorXd> test_points;  // empty in exact mode
  std::vector<double> w_values;   // W at the test points
  std::vector<double> pw_hat;     // estimated P W
  std::vector<double> pw_se;      // Monte Carlo standard errors (0 = exact)
  std::vector<double> lambda_grid;
  std::vector<double> b_for_lambda;
};

/// Monte Carlo mode: P W(x) is estimated with mc_reps one-step draws per
/// test point; the confidence band is +-3 standard errors.
DriftEstimate estimate_drift(const OneStepSampler& kernel_step,
                             const DriftFunction& w,
                             const std::vector<Eigen::VectorXd>& test_points,
                             int mc_reps, RngStream& rng);

/// Exact mode for discrete kernels: P W is the matrix-vector product, with
/// zero Monte Carlo error.
DriftEstimate estimate_drift_exact(const DiscreteKernelOracle& kernel,
                                   const Eigen::VectorXd& w_values);

// ---------------------------------------------------------------------------
// Ergodic averages
// ---------------------------------------------------------------------------

struct ErgodicReport {
  std::vector<double> running_means;  // running_means[k] = prefix mean to k
  std::optional<double> target_value;
  double final_abs_error = 0.0;  // |final mean - target| when target given
  double n_effective = 0.0;      // batch-means effective sample size
  double batch_means_se = 0.0;   // standard error of the final mean
};

ErgodicReport ergodic_average(
    const ChainTrace& trace,
    const std::function<double(const Eigen::VectorXd&)>& f,
    std::optional<double> target = std::nullopt);

// ---------------------------------------------------------------------------
// Marginal-convergence tests
// ---------------------------------------------------------------------------

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);
double two_sample_ks(std::vector<double> a, std::vector<double> b);
/// Asymptotic one-sample critical value at level alpha (Stephens'
/// finite-sample correction).
double ks_critical_value(double alpha, std::size_t n);

double normal_cdf(double x);

/// 1-d reference law with a frozen histogram binning (Freedman-Diaconis
/// width computed once from the reference quantiles and the pooled sample
/// size) so that histogram-TV statistics are comparable across checkpoints.
struct ReferenceDistribution {
  std::function<double(double)> cdf;
  std::vector<double> bin_edges;  // interior edges; two unbounded tail bins
  std::vector<double> bin_probs;  // size bin_edges.size() + 1

  double quantile(double u) const;  // bisection on the cdf
  static ReferenceDistribution make(std::function<double(double)> cdf,
                                    double lo_search, double hi_search,
                                    std::size_t pooled_n);
};

/// sum_bins |p_hat - p_ref| over the frozen binning (sup-norm convention).
double histogram_tv(const std::vector<double>& samples,
                    const ReferenceDistribution& ref);

struct MarginalStat {
  long long checkpoint = 0;
  double hist_tv = 0.0;
  double ks = 0.0;
};

/// runner(replicate) returns one scalar summary of X_n per checkpoint (same
/// order as `checkpoints`). Values are pooled across replicates (merged
/// deterministically by replicate index) and compared against the
/// reference at every checkpoint.
using ReplicateRunner = std::function<std::vector<double>(int)>;

std::vector<MarginalStat> marginal_convergence_test(
    const ReplicateRunner& runner, const std::vector<long long>& checkpoints,
    int n_replicates, const ReferenceDistribution& ref);

/// KS-only fallback when no computable reference cdf exists: compares the
/// pooled checkpoint samples against same-size draws from an exact sampler
/// via the two-sample KS statistic (hist_tv is NaN in the result).
std::vector<MarginalStat> marginal_convergence_test_ks_only(
    const ReplicateRunner& runner, const std::vector<long long>& checkpoints,
    int n_replicates, const std::function<double(RngStream&)>& exact_sampler,
    RngStream& rng);

// ---------------------------------------------------------------------------
// Adaptation-series checks
// ---------------------------------------------------------------------------

/// Partial sums S_k = sum_{j<=k} j^{-1} * dv_bound_am(Gamma_j, Gamma_{j-1})
/// * W(X_j)^a along an adaptive-Metropolis trace, with the parameter path
/// recomputed exactly from the recorded states. Bounded partial sums are
/// the observable part of the adaptation-series condition (the theoretical
/// ergodicity factors have no computable handle and are omitted).
std::vector<double> am_adaptation_partial_sums(const ChainTrace& trace,
                                               const Eigen::MatrixXd& gamma0,
                                               double kappa,
                                               const DriftFunction& w,
                                               double a);

}  // namespace itmcmc
