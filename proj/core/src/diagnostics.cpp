#include "itmcmc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "itmcmc/errors.hpp"

namespace itmcmc {

namespace {

constexpr double kRowSumTol = 1e-12;
constexpr double kBandZ = 3.0;  // Monte Carlo confidence band half-width

void check_distribution(const Eigen::VectorXd& p, const char* what) {
  if ((p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > kRowSumTol)
    throw std::invalid_argument(std::string(what) +
                                ": not a valid probability vector");
}

// Shared fit over the lambda grid given W values and upper bands on P W.
DriftEstimate fit_drift(const std::vector<double>& w_values,
                        const std::vector<double>& pw_hat,
                        const std::vector<double>& pw_se, int mc_reps) {
  DriftEstimate est;
  est.w_values = w_values;
  est.pw_hat = pw_hat;
  est.pw_se = pw_se;
  est.mc_reps = mc_reps;

  const std::size_t m = w_values.size();
  std::vector<double> upper(m);
  bool all_finite = true;
  for (std::size_t i = 0; i < m; ++i) {
    upper[i] = pw_hat[i] + kBandZ * pw_se[i];
    all_finite = all_finite && std::isfinite(upper[i]);
  }

  for (int g = 50; g <= 99; ++g) est.lambda_grid.push_back(0.01 * g);
  est.b_for_lambda.assign(est.lambda_grid.size(),
                          std::numeric_limits<double>::infinity());
  if (!all_finite) {
    est.feasible = false;
    est.b_hat = std::numeric_limits<double>::infinity();
    return est;
  }

  std::size_t best = 0;
  for (std::size_t j = 0; j < est.lambda_grid.size(); ++j) {
    double b = 0.0;  // b >= 0 by definition of the estimate
    for (std::size_t i = 0; i < m; ++i)
      b = std::max(b, upper[i] - est.lambda_grid[j] * w_values[i]);
    est.b_for_lambda[j] = b;
    if (b < est.b_for_lambda[best]) best = j;
  }
  est.lambda_hat = est.lambda_grid[best];
  est.b_hat = est.b_for_lambda[best];
  est.feasible = true;

  // Degenerate when no test point shows contraction: the upper band of P W
  // never falls below W itself (identity-like kernel).
  est.degenerate = true;
  for (std::size_t i = 0; i < m; ++i)
    if (upper[i] < w_values[i] * (1.0 - 1e-12)) est.degenerate = false;
  return est;
}

}  // namespace

double tv_distance_discrete(const Eigen::VectorXd& p,
                            const Eigen::VectorXd& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("tv_distance_discrete: size mismatch");
  check_distribution(p, "tv_distance_discrete");
  check_distribution(q, "tv_distance_discrete");
  return (p - q).cwiseAbs().sum();
}

void DiscreteKernelOracle::validate() const {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 1 || matrix.rows() > 16)
    throw std::invalid_argument(
        "DiscreteKernelOracle: matrix must be square with 1..16 states");
  if ((matrix.array() < 0.0).any())
    throw std::invalid_argument("DiscreteKernelOracle: negative entry");
  for (int i = 0; i < matrix.rows(); ++i)
    if (std::abs(matrix.row(i).sum() - 1.0) > kRowSumTol)
      throw std::invalid_argument("DiscreteKernelOracle: row " +
                                  std::to_string(i) + " does not sum to 1");
}

double kernel_tv_sup(const DiscreteKernelOracle& p1,
                     const DiscreteKernelOracle& p2) {
  if (p1.n_states() != p2.n_states())
    throw std::invalid_argument("kernel_tv_sup: state-count mismatch");
  double sup = 0.0;
  for (int i = 0; i < p1.n_states(); ++i)
    sup = std::max(sup,
                   (p1.matrix.row(i) - p2.matrix.row(i)).cwiseAbs().sum());
  return sup;
}

double dv_bound_am(const Eigen::MatrixXd& gamma1, const Eigen::MatrixXd& gamma2,
                   double kappa, int d) {
  if (gamma1.rows() != gamma2.rows() || gamma1.cols() != gamma2.cols())
    throw std::invalid_argument("dv_bound_am: shape mismatch");
  if (!(kappa > 0.0)) throw std::invalid_argument("dv_bound_am: kappa <= 0");
  return 2.0 * static_cast<double>(d) / kappa * (gamma1 - gamma2).norm();
}

DiscreteKernelOracle brute_force_it_kernel(const Eigen::VectorXd& pi,
                                           const Eigen::VectorXd& theta,
                                           const Eigen::MatrixXd& p_local,
                                           double upsilon, double beta) {
  const int n = static_cast<int>(pi.size());
  check_distribution(pi, "brute_force_it_kernel(pi)");
  check_distribution(theta, "brute_force_it_kernel(theta)");
  if ((pi.array() <= 0.0).any())
    throw std::invalid_argument(
        "brute_force_it_kernel: pi must be strictly positive");
  if (theta.size() != n || p_local.rows() != n || p_local.cols() != n)
    throw std::invalid_argument("brute_force_it_kernel: size mismatch");
  DiscreteKernelOracle local{p_local};
  local.validate();
  if (!(upsilon >= 0.0 && upsilon <= 1.0))
    throw std::invalid_argument("brute_force_it_kernel: upsilon outside [0,1]");
  if (!(beta > 0.0))
    throw std::invalid_argument("brute_force_it_kernel: beta must be > 0");

  Eigen::VectorXd log_pi = pi.array().log();
  Eigen::MatrixXd k_theta = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    double stay = theta[x];  // alpha(x,x) = 1
    for (int y = 0; y < n; ++y) {
      if (y == x) continue;
      const double alpha =
          std::exp(std::min(0.0, beta * (log_pi[y] - log_pi[x])));
      k_theta(x, y) = alpha * theta[y];
      stay += (1.0 - alpha) * theta[y];
    }
    k_theta(x, x) = stay;
  }
  DiscreteKernelOracle out{(1.0 - upsilon) * p_local + upsilon * k_theta};
  out.validate();
  return out;
}

ItOracleInstance make_random_it_instance(int n_states, double temperature,
                                         double upsilon, RngStream& rng) {
  if (n_states < 2 || n_states > 16)
    throw std::invalid_argument("make_random_it_instance: need 2..16 states");
  if (!(temperature > 1.0))
    throw std::invalid_argument("make_random_it_instance: temperature <= 1");
  ItOracleInstance inst;
  inst.temperature = temperature;
  inst.upsilon = upsilon;

  inst.pi.resize(n_states);
  for (int i = 0; i < n_states; ++i) inst.pi[i] = 0.1 + rng.uniform01();
  inst.pi /= inst.pi.sum();

  // Symmetric proposal q, then Metropolis acceptance: the resulting kernel
  // is pi-reversible, so pi P = pi holds exactly (up to rounding).
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n_states, n_states);
  for (int x = 0; x < n_states; ++x)
    for (int y = x + 1; y < n_states; ++y)
      q(x, y) = q(y, x) = rng.uniform01() / static_cast<double>(n_states);
  inst.p_local = Eigen::MatrixXd::Zero(n_states, n_states);
  for (int x = 0; x < n_states; ++x) {
    double off = 0.0;
    for (int y = 0; y < n_states; ++y) {
      if (y == x) continue;
      inst.p_local(x, y) = q(x, y) * std::min(1.0, inst.pi[y] / inst.pi[x]);
      off += inst.p_local(x, y);
    }
    inst.p_local(x, x) = 1.0 - off;
  }

  inst.theta_star = inst.pi.array().pow(1.0 / temperature);
  inst.theta_star /= inst.theta_star.sum();
  return inst;
}

DriftEstimate estimate_drift(const OneStepSampler& kernel_step,
                             const DriftFunction& w,
                             const std::vector<Eigen::VectorXd>& test_points,
                             int mc_reps, RngStream& rng) {
  if (test_points.empty())
    throw std::invalid_argument("estimate_drift: no test points");
  if (mc_reps < 1000)
    throw std::invalid_argument("estimate_drift: mc_reps must be >= 1000");

  std::vector<double> w_values, pw_hat, pw_se;
  for (const auto& x : test_points) {
    w_values.push_back(w.value(x));
    double sum = 0.0, sumsq = 0.0;
    bool finite = true;
    for (int r = 0; r < mc_reps; ++r) {
      const double wy = w.value(kernel_step(x, rng));
      if (!std::isfinite(wy)) {
        finite = false;
        break;
      }
      sum += wy;
      sumsq += wy * wy;
    }
    if (!finite) {
      pw_hat.push_back(std::numeric_limits<double>::infinity());
      pw_se.push_back(0.0);
      continue;
    }
    const double mean = sum / mc_reps;
    const double var =
        std::max(0.0, (sumsq - mc_reps * mean * mean) / (mc_reps - 1));
    pw_hat.push_back(mean);
    pw_se.push_back(std::sqrt(var / mc_reps));
  }
  DriftEstimate est = fit_drift(w_values, pw_hat, pw_se, mc_reps);
  est.test_points = test_points;
  return est;
}

DriftEstimate estimate_drift_exact(const DiscreteKernelOracle& kernel,
                                   const Eigen::VectorXd& w_values) {
  kernel.validate();
  if (w_values.size() != kernel.n_states())
    throw std::invalid_argument("estimate_drift_exact: W size mismatch");
  if ((w_values.array() < 1.0).any())
    throw std::invalid_argument("estimate_drift_exact: W must be >= 1");
  // Plain left-to-right accumulation: the exact mode is hand arithmetic.
  std::vector<double> pwv(static_cast<std::size_t>(kernel.n_states()), 0.0);
  for (int i = 0; i < kernel.n_states(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < kernel.n_states(); ++j)
      acc += kernel.matrix(i, j) * w_values[j];
    pwv[static_cast<std::size_t>(i)] = acc;
  }
  std::vector<double> w(w_values.data(), w_values.data() + w_values.size());
  return fit_drift(w, pwv, std::vector<double>(w.size(), 0.0), 0);
}

ErgodicReport ergodic_average(
    const ChainTrace& trace,
    const std::function<double(const Eigen::VectorXd&)>& f,
    std::optional<double> target) {
  const long long n = trace.size();
  if (n == 0) throw std::invalid_argument("ergodic_average: empty trace");

  ErgodicReport rep;
  rep.target_value = target;
  rep.running_means.resize(n);
  std::vector<double> values(n);
  // Incremental mean m_k = m_{k-1} + (v_k - m_{k-1})/(k+1): exact for
  // constant series and numerically stable for long ones.
  double mean_acc = 0.0;
  for (long long k = 0; k < n; ++k) {
    values[k] = f(trace.states[k]);
    mean_acc += (values[k] - mean_acc) / static_cast<double>(k + 1);
    rep.running_means[k] = mean_acc;
  }
  const double mean = rep.running_means.back();
  if (target) rep.final_abs_error = std::abs(mean - *target);

  // Batch means: batch length floor(sqrt(n)), remainder dropped.
  const long long b = std::max<long long>(1, static_cast<long long>(
                                                 std::floor(std::sqrt(n))));
  const long long nb = n / b;
  if (nb >= 2) {
    const long long used = nb * b;
    double used_mean = 0.0;
    for (long long k = 0; k < used; ++k) used_mean += values[k];
    used_mean /= static_cast<double>(used);
    double var_bm = 0.0;
    for (long long j = 0; j < nb; ++j) {
      double m = 0.0;
      for (long long k = j * b; k < (j + 1) * b; ++k) m += values[k];
      m /= static_cast<double>(b);
      var_bm += (m - used_mean) * (m - used_mean);
    }
    // Asymptotic variance estimate sigma^2_inf = b * var(batch means).
    var_bm = static_cast<double>(b) * var_bm / static_cast<double>(nb - 1);
    rep.batch_means_se = std::sqrt(var_bm / static_cast<double>(used));
    double s2 = 0.0;
    for (long long k = 0; k < n; ++k) s2 += (values[k] - mean) * (values[k] - mean);
    s2 /= static_cast<double>(n - 1);
    rep.n_effective = var_bm > 0.0 ? static_cast<double>(n) * s2 / var_bm
                                   : static_cast<double>(n);
  } else {
    rep.batch_means_se = 0.0;
    rep.n_effective = static_cast<double>(n);
  }
  return rep;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_statistic: no samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - F);
    d = std::max(d, F - static_cast<double>(i) / n);
  }
  return d;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("two_sample_ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_critical_value(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0) || n == 0)
    throw std::invalid_argument("ks_critical_value: bad arguments");
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double sn = std::sqrt(static_cast<double>(n));
  return c / (sn + 0.12 + 0.11 / sn);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ReferenceDistribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw std::invalid_argument("quantile: u must lie in (0,1)");
  double lo = -1.0, hi = 1.0;
  while (cdf(lo) > u) lo *= 2.0;
  while (cdf(hi) < u) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ReferenceDistribution ReferenceDistribution::make(
    std::function<double(double)> cdf, double lo_search, double hi_search,
    std::size_t pooled_n) {
  if (!cdf) throw std::invalid_argument("ReferenceDistribution: missing cdf");
  if (pooled_n < 2)
    throw std::invalid_argument("ReferenceDistribution: pooled_n too small");
  ReferenceDistribution ref;
  ref.cdf = std::move(cdf);
  const double q25 = ref.quantile(0.25);
  const double q75 = ref.quantile(0.75);
  const double lo = std::max(lo_search, ref.quantile(1e-4));
  const double hi = std::min(hi_search, ref.quantile(1.0 - 1e-4));
  const double iqr = std::max(q75 - q25, 1e-12);
  // Freedman-Diaconis width from the reference law and the pooled size.
  const double h =
      2.0 * iqr / std::cbrt(static_cast<double>(pooled_n));
  const int nbins = std::clamp(
      static_cast<int>(std::ceil((hi - lo) / h)), 1, 4096);
  ref.bin_edges.resize(nbins + 1);
  for (int i = 0; i <= nbins; ++i)
    ref.bin_edges[i] = lo + (hi - lo) * static_cast<double>(i) / nbins;
  // Bins: (-inf, e0], (e0, e1], ..., (e_nbins, +inf).
  ref.bin_probs.resize(nbins + 2);
  double prev = 0.0;
  for (int i = 0; i <= nbins; ++i) {
    const double F = ref.cdf(ref.bin_edges[i]);
    ref.bin_probs[i] = F - prev;
    prev = F;
  }
  ref.bin_probs[nbins + 1] = 1.0 - prev;
  return ref;
}

double histogram_tv(const std::vector<double>& samples,
                    const ReferenceDistribution& ref) {
  if (samples.empty()) throw std::invalid_argument("histogram_tv: no samples");
  std::vector<double> counts(ref.bin_probs.size(), 0.0);
  for (double x : samples) {
    const auto it =
        std::lower_bound(ref.bin_edges.begin(), ref.bin_edges.end(), x);
    counts[static_cast<std::size_t>(it - ref.bin_edges.begin())] += 1.0;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    tv += std::abs(counts[i] / static_cast<double>(samples.size()) -
                   ref.bin_probs[i]);
  return tv;
}

namespace {
std::vector<std::vector<double>> pool_replicates(
    const ReplicateRunner& runner, const std::vector<long long>& checkpoints,
    int n_replicates) {
  if (checkpoints.empty() || n_replicates < 1)
    throw std::invalid_argument("marginal_convergence_test: bad sizes");
  std::vector<std::vector<double>> pooled(checkpoints.size());
  for (auto& p : pooled) p.reserve(n_replicates);
  for (int r = 0; r < n_replicates; ++r) {
    const std::vector<double> vals = runner(r);
    if (vals.size() != checkpoints.size())
      throw std::invalid_argument(
          "marginal_convergence_test: runner returned wrong checkpoint count");
    for (std::size_t j = 0; j < vals.size(); ++j) pooled[j].push_back(vals[j]);
  }
  return pooled;
}
}  // namespace

std::vector<MarginalStat> marginal_convergence_test(
    const ReplicateRunner& runner, const std::vector<long long>& checkpoints,
    int n_replicates, const ReferenceDistribution& ref) {
  auto pooled = pool_replicates(runner, checkpoints, n_replicates);
  std::vector<MarginalStat> stats;
  for (std::size_t j = 0; j < checkpoints.size(); ++j)
    stats.push_back({checkpoints[j], histogram_tv(pooled[j], ref),
                     ks_statistic(pooled[j], ref.cdf)});
  return stats;
}

std::vector<MarginalStat> marginal_convergence_test_ks_only(
    const ReplicateRunner& runner, const std::vector<long long>& checkpoints,
    int n_replicates, const std::function<double(RngStream&)>& exact_sampler,
    RngStream& rng) {
  auto pooled = pool_replicates(runner, checkpoints, n_replicates);
  std::vector<MarginalStat> stats;
  for (std::size_t j = 0; j < checkpoints.size(); ++j) {
    std::vector<double> exact(pooled[j].size());
    for (auto& e : exact) e = exact_sampler(rng);
    stats.push_back({checkpoints[j],
                     std::numeric_limits<double>::quiet_NaN(),
                     two_sample_ks(pooled[j], exact)});
  }
  return stats;
}

std::vector<double> am_adaptation_partial_sums(const ChainTrace& trace,
                                               const Eigen::MatrixXd& gamma0,
                                               double kappa,
                                               const DriftFunction& w,
                                               double a) {
  if (trace.size() == 0)
    throw std::invalid_argument("am_adaptation_partial_sums: empty trace");
  if (!(a > 0.0 && a <= 1.0))
    throw std::invalid_argument("am_adaptation_partial_sums: a must be in (0,1]");
  const int d = static_cast<int>(trace.states.front().size());
  AdaptiveState state = AdaptiveState::initial(d, kappa, gamma0);
  std::vector<double> sums;
  sums.reserve(trace.size());
  double acc = 0.0;
  for (long long k = 0; k < trace.size(); ++k) {
    const AdaptiveState next = am_update(state, trace.states[k]);
    const double dv = dv_bound_am(next.cov, state.cov, kappa, d);
    const double wk = std::pow(w.value(trace.states[k]), a);
    acc += dv * wk / static_cast<double>(k + 1);
    sums.push_back(acc);
    state = next;
  }
  return sums;
}

}  // namespace itmcmc
