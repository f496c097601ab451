#pragma once

#include <Eigen/Core>

namespace itmcmc {

/// Adapted parameter theta = (mu, Gamma) of the adaptive Metropolis chain,
/// plus the regularization floor kappa. After every update Gamma is
/// re-symmetrized; the kappa*Id term in the recursion keeps
/// lambda_min(Gamma_n) >= kappa for all n >= 1.
struct AdaptiveState {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  long long count = 0;
  double kappa = 0.0;

  int dim() const { return static_cast<int>(mean.size()); }

  static AdaptiveState initial(int dim, double kappa,
                               const Eigen::MatrixXd& gamma0);
  static AdaptiveState initial_zero(int dim, double kappa);
};

/// One step of the mean/covariance recursion with the new sample x_new:
///   mu_{n+1}    = mu_n + (x - mu_n) / (n+1)
///   Gamma_{n+1} = n/(n+1) Gamma_n
///                 + 1/(n+1) [ (x - mu_n)(x - mu_n)^T + kappa Id ].
/// The outer product uses the old mean mu_n.
AdaptiveState am_update(const AdaptiveState& s, const Eigen::VectorXd& x_new);

/// Proposal covariance (2.38^2 / d) * Gamma. Throws ConfigError when Gamma
/// is not SPD (possible only before the first update, e.g. Gamma_0 = 0);
/// run_am then falls back to (2.38^2 / d) * kappa * Id.
Eigen::MatrixXd am_proposal_cov(const AdaptiveState& s);

}  // namespace itmcmc
