#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "itmcmc/rng.hpp"
#include "itmcmc/trace.hpp"

namespace itmcmc {

/// Two-state kernel P_theta = [[theta, 1-theta], [1-theta, theta]] on
/// {0, 1}; rows sum to 1 exactly for any theta in [0,1]. The uniform
/// distribution (1/2, 1/2) is stationary for every theta.
struct ToyKernel {
  double theta = 0.5;

  Eigen::Matrix2d matrix() const {
    Eigen::Matrix2d m;
    m << theta, 1.0 - theta, 1.0 - theta, theta;
    return m;
  }
};

/// Distribution on {0,1}: p0 + p1 = 1, both nonnegative.
struct DistVec2 {
  double p0 = 0.5;
  double p1 = 0.5;
};

/// Deterministic parameter schedule n >= 1 -> theta_n. The default rule is
/// theta_n = n^{-1/4}; note theta_1 = 1 (the kernel is the identity at the
/// first step), theta_n in (0,1) for all n >= 2.
class ToySchedule {
 public:
  static ToySchedule default_schedule();
  static ToySchedule constant(double theta);
  static ToySchedule power(double exponent);  // theta_n = n^{-exponent}

  double theta(long long n) const;  // n >= 1
  const std::string& name() const { return name_; }

 private:
  ToySchedule(std::function<double(long long)> rule, std::string name)
      : rule_(std::move(rule)), name_(std::move(name)) {}
  std::function<double(long long)> rule_;
  std::string name_;
};

/// Exact law after n steps: init * P_{theta_1} * ... * P_{theta_n},
/// computed by exact 2x2 products (the empty product for n = 0).
DistVec2 toy_exact_marginal(const ToySchedule& sched, const DistVec2& init,
                            long long n);

/// Total variation |p0(n) - 1/2| between the exact marginal and the uniform
/// stationary law (classical [0,1] convention; for two states this equals
/// half the sup-norm distance).
double toy_tv_to_pi(const ToySchedule& sched, const DistVec2& init,
                    long long n);

/// Epsilon-mixing time of the frozen kernel P_theta,
/// ln(eps) / ln|1 - 2 theta|. Conventions: theta = 1/2 returns 1 (a single
/// application reaches the stationary law exactly); theta in {0, 1} returns
/// +inf (reducible or periodic chain never gets within eps).
double toy_mixing_time(double theta, double eps);

/// Kernel distance D(theta, theta') = 2 |theta - theta'|: the sup over
/// states of the sup-norm TV distance between the corresponding rows.
double toy_adaptation_distance(double theta1, double theta2);

/// Simulate the nonhomogeneous chain: step n (1-based) moves with kernel
/// P_{theta_n}, consuming one uniform per step (stay iff u < theta_n).
/// States are recorded as 1-d vectors holding 0.0 or 1.0.
ChainTrace run_toy_chain(const ToySchedule& sched, int x0, long long steps,
                         RngStream& rng);

}  // namespace itmcmc
