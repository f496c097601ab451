#include "itmcmc/toy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "itmcmc/errors.hpp"

namespace itmcmc {

namespace {
void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("toy: theta must lie in [0,1]");
}

void check_dist(const DistVec2& p) {
  if (!(p.p0 >= 0.0 && p.p1 >= 0.0) || std::abs(p.p0 + p.p1 - 1.0) > 1e-14)
    throw std::invalid_argument("toy: invalid two-state distribution");
}
}  // namespace

ToySchedule ToySchedule::default_schedule() {
  return ToySchedule(
      [](long long n) { return std::pow(static_cast<double>(n), -0.25); },
      "default");
}

ToySchedule ToySchedule::constant(double theta) {
  check_theta(theta);
  return ToySchedule([theta](long long) { return theta; },
                     "constant:" + std::to_string(theta));
}

ToySchedule ToySchedule::power(double exponent) {
  if (!(exponent > 0.0))
    throw ConfigError("ToySchedule::power: exponent must be > 0");
  return ToySchedule(
      [exponent](long long n) {
        return std::pow(static_cast<double>(n), -exponent);
      },
      "power:" + std::to_string(exponent));
}

double ToySchedule::theta(long long n) const {
  if (n < 1) throw std::invalid_argument("ToySchedule: n must be >= 1");
  const double t = rule_(n);
  check_theta(t);
  return t;
}

DistVec2 toy_exact_marginal(const ToySchedule& sched, const DistVec2& init,
                            long long n) {
  if (n < 0) throw std::invalid_argument("toy_exact_marginal: n must be >= 0");
  check_dist(init);
  double p0 = init.p0;
  double p1 = init.p1;
  for (long long k = 1; k <= n; ++k) {
    const double t = sched.theta(k);
    const double q0 = p0 * t + p1 * (1.0 - t);
    const double q1 = p0 * (1.0 - t) + p1 * t;
    p0 = q0;
    p1 = q1;
  }
  return {p0, p1};
}

double toy_tv_to_pi(const ToySchedule& sched, const DistVec2& init,
                    long long n) {
  const DistVec2 p = toy_exact_marginal(sched, init, n);
  return std::abs(p.p0 - 0.5);
}

double toy_mixing_time(double theta, double eps) {
  check_theta(theta);
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("toy_mixing_time: eps must lie in (0,1)");
  if (theta == 0.5) return 1.0;
  if (theta == 0.0 || theta == 1.0)
    return std::numeric_limits<double>::infinity();
  return std::log(eps) / std::log(std::abs(1.0 - 2.0 * theta));
}

double toy_adaptation_distance(double theta1, double theta2) {
  check_theta(theta1);
  check_theta(theta2);
  return 2.0 * std::abs(theta1 - theta2);
}

ChainTrace run_toy_chain(const ToySchedule& sched, int x0, long long steps,
                         RngStream& rng) {
  if (x0 != 0 && x0 != 1)
    throw ConfigError("run_toy_chain: initial state must be 0 or 1");
  if (steps < 1) throw ConfigError("run_toy_chain: steps must be >= 1");
  ChainTrace trace;
  trace.states.reserve(steps);
  trace.accepted.reserve(steps);
  trace.move_kind.reserve(steps);
  int x = x0;
  for (long long n = 1; n <= steps; ++n) {
    const double t = sched.theta(n);
    if (!(rng.uniform01() < t)) x = 1 - x;  // stay with probability theta_n
    Eigen::VectorXd s(1);
    s[0] = static_cast<double>(x);
    trace.states.push_back(std::move(s));
    trace.accepted.push_back(1);
    trace.move_kind.push_back(MoveKind::kLocal);
  }
  return trace;
}

}  // namespace itmcmc
