#include "itmcmc/target.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "itmcmc/errors.hpp"

namespace itmcmc {

TargetDensity::TargetDensity(int dim, LogDensityFn log_density,
                             double sup_log_density,
                             std::optional<double> log_normalization)
    : dim_(dim),
      log_density_(std::move(log_density)),
      sup_log_density_(sup_log_density),
      log_normalization_(log_normalization) {
  if (dim_ < 1) throw ConfigError("TargetDensity: dim must be positive");
  if (!log_density_) throw ConfigError("TargetDensity: missing log density");
}

double TargetDensity::log_density(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw std::invalid_argument("log_density: point has dimension " +
                                std::to_string(x.size()) + ", target expects " +
                                std::to_string(dim_));
  return log_density_(x);
}

TemperedDensity::TemperedDensity(TargetDensity base, double temperature)
    : base_(std::move(base)), temperature_(temperature) {
  if (!(temperature >= 1.0))
    throw ConfigError("TemperedDensity: temperature must be >= 1");
}

TargetDensity TemperedDensity::as_target() const {
  const TargetDensity base = base_;
  const double t = temperature_;
  return TargetDensity(
      base.dim(),
      [base, t](const Eigen::VectorXd& x) { return base.log_density(x) / t; },
      base.sup_log_density() / t);
}

DriftFunction::DriftFunction(TargetDensity base, double exponent)
    : base_(std::move(base)), exponent_(exponent) {
  if (!(exponent > 0.0 && exponent < 1.0))
    throw ConfigError("DriftFunction: exponent must lie in (0,1)");
  if (!std::isfinite(base_.sup_log_density()))
    throw ConfigError("DriftFunction: sup_log_density must be finite");
}

double DriftFunction::value(const Eigen::VectorXd& x) const {
  const double l = base_.log_density(x);
  if (l == -std::numeric_limits<double>::infinity())
    return std::numeric_limits<double>::infinity();
  return std::exp(-exponent_ * (l - base_.sup_log_density()));
}

double drift_value(const DriftFunction& w, const Eigen::VectorXd& x) {
  return w.value(x);
}

TargetDensity make_standard_gaussian(int dim) {
  return TargetDensity(
      dim, [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); },
      /*sup_log_density=*/0.0,
      /*log_normalization=*/0.5 * dim * std::log(2.0 * std::numbers::pi));
}

TargetDensity make_gaussian(const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& sd) {
  if (mean.size() != sd.size())
    throw ConfigError("make_gaussian: mean and sd dimensions differ");
  if ((sd.array() <= 0.0).any())
    throw ConfigError("make_gaussian: all sds must be positive");
  const int dim = static_cast<int>(mean.size());
  double log_norm = 0.5 * dim * std::log(2.0 * std::numbers::pi);
  for (int i = 0; i < dim; ++i) log_norm += std::log(sd[i]);
  return TargetDensity(
      dim,
      [mean, sd](const Eigen::VectorXd& x) {
        return -0.5 * ((x - mean).array() / sd.array()).square().sum();
      },
      /*sup_log_density=*/0.0, log_norm);
}

TargetDensity make_gaussian_mixture(int dim, double mode, double sd) {
  if (!(mode > 0.0)) throw ConfigError("make_gaussian_mixture: mode must be > 0");
  if (!(sd > 0.0)) throw ConfigError("make_gaussian_mixture: sd must be > 0");
  const double inv2s2 = 1.0 / (2.0 * sd * sd);
  return TargetDensity(
      dim,
      [dim, mode, inv2s2](const Eigen::VectorXd& x) {
        double q = 0.0;  // shared coordinates 2..d
        for (int i = 1; i < dim; ++i) q += x[i] * x[i];
        const double d1 = x[0] - mode;
        const double d2 = x[0] + mode;
        const double l1 = -(q + d1 * d1) * inv2s2;
        const double l2 = -(q + d2 * d2) * inv2s2;
        // log(exp(l1) + exp(l2)) without under/overflow
        const double m = std::max(l1, l2);
        return m + std::log1p(std::exp(std::min(l1, l2) - m));
      },
      /*sup_log_density=*/std::log(2.0),
      /*log_normalization=*/std::log(2.0) +
          0.5 * dim * std::log(2.0 * std::numbers::pi) + dim * std::log(sd));
}

}  // namespace itmcmc
