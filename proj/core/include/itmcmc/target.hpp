#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace itmcmc {

using LogDensityFn = std::function<double(const Eigen::VectorXd&)>;

/// Unnormalized target density, handled in log space throughout. Immutable
/// after construction; safe for concurrent reads from multiple chains.
///
/// log_density returns -inf exactly where the density vanishes and is never
/// NaN. sup_log_density is an upper bound for log pi (tight for unimodal
/// built-ins, a valid bound for mixtures); it normalizes drift functions.
class TargetDensity {
 public:
  TargetDensity(int dim, LogDensityFn log_density, double sup_log_density,
                std::optional<double> log_normalization = std::nullopt);

  int dim() const { return dim_; }
  double sup_log_density() const { return sup_log_density_; }
  const std::optional<double>& log_normalization() const {
    return log_normalization_;
  }

  /// log pi(x) up to the target's fixed additive constant. Throws
  /// std::invalid_argument on dimension mismatch.
  double log_density(const Eigen::VectorXd& x) const;

 private:
  int dim_;
  LogDensityFn log_density_;
  double sup_log_density_;
  std::optional<double> log_normalization_;
};

/// pi^{1/T} for a temperature T >= 1, again in log space: the log value at x
/// is exactly base.log_density(x) / T.
class TemperedDensity {
 public:
  TemperedDensity(TargetDensity base, double temperature);

  int dim() const { return base_.dim(); }
  double temperature() const { return temperature_; }
  const TargetDensity& base() const { return base_; }
  double sup_log_density() const {
    return base_.sup_log_density() / temperature_;
  }

  double log_density(const Eigen::VectorXd& x) const {
    return base_.log_density(x) / temperature_;
  }

  /// View this tempered density as a TargetDensity of its own (e.g. to
  /// temper it again, or to drive samplers that take the base type).
  TargetDensity as_target() const;

 private:
  TargetDensity base_;
  double temperature_;
};

/// Drift function W(x) = (pi(x) / sup pi)^{-tau} for tau in (0,1), so W >= 1
/// everywhere and W = 1 at an attained supremum.
class DriftFunction {
 public:
  DriftFunction(TargetDensity base, double exponent);

  double exponent() const { return exponent_; }
  const TargetDensity& base() const { return base_; }

  /// exp(-tau (log pi(x) - sup log pi)); +inf where the density vanishes
  /// (the +inf value is the flag).
  double value(const Eigen::VectorXd& x) const;

 private:
  TargetDensity base_;
  double exponent_;
};

double drift_value(const DriftFunction& w, const Eigen::VectorXd& x);

// Built-in target catalog. All log densities are chosen with unnormalized
// peak 1, i.e. sup log pi = 0 for the unimodal ones.
//
// Every built-in is strictly positive, bounded, and super-exponential with
// regular contours (the tail condition the drift theory needs). That
// property is documented here, not machine-checked: Gaussians decay like
// exp(-c|x|^2), and a finite Gaussian mixture inherits the decay of its
// nearest component, with radial contours outside a compact set.

/// Standard Gaussian on R^d: log pi(x) = -|x|^2 / 2.
TargetDensity make_standard_gaussian(int dim);

/// Gaussian with diagonal covariance diag(sd_i^2) centered at mean.
TargetDensity make_gaussian(const Eigen::VectorXd& mean,
                            const Eigen::VectorXd& sd);

/// Equal-weight two-component Gaussian mixture with unit-peak components
/// centered at +-mode * e_1, isotropic component sd:
///   pi(x) = exp(-|x - a e_1|^2 / (2 sd^2)) + exp(-|x + a e_1|^2 / (2 sd^2)).
/// sup_log_density is the log of the sum of component peaks (log 2), a valid
/// upper bound even when the components overlap.
TargetDensity make_gaussian_mixture(int dim, double mode, double sd);

}  // namespace itmcmc
