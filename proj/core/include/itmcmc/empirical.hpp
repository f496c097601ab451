#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <functional>
#include <vector>

namespace itmcmc {

/// Append-only sample history Y_0, Y_1, ... of an auxiliary chain. The
/// empirical measure over the first n+1 entries,
///   theta_n(f) = (n+1)^{-1} sum_{k=0}^{n} f(Y_k),
/// is the adapted parameter of the interacting-tempering kernel. Appending
/// never mutates earlier entries, so prefix measures stay valid.
class EmpiricalMeasure {
 public:
  EmpiricalMeasure() = default;

  void append(Eigen::VectorXd y) { samples_.push_back(std::move(y)); }

  std::size_t count() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Eigen::VectorXd& at(std::size_t i) const { return samples_[i]; }

  /// theta_{c-1}(f): mean of f over the first c entries.
  double integrate_prefix(const std::function<double(const Eigen::VectorXd&)>& f,
                          std::size_t c) const;

  /// Exact total variation distance, in the sup-norm convention
  /// ||mu - nu|| = sup_{|f|<=1} |mu(f) - nu(f)| = sum_atoms |mu - nu|,
  /// between the empirical measures over the first count_a and the first
  /// count_b entries (atoms identified by bit-exact sample values). For
  /// count_a = n+1 and count_b = n+m+1 this is bounded by 2m/(n+m+1).
  double tv_between_prefixes(std::size_t count_a, std::size_t count_b) const;

 private:
  std::vector<Eigen::VectorXd> samples_;
};

}  // namespace itmcmc
