#include "itmcmc/empirical.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

namespace itmcmc {

namespace {

// Atoms are grouped by the raw bit pattern of the sample vector: repeated
// states (rejected moves, re-proposed history entries) are exact copies.
struct VecBitsHash {
  std::size_t operator()(const Eigen::VectorXd* v) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(v->data());
    const std::size_t n = static_cast<std::size_t>(v->size()) * sizeof(double);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

struct VecBitsEq {
  bool operator()(const Eigen::VectorXd* a, const Eigen::VectorXd* b) const {
    if (a->size() != b->size()) return false;
    return std::memcmp(a->data(), b->data(),
                       static_cast<std::size_t>(a->size()) * sizeof(double)) == 0;
  }
};

}  // namespace

double EmpiricalMeasure::integrate_prefix(
    const std::function<double(const Eigen::VectorXd&)>& f,
    std::size_t c) const {
  if (c == 0 || c > samples_.size())
    throw std::invalid_argument("integrate_prefix: bad prefix count");
  double acc = 0.0;
  for (std::size_t i = 0; i < c; ++i) acc += f(samples_[i]);
  return acc / static_cast<double>(c);
}

double EmpiricalMeasure::tv_between_prefixes(std::size_t count_a,
                                             std::size_t count_b) const {
  if (count_a == 0 || count_b == 0 || count_a > samples_.size() ||
      count_b > samples_.size())
    throw std::invalid_argument("tv_between_prefixes: bad prefix counts");

  const std::size_t hi = std::max(count_a, count_b);
  std::unordered_map<const Eigen::VectorXd*, std::pair<long long, long long>,
                     VecBitsHash, VecBitsEq>
      counts;
  counts.reserve(hi);
  for (std::size_t i = 0; i < hi; ++i) {
    auto& c = counts[&samples_[i]];
    if (i < count_a) ++c.first;
    if (i < count_b) ++c.second;
  }
  const double na = static_cast<double>(count_a);
  const double nb = static_cast<double>(count_b);
  double tv = 0.0;
  for (const auto& [_, c] : counts)
    tv += std::abs(static_cast<double>(c.first) / na -
                   static_cast<double>(c.second) / nb);
  return tv;
}

}  // namespace itmcmc
