#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "itmcmc/diagnostics.hpp"
#include "itmcmc/errors.hpp"
#include "itmcmc/samplers.hpp"

using namespace itmcmc;

namespace {
Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}
Eigen::VectorXd pt(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}
}  // namespace

TEST_CASE("am_update: first step by hand") {
  auto s = AdaptiveState::initial_zero(2, 0.1);
  const auto s1 = am_update(s, vec2(1.0, 0.0));
  CHECK(s1.count == 1);
  CHECK(s1.mean(0) == 1.0);
  CHECK(s1.mean(1) == 0.0);
  CHECK(s1.cov(0, 0) == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(s1.cov(1, 1) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(s1.cov(0, 1) == 0.0);
  CHECK(s1.cov(1, 0) == 0.0);
}

TEST_CASE("am_update: zero innovation shrinks toward kappa Id") {
  AdaptiveState s;
  s.mean = vec2(0.5, -0.5);
  s.cov = (Eigen::MatrixXd(2, 2) << 2.0, 0.3, 0.3, 1.0).finished();
  s.count = 4;
  s.kappa = 0.1;
  const auto s1 = am_update(s, s.mean);  // new point equals the current mean
  CHECK(s1.mean == s.mean);
  const Eigen::MatrixXd expect =
      (4.0 * s.cov + 0.1 * Eigen::MatrixXd::Identity(2, 2)) / 5.0;
  CHECK((s1.cov - expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("am_update: feeding iid draws recovers Sigma* + kappa Id") {
  const double kappa = 0.05;
  const Eigen::MatrixXd sigma =
      (Eigen::MatrixXd(2, 2) << 1.0, 0.3, 0.3, 2.0).finished();
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(sigma).matrixL();
  RngStream rng(314, 0);
  auto s = AdaptiveState::initial_zero(2, kappa);
  const int n = 100000;
  Eigen::MatrixXd sum_outer = Eigen::MatrixXd::Zero(2, 2);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(2);
  std::vector<Eigen::VectorXd> draws;
  draws.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = L * rng.normal_vector(2);
    draws.push_back(x);
    s = am_update(s, x);
    sum += x;
  }
  const Eigen::VectorXd xbar = sum / n;
  for (const auto& x : draws)
    sum_outer += (x - xbar) * (x - xbar).transpose();
  const Eigen::MatrixXd batch_cov = sum_outer / n;
  const Eigen::MatrixXd oracle =
      batch_cov + kappa * Eigen::MatrixXd::Identity(2, 2);
  const double rel = (s.cov - oracle).norm() / oracle.norm();
  CHECK(rel < 0.02);  // the two estimators agree to sampling error at n = 1e5
}

TEST_CASE("proposal covariance scaling") {
  AdaptiveState s;
  s.mean = pt(0.0);
  s.cov = Eigen::MatrixXd::Identity(1, 1);
  s.count = 3;
  s.kappa = 0.1;
  CHECK(am_proposal_cov(s)(0, 0) == doctest::Approx(5.6644).epsilon(1e-12));

  AdaptiveState s2;
  s2.mean = vec2(0.0, 0.0);
  s2.cov = Eigen::MatrixXd::Identity(2, 2);
  s2.count = 3;
  s2.kappa = 0.1;
  const auto c2 = am_proposal_cov(s2);
  CHECK(c2(0, 0) == doctest::Approx(5.6644 / 2.0).epsilon(1e-12));
  CHECK(c2(0, 1) == 0.0);

  // Linearity: scaling Gamma scales the proposal covariance.
  s2.cov *= 3.5;
  const auto c3 = am_proposal_cov(s2);
  CHECK(c3(0, 0) == doctest::Approx(3.5 * c2(0, 0)).epsilon(1e-14));

  AdaptiveState fresh = AdaptiveState::initial_zero(2, 0.1);
  CHECK_THROWS_AS((void)am_proposal_cov(fresh), ConfigError);
}

TEST_CASE("rwm_step accepts every move on a flat density") {
  const TargetDensity flat(1, [](const Eigen::VectorXd&) { return 0.0; }, 0.0);
  RngStream rng(8);
  Eigen::VectorXd x = pt(0.0);
  const Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(1, 1);
  for (int i = 0; i < 500; ++i) {
    const auto r = rwm_step(x, cov, flat, rng);
    CHECK(r.accepted);
    x = r.state;
  }
}

TEST_CASE("rwm_step draw order and acceptance rule (mirror oracle)") {
  const auto target = make_standard_gaussian(2);
  const Eigen::MatrixXd cov =
      (Eigen::MatrixXd(2, 2) << 2.0, 0.5, 0.5, 1.0).finished();
  const Eigen::MatrixXd L = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();
  RngStream rng(555, 1);
  Eigen::VectorXd x = vec2(0.3, -0.8);
  for (int i = 0; i < 200; ++i) {
    RngStream mirror = rng;  // replay the exact same draws
    const Eigen::VectorXd z = mirror.normal_vector(2);
    const double log_u = std::log(mirror.uniform01());
    const Eigen::VectorXd y = x + L * z;
    const double delta = target.log_density(y) - target.log_density(x);
    const bool expect_accept = log_u < std::min(0.0, delta);

    const auto r = rwm_step(x, cov, target, rng);
    CHECK(r.accepted == expect_accept);
    if (expect_accept)
      CHECK((r.state - y).cwiseAbs().maxCoeff() == 0.0);
    else
      CHECK((r.state - x).cwiseAbs().maxCoeff() == 0.0);
    x = r.state;
  }
}

TEST_CASE("rwm_step rejects a non-SPD proposal covariance") {
  const auto target = make_standard_gaussian(2);
  RngStream rng(1);
  const Eigen::MatrixXd bad =
      (Eigen::MatrixXd(2, 2) << 1.0, 2.0, 2.0, 1.0).finished();
  CHECK_THROWS_AS((void)rwm_step(vec2(0, 0), bad, target, rng), ConfigError);
}

TEST_CASE("empirical acceptance rate matches an independent oracle run") {
  const auto target = make_standard_gaussian(1);
  const Eigen::MatrixXd cov = (2.38 * 2.38) * Eigen::MatrixXd::Identity(1, 1);
  RngStream r1(101, 0), r2(202, 9);  // different seeds entirely
  const auto a = run_srwm(target, pt(0.0), cov, 100000, r1);
  const auto b = run_srwm(target, pt(0.0), cov, 100000, r2);
  const auto acc = [](const ChainTrace& t) { return t.acceptance_rate(); };
  // Batch-means standard errors on the acceptance indicator series.
  const auto se_of = [](const ChainTrace& t) {
    ChainTrace ind;
    for (std::size_t i = 0; i < t.accepted.size(); ++i) {
      Eigen::VectorXd v(1);
      v << static_cast<double>(t.accepted[i]);
      ind.states.push_back(v);
      ind.accepted.push_back(1);
      ind.move_kind.push_back(MoveKind::kLocal);
    }
    return ergodic_average(ind, [](const Eigen::VectorXd& x) { return x[0]; })
        .batch_means_se;
  };
  const double se = std::sqrt(se_of(a) * se_of(a) + se_of(b) * se_of(b));
  CHECK(std::abs(acc(a) - acc(b)) <= 3.0 * se);
}

TEST_CASE("run_am: deterministic, kappa floor, mean identity") {
  const auto target = make_gaussian(vec2(0.0, 0.0), vec2(1.0, 2.0));
  const double kappa = 0.05;
  RngStream r1(77, 0), r2(77, 0);
  const long long steps = 20000;
  const auto t1 = run_am(target, vec2(0, 0), Eigen::MatrixXd::Zero(2, 2),
                         kappa, steps, r1, steps);
  const auto t2 = run_am(target, vec2(0, 0), Eigen::MatrixXd::Zero(2, 2),
                         kappa, steps, r2, steps);

  SUBCASE("bit-identical traces for the same seed") {
    REQUIRE(t1.size() == t2.size());
    for (std::size_t i = 0; i < t1.states.size(); ++i) {
      CHECK(t1.states[i] == t2.states[i]);
      CHECK(t1.accepted[i] == t2.accepted[i]);
    }
  }

  SUBCASE("lambda_min(Gamma_n) >= kappa - 1e-9 at every step") {
    auto s = AdaptiveState::initial_zero(2, kappa);
    for (const auto& x : t1.states) {
      s = am_update(s, x);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.cov);
      CHECK(es.eigenvalues().minCoeff() >= kappa - 1e-9);
      CHECK((s.cov - s.cov.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  SUBCASE("mu_n is the arithmetic mean of X_1..X_n") {
    REQUIRE(!t1.param_snapshots.empty());
    const auto& final_state = t1.param_snapshots.back();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(2);
    for (const auto& x : t1.states) mean += x;
    mean /= static_cast<double>(t1.size());
    CHECK((final_state.mean - mean).norm() / mean.norm() <= 1e-10);
  }
}

TEST_CASE("run_am one-step unrolls to rwm_step plus am_update") {
  const auto target = make_standard_gaussian(1);
  const double kappa = 0.2;
  RngStream r1(31, 4), r2(31, 4);
  const auto trace = run_am(target, pt(1.0), Eigen::MatrixXd::Zero(1, 1),
                            kappa, 1, r1, 1);
  const Eigen::MatrixXd cov0 =
      (2.38 * 2.38) * kappa * Eigen::MatrixXd::Identity(1, 1);
  const auto step = rwm_step(pt(1.0), cov0, target, r2);
  CHECK(trace.states[0] == step.state);
  CHECK(static_cast<bool>(trace.accepted[0]) == step.accepted);
  const auto expect = am_update(AdaptiveState::initial_zero(1, kappa), step.state);
  CHECK(trace.param_snapshots.back().cov == expect.cov);
}
