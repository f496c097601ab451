#include "runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "itmcmc/diagnostics.hpp"
#include "itmcmc/errors.hpp"
#include "itmcmc/samplers.hpp"
#include "itmcmc/toy.hpp"

namespace itmcmc::cli {

namespace {

namespace fs = std::filesystem;

using KvList = std::vector<std::pair<std::string, std::string>>;

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os)
    throw NumericError("writing outputs: cannot open '" + p.string() + "'");
  return os;
}

void write_summary(const fs::path& p, const KvList& kv) {
  auto os = open_out(p);
  for (const auto& [k, v] : kv) os << k << "=" << v << "\n";
}

std::string trace_name(const RunConfig& cfg, int replicate, int level) {
  std::string name = "trace";
  if (cfg.replicates > 1) name += ".rep" + std::to_string(replicate);
  if (level > 0) name += ".level" + std::to_string(level);
  return name + ".csv";
}

std::string file_suffix(const RunConfig& cfg, int replicate) {
  return cfg.replicates > 1 ? ".rep" + std::to_string(replicate) : "";
}

/// Emit a trace with the standard header. Rows are filtered by burn-in and
/// thinning at emission time only; `time_offset` is the global time index
/// of the first trace entry minus one.
void write_trace_csv(const fs::path& p, const itmcmc::ChainTrace& trace,
                     long long time_offset, long long emit_from,
                     long long thinning) {
  auto os = open_out(p);
  const int d =
      trace.states.empty() ? 0 : static_cast<int>(trace.states.front().size());
  os << "step,accepted,move_kind";
  for (int i = 0; i < d; ++i) os << ",x_" << i;
  os << "\n";
  for (long long i = emit_from; i < trace.size(); i += thinning) {
    os << (time_offset + i + 1) << ','
       << static_cast<int>(trace.accepted[static_cast<std::size_t>(i)]) << ','
       << itmcmc::to_string(trace.move_kind[static_cast<std::size_t>(i)]);
    for (int j = 0; j < d; ++j)
      os << ',' << format_double(trace.states[static_cast<std::size_t>(i)][j]);
    os << "\n";
  }
}

itmcmc::TargetDensity build_target(const RunConfig& cfg) {
  if (cfg.target_name == "gaussian") {
    Eigen::VectorXd mean =
        Eigen::Map<const Eigen::VectorXd>(cfg.target_mean.data(), cfg.dim);
    Eigen::VectorXd sd =
        Eigen::Map<const Eigen::VectorXd>(cfg.target_sd.data(), cfg.dim);
    return itmcmc::make_gaussian(mean, sd);
  }
  if (cfg.target_name == "gaussian_mixture")
    return itmcmc::make_gaussian_mixture(cfg.dim, cfg.mixture_mode,
                                         cfg.target_sd[0]);
  throw ConfigError("target '" + cfg.target_name +
                    "' cannot be sampled with this command");
}

itmcmc::ToySchedule build_schedule(const RunConfig& cfg) {
  if (cfg.schedule == "default") return itmcmc::ToySchedule::default_schedule();
  if (cfg.schedule.starts_with("constant:"))
    return itmcmc::ToySchedule::constant(std::stod(cfg.schedule.substr(9)));
  return itmcmc::ToySchedule::power(std::stod(cfg.schedule.substr(6)));
}

KvList base_summary(const RunConfig& cfg, int replicate) {
  KvList kv;
  kv.emplace_back("command", to_string(cfg.command));
  kv.emplace_back("config_hash", config_hash(cfg));
  kv.emplace_back("seed", std::to_string(cfg.seed));
  kv.emplace_back("replicate", std::to_string(replicate));
  kv.emplace_back("steps", std::to_string(cfg.steps));
  return kv;
}

void run_am_replicate(const RunConfig& cfg, int replicate, const fs::path& dir,
                      RunOutputs& outputs) {
  const auto target = build_target(cfg);
  itmcmc::RngStream rng(cfg.seed, static_cast<std::uint64_t>(replicate));
  const Eigen::VectorXd x0 =
      Eigen::Map<const Eigen::VectorXd>(cfg.x0.data(), cfg.dim);
  const Eigen::MatrixXd gamma0 =
      cfg.gamma0_scale * Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);

  const auto trace =
      itmcmc::run_am(target, x0, gamma0, cfg.kappa, cfg.steps, rng);

  const fs::path tp = dir / trace_name(cfg, replicate, 0);
  write_trace_csv(tp, trace, 0, cfg.burn_in, cfg.thinning);
  outputs.files_written.push_back(tp.string());

  KvList kv = base_summary(cfg, replicate);
  kv.emplace_back("dim", std::to_string(cfg.dim));
  kv.emplace_back("kappa", format_double(cfg.kappa));
  kv.emplace_back("acceptance_rate", format_double(trace.acceptance_rate()));
  return write_summary(dir / ("summary" + file_suffix(cfg, replicate) + ".txt"),
                       kv);
}

void run_it_replicate(const RunConfig& cfg, int replicate, const fs::path& dir,
                      RunOutputs& outputs, KvList& kv) {
  const auto target = build_target(cfg);
  itmcmc::RngStream rng(cfg.seed, static_cast<std::uint64_t>(replicate));

  itmcmc::LadderConfig ladder;
  ladder.temperatures = cfg.temperatures;
  ladder.upsilon = cfg.upsilon;
  ladder.steps = cfg.steps;
  ladder.burn_in = cfg.burn_in;
  for (double sd : cfg.proposal_sds)
    ladder.proposal_covs.push_back(sd * sd *
                                   Eigen::MatrixXd::Identity(cfg.dim, cfg.dim));
  const Eigen::VectorXd x0 =
      Eigen::Map<const Eigen::VectorXd>(cfg.x0.data(), cfg.dim);
  std::vector<Eigen::VectorXd> x0s(ladder.levels(), x0);

  const auto traces = itmcmc::run_it_ladder(ladder, target, x0s, rng);

  for (int k = 1; k <= ladder.levels(); ++k) {
    const fs::path tp = dir / trace_name(cfg, replicate, k);
    write_trace_csv(tp, traces[static_cast<std::size_t>(k - 1)], cfg.burn_in, 0,
                    cfg.thinning);
    outputs.files_written.push_back(tp.string());
    const auto& t = traces[static_cast<std::size_t>(k - 1)];
    kv.emplace_back("acceptance_rate.level" + std::to_string(k),
                    format_double(t.acceptance_rate()));
    kv.emplace_back(
        "interaction_moves.level" + std::to_string(k),
        std::to_string(t.count_move_kind(itmcmc::MoveKind::kInteraction)));
  }
}

void run_toy_replicate(const RunConfig& cfg, int replicate, const fs::path& dir,
                       RunOutputs& outputs) {
  const auto sched = build_schedule(cfg);
  itmcmc::RngStream rng(cfg.seed, static_cast<std::uint64_t>(replicate));
  const auto trace = itmcmc::run_toy_chain(sched, cfg.toy_x0, cfg.steps, rng);

  const fs::path tp = dir / trace_name(cfg, replicate, 0);
  write_trace_csv(tp, trace, 0, cfg.burn_in, cfg.thinning);
  outputs.files_written.push_back(tp.string());

  // Exact diagnostics table: theta_n, matrix-product TV to the uniform law,
  // and the frozen-kernel mixing time, on the same emitted rows.
  const fs::path dp =
      dir / ("toy" + file_suffix(cfg, replicate) + ".csv");
  {
    auto os = open_out(dp);
    os << "n,theta_n,exact_tv,m_eps\n";
    itmcmc::DistVec2 p{cfg.toy_x0 == 0 ? 1.0 : 0.0,
                       cfg.toy_x0 == 0 ? 0.0 : 1.0};
    for (long long n = 1; n <= cfg.steps; ++n) {
      const double t = sched.theta(n);
      const double q0 = p.p0 * t + p.p1 * (1.0 - t);
      const double q1 = p.p0 * (1.0 - t) + p.p1 * t;
      p = {q0, q1};
      if (n <= cfg.burn_in || (n - cfg.burn_in - 1) % cfg.thinning != 0)
        continue;
      os << n << ',' << format_double(t) << ','
         << format_double(std::abs(p.p0 - 0.5)) << ','
         << format_double(itmcmc::toy_mixing_time(t, cfg.toy_eps)) << "\n";
    }
  }
  outputs.files_written.push_back(dp.string());

  KvList kv = base_summary(cfg, replicate);
  kv.emplace_back("schedule", cfg.schedule);
  kv.emplace_back("eps", format_double(cfg.toy_eps));
  kv.emplace_back("acceptance_rate", format_double(trace.acceptance_rate()));
  write_summary(dir / ("summary" + file_suffix(cfg, replicate) + ".txt"), kv);
}

bool check_enabled(const RunConfig& cfg, const std::string& name) {
  if (cfg.checks == "all") return true;
  std::stringstream ss(cfg.checks);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (tok == name) return true;
  return false;
}

void run_diagnose_replicate(const RunConfig& cfg, int replicate,
                            const fs::path& dir, RunOutputs& outputs) {
  itmcmc::RngStream rng(cfg.seed, static_cast<std::uint64_t>(replicate));
  KvList kv = base_summary(cfg, replicate);
  std::vector<std::tuple<std::string, std::string, double>> rows;
  auto metric = [&](const std::string& check, const std::string& name,
                    double value) {
    rows.emplace_back(check, name, value);
    kv.emplace_back(name, format_double(value));
  };

  if (check_enabled(cfg, "brute5")) {
    // pi P_{theta*} = pi and pairwise balance of K_{theta*} on randomized
    // 5-state instances, checked against the exact kernel matrix.
    auto sub = rng.substream(1);
    double max_inv = 0.0, max_db = 0.0;
    for (int i = 0; i < cfg.instances; ++i) {
      const auto inst =
          itmcmc::make_random_it_instance(5, /*temperature=*/4.0,
                                          /*upsilon=*/0.3, sub);
      const double beta = 1.0 - 1.0 / inst.temperature;
      const auto oracle = itmcmc::brute_force_it_kernel(
          inst.pi, inst.theta_star, inst.p_local, inst.upsilon, beta);
      const Eigen::VectorXd lhs = oracle.matrix.transpose() * inst.pi;
      max_inv = std::max(max_inv, (lhs - inst.pi).cwiseAbs().maxCoeff());
      const auto k_theta = itmcmc::brute_force_it_kernel(
          inst.pi, inst.theta_star, inst.p_local, 1.0, beta);
      for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 5; ++y) {
          if (x == y) continue;
          max_db = std::max(max_db,
                            std::abs(inst.pi[x] * k_theta.matrix(x, y) -
                                     inst.pi[y] * k_theta.matrix(y, x)));
        }
    }
    metric("brute5", "pi_invariance_max_abs_err", max_inv);
    metric("brute5", "detailed_balance_max_abs_err", max_db);
  }

  if (check_enabled(cfg, "toy-grid")) {
    // Kernel-TV distance vs the closed form 2|theta - theta'| on a dyadic
    // grid where both routes are exact in floating point.
    double max_err = 0.0;
    for (int a = 1; a <= 10; ++a)
      for (int b = 1; b <= 10; ++b) {
        const double t1 = a / 16.0, t2 = b / 16.0;
        const itmcmc::DiscreteKernelOracle k1{itmcmc::ToyKernel{t1}.matrix()};
        const itmcmc::DiscreteKernelOracle k2{itmcmc::ToyKernel{t2}.matrix()};
        max_err = std::max(max_err,
                           std::abs(itmcmc::kernel_tv_sup(k1, k2) -
                                    itmcmc::toy_adaptation_distance(t1, t2)));
      }
    metric("toy-grid", "toy_tv_grid_max_abs_err", max_err);
  }

  if (check_enabled(cfg, "empirical-bound")) {
    // Exact empirical-measure TV bound over a real interacting-tempering
    // history: tv(theta_{n+m}, theta_n) <= 2m/(n+m+1).
    itmcmc::LadderConfig ladder;
    ladder.temperatures = {1.0, 8.0};
    ladder.upsilon = 0.3;
    ladder.steps = std::min<long long>(cfg.steps, 4000);
    ladder.proposal_covs = {Eigen::MatrixXd::Identity(1, 1),
                            36.0 * Eigen::MatrixXd::Identity(1, 1)};
    const auto target = itmcmc::make_gaussian_mixture(1, 5.0, 1.0);
    Eigen::VectorXd x0(1);
    x0 << 5.0;
    auto sub = rng.substream(2);
    const auto traces =
        itmcmc::run_it_ladder(ladder, target, {x0, x0}, sub);
    itmcmc::EmpiricalMeasure hist;
    for (const auto& s : traces[1].states) hist.append(s);
    double max_violation = 0.0;
    const std::size_t total = hist.count();
    for (int gi = 1; gi <= 100; ++gi)
      for (int gj = 1; gj <= 100; ++gj) {
        const std::size_t n1 = static_cast<std::size_t>(
            1 + (total - 2) * static_cast<std::size_t>(gi) / 101);
        const std::size_t m = std::max<std::size_t>(
            1, (total - n1) * static_cast<std::size_t>(gj) / 101);
        const double tv = hist.tv_between_prefixes(n1, n1 + m);
        const double bound = 2.0 * static_cast<double>(m) /
                             static_cast<double>(n1 + m);
        max_violation = std::max(max_violation, tv - bound);
      }
    metric("empirical-bound", "emp_bound_max_violation",
           std::max(0.0, max_violation));
  }

  if (check_enabled(cfg, "drift")) {
    // Monte Carlo drift fit for the SRWM kernel on the 1-d Gaussian, and
    // the exact two-state mode.
    const auto target = itmcmc::make_standard_gaussian(1);
    const itmcmc::DriftFunction w(target, 0.25);
    const Eigen::MatrixXd cov =
        (2.38 * 2.38) * Eigen::MatrixXd::Identity(1, 1);
    auto sub = rng.substream(3);
    std::vector<Eigen::VectorXd> pts;
    for (double v : {0.0, 1.0, -1.0, 3.0, -3.0}) {
      Eigen::VectorXd p(1);
      p << v;
      pts.push_back(p);
    }
    const auto est = itmcmc::estimate_drift(
        [&](const Eigen::VectorXd& x, itmcmc::RngStream& r) {
          return itmcmc::rwm_step(x, cov, target, r).state;
        },
        w, pts, static_cast<int>(cfg.mc_reps), sub);
    metric("drift", "drift_lambda_hat", est.lambda_hat);
    metric("drift", "drift_b_hat", est.b_hat);
    metric("drift", "drift_feasible", est.feasible ? 1.0 : 0.0);
    metric("drift", "drift_degenerate", est.degenerate ? 1.0 : 0.0);

    const itmcmc::DiscreteKernelOracle toy{itmcmc::ToyKernel{0.9}.matrix()};
    Eigen::VectorXd wv(2);
    wv << 1.0, 2.0;
    const auto exact = itmcmc::estimate_drift_exact(toy, wv);
    // b for lambda = 0.5 is 0.9 by hand arithmetic; index 0 of the grid.
    metric("drift", "drift_exact_b_at_0p5_err",
           std::abs(exact.b_for_lambda.front() - 0.9));
  }

  if (check_enabled(cfg, "am-series")) {
    // Partial sums of the observable adaptation series along an AM run.
    const auto target = itmcmc::make_standard_gaussian(1);
    auto sub = rng.substream(4);
    const auto trace = itmcmc::run_am(target, Eigen::VectorXd::Zero(1),
                                      Eigen::MatrixXd::Zero(1, 1), 0.1,
                                      std::min<long long>(cfg.steps, 100000),
                                      sub);
    const itmcmc::DriftFunction w(target, 0.25);
    const auto sums = itmcmc::am_adaptation_partial_sums(
        trace, Eigen::MatrixXd::Zero(1, 1), 0.1, w, 0.5);
    metric("am-series", "am_series_final_partial_sum", sums.back());
    metric("am-series", "am_series_tail_increment",
           sums.back() - sums[sums.size() / 2]);
  }

  const fs::path rp = dir / ("report" + file_suffix(cfg, replicate) + ".csv");
  {
    auto os = open_out(rp);
    os << "check,metric,value\n";
    for (const auto& [c, m, v] : rows)
      os << c << ',' << m << ',' << format_double(v) << "\n";
  }
  outputs.files_written.push_back(rp.string());
  write_summary(dir / ("summary" + file_suffix(cfg, replicate) + ".txt"), kv);
}

}  // namespace

RunOutputs run(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  RunOutputs outputs;
  const fs::path dir(cfg.output_path);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::is_directory(dir))
    throw NumericError("writing outputs: cannot create directory '" +
                       dir.string() + "'");

  for (int r = 0; r < cfg.replicates; ++r) {
    switch (cfg.command) {
      case Command::kRunAm:
        run_am_replicate(cfg, r, dir, outputs);
        break;
      case Command::kRunIt: {
        KvList kv = base_summary(cfg, r);
        kv.emplace_back("dim", std::to_string(cfg.dim));
        kv.emplace_back("upsilon", format_double(cfg.upsilon));
        run_it_replicate(cfg, r, dir, outputs, kv);
        write_summary(dir / ("summary" + file_suffix(cfg, r) + ".txt"), kv);
        break;
      }
      case Command::kToy:
        run_toy_replicate(cfg, r, dir, outputs);
        break;
      case Command::kDiagnose:
        run_diagnose_replicate(cfg, r, dir, outputs);
        break;
    }
  }

  // Wall time is appended to every summary after the fact; it is the only
  // output field excluded from the byte-reproducibility contract.
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  for (int r = 0; r < cfg.replicates; ++r) {
    const fs::path sp = dir / ("summary" + file_suffix(cfg, r) + ".txt");
    std::ofstream os(sp, std::ios::binary | std::ios::app);
    if (os) os << "wall_time_s=" << format_double(wall) << "\n";
    outputs.files_written.push_back(sp.string());
  }
  return outputs;
}

}  // namespace itmcmc::cli
