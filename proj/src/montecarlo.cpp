#include "ucoint/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "ucoint/errors.hpp"
#include "ucoint/random.hpp"

namespace ucoint {

namespace {

const MonthIndex kSimStart{2002, 7};

std::vector<double> random_walk(Rng& rng, std::normal_distribution<double>& z, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (auto& v : x) v = acc += z(rng);
  return x;
}

std::vector<TimeSeries> as_series(const std::vector<std::vector<double>>& cols, const std::vector<std::string>& ids) {
  std::vector<TimeSeries> out;
  for (std::size_t j = 0; j < cols.size(); ++j) out.emplace_back(ids[j], kSimStart, cols[j]);
  return out;
}

std::vector<std::string> y_x_ids(int m) {
  std::vector<std::string> ids{"y"};
  for (int j = 1; j <= m; ++j) ids.push_back(fmt::format("x{}", j));
  return ids;
}

}  // namespace

void DgpSpec::validate() const {
  if (n < 30) throw DomainError(fmt::format("DGP sample size must be at least 30, got {}", n));
  if (m < 1) throw DomainError("DGP dimension must be at least 1");
  const bool uses_tau = kind == DgpKind::cointegrated_with_break || kind == DgpKind::stable_regression;
  if (uses_tau && !(tau > 0.0 && tau < 1.0)) throw DomainError(fmt::format("break fraction {} outside (0,1)", tau));
  if (kind == DgpKind::cointegrated_with_break &&
      static_cast<int>(params.coefficients.size()) != design_columns(params.model, m))
    throw DomainError(fmt::format("{} with m = {} needs {} coefficients, got {}", model_name(params.model), m,
                                  design_columns(params.model, m), params.coefficients.size()));
  if (kind == DgpKind::cointegrated_with_break && !(std::abs(params.ar) < 1.0))
    throw DomainError("cointegration error must be stationary (|ar| < 1)");
  if (kind == DgpKind::stable_regression) {
    if (static_cast<int>(params.coefficients.size()) != m + 1)
      throw DomainError(fmt::format("stable_regression needs {} coefficients", m + 1));
    if (!params.coefficient_step.empty() && params.coefficient_step.size() != params.coefficients.size())
      throw DomainError("coefficient_step must match the coefficient count");
    if (!(params.variance_ratio > 0.0)) throw DomainError("variance_ratio must be positive");
  }
  if (kind == DgpKind::var_diff && static_cast<int>(params.var_matrix.size()) != m * m)
    throw DomainError(fmt::format("var_diff needs an {}x{} coefficient matrix", m, m));
  if (!(params.noise_sd >= 0.0)) throw DomainError("noise_sd must be non-negative");
}

std::vector<TimeSeries> generate(const DgpSpec& spec) {
  spec.validate();
  Rng rng = make_rng(spec.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const int n = spec.n;
  const int m = spec.m;

  switch (spec.kind) {
    case DgpKind::random_walks_null: {
      std::vector<std::vector<double>> cols;
      for (int j = 0; j <= m; ++j) cols.push_back(random_walk(rng, z, n));
      return as_series(cols, y_x_ids(m));
    }
    case DgpKind::cointegrated_with_break: {
      std::vector<std::vector<double>> xs;
      for (int j = 0; j < m; ++j) xs.push_back(random_walk(rng, z, n));
      auto ids = y_x_ids(m);
      std::vector<TimeSeries> X;
      for (int j = 0; j < m; ++j) X.emplace_back(ids[static_cast<std::size_t>(j + 1)], kSimStart, xs[static_cast<std::size_t>(j)]);
      TimeSeries placeholder("y", kSimStart, std::vector<double>(static_cast<std::size_t>(n), 0.0));
      const int b = BreakDummy::at_fraction(n, spec.tau).break_position;
      auto design = build_design(placeholder, X, spec.params.model, b, Trim{0.0, 1.0});
      Eigen::Map<const Eigen::VectorXd> theta(spec.params.coefficients.data(),
                                              static_cast<Eigen::Index>(spec.params.coefficients.size()));
      Eigen::VectorXd y = design.X * theta;
      double u = 0.0;
      for (int t = 0; t < n; ++t) {
        u = spec.params.ar * u + spec.params.noise_sd * z(rng);
        y(t) += u;
      }
      std::vector<std::vector<double>> cols{std::vector<double>(y.data(), y.data() + n)};
      for (auto& x : xs) cols.push_back(std::move(x));
      return as_series(cols, ids);
    }
    case DgpKind::ucsv_dgp: {
      UcsvStart start;
      start.start = kSimStart;
      auto paths = simulate_ucsv(spec.params.ucsv, n, spec.seed, start);
      return {paths.pi, paths.tau, paths.sigma_eta, paths.sigma_eps};
    }
    case DgpKind::stable_regression: {
      const auto& beta = spec.params.coefficients;
      const int b = BreakDummy::at_fraction(n, spec.tau).break_position;
      std::vector<std::vector<double>> cols(static_cast<std::size_t>(m + 1), std::vector<double>(static_cast<std::size_t>(n)));
      for (int t = 0; t < n; ++t) {
        const bool after = t + 1 > b;
        double mean = beta[0] + (after && !spec.params.coefficient_step.empty() ? spec.params.coefficient_step[0] : 0.0);
        for (int j = 1; j <= m; ++j) {
          double x = z(rng);
          cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] = x;
          double slope = beta[static_cast<std::size_t>(j)] +
                         (after && !spec.params.coefficient_step.empty() ? spec.params.coefficient_step[static_cast<std::size_t>(j)] : 0.0);
          mean += slope * x;
        }
        double sd = spec.params.noise_sd * (after ? std::sqrt(spec.params.variance_ratio) : 1.0);
        cols[0][static_cast<std::size_t>(t)] = mean + sd * z(rng);
      }
      return as_series(cols, y_x_ids(m));
    }
    case DgpKind::var_diff: {
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
          spec.params.var_matrix.data(), m, m);
      Eigen::VectorXd d = Eigen::VectorXd::Zero(m);
      Eigen::VectorXd level = Eigen::VectorXd::Zero(m);
      std::vector<std::vector<double>> cols(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(n)));
      const int warmup = 50;
      for (int t = -warmup; t < n; ++t) {
        Eigen::VectorXd e(m);
        for (int j = 0; j < m; ++j) e(j) = spec.params.noise_sd * z(rng);
        d = A * d + e;
        if (t < 0) continue;
        level += d;
        for (int j = 0; j < m; ++j) cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] = level(j);
      }
      std::vector<std::string> ids;
      for (int j = 1; j <= m; ++j) ids.push_back(fmt::format("v{}", j));
      return as_series(cols, ids);
    }
  }
  return {};
}

std::vector<double> run_replications(int reps, int threads, const std::function<double(int)>& fn) {
  std::vector<double> out(static_cast<std::size_t>(std::max(reps, 0)));
  threads = std::clamp(threads, 1, std::max(1, reps));
  if (threads == 1) {
    for (int i = 0; i < reps; ++i) out[static_cast<std::size_t>(i)] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < reps; i = next++) {
          try {
            out[static_cast<std::size_t>(i)] = fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

double empirical_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw LengthError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CriticalValues CriticalValueTable::as_critical_values(GhStatistic s) const {
  auto find = [&](double lv) {
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (std::abs(levels[i] - lv) < 1e-12) return quantiles.at(s)[i];
    throw RangeError(fmt::format("level {} was not simulated", lv));
  };
  return {find(0.01), find(0.05), find(0.10)};
}

CriticalValueTable simulate_critical_values(GhModel model, int m, int n, int reps, const std::vector<double>& levels,
                                            const SimulationOptions& opts) {
  if (reps < 1000) throw DomainError(fmt::format("critical-value simulation needs reps >= 1000, got {}", reps));
  std::vector<GhMinima> minima(static_cast<std::size_t>(reps));
  run_replications(reps, opts.threads, [&](int i) {
    DgpSpec spec;
    spec.kind = DgpKind::random_walks_null;
    spec.m = m;
    spec.n = n;
    spec.seed = substream_seed(opts.seed, static_cast<std::uint64_t>(i));
    auto data = generate(spec);
    Eigen::MatrixXd X(n, m);
    for (int j = 0; j < m; ++j) X.col(j) = data[static_cast<std::size_t>(j + 1)].vector();
    minima[static_cast<std::size_t>(i)] = gh_minima(data[0].vector(), X, model, opts.gh);
    return 0.0;
  });

  CriticalValueTable t;
  t.model = model;
  t.m = m;
  t.n = n;
  t.reps = reps;
  t.seed = opts.seed;
  t.levels = levels;
  for (auto s : {GhStatistic::adf, GhStatistic::zt, GhStatistic::za}) {
    std::vector<double> v(static_cast<std::size_t>(reps));
    for (int i = 0; i < reps; ++i) {
      const auto& mm = minima[static_cast<std::size_t>(i)];
      v[static_cast<std::size_t>(i)] = s == GhStatistic::adf ? mm.adf : s == GhStatistic::zt ? mm.zt : mm.za;
    }
    std::vector<double> q;
    for (double lv : levels) q.push_back(empirical_quantile(v, lv));
    t.quantiles[s] = std::move(q);
    t.draws[s] = std::move(v);
  }
  return t;
}

double bootstrap_quantile_se(const std::vector<double>& values, double p, int resamples, std::uint64_t seed) {
  if (values.empty() || resamples < 2) throw DomainError("bootstrap needs data and at least two resamples");
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, values.size() - 1);
  std::vector<double> qs(static_cast<std::size_t>(resamples));
  std::vector<double> sample(values.size());
  for (auto& q : qs) {
    for (auto& s : sample) s = values[pick(rng)];
    q = empirical_quantile(sample, p);
  }
  double mean = 0.0;
  for (double q : qs) mean += q;
  mean /= resamples;
  double ss = 0.0;
  for (double q : qs) ss += (q - mean) * (q - mean);
  return std::sqrt(ss / (resamples - 1));
}

ReplicationSummary size_power_study(const DgpSpec& null_spec, const DgpSpec& alt_spec, const TestClosure& test,
                                    const std::vector<double>& critical_values, const std::vector<double>& levels,
                                    int reps, std::uint64_t master_seed, int threads) {
  if (reps < 200) throw DomainError(fmt::format("size/power study needs reps >= 200, got {}", reps));
  if (critical_values.size() != levels.size()) throw DomainError("one critical value per level is required");
  const auto started = std::chrono::steady_clock::now();
  auto run = [&](const DgpSpec& base, std::uint64_t stream) {
    return run_replications(reps, threads, [&](int i) {
      DgpSpec s = base;
      s.seed = substream_seed(master_seed ^ stream, static_cast<std::uint64_t>(i));
      return test(generate(s));
    });
  };
  // Same substreams for both designs, so an alternative equal to the null
  // reproduces the null rejections exactly.
  auto null_stats = run(null_spec, 0);
  auto alt_stats = run(alt_spec, 0);

  ReplicationSummary r;
  r.reps = reps;
  r.levels = levels;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double cv = critical_values[i];
    auto rate = [&](const std::vector<double>& v) {
      return static_cast<double>(std::count_if(v.begin(), v.end(), [&](double x) { return x < cv; })) /
             static_cast<double>(v.size());
    };
    r.null_quantiles.push_back(empirical_quantile(null_stats, levels[i]));
    r.null_rejection.push_back(rate(null_stats));
    r.alt_rejection.push_back(rate(alt_stats));
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return r;
}

}  // namespace ucoint
