#include "ucoint/unitroot.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ucoint/cointegration.hpp"
#include "ucoint/errors.hpp"
#include "ucoint/ols.hpp"

namespace ucoint {

namespace {

struct ResponseSurface {
  double b_inf, b1, b2, b3;
  double at(double t) const { return b_inf + b1 / t + b2 / (t * t) + b3 / (t * t * t); }
};

// Rows: 1%, 5%, 10%.
constexpr ResponseSurface kConstant[3] = {
    {-3.43035, -6.5393, -16.786, -79.433},
    {-2.86154, -2.8903, -4.234, -40.040},
    {-2.56677, -1.5384, -2.809, 0.0},
};
constexpr ResponseSurface kConstantTrend[3] = {
    {-3.95877, -9.0531, -28.428, -134.155},
    {-3.41049, -4.3904, -9.036, -45.374},
    {-3.12705, -2.5856, -3.925, -22.380},
};

void require_length(const TimeSeries& s) {
  if (s.size() < 20)
    throw LengthError(fmt::format("unit-root test on '{}' needs 20 observations, got {}", s.id(), s.size()));
}

int deterministic_columns(Deterministic spec) { return spec == Deterministic::constant ? 1 : 2; }

// Regression of dy_t on [y_{t-1}, dy_{t-1..t-K}, 1, (t)] over rows t = first..n-1 (0-based).
struct AdfRegression {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};

AdfRegression adf_design(const Eigen::VectorXd& y, int lags, int first, Deterministic spec) {
  const int n = static_cast<int>(y.size());
  const int rows = n - first;
  const int cols = 1 + lags + deterministic_columns(spec);
  AdfRegression r{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
  for (int i = 0; i < rows; ++i) {
    int t = first + i;
    r.y(i) = y(t) - y(t - 1);
    r.X(i, 0) = y(t - 1);
    for (int j = 1; j <= lags; ++j) r.X(i, j) = y(t - j) - y(t - j - 1);
    r.X(i, lags + 1) = 1.0;
    if (spec == Deterministic::constant_trend) r.X(i, lags + 2) = static_cast<double>(t + 1);
  }
  return r;
}

UnitRootResult finish(double stat, int lags, int nobs, Deterministic spec) {
  UnitRootResult r;
  r.statistic = stat;
  r.lags_or_bandwidth = lags;
  r.nobs = nobs;
  r.spec = spec;
  r.critical_values = mackinnon_critical_values(spec, nobs);
  r.reject_at = r.critical_values.reject_at(stat);
  return r;
}

const std::vector<std::string> kAdfNames{"y(-1)"};

}  // namespace

int default_max_lag(int n) {
  return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

int default_bandwidth(int n) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

CriticalValues mackinnon_critical_values(Deterministic spec, int nobs) {
  const auto& table = spec == Deterministic::constant ? kConstant : kConstantTrend;
  double t = static_cast<double>(nobs);
  return {table[0].at(t), table[1].at(t), table[2].at(t)};
}

UnitRootResult adf_test(const TimeSeries& s, const AdfOptions& opts) {
  require_length(s);
  const Eigen::VectorXd y = s.vector();
  const int n = static_cast<int>(y.size());

  int lags = 0;
  if (opts.fixed_lags) {
    lags = *opts.fixed_lags;
    if (lags < 0 || lags > n - 10) throw RangeError(fmt::format("lag {} out of range", lags));
  } else {
    int kmax = std::min(opts.max_lags.value_or(default_max_lag(n)), n / 2 - 3);
    kmax = std::max(kmax, 0);
    // Common sample so information criteria are comparable across K.
    const int first = kmax + 1;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kmax; ++k) {
      auto reg = adf_design(y, k, first, opts.spec);
      auto fit = ols(reg.X, reg.y, kAdfNames);
      double nobs = static_cast<double>(fit.nobs);
      double penalty = opts.criterion == LagCriterion::bic ? std::log(nobs) : 2.0;
      double ic = nobs * std::log(fit.ssr / nobs) + penalty * fit.k;
      if (ic < best - 1e-12) {
        best = ic;
        lags = k;
      }
    }
  }
  auto reg = adf_design(y, lags, lags + 1, opts.spec);
  auto fit = ols(reg.X, reg.y, kAdfNames);
  return finish(fit.t_stat(0), lags, fit.nobs, opts.spec);
}

UnitRootResult pp_test(const TimeSeries& s, const PpOptions& opts) {
  require_length(s);
  const Eigen::VectorXd y = s.vector();
  const int n = static_cast<int>(y.size());
  const int bw = opts.bandwidth.value_or(default_bandwidth(n));
  if (bw < 0) throw RangeError("bandwidth must be non-negative");

  // y_t on [y_{t-1}, 1, (t)]; the statistic tests the coefficient against 1.
  auto reg = adf_design(y, 0, 1, opts.spec);
  Eigen::VectorXd level = reg.y + reg.X.col(0);
  auto fit = ols(reg.X, level, kAdfNames);
  const double nobs = static_cast<double>(fit.nobs);
  const double t_rho = (fit.coef(0) - 1.0) / fit.se(0);
  auto lrv = long_run_variance(fit.resid, bw);
  const double gamma0 = lrv.gamma0;
  const double lam2 = lrv.sigma2;
  const double sd = std::sqrt(fit.sigma2);
  const double z_t =
      std::sqrt(gamma0 / lam2) * t_rho - 0.5 * ((lam2 - gamma0) / std::sqrt(lam2)) * (nobs * fit.se(0) / sd);
  return finish(z_t, bw, fit.nobs, opts.spec);
}

}  // namespace ucoint
