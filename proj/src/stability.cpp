#include "ucoint/stability.hpp"

#include <array>
#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "ucoint/errors.hpp"
#include "ucoint/significance.hpp"

namespace ucoint {

namespace {

struct C0Row {
  int N;
  double pct1, pct5, pct10;
};

// Quantiles of max_r |S_r - r/N| for i.i.d. normal residuals, 200000
// replications per row (tools/cusumsq_table.cpp).
constexpr std::array<C0Row, 24> kC0{{
    {5, 0.6871, 0.5706, 0.5158},    {6, 0.6542, 0.5524, 0.4870},    {7, 0.6362, 0.5280, 0.4715},
    {8, 0.6093, 0.5071, 0.4529},    {10, 0.5720, 0.4752, 0.4234},   {12, 0.5385, 0.4449, 0.3963},
    {15, 0.4969, 0.4102, 0.3658},   {20, 0.4447, 0.3670, 0.3275},   {25, 0.4059, 0.3339, 0.2987},
    {30, 0.3753, 0.3100, 0.2769},   {40, 0.3323, 0.2735, 0.2445},   {50, 0.3009, 0.2484, 0.2220},
    {60, 0.2771, 0.2284, 0.2043},   {80, 0.2413, 0.2000, 0.1794},   {100, 0.2176, 0.1806, 0.1621},
    {120, 0.1991, 0.1653, 0.1484},  {150, 0.1801, 0.1495, 0.1341},  {200, 0.1568, 0.1302, 0.1169},
    {250, 0.1413, 0.1172, 0.1052},  {300, 0.1289, 0.1073, 0.0963},  {400, 0.1125, 0.0936, 0.0841},
    {500, 0.1002, 0.0838, 0.0754},  {750, 0.0826, 0.0687, 0.0618},  {1000, 0.0718, 0.0597, 0.0536},
}};

double pick(const C0Row& row, Level level) {
  switch (level) {
    case Level::pct1: return row.pct1;
    case Level::pct5: return row.pct5;
    case Level::pct10: return row.pct10;
  }
  return row.pct5;
}

double cusum_a(Level level) {
  switch (level) {
    case Level::pct1: return 1.143;
    case Level::pct5: return 0.948;
    case Level::pct10: return 0.850;
  }
  return 0.948;
}

void check_sizes(const Eigen::VectorXd& w, int k, int n) {
  if (k < 1 || n <= k) throw RangeError(fmt::format("need n > k >= 1, got n = {}, k = {}", n, k));
  if (w.size() != n - k)
    throw LengthError(fmt::format("expected {} recursive residuals, got {}", n - k, w.size()));
}

void mark_breach(CusumPath& p) {
  for (std::size_t i = 0; i < p.statistic.size(); ++i) {
    if (p.statistic[i] < p.lower[i] || p.statistic[i] > p.upper[i]) {
      p.breached = true;
      p.first_breach = p.r[i];
      return;
    }
  }
}

}  // namespace

RecursiveResiduals recursive_residuals(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  const auto n = X.rows();
  const auto k = X.cols();
  if (y.size() != n) throw LengthError("design and response lengths differ");
  if (n <= k) throw LengthError(fmt::format("recursive residuals need n > k (n = {}, k = {})", n, k));

  Eigen::MatrixXd X0 = X.topRows(k);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(X0);
  if (lu.rank() < k) throw SingularityError("initial block of the recursive regression is singular");
  Eigen::VectorXd beta = lu.solve(y.head(k));
  Eigen::MatrixXd P = (X0.transpose() * X0).inverse();

  RecursiveResiduals out;
  out.k = static_cast<int>(k);
  out.n = static_cast<int>(n);
  out.w.resize(n - k);
  for (Eigen::Index r = k; r < n; ++r) {
    Eigen::VectorXd x = X.row(r).transpose();
    Eigen::VectorXd Px = P * x;
    const double f = 1.0 + x.dot(Px);
    const double err = y(r) - x.dot(beta);
    out.w(r - k) = err / std::sqrt(f);
    Eigen::VectorXd gain = Px / f;
    beta += gain * err;
    P -= gain * Px.transpose();
    P = 0.5 * (P + P.transpose());
  }
  out.beta_final = beta;
  return out;
}

CusumPath cusum(const Eigen::VectorXd& w, int k, int n, double level) {
  check_sizes(w, k, n);
  const Level lv = level_from_fraction(level);
  const double N = static_cast<double>(n - k);
  const double mean = w.mean();
  const double sd = w.size() > 1 ? std::sqrt((w.array() - mean).square().sum() / (N - 1.0)) : 0.0;
  CusumPath p;
  p.kind = CusumKind::cusum;
  p.critical = cusum_a(lv);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    acc += w(i);
    const double rk = static_cast<double>(i + 1);
    const double bound = p.critical * (std::sqrt(N) + 2.0 * rk / std::sqrt(N));
    p.r.push_back(k + 1 + static_cast<int>(i));
    p.statistic.push_back(sd > 0.0 ? acc / sd : 0.0);
    p.lower.push_back(-bound);
    p.upper.push_back(bound);
  }
  mark_breach(p);
  return p;
}

double cusum_sq_c0(int N, double level) {
  const Level lv = level_from_fraction(level);
  if (N < kC0.front().N) throw RangeError(fmt::format("CUSUM of squares needs at least {} residuals", kC0.front().N));
  if (N >= kC0.back().N) return pick(kC0.back(), lv) * std::sqrt(static_cast<double>(kC0.back().N) / N);
  std::size_t i = 1;
  while (kC0[i].N < N) ++i;
  const auto& a = kC0[i - 1];
  const auto& b = kC0[i];
  const double f = static_cast<double>(N - a.N) / static_cast<double>(b.N - a.N);
  return pick(a, lv) + f * (pick(b, lv) - pick(a, lv));
}

CusumPath cusum_sq(const Eigen::VectorXd& w, int k, int n, double level) {
  check_sizes(w, k, n);
  const double total = w.squaredNorm();
  if (!(total > 0.0)) throw DegenerateError("recursive residuals are all zero");
  const int N = n - k;
  CusumPath p;
  p.kind = CusumKind::cusum_sq;
  p.critical = cusum_sq_c0(N, level);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    acc += w(i) * w(i);
    const double diag = static_cast<double>(i + 1) / N;
    p.r.push_back(k + 1 + static_cast<int>(i));
    p.statistic.push_back(i + 1 == w.size() ? 1.0 : acc / total);
    p.lower.push_back(diag - p.critical);
    p.upper.push_back(diag + p.critical);
  }
  mark_breach(p);
  return p;
}

}  // namespace ucoint
