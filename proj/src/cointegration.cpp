#include "ucoint/cointegration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <fmt/format.h>

#include "ucoint/errors.hpp"
#include "ucoint/unitroot.hpp"

namespace ucoint {

std::string model_code(GhModel model) {
  switch (model) {
    case GhModel::LS: return "LS";
    case GhModel::LST: return "LST";
    case GhModel::RS: return "RS";
    case GhModel::RST: return "RST";
  }
  return "";
}

std::string model_name(GhModel model) { return "GH-" + model_code(model); }

GhModel parse_model(const std::string& text) {
  std::string t = text;
  if (t.rfind("GH-", 0) == 0) t = t.substr(3);
  for (auto m : kAllModels)
    if (model_code(m) == t) return m;
  throw ConfigError(fmt::format("unknown model '{}' (expected LS, LST, RS or RST)", text));
}

bool has_slope_break(GhModel model) { return model == GhModel::RS || model == GhModel::RST; }

int design_columns(GhModel model, int m) {
  switch (model) {
    case GhModel::LS: return 2 + m;
    case GhModel::LST: return 3 + m;
    case GhModel::RS: return 2 + 2 * m;
    case GhModel::RST: return 4 + 2 * m;
  }
  return 0;
}

std::string statistic_name(GhStatistic s) {
  switch (s) {
    case GhStatistic::adf: return "ADF";
    case GhStatistic::zt: return "Zt";
    case GhStatistic::za: return "Za";
  }
  return "";
}

BreakDummy BreakDummy::at_fraction(int n, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw RangeError(fmt::format("break fraction {} outside (0,1)", tau));
  return {tau, static_cast<int>(std::floor(n * tau))};
}

std::pair<int, int> candidate_range(int n, const Trim& trim) {
  if (!(trim.lo >= 0.0 && trim.lo <= trim.hi && trim.hi <= 1.0))
    throw RangeError(fmt::format("invalid trim [{}, {}]", trim.lo, trim.hi));
  return {static_cast<int>(std::floor(n * trim.lo)), static_cast<int>(std::floor(n * trim.hi))};
}

namespace {

Eigen::MatrixXd design_matrix(const Eigen::MatrixXd& X, GhModel model, int b) {
  const auto n = X.rows();
  const auto m = X.cols();
  Eigen::MatrixXd D(n, design_columns(model, static_cast<int>(m)));
  for (Eigen::Index t = 0; t < n; ++t) {
    const double phi = (t + 1) > b ? 1.0 : 0.0;
    const double trend = static_cast<double>(t + 1);
    Eigen::Index c = 0;
    D(t, c++) = 1.0;
    D(t, c++) = phi;
    if (model == GhModel::LST || model == GhModel::RST) D(t, c++) = trend;
    if (model == GhModel::RST) D(t, c++) = trend * phi;
    for (Eigen::Index j = 0; j < m; ++j) D(t, c++) = X(t, j);
    if (has_slope_break(model))
      for (Eigen::Index j = 0; j < m; ++j) D(t, c++) = X(t, j) * phi;
  }
  return D;
}

std::vector<std::string> design_names(GhModel model, const std::vector<std::string>& ids) {
  std::vector<std::string> names{"C", "Dum x C"};
  if (model == GhModel::LST || model == GhModel::RST) names.emplace_back("Trend");
  if (model == GhModel::RST) names.emplace_back("Dum x Trend");
  for (const auto& id : ids) names.push_back(id);
  if (has_slope_break(model))
    for (const auto& id : ids) names.push_back("Dum x " + id);
  return names;
}

Eigen::MatrixXd regressor_matrix(const TimeSeries& y, const std::vector<TimeSeries>& X) {
  if (X.empty()) throw LengthError("at least one regressor is required");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(X.size()));
  for (std::size_t j = 0; j < X.size(); ++j) {
    if (X[j].start() != y.start() || X[j].size() != y.size())
      throw AlignmentError(fmt::format("regressor '{}' ({}..{}) is not aligned with '{}' ({}..{})", X[j].id(),
                                       X[j].start().label(), X[j].end().label(), y.id(),
                                       y.start().label(), y.end().label()));
    M.col(static_cast<Eigen::Index>(j)) = X[j].vector();
  }
  return M;
}

std::vector<std::string> ids_of(const std::vector<TimeSeries>& X) {
  std::vector<std::string> ids;
  for (const auto& s : X) ids.push_back(s.id());
  return ids;
}

Eigen::VectorXd residuals_of(const Eigen::MatrixXd& D, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(D);
  qr.setThreshold(1e-10);
  if (qr.rank() < D.cols())
    throw SingularityError(fmt::format("break design is rank deficient (rank {} of {})", qr.rank(), D.cols()));
  return y - D * qr.solve(y);
}

// t-statistic on the first column of Z for the regression of dy on Z, with
// conventional standard error.
double first_t_stat(const Eigen::MatrixXd& Z, const Eigen::VectorXd& dy) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Z);
  qr.setThreshold(1e-12);
  if (qr.rank() < Z.cols()) throw SingularityError("residual ADF regression is singular");
  Eigen::VectorXd b = qr.solve(dy);
  double ssr = (dy - Z * b).squaredNorm();
  double s2 = ssr / static_cast<double>(Z.rows() - Z.cols());
  const auto k = Z.cols();
  Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  // Column 0 of Z sits at position p of the pivoted R.
  Eigen::Index p = 0;
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index j = 0; j < k; ++j)
    if (perm(j) == 0) p = j;
  double var00 = Rinv.row(p).squaredNorm() * s2;
  return b(0) / std::sqrt(var00);
}

void lagged_adf_design(const Eigen::VectorXd& e, int lag, int first, Eigen::MatrixXd& Z, Eigen::VectorXd& dy) {
  const auto n = e.size();
  const auto rows = n - first;
  Z.resize(rows, lag + 1);
  dy.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    Eigen::Index t = first + i;
    dy(i) = e(t) - e(t - 1);
    Z(i, 0) = e(t - 1);
    for (int j = 1; j <= lag; ++j) Z(i, j) = e(t - j) - e(t - j - 1);
  }
}

GhStatResult stat_result(double value, int pos, int lag, const TimeSeries& y, const GhCriticalValues& cv) {
  GhStatResult r;
  r.statistic = value;
  r.break_position = pos;
  r.break_date = y.date_at(static_cast<std::size_t>(pos - 1));
  r.lag = lag;
  r.critical_values = cv.values;
  r.reject_at = cv.values.reject_at(value);
  return r;
}

struct RawCandidate {
  double adf, zt, za;
  int lag;
};

RawCandidate evaluate_raw(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, GhModel model, int b, int bandwidth,
                          const GhOptions& opts) {
  Eigen::VectorXd e = residuals_of(design_matrix(X, model, b), y);
  auto ph = phillips_stats(e, bandwidth);
  auto adf = adf_on_residuals(e, opts.fixed_lag, opts.max_lag);
  return {adf.statistic, ph.z_t, ph.z_alpha, adf.lag};
}

std::vector<RawCandidate> evaluate_all(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, GhModel model, int lo,
                                       int hi, int bandwidth, const GhOptions& opts) {
  std::vector<RawCandidate> out(static_cast<std::size_t>(hi - lo + 1));
  auto work = [&](int begin, int end) {
    for (int b = begin; b < end; ++b) out[static_cast<std::size_t>(b - lo)] = evaluate_raw(y, X, model, b, bandwidth, opts);
  };
  const int count = hi - lo + 1;
  const int threads = std::clamp(opts.threads, 1, count);
  if (threads == 1) {
    work(lo, hi + 1);
  } else {
    std::vector<std::jthread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
    const int chunk = (count + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      int begin = lo + w * chunk;
      int end = std::min(hi + 1, begin + chunk);
      pool.emplace_back([&, w, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

void check_candidates(int n, int lo, int hi) {
  if (hi - lo + 1 < 10)
    throw RangeError(fmt::format("trimmed window has {} candidate breaks for n = {}; at least 10 required",
                                 std::max(0, hi - lo + 1), n));
  if (lo < 1 || hi > n - 1) throw RangeError("trimmed window must leave observations on both sides of the break");
}

}  // namespace

Design build_design(const TimeSeries& y, const std::vector<TimeSeries>& X, GhModel model, int break_position,
                    const Trim& trim) {
  const int n = static_cast<int>(y.size());
  auto [lo, hi] = candidate_range(n, trim);
  if (break_position < lo || break_position > hi || break_position < 0 || break_position > n)
    throw RangeError(fmt::format("break position {} outside trimmed window [{}, {}]", break_position, lo, hi));
  Eigen::MatrixXd M = regressor_matrix(y, X);
  return {model, break_position, static_cast<int>(X.size()), design_matrix(M, model, break_position),
          design_names(model, ids_of(X))};
}

LongRunVariance long_run_variance(const Eigen::VectorXd& v, int bandwidth) {
  const auto n = v.size();
  if (bandwidth < 0) throw RangeError("bandwidth must be non-negative");
  if (n < bandwidth + 2)
    throw LengthError(fmt::format("long-run variance with bandwidth {} needs {} observations, got {}", bandwidth,
                                  bandwidth + 2, n));
  const double N = static_cast<double>(n);
  LongRunVariance r;
  r.gamma0 = v.squaredNorm() / N;
  for (int j = 1; j <= bandwidth; ++j) {
    double w = 1.0 - static_cast<double>(j) / (bandwidth + 1);
    double acov = v.tail(n - j).dot(v.head(n - j)) / N;
    r.lambda += w * acov;
  }
  r.sigma2 = std::max(r.gamma0 + 2.0 * r.lambda, 1e-12);
  return r;
}

PhillipsStats phillips_stats(const Eigen::VectorXd& eps, int bandwidth) {
  const auto n = eps.size();
  if (n < 20) throw LengthError(fmt::format("Phillips statistics need 20 residuals, got {}", n));
  PhillipsStats r;
  r.n = static_cast<int>(n);
  r.cross = eps.head(n - 1).dot(eps.tail(n - 1));
  r.sum_sq = eps.head(n - 1).squaredNorm();
  if (!(r.sum_sq > 0.0)) throw DegenerateError("residuals have zero variance");
  r.rho = r.cross / r.sum_sq;
  Eigen::VectorXd v = eps.tail(n - 1) - r.rho * eps.head(n - 1);
  r.lrv = long_run_variance(v, bandwidth);
  // Standard Phillips correction: n * lambda subtracted once.
  r.rho_star = (r.cross - static_cast<double>(n) * r.lrv.lambda) / r.sum_sq;
  r.z_alpha = static_cast<double>(n) * (r.rho_star - 1.0);
  const double s = std::sqrt(r.lrv.sigma2 / r.sum_sq);
  r.z_t = (r.rho_star - 1.0) / s;
  return r;
}

ResidualAdf adf_on_residuals(const Eigen::VectorXd& eps, std::optional<int> lag, std::optional<int> max_lag) {
  const auto n = static_cast<int>(eps.size());
  Eigen::MatrixXd Z;
  Eigen::VectorXd dy;
  if (lag) {
    if (*lag < 0) throw RangeError("lag must be non-negative");
    if (n < *lag + 10) throw LengthError(fmt::format("residual ADF with K = {} needs {} observations", *lag, *lag + 10));
    lagged_adf_design(eps, *lag, *lag + 1, Z, dy);
    return {first_t_stat(Z, dy), *lag};
  }
  if (n < 10) throw LengthError("residual ADF needs at least 10 observations");
  int kmax = std::clamp(max_lag.value_or(default_max_lag(n)), 0, std::max(0, n / 2 - 5));

  // Nested models on a common sample: with G = [Z dy]'[Z dy] = L L', the SSR of
  // the first q regressors is L_yy^2 + sum_{i >= q} L_{y,i}^2.
  lagged_adf_design(eps, kmax, kmax + 1, Z, dy);
  const auto p = Z.cols();
  Eigen::MatrixXd A(Z.rows(), p + 1);
  A.leftCols(p) = Z;
  A.col(p) = dy;
  Eigen::MatrixXd G = A.transpose() * A;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  int best = 0;
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd L = llt.matrixL();
    const double N = static_cast<double>(Z.rows());
    double tail = L(p, p) * L(p, p);
    std::vector<double> ssr(static_cast<std::size_t>(p + 1));
    ssr[static_cast<std::size_t>(p)] = tail;
    for (Eigen::Index q = p - 1; q >= 1; --q) {
      tail += L(p, q) * L(p, q);
      ssr[static_cast<std::size_t>(q)] = tail;
    }
    double best_ic = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kmax; ++k) {
      double s = ssr[static_cast<std::size_t>(k + 1)];
      double ic = N * std::log(s / N) + (k + 1) * std::log(N);
      if (ic < best_ic - 1e-12) {
        best_ic = ic;
        best = k;
      }
    }
  }
  lagged_adf_design(eps, best, best + 1, Z, dy);
  return {first_t_stat(Z, dy), best};
}

const GhStatResult& GhResult::stat(GhStatistic s) const {
  switch (s) {
    case GhStatistic::adf: return adf;
    case GhStatistic::zt: return zt;
    case GhStatistic::za: return za;
  }
  return adf;
}

CandidateStats evaluate_candidate(const TimeSeries& y, const std::vector<TimeSeries>& X, GhModel model,
                                  int break_position, const GhOptions& opts) {
  auto design = build_design(y, X, model, break_position, opts.trim);
  auto fit = ols(design.X, y.vector(), design.names);
  const int n = static_cast<int>(y.size());
  auto ph = phillips_stats(fit.resid, opts.bandwidth.value_or(default_bandwidth(n)));
  auto adf = adf_on_residuals(fit.resid, opts.fixed_lag, opts.max_lag);
  return {break_position, y.date_at(static_cast<std::size_t>(break_position - 1)), adf.statistic, adf.lag, ph.z_t,
          ph.z_alpha};
}

GhMinima gh_minima(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, GhModel model, const GhOptions& opts) {
  const int n = static_cast<int>(y.size());
  auto [lo, hi] = candidate_range(n, opts.trim);
  check_candidates(n, lo, hi);
  auto raw = evaluate_all(y, X, model, lo, hi, opts.bandwidth.value_or(default_bandwidth(n)), opts);
  GhMinima r{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(), lo, lo, lo};
  for (int b = lo; b <= hi; ++b) {
    const auto& c = raw[static_cast<std::size_t>(b - lo)];
    if (c.adf < r.adf) r.adf = c.adf, r.adf_break = b;
    if (c.zt < r.zt) r.zt = c.zt, r.zt_break = b;
    if (c.za < r.za) r.za = c.za, r.za_break = b;
  }
  return r;
}

GhResult gh_test(const TimeSeries& y, const std::vector<TimeSeries>& X, GhModel model, const GhOptions& opts) {
  const int n = static_cast<int>(y.size());
  const int m = static_cast<int>(X.size());
  Eigen::MatrixXd M = regressor_matrix(y, X);
  auto [lo, hi] = candidate_range(n, opts.trim);
  check_candidates(n, lo, hi);
  const int bandwidth = opts.bandwidth.value_or(default_bandwidth(n));
  auto raw = evaluate_all(y.vector(), M, model, lo, hi, bandwidth, opts);

  GhResult r;
  r.model = model;
  r.m = m;
  r.n = n;
  r.bandwidth = bandwidth;
  r.candidate_trace.reserve(raw.size());
  int adf_b = lo, zt_b = lo, za_b = lo;
  for (int b = lo; b <= hi; ++b) {
    const auto& c = raw[static_cast<std::size_t>(b - lo)];
    r.candidate_trace.push_back({b, y.date_at(static_cast<std::size_t>(b - 1)), c.adf, c.lag, c.zt, c.za});
    const auto& best_adf = raw[static_cast<std::size_t>(adf_b - lo)];
    if (c.adf < best_adf.adf) adf_b = b;
    if (c.zt < raw[static_cast<std::size_t>(zt_b - lo)].zt) zt_b = b;
    if (c.za < raw[static_cast<std::size_t>(za_b - lo)].za) za_b = b;
  }
  auto cv_tau = gh_critical_values(model, m, GhStatistic::adf);
  auto cv_za = gh_critical_values(model, m, GhStatistic::za);
  const auto& a = raw[static_cast<std::size_t>(adf_b - lo)];
  r.adf = stat_result(a.adf, adf_b, a.lag, y, cv_tau);
  r.zt = stat_result(raw[static_cast<std::size_t>(zt_b - lo)].zt, zt_b, 0, y, cv_tau);
  r.za = stat_result(raw[static_cast<std::size_t>(za_b - lo)].za, za_b, 0, y, cv_za);
  r.cv_source = cv_tau.source;
  return r;
}

Decision decide(const std::vector<GhResult>& results, const DecisionRule& rule) {
  Decision d;
  for (const auto& r : results) {
    ModelDecision md;
    md.model = r.model;
    md.adf = r.adf.critical_values.rejects(r.adf.statistic, rule.level);
    md.zt = r.zt.critical_values.rejects(r.zt.statistic, rule.level);
    md.za = r.za.critical_values.rejects(r.za.statistic, rule.level);
    md.rejections = int(md.adf) + int(md.zt) + int(md.za);
    md.passes = md.rejections >= rule.required;
    if (md.passes) d.passing.push_back(md.model);
    d.models.push_back(md);
  }
  d.cointegrated = !d.passing.empty();
  for (auto m : {GhModel::RST, GhModel::RS, GhModel::LST, GhModel::LS}) {
    if (std::find(d.passing.begin(), d.passing.end(), m) != d.passing.end()) {
      d.representative = m;
      break;
    }
  }
  return d;
}

int CointegrationFit::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw RangeError(fmt::format("no coefficient named '{}'", name));
}

CointegrationFit fit_break_regression(const TimeSeries& y, const std::vector<TimeSeries>& X, GhModel model,
                                      MonthIndex break_date, CovarianceKind cov) {
  const int n = static_cast<int>(y.size());
  const int b = months_between(y.start(), break_date) + 1;
  if (b < 1) throw RangeError(fmt::format("break {} precedes the sample start {}", break_date.label(), y.start().label()));
  Eigen::MatrixXd M = regressor_matrix(y, X);
  const auto names = design_names(model, ids_of(X));
  Eigen::MatrixXd D = design_matrix(M, model, std::min(b, n));

  CointegrationFit fit;
  fit.model = model;
  fit.break_date = break_date;
  fit.break_position = std::min(b, n);
  fit.m = static_cast<int>(X.size());
  fit.names = names;

  // Dummy-carrying columns are the ones with "Dum" in the name.
  std::vector<Eigen::Index> keep;
  for (std::size_t j = 0; j < names.size(); ++j)
    if (b < n || names[j].rfind("Dum", 0) != 0) keep.push_back(static_cast<Eigen::Index>(j));
  Eigen::MatrixXd Dk(D.rows(), static_cast<Eigen::Index>(keep.size()));
  std::vector<std::string> kept_names;
  for (std::size_t j = 0; j < keep.size(); ++j) {
    Dk.col(static_cast<Eigen::Index>(j)) = D.col(keep[j]);
    kept_names.push_back(names[static_cast<std::size_t>(keep[j])]);
  }
  auto r = ols(Dk, y.vector(), kept_names, cov);

  const auto k = static_cast<Eigen::Index>(names.size());
  fit.coef = Eigen::VectorXd::Zero(k);
  fit.se = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
  fit.cov = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t a = 0; a < keep.size(); ++a) {
    fit.coef(keep[a]) = r.coef(static_cast<Eigen::Index>(a));
    fit.se(keep[a]) = r.se(static_cast<Eigen::Index>(a));
    for (std::size_t c = 0; c < keep.size(); ++c)
      fit.cov(keep[a], keep[c]) = r.cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
  }
  fit.residuals = from_vector(y.id() + "_resid", y.start(), r.resid);
  fit.r_squared = r.r_squared;
  fit.nobs = r.nobs;
  return fit;
}

WaldResult wald_test(const Eigen::VectorXd& coef, const Eigen::MatrixXd& cov, const Eigen::MatrixXd& R,
                     const Eigen::VectorXd& r) {
  if (R.cols() != coef.size())
    throw DomainError(fmt::format("restriction has {} columns, model has {} coefficients", R.cols(), coef.size()));
  if (R.rows() != r.size() || R.rows() == 0 || R.rows() > coef.size())
    throw DomainError("restriction dimensions are inconsistent");
  Eigen::FullPivLU<Eigen::MatrixXd> lu_r(R);
  if (lu_r.rank() < R.rows()) throw DomainError("restriction rows are linearly dependent");
  Eigen::VectorXd diff = R * coef - r;
  Eigen::MatrixXd V = R * cov * R.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(V);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
    throw DomainError("restricted covariance is singular");
  WaldResult w;
  w.df = static_cast<int>(R.rows());
  w.statistic = diff.dot(ldlt.solve(diff));
  if (w.statistic <= 0.0) {
    w.statistic = 0.0;
    w.p_value = 1.0;
  } else {
    boost::math::chi_squared dist(w.df);
    w.p_value = boost::math::cdf(boost::math::complement(dist, w.statistic));
  }
  return w;
}

WaldResult wald_test(const CointegrationFit& fit, const Eigen::MatrixXd& R, const Eigen::VectorXd& r) {
  return wald_test(fit.coef, fit.cov, R, r);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> post_break_slope_restriction(const CointegrationFit& fit) {
  if (!has_slope_break(fit.model))
    throw DomainError(fmt::format("{} has no slope break to test", model_name(fit.model)));
  const auto k = static_cast<Eigen::Index>(fit.names.size());
  const int first_x = fit.model == GhModel::RS ? 2 : 4;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(fit.m, k);
  for (int j = 0; j < fit.m; ++j) {
    R(j, first_x + j) = 1.0;
    R(j, first_x + fit.m + j) = 1.0;
  }
  return {R, Eigen::VectorXd::Zero(fit.m)};
}

}  // namespace ucoint
