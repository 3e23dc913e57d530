#include "ucoint/dynamics.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "ucoint/errors.hpp"
#include "ucoint/ols.hpp"

namespace ucoint {

namespace {

constexpr double kStabilityMargin = 1e-10;

void require_same_sample(const TimeSeries& ref, const TimeSeries& s) {
  if (s.start() != ref.start() || s.size() != ref.size())
    throw AlignmentError(fmt::format("'{}' ({}..{}) is not aligned with '{}' ({}..{})", s.id(), s.start().label(),
                                     s.end().label(), ref.id(), ref.start().label(), ref.end().label()));
}

Eigen::MatrixXd differenced_matrix(const std::vector<TimeSeries>& series) {
  const auto& ref = series.front();
  for (const auto& s : series) require_same_sample(ref, s);
  const auto n = static_cast<Eigen::Index>(ref.size());
  Eigen::MatrixXd D(n - 1, static_cast<Eigen::Index>(series.size()));
  for (std::size_t j = 0; j < series.size(); ++j) {
    Eigen::VectorXd v = series[j].vector();
    D.col(static_cast<Eigen::Index>(j)) = v.tail(n - 1) - v.head(n - 1);
  }
  return D;
}

}  // namespace

EcmFit fit_ecm(const TimeSeries& dj, const TimeSeries& i, const TimeSeries& u, const TimeSeries& ecm_resid,
               const std::optional<TimeSeries>& ip, const EcmOptions& opts) {
  require_same_sample(dj, i);
  require_same_sample(dj, u);
  require_same_sample(dj, ecm_resid);
  if (ip) require_same_sample(dj, *ip);
  if (opts.difference_lags < 0) throw RangeError("difference_lags must be non-negative");

  std::vector<TimeSeries> regs{i, u};
  std::vector<std::string> reg_names{"dI", "dU"};
  if (ip) {
    regs.push_back(*ip);
    reg_names.emplace_back("dIP");
  }
  Eigen::MatrixXd D = differenced_matrix(regs);
  Eigen::VectorXd ddj = diff(dj).vector();
  Eigen::VectorXd e = ecm_resid.vector();

  const int L = opts.difference_lags;
  const auto rows = D.rows() - L;
  const auto nreg = D.cols();
  const auto cols = 2 + nreg * (1 + L);
  if (rows <= cols) throw LengthError("sample too short for the error-correction regression");

  EcmFit f;
  f.names = {"C", "ECM(-1)"};
  for (const auto& nm : reg_names) f.names.push_back(nm);
  for (int l = 1; l <= L; ++l)
    for (const auto& nm : reg_names) f.names.push_back(fmt::format("{}(-{})", nm, l));

  f.X.resize(rows, cols);
  f.y.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    Eigen::Index t = r + L;  // row of D; the change from level t to t+1
    f.y(r) = ddj(t);
    f.X(r, 0) = 1.0;
    f.X(r, 1) = e(t);
    for (int l = 0; l <= L; ++l)
      for (Eigen::Index j = 0; j < nreg; ++j) f.X(r, 2 + l * nreg + j) = D(t - l, j);
  }
  auto fit = ols(f.X, f.y, f.names);
  f.coef = fit.coef;
  f.se = fit.se;
  f.cov = fit.cov;
  f.r_squared = fit.r_squared;
  f.nobs = fit.nobs;
  f.resid = fit.resid;
  f.first = dj.start().plus(1 + L);
  return f;
}

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& lags) {
  if (lags.empty()) throw RangeError("companion matrix needs at least one lag");
  const auto k = lags.front().rows();
  const auto p = static_cast<Eigen::Index>(lags.size());
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(k * p, k * p);
  for (Eigen::Index l = 0; l < p; ++l) C.block(0, l * k, k, k) = lags[static_cast<std::size_t>(l)];
  if (p > 1) C.block(k, 0, k * (p - 1), k * (p - 1)).setIdentity();
  return C;
}

double spectral_radius(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw DegenerateError("eigenvalue computation failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

struct VarDesign {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Y;
};

VarDesign var_design(const Eigen::MatrixXd& D, int p, int first) {
  const auto k = D.cols();
  const auto rows = D.rows() - first;
  VarDesign v{Eigen::MatrixXd(rows, 1 + k * p), Eigen::MatrixXd(rows, k)};
  for (Eigen::Index r = 0; r < rows; ++r) {
    Eigen::Index t = first + r;
    v.Y.row(r) = D.row(t);
    v.X(r, 0) = 1.0;
    for (int l = 1; l <= p; ++l) v.X.block(r, 1 + (l - 1) * k, 1, k) = D.row(t - l);
  }
  return v;
}

}  // namespace

VarFit fit_var_diff(const std::vector<TimeSeries>& series, int p) {
  if (series.size() < 2) throw LengthError("a VAR needs at least two series");
  if (p < 1) throw RangeError("VAR lag order must be at least 1");
  const int k = static_cast<int>(series.size());
  if (static_cast<int>(series.front().size()) <= k * p + 5)
    throw LengthError(fmt::format("VAR({}) in {} variables needs more than {} observations", p, k, k * p + 5));
  Eigen::MatrixXd D = differenced_matrix(series);
  auto design = var_design(D, p, p);

  VarFit f;
  f.p = p;
  f.k = k;
  for (const auto& s : series) f.names.push_back("d" + s.id());
  f.intercept.resize(k);
  f.intercept_se.resize(k);
  f.r_squared.resize(k);
  f.lags.assign(static_cast<std::size_t>(p), Eigen::MatrixXd(k, k));
  f.lag_se.assign(static_cast<std::size_t>(p), Eigen::MatrixXd(k, k));

  std::vector<std::string> names{"C"};
  for (int l = 1; l <= p; ++l)
    for (const auto& nm : f.names) names.push_back(fmt::format("{}(-{})", nm, l));

  for (int eq = 0; eq < k; ++eq) {
    auto fit = ols(design.X, design.Y.col(eq), names);
    f.intercept(eq) = fit.coef(0);
    f.intercept_se(eq) = fit.se(0);
    f.r_squared(eq) = fit.r_squared;
    f.nobs = fit.nobs;
    for (int l = 0; l < p; ++l)
      for (int j = 0; j < k; ++j) {
        f.lags[static_cast<std::size_t>(l)](eq, j) = fit.coef(1 + l * k + j);
        f.lag_se[static_cast<std::size_t>(l)](eq, j) = fit.se(1 + l * k + j);
      }
  }
  f.spectral_radius = spectral_radius(companion_matrix(f.lags));
  f.stable = var_stability(f);
  return f;
}

int select_var_lag(const std::vector<TimeSeries>& series, int p_max, bool bic) {
  if (p_max < 1) throw RangeError("p_max must be at least 1");
  Eigen::MatrixXd D = differenced_matrix(series);
  const auto k = D.cols();
  int best = 1;
  double best_ic = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= p_max; ++p) {
    auto design = var_design(D, p, p_max);
    const double T = static_cast<double>(design.X.rows());
    Eigen::MatrixXd B = design.X.colPivHouseholderQr().solve(design.Y);
    Eigen::MatrixXd E = design.Y - design.X * B;
    Eigen::MatrixXd S = E.transpose() * E / T;
    double logdet = std::log(S.determinant());
    double params = static_cast<double>(k * (1 + k * p));
    double ic = logdet + (bic ? std::log(T) : 2.0) * params / T;
    if (ic < best_ic) {
      best_ic = ic;
      best = p;
    }
  }
  return best;
}

bool var_stability(const VarFit& fit) {
  return spectral_radius(companion_matrix(fit.lags)) < 1.0 - kStabilityMargin;
}

}  // namespace ucoint
