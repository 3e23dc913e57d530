#include "ucoint/ols.hpp"

#include <cmath>

#include <Eigen/QR>
#include <fmt/format.h>

#include "ucoint/errors.hpp"

namespace ucoint {

double centered_sst(const Eigen::VectorXd& y) {
  return (y.array() - y.mean()).square().sum();
}

OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
              const std::vector<std::string>& names, CovarianceKind cov_kind, int hac_bandwidth) {
  const auto n = X.rows();
  const auto k = X.cols();
  if (y.size() != n) throw LengthError(fmt::format("design has {} rows, response {}", n, y.size()));
  if (n <= k) throw LengthError(fmt::format("need more observations ({}) than columns ({})", n, k));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  // Relative threshold on |R_ii| against the largest pivot.
  qr.setThreshold(1e-10);
  if (qr.rank() < k) {
    std::string cols;
    const auto& perm = qr.colsPermutation().indices();
    for (auto j = qr.rank(); j < k; ++j) {
      auto c = perm(j);
      cols += (cols.empty() ? "" : ", ") +
              (c < static_cast<Eigen::Index>(names.size()) ? names[c] : fmt::format("column {}", c));
    }
    throw SingularityError(fmt::format("design is rank deficient (rank {} of {}); dependent: {}",
                                       qr.rank(), k, cols));
  }

  OlsResult r;
  r.nobs = static_cast<int>(n);
  r.k = static_cast<int>(k);
  r.coef = qr.solve(y);
  r.fitted = X * r.coef;
  r.resid = y - r.fitted;
  r.ssr = r.resid.squaredNorm();
  r.sigma2 = r.ssr / static_cast<double>(n - k);
  double sst = centered_sst(y);
  r.r_squared = sst > 0.0 ? 1.0 - r.ssr / sst : 0.0;

  // (X'X)^{-1} = P R^{-1} R^{-T} P'
  Eigen::MatrixXd R = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  Eigen::MatrixXd Rinv = R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd xtx_inv_perm = Rinv * Rinv.transpose();
  Eigen::MatrixXd P = qr.colsPermutation();
  Eigen::MatrixXd xtx_inv = P * xtx_inv_perm * P.transpose();

  if (cov_kind == CovarianceKind::conventional) {
    r.cov = r.sigma2 * xtx_inv;
  } else {
    int L = hac_bandwidth >= 0
                ? hac_bandwidth
                : static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
    Eigen::MatrixXd scores = X.array().colwise() * r.resid.array();
    Eigen::MatrixXd meat = scores.transpose() * scores;
    for (int j = 1; j <= L && j < n; ++j) {
      double w = 1.0 - static_cast<double>(j) / (L + 1);
      Eigen::MatrixXd g = scores.bottomRows(n - j).transpose() * scores.topRows(n - j);
      meat += w * (g + g.transpose());
    }
    r.cov = xtx_inv * meat * xtx_inv * (static_cast<double>(n) / static_cast<double>(n - k));
  }
  r.se = r.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return r;
}

}  // namespace ucoint
