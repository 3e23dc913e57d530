#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace ucoint {

enum class CovarianceKind { conventional, newey_west };

struct OlsResult {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::MatrixXd cov;
  Eigen::VectorXd resid;
  Eigen::VectorXd fitted;
  double ssr = 0.0;
  double sigma2 = 0.0;  // ssr / (n - k)
  double r_squared = 0.0;
  int nobs = 0;
  int k = 0;

  double t_stat(int j) const { return coef(j) / se(j); }
};

// Least squares through a column-pivoted Householder QR. Rank deficiency raises
// SingularityError naming the dependent columns (by `names` when given).
OlsResult ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
              const std::vector<std::string>& names = {},
              CovarianceKind cov = CovarianceKind::conventional, int hac_bandwidth = -1);

// Sum of squares around the mean.
double centered_sst(const Eigen::VectorXd& y);

}  // namespace ucoint
