#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace ucoint {

struct RecursiveResiduals {
  Eigen::VectorXd w;          // r = k+1..n
  Eigen::VectorXd beta_final;  // recursive estimate after all n observations
  int k = 0;
  int n = 0;
};

// Standardized one-step-ahead prediction errors, updated by recursive least squares.
RecursiveResiduals recursive_residuals(const Eigen::VectorXd& y, const Eigen::MatrixXd& X);

enum class CusumKind { cusum, cusum_sq };

struct CusumPath {
  CusumKind kind = CusumKind::cusum;
  std::vector<int> r;  // k+1..n
  std::vector<double> statistic;
  std::vector<double> lower;
  std::vector<double> upper;
  bool breached = false;
  std::optional<int> first_breach;  // value of r
  double critical = 0.0;            // a (cusum) or c0 (cusum_sq)
};

// Brown-Durbin-Evans CUSUM with bounds +-a[sqrt(n-k) + 2(r-k)/sqrt(n-k)].
CusumPath cusum(const Eigen::VectorXd& w, int k, int n, double level = 0.05);

// CUSUM of squares with bounds (r-k)/(n-k) +- c0.
CusumPath cusum_sq(const Eigen::VectorXd& w, int k, int n, double level = 0.05);

// Two-sided c0 for N = n - k residuals, interpolated in N.
double cusum_sq_c0(int N, double level = 0.05);

}  // namespace ucoint
