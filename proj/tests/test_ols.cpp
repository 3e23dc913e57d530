#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "ucoint/errors.hpp"
#include "ucoint/ols.hpp"

using namespace ucoint;

TEST_SUITE("ols") {
  TEST_CASE("agrees with the normal equations") {
    Rng rng = make_rng(42);
    for (int rep = 0; rep < 50; ++rep) {
      const int n = 40 + rep, k = 1 + rep % 6;
      Eigen::MatrixXd X(n, k);
      X.col(0).setOnes();
      for (int j = 1; j < k; ++j) X.col(j) = testing::normal_vector(rng, n);
      Eigen::VectorXd y = testing::normal_vector(rng, n) + X.rowwise().sum();
      auto r = ols(X, y);
      Eigen::MatrixXd xtx = X.transpose() * X;
      Eigen::VectorXd b = xtx.ldlt().solve(X.transpose() * y);
      Eigen::VectorXd e = y - X * b;
      const double s2 = e.squaredNorm() / (n - k);
      Eigen::MatrixXd V = s2 * xtx.inverse();
      CHECK((r.coef - b).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((r.cov - V).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(r.ssr == doctest::Approx(e.squaredNorm()).epsilon(1e-10));
      const double sst = (y.array() - y.mean()).square().sum();
      CHECK(r.r_squared == doctest::Approx(1.0 - e.squaredNorm() / sst).epsilon(1e-10));
      CHECK((X.transpose() * r.resid).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  TEST_CASE("rank deficiency names the dependent column") {
    Rng rng = make_rng(1);
    Eigen::MatrixXd X(30, 3);
    X.col(0).setOnes();
    X.col(1) = testing::normal_vector(rng, 30);
    X.col(2) = 2.0 * X.col(1);
    try {
      ols(X, testing::normal_vector(rng, 30), {"C", "a", "b"});
      FAIL("expected SingularityError");
    } catch (const SingularityError& e) {
      const std::string msg = e.what();
      CHECK((msg.find("a") != std::string::npos || msg.find("b") != std::string::npos));
    }
  }

  TEST_CASE("Newey-West covariance matches a direct sandwich") {
    Rng rng = make_rng(8);
    const int n = 120, k = 2, L = 4;
    Eigen::MatrixXd X(n, k);
    X.col(0).setOnes();
    X.col(1) = testing::normal_vector(rng, n);
    Eigen::VectorXd y = X.col(1) + testing::normal_vector(rng, n);
    auto r = ols(X, y, {}, CovarianceKind::newey_west, L);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(k, k);
    for (int t = 0; t < n; ++t) S += r.resid(t) * r.resid(t) * X.row(t).transpose() * X.row(t);
    for (int j = 1; j <= L; ++j) {
      const double w = 1.0 - j / (L + 1.0);
      for (int t = j; t < n; ++t) {
        Eigen::MatrixXd G = r.resid(t) * r.resid(t - j) * X.row(t).transpose() * X.row(t - j);
        S += w * (G + G.transpose());
      }
    }
    Eigen::MatrixXd B = (X.transpose() * X).inverse();
    Eigen::MatrixXd V = B * S * B * (static_cast<double>(n) / (n - k));
    CHECK((r.cov - V).cwiseAbs().maxCoeff() < 1e-10);
  }
}
