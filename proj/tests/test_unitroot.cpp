#include <doctest.h>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "ucoint/errors.hpp"
#include "ucoint/ols.hpp"
#include "ucoint/unitroot.hpp"

using namespace ucoint;

TEST_SUITE("unitroot") {
  TEST_CASE("ADF with fixed lags equals the t-statistic of a direct regression") {
    Rng rng = make_rng(21);
    Eigen::VectorXd y = testing::random_walk(rng, 150);
    const int p = 3;
    AdfOptions o;
    o.fixed_lags = p;
    auto r = adf_test(testing::series("y", y), o);
    // dy_t on [y_{t-1}, 1, dy_{t-1..t-p}], t = p+1..n-1 (0-based).
    const int n = 150, rows = n - 1 - p;
    Eigen::MatrixXd X(rows, 2 + p);
    Eigen::VectorXd dy(rows);
    for (int i = 0; i < rows; ++i) {
      const int t = i + p + 1;
      dy(i) = y(t) - y(t - 1);
      X(i, 0) = y(t - 1);
      X(i, 1) = 1.0;
      for (int j = 1; j <= p; ++j) X(i, 1 + j) = y(t - j) - y(t - j - 1);
    }
    Eigen::MatrixXd xtx = X.transpose() * X;
    Eigen::VectorXd b = xtx.ldlt().solve(X.transpose() * dy);
    Eigen::VectorXd e = dy - X * b;
    const double se = std::sqrt(e.squaredNorm() / (rows - X.cols()) * xtx.inverse()(0, 0));
    CHECK(r.statistic == doctest::Approx(b(0) / se).epsilon(1e-8));
    CHECK(r.lags_or_bandwidth == p);
    CHECK(r.nobs == rows);
  }

  TEST_CASE("MacKinnon critical values") {
    auto c = mackinnon_critical_values(Deterministic::constant, 100000);
    CHECK(c.pct5 == doctest::Approx(-2.8621).epsilon(1e-3));
    CHECK(c.pct1 == doctest::Approx(-3.4304).epsilon(1e-3));
    auto ct = mackinnon_critical_values(Deterministic::constant_trend, 100000);
    CHECK(ct.pct5 == doctest::Approx(-3.4126).epsilon(1e-3));
    auto small = mackinnon_critical_values(Deterministic::constant, 100);
    CHECK(small.pct5 < c.pct5);
    CHECK(small.ordered());
  }

  TEST_CASE("stationary series rejects, constant series is singular") {
    Rng rng = make_rng(5);
    Eigen::VectorXd e = testing::normal_vector(rng, 200);
    Eigen::VectorXd x(200);
    x(0) = e(0);
    for (int t = 1; t < 200; ++t) x(t) = 0.5 * x(t - 1) + e(t);
    auto s = testing::series("x", x);
    CHECK(adf_test(s).reject_at == Level::pct1);
    CHECK(pp_test(s).reject_at == Level::pct1);
    TimeSeries flat("c", {2000, 1}, std::vector<double>(60, 3.0));
    CHECK_THROWS_AS(adf_test(flat), SingularityError);
    CHECK_THROWS_AS(adf_test(TimeSeries("s", {2000, 1}, std::vector<double>(10, 1.0))), LengthError);
  }

  TEST_CASE("default lag and bandwidth rules") {
    CHECK(default_max_lag(160) == 13);
    CHECK(default_bandwidth(160) == 4);
    CHECK(default_max_lag(100) == 12);
  }
}
