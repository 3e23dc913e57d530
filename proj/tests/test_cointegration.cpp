#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>
#include <Eigen/Dense>

#include "helpers.hpp"
#include "ucoint/cointegration.hpp"
#include "ucoint/errors.hpp"
#include "ucoint/montecarlo.hpp"

using namespace ucoint;

namespace {

struct Pair {
  TimeSeries y;
  std::vector<TimeSeries> X;
};

// y = 1 + 0.5 phi + x1 - 0.5 x2 + AR(1) noise, break at n/2.
Pair cointegrated(std::uint64_t seed, int n = 160, double noise = 0.5) {
  DgpSpec s;
  s.kind = DgpKind::cointegrated_with_break;
  s.m = 2;
  s.n = n;
  s.tau = 0.5;
  s.seed = seed;
  s.params.model = GhModel::LS;
  s.params.coefficients = {1.0, 0.5, 1.0, -0.5};
  s.params.noise_sd = noise;
  auto d = generate(s);
  return {d[0], {d[1], d[2]}};
}

}  // namespace

TEST_SUITE("cointegration") {
  TEST_CASE("design shapes and names") {
    auto p = cointegrated(1);
    CHECK(design_columns(GhModel::LS, 2) == 4);
    CHECK(design_columns(GhModel::LST, 2) == 5);
    CHECK(design_columns(GhModel::RS, 2) == 6);
    CHECK(design_columns(GhModel::RST, 2) == 8);
    auto d = build_design(p.y, p.X, GhModel::RST, 80);
    CHECK(d.X.cols() == 8);
    const std::vector<std::string> names{"C", "Dum x C", "Trend", "Dum x Trend", "x1", "x2", "Dum x x1", "Dum x x2"};
    CHECK(d.names == names);
    CHECK(d.X(79, 1) == 0.0);
    CHECK(d.X(80, 1) == 1.0);
    CHECK(d.X(0, 2) == 1.0);
    CHECK(d.X(100, 3) == 101.0);
    CHECK(d.X(100, 6) == d.X(100, 4));
    CHECK(d.X(10, 6) == 0.0);
    CHECK_THROWS_AS(build_design(p.y, p.X, GhModel::LS, 10), RangeError);
    CHECK(candidate_range(160, Trim{}) == std::pair{24, 136});
    CHECK(BreakDummy::at_fraction(160, 0.5).break_position == 80);
  }

  TEST_CASE("model names round trip") {
    for (auto m : kAllModels) {
      CHECK(parse_model(model_code(m)) == m);
      CHECK(parse_model(model_name(m)) == m);
    }
    CHECK_THROWS(parse_model("XYZ"));
  }

  TEST_CASE("long-run variance of an MA(1) process") {
    // v_t = e_t + 0.5 e_{t-1}: gamma0 = 1.25, gamma1 = 0.5, long-run variance 2.25.
    Rng rng = make_rng(17);
    const int n = 200000;
    Eigen::VectorXd e = testing::normal_vector(rng, n + 1);
    Eigen::VectorXd v = e.tail(n) + 0.5 * e.head(n);
    auto lrv = long_run_variance(v, 60);
    CHECK(lrv.gamma0 == doctest::Approx(1.25).epsilon(0.02));
    CHECK(lrv.sigma2 == doctest::Approx(2.25).epsilon(0.04));
    auto zero = long_run_variance(v, 0);
    CHECK(zero.lambda == 0.0);
    CHECK(zero.sigma2 == zero.gamma0);
  }

  TEST_CASE("Phillips statistics satisfy the rho-star identity") {
    Rng rng = make_rng(23);
    for (int rep = 0; rep < 20; ++rep) {
      const int n = 100 + rep;
      Eigen::VectorXd eps = testing::normal_vector(rng, n);
      for (int t = 1; t < n; ++t) eps(t) += 0.6 * eps(t - 1);
      const int bw = 1 + rep % 6;
      auto ps = phillips_stats(eps, bw);
      // Independent accumulation.
      double cross = 0.0, sq = 0.0;
      for (int t = 1; t < n; ++t) {
        cross += eps(t) * eps(t - 1);
        sq += eps(t - 1) * eps(t - 1);
      }
      const double rho = cross / sq;
      std::vector<double> v;
      for (int t = 1; t < n; ++t) v.push_back(eps(t) - rho * eps(t - 1));
      const double N = static_cast<double>(v.size());
      double g0 = 0.0, lam = 0.0;
      for (double x : v) g0 += x * x / N;
      for (int j = 1; j <= bw; ++j) {
        double a = 0.0;
        for (std::size_t t = static_cast<std::size_t>(j); t < v.size(); ++t) a += v[t] * v[t - static_cast<std::size_t>(j)];
        lam += (1.0 - j / (bw + 1.0)) * a / N;
      }
      const double rho_star = (cross - n * lam) / sq;
      CHECK(ps.rho == doctest::Approx(rho).epsilon(1e-12));
      CHECK(ps.rho_star == doctest::Approx(rho_star).epsilon(1e-10));
      CHECK(ps.z_alpha == doctest::Approx(n * (rho_star - 1.0)).epsilon(1e-10));
      CHECK(ps.z_t == doctest::Approx((rho_star - 1.0) / std::sqrt((g0 + 2 * lam) / sq)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(phillips_stats(Eigen::VectorXd::Zero(50), 2), DegenerateError);
  }

  TEST_CASE("residual ADF with a fixed lag equals a direct regression") {
    Rng rng = make_rng(31);
    Eigen::VectorXd e = testing::normal_vector(rng, 120);
    for (int t = 1; t < 120; ++t) e(t) += 0.7 * e(t - 1);
    const int K = 2;
    auto r = adf_on_residuals(e, K);
    const int rows = 120 - 1 - K;
    Eigen::MatrixXd Z(rows, 1 + K);
    Eigen::VectorXd de(rows);
    for (int i = 0; i < rows; ++i) {
      const int t = i + K + 1;
      de(i) = e(t) - e(t - 1);
      Z(i, 0) = e(t - 1);
      for (int k = 1; k <= K; ++k) Z(i, k) = e(t - k) - e(t - k - 1);
    }
    auto f = ols(Z, de);
    CHECK(r.statistic == doctest::Approx(f.t_stat(0)).epsilon(1e-10));
  }

  TEST_CASE("minimum over candidates equals the trace minimum") {
    auto p = cointegrated(4);
    auto r = gh_test(p.y, p.X, GhModel::LST);
    REQUIRE(r.candidate_trace.size() == 113);
    double min_zt = 1e300;
    int arg = 0;
    for (const auto& c : r.candidate_trace)
      if (c.zt < min_zt) {
        min_zt = c.zt;
        arg = c.break_position;
      }
    CHECK(r.zt.statistic == min_zt);
    CHECK(r.zt.break_position == arg);
    // Recomputing the chosen candidate from scratch gives the same statistic.
    auto c = evaluate_candidate(p.y, p.X, GhModel::LST, arg);
    CHECK(c.zt == doctest::Approx(min_zt).epsilon(1e-10));
    CHECK(r.zt.break_date == p.y.date_at(static_cast<std::size_t>(arg - 1)));
    // The Monte Carlo fast path agrees.
    auto mm = gh_minima(p.y.vector(), (Eigen::MatrixXd(160, 2) << p.X[0].vector(), p.X[1].vector()).finished(), GhModel::LST);
    CHECK(mm.zt == doctest::Approx(r.zt.statistic).epsilon(1e-9));
    CHECK(mm.adf == doctest::Approx(r.adf.statistic).epsilon(1e-9));
    CHECK(mm.za == doctest::Approx(r.za.statistic).epsilon(1e-9));
  }

  TEST_CASE("statistics are invariant to rescaling the data") {
    auto p = cointegrated(6);
    auto base = gh_test(p.y, p.X, GhModel::RS);
    Eigen::VectorXd y2 = 7.5 * p.y.vector();
    std::vector<TimeSeries> X2{testing::series("x1", 0.01 * p.X[0].vector()), testing::series("x2", -3.0 * p.X[1].vector())};
    auto scaled = gh_test(testing::series("y", y2), X2, GhModel::RS);
    CHECK(scaled.adf.statistic == doctest::Approx(base.adf.statistic).epsilon(1e-7));
    CHECK(scaled.zt.statistic == doctest::Approx(base.zt.statistic).epsilon(1e-7));
    CHECK(scaled.za.statistic == doctest::Approx(base.za.statistic).epsilon(1e-7));
    CHECK(scaled.zt.break_position == base.zt.break_position);
  }

  TEST_CASE("threads do not change results") {
    auto p = cointegrated(8);
    GhOptions one, four;
    four.threads = 4;
    auto a = gh_test(p.y, p.X, GhModel::RST, one);
    auto b = gh_test(p.y, p.X, GhModel::RST, four);
    CHECK(a.zt.statistic == b.zt.statistic);
    CHECK(a.adf.break_position == b.adf.break_position);
  }

  TEST_CASE("strong cointegration is detected and decided") {
    auto p = cointegrated(9, 160, 0.2);
    std::vector<GhResult> rs;
    for (auto m : kAllModels) rs.push_back(gh_test(p.y, p.X, m));
    auto d = decide(rs);
    CHECK(d.cointegrated);
    REQUIRE(d.representative.has_value());
    CHECK(*d.representative == d.passing.back());
    CHECK(std::abs(rs[0].zt.break_position - 80) <= 5);
  }

  TEST_CASE("embedded critical values") {
    for (auto m : kAllModels)
      for (int k = 1; k <= 4; ++k)
        for (auto s : {GhStatistic::adf, GhStatistic::zt, GhStatistic::za}) CHECK(gh_critical_values(m, k, s).values.ordered());
    CHECK(gh_critical_values(GhModel::LS, 1, GhStatistic::zt).values.pct5 == doctest::Approx(-4.61));
    CHECK_THROWS_AS(gh_critical_values(GhModel::LS, 5, GhStatistic::zt), RangeError);
  }

  TEST_CASE("noise-free data fit exactly at the true break") {
    DgpSpec s;
    s.kind = DgpKind::cointegrated_with_break;
    s.m = 2;
    s.seed = 2;
    s.params.model = GhModel::RST;
    s.params.coefficients = {1, 0.5, 0.01, -0.02, 1, 2, -0.5, 0.5};
    s.params.noise_sd = 0.0;
    auto d = generate(s);
    auto fit = fit_break_regression(d[0], {d[1], d[2]}, GhModel::RST, d[0].date_at(79));
    for (std::size_t t = 0; t < fit.residuals.size(); ++t) CHECK(std::abs(fit.residuals[t]) < 1e-9);
    for (int j = 0; j < 8; ++j) CHECK(fit.coef(j) == doctest::Approx(s.params.coefficients[static_cast<std::size_t>(j)]).epsilon(1e-8));
  }

  TEST_CASE("Wald test against a direct chi-square computation") {
    auto p = cointegrated(12);
    auto fit = fit_break_regression(p.y, p.X, GhModel::RS, p.y.date_at(79));
    auto [R, r] = post_break_slope_restriction(fit);
    REQUIRE(R.rows() == 2);
    CHECK(R(0, fit.index_of("x1")) == 1.0);
    CHECK(R(0, fit.index_of("Dum x x1")) == 1.0);
    auto w = wald_test(fit, R, r);
    Eigen::VectorXd g = R * fit.coef - r;
    const double stat = g.dot((R * fit.cov * R.transpose()).inverse() * g);
    CHECK(w.statistic == doctest::Approx(stat).epsilon(1e-10));
    CHECK(w.df == 2);
    boost::math::chi_squared chi(2);
    CHECK(w.p_value == doctest::Approx(boost::math::cdf(boost::math::complement(chi, stat))).epsilon(1e-10));
    Eigen::MatrixXd dup(2, R.cols());
    dup << R.row(0), R.row(0);
    CHECK_THROWS_AS(wald_test(fit, dup, Eigen::VectorXd::Zero(2)), DomainError);
    auto ls = fit_break_regression(p.y, p.X, GhModel::LS, p.y.date_at(79));
    CHECK_THROWS(post_break_slope_restriction(ls));
  }
}
