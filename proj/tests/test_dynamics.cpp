#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "ucoint/dynamics.hpp"
#include "ucoint/errors.hpp"
#include "ucoint/montecarlo.hpp"

using namespace ucoint;

namespace {

std::vector<TimeSeries> var_levels(const std::vector<double>& A, int k, int n, std::uint64_t seed) {
  DgpSpec s;
  s.kind = DgpKind::var_diff;
  s.m = k;
  s.n = n;
  s.seed = seed;
  s.params.var_matrix = A;
  return generate(s);
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("ECM regressors are orthogonal to residuals and R2 is consistent") {
    Rng rng = make_rng(2);
    const int n = 150;
    auto i = testing::series("I", testing::random_walk(rng, n));
    auto u = testing::series("U", testing::random_walk(rng, n));
    auto e = testing::series("ECM", testing::normal_vector(rng, n));
    Eigen::VectorXd shock = testing::normal_vector(rng, n, 0.1);
    Eigen::VectorXd dj(n);
    dj(0) = 0.0;
    for (int t = 1; t < n; ++t) dj(t) = dj(t - 1) - 0.2 * e[static_cast<std::size_t>(t - 1)] + shock(t);
    auto fit = fit_ecm(testing::series("DJ", dj), i, u, e);
    CHECK(fit.nobs == n - 1);
    const std::vector<std::string> names{"C", "ECM(-1)", "dI", "dU"};
    CHECK(fit.names == names);
    CHECK((fit.X.transpose() * fit.resid).cwiseAbs().maxCoeff() < 1e-8);
    double sst = 0.0, ssr = 0.0;
    const double mean = fit.y.mean();
    for (int t = 0; t < fit.y.size(); ++t) {
      sst += (fit.y(t) - mean) * (fit.y(t) - mean);
      ssr += fit.resid(t) * fit.resid(t);
    }
    CHECK(fit.r_squared == doctest::Approx(1.0 - ssr / sst).epsilon(1e-10));
    CHECK(fit.r_squared >= 0.0);
    CHECK(fit.r_squared <= 1.0);
  }

  TEST_CASE("ECM recovers a known adjustment speed") {
    int covered = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
      Rng rng = make_rng(substream_seed(99, static_cast<std::uint64_t>(rep)));
      const int n = 160;
      auto i = testing::random_walk(rng, n);
      auto u = testing::random_walk(rng, n);
      Eigen::VectorXd noise = testing::normal_vector(rng, n, 0.5);
      // y - (i + u) is the equilibrium error; it adjusts at speed -0.2.
      Eigen::VectorXd y(n), ecm(n);
      y(0) = i(0) + u(0);
      ecm(0) = 0.0;
      for (int t = 1; t < n; ++t) {
        const double dy = -0.2 * ecm(t - 1) + (i(t) - i(t - 1)) + (u(t) - u(t - 1)) + noise(t);
        y(t) = y(t - 1) + dy;
        ecm(t) = y(t) - i(t) - u(t);
      }
      auto fit = fit_ecm(testing::series("y", y), testing::series("I", i), testing::series("U", u), testing::series("e", ecm));
      if (std::abs(fit.coef(1) + 0.2) <= 2.0 * fit.se(1)) ++covered;
    }
    CHECK(covered >= 180);
  }

  TEST_CASE("ECM errors") {
    Rng rng = make_rng(4);
    auto a = testing::series("a", testing::random_walk(rng, 60));
    auto b = testing::series("b", testing::random_walk(rng, 60));
    auto shifted = testing::series("e", testing::normal_vector(rng, 60), {2002, 8});
    CHECK_THROWS_AS(fit_ecm(a, b, b, shifted), AlignmentError);
    auto zero = TimeSeries("e", {2002, 7}, std::vector<double>(60, 0.0));
    CHECK_THROWS_AS(fit_ecm(a, b, testing::series("c", testing::random_walk(rng, 60)), zero), SingularityError);
  }

  TEST_CASE("companion matrix stability on known systems") {
    Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(3, 3);
    CHECK(spectral_radius(companion_matrix({Z, Z})) == doctest::Approx(0.0));
    VarFit f;
    f.p = 1;
    f.k = 2;
    f.lags = {Eigen::MatrixXd::Identity(2, 2)};
    f.spectral_radius = spectral_radius(companion_matrix(f.lags));
    CHECK(f.spectral_radius == doctest::Approx(1.0));
    CHECK_FALSE(var_stability(f));
    Eigen::MatrixXd A(2, 2);
    A << 0.5, 0.2, 0.0, -0.3;
    CHECK(spectral_radius(A) == doctest::Approx(0.5));
    // VAR(2) companion: x_t = 0.5 x_{t-1} + 0.3 x_{t-2} has roots of z^2 - 0.5 z - 0.3.
    Eigen::MatrixXd a1 = 0.5 * Eigen::MatrixXd::Identity(1, 1), a2 = 0.3 * Eigen::MatrixXd::Identity(1, 1);
    const double root = (0.5 + std::sqrt(0.25 + 1.2)) / 2.0;
    CHECK(spectral_radius(companion_matrix({a1, a2})) == doctest::Approx(root).epsilon(1e-12));
  }

  TEST_CASE("VAR in differences recovers a spectral radius of 0.5") {
    const std::vector<double> A{0.5, 0.0, 0.1, 0.3};
    auto f = fit_var_diff(var_levels(A, 2, 2000, 5), 1);
    CHECK(f.stable);
    CHECK(var_stability(f));
    CHECK(std::abs(f.spectral_radius - 0.5) < 0.1);
    CHECK(f.names == std::vector<std::string>{"dv1", "dv2"});
  }

  TEST_CASE("VAR coefficient error shrinks with the sample") {
    const std::vector<double> A{0.4, 0.1, -0.2, 0.3};
    auto rmse = [&](int n) {
      double acc = 0.0;
      for (int rep = 0; rep < 20; ++rep) {
        auto f = fit_var_diff(var_levels(A, 2, n, 100 + static_cast<std::uint64_t>(rep)), 1);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) acc += std::pow(f.lags[0](i, j) - A[static_cast<std::size_t>(2 * i + j)], 2);
      }
      return std::sqrt(acc / 80.0);
    };
    CHECK(rmse(800) < rmse(200));
  }

  TEST_CASE("white-noise differences give insignificant lags and a stable VAR") {
    int stable = 0, inside = 0, total = 0;
    for (int rep = 0; rep < 50; ++rep) {
      auto f = fit_var_diff(var_levels({0, 0, 0, 0}, 2, 200, 300 + static_cast<std::uint64_t>(rep)), 2);
      stable += f.stable ? 1 : 0;
      for (int l = 0; l < 2; ++l)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            ++total;
            if (std::abs(f.lags[static_cast<std::size_t>(l)](i, j)) <= 2.0 * f.lag_se[static_cast<std::size_t>(l)](i, j)) ++inside;
          }
    }
    CHECK(stable == 50);
    CHECK(static_cast<double>(inside) / total >= 0.9);
  }

  TEST_CASE("lag selection and VAR errors") {
    auto data = var_levels({0.5, 0.0, 0.0, 0.5}, 2, 600, 8);
    const int p = select_var_lag(data, 4, true);
    CHECK(p == 1);
    CHECK_THROWS_AS(fit_var_diff({data[0]}, 2), LengthError);
    CHECK_THROWS_AS(fit_var_diff({data[0].slice(data[0].start(), data[0].start().plus(8)),
                                  data[1].slice(data[1].start(), data[1].start().plus(8))}, 2),
                    LengthError);
  }
}
