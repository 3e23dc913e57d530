#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ucoint/errors.hpp"
#include "ucoint/ucsv.hpp"

using namespace ucoint;

namespace {
UcsvConfig quick(std::uint64_t seed) {
  UcsvConfig c;
  c.n_draws = 1500;
  c.burn_in = 300;
  c.seed = seed;
  return c;
}
}  // namespace

TEST_SUITE("ucsv") {
  TEST_CASE("trend plus gap reproduces inflation") {
    auto paths = simulate_ucsv(quick(1), 160, 5);
    auto post = estimate_ucsv(paths.pi, quick(9));
    REQUIRE(post.trend.size() == 160);
    for (std::size_t t = 0; t < 160; ++t) CHECK(std::abs(post.trend[t] + post.gap[t] - paths.pi[t]) < 1e-10);
    for (std::size_t t = 0; t < 160; ++t) {
      CHECK(post.sigma_eta[t] > 0.0);
      CHECK(post.sigma_eps[t] > 0.0);
    }
    auto u = uncertainty_series(post);
    CHECK(u.id() == "U");
    CHECK(u == post.sigma_eta.renamed("U"));
  }

  TEST_CASE("fixed seed is exactly reproducible") {
    auto paths = simulate_ucsv(quick(0), 100, 77);
    auto again = simulate_ucsv(quick(0), 100, 77);
    CHECK(paths.pi == again.pi);
    auto a = estimate_ucsv(paths.pi, quick(3));
    auto b = estimate_ucsv(paths.pi, quick(3));
    CHECK(a.trend == b.trend);
    CHECK(a.sigma_eta == b.sigma_eta);
    auto c = estimate_ucsv(paths.pi, quick(4));
    CHECK_FALSE(a.trend == c.trend);
  }

  TEST_CASE("simulated paths satisfy the state equations") {
    auto p = simulate_ucsv(quick(0), 80, 12);
    CHECK(p.pi.size() == 80);
    CHECK(p.tau.start() == p.pi.start());
    for (std::size_t t = 0; t < 80; ++t) CHECK(p.sigma_eta[t] > 0.0);
  }

  TEST_CASE("input validation") {
    TimeSeries short_pi("pi", {2000, 1}, std::vector<double>(23, 1.0));
    CHECK_THROWS_AS(estimate_ucsv(short_pi, quick(1)), LengthError);
    std::vector<double> v(40, 1.0);
    v[10] = std::nan("");
    CHECK_THROWS_AS(estimate_ucsv(TimeSeries("pi", {2000, 1}, v), quick(1)), DomainError);
    UcsvConfig bad = quick(1);
    bad.burn_in = bad.n_draws;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = quick(1);
    bad.gamma = 0.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
  }
}
