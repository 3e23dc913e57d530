#include <doctest.h>

#include "ucoint/errors.hpp"
#include "ucoint/significance.hpp"

using namespace ucoint;

TEST_SUITE("significance") {
  TEST_CASE("left-tailed rejection levels and stars") {
    CriticalValues cv{-5.0, -4.5, -4.2};
    CHECK(cv.ordered());
    CHECK(cv.reject_at(-5.1) == Level::pct1);
    CHECK(cv.reject_at(-4.6) == Level::pct5);
    CHECK(cv.reject_at(-4.3) == Level::pct10);
    CHECK_FALSE(cv.reject_at(-4.0).has_value());
    CHECK(stars(cv.reject_at(-5.1)) == "***");
    CHECK(stars(cv.reject_at(-4.6)) == "**");
    CHECK(stars(cv.reject_at(-4.3)) == "*");
    CHECK(stars(std::nullopt).empty());
  }

  TEST_CASE("p-value stars and level names") {
    CHECK(stars_from_p(0.005) == "***");
    CHECK(stars_from_p(0.03) == "**");
    CHECK(stars_from_p(0.07) == "*");
    CHECK(stars_from_p(0.2).empty());
    CHECK(level_name(Level::pct5) == "5%");
    CHECK(level_from_fraction(0.10) == Level::pct10);
    CHECK_THROWS_AS(level_from_fraction(0.2), DomainError);
  }
}
