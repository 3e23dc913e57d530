#include "ucoint/significance.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ucoint/errors.hpp"

namespace ucoint {

double level_fraction(Level level) {
  switch (level) {
    case Level::pct1: return 0.01;
    case Level::pct5: return 0.05;
    case Level::pct10: return 0.10;
  }
  return 0.0;
}

std::string level_name(Level level) {
  switch (level) {
    case Level::pct1: return "1%";
    case Level::pct5: return "5%";
    case Level::pct10: return "10%";
  }
  return "";
}

Level level_from_fraction(double alpha) {
  if (std::abs(alpha - 0.01) < 1e-9) return Level::pct1;
  if (std::abs(alpha - 0.05) < 1e-9) return Level::pct5;
  if (std::abs(alpha - 0.10) < 1e-9) return Level::pct10;
  throw DomainError(fmt::format("unsupported significance level {}", alpha));
}

double CriticalValues::at(Level level) const {
  switch (level) {
    case Level::pct1: return pct1;
    case Level::pct5: return pct5;
    case Level::pct10: return pct10;
  }
  return 0.0;
}

std::optional<Level> CriticalValues::reject_at(double statistic) const {
  if (statistic < pct1) return Level::pct1;
  if (statistic < pct5) return Level::pct5;
  if (statistic < pct10) return Level::pct10;
  return std::nullopt;
}

std::string stars(std::optional<Level> level) {
  if (!level) return "";
  switch (*level) {
    case Level::pct1: return "***";
    case Level::pct5: return "**";
    case Level::pct10: return "*";
  }
  return "";
}

std::string stars_from_p(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.10) return "*";
  return "";
}

}  // namespace ucoint
