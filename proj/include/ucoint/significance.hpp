#pragma once

#include <optional>
#include <string>

namespace ucoint {

enum class Level { pct1, pct5, pct10 };

double level_fraction(Level level);
std::string level_name(Level level);  // "1%", "5%", "10%"
Level level_from_fraction(double alpha);

// Left-tailed critical values: reject when statistic < value.
struct CriticalValues {
  double pct1 = 0.0;
  double pct5 = 0.0;
  double pct10 = 0.0;

  double at(Level level) const;
  bool ordered() const { return pct1 < pct5 && pct5 < pct10; }
  // Strongest level at which `statistic` rejects.
  std::optional<Level> reject_at(double statistic) const;
  bool rejects(double statistic, Level level) const { return statistic < at(level); }
};

// "***", "**", "*" or "" for rejection at 1/5/10%.
std::string stars(std::optional<Level> level);
// Two-sided stars from a p-value.
std::string stars_from_p(double p_value);

}  // namespace ucoint
