#pragma once

#include <optional>

#include "ucoint/series.hpp"
#include "ucoint/significance.hpp"

namespace ucoint {

enum class Deterministic { constant, constant_trend };
enum class LagCriterion { bic, aic };

struct UnitRootResult {
  double statistic = 0.0;
  int lags_or_bandwidth = 0;
  int nobs = 0;
  CriticalValues critical_values;
  std::optional<Level> reject_at;
  Deterministic spec = Deterministic::constant;
};

struct AdfOptions {
  Deterministic spec = Deterministic::constant;
  std::optional<int> max_lags;    // default floor(12 (n/100)^{1/4})
  std::optional<int> fixed_lags;  // skips selection
  LagCriterion criterion = LagCriterion::bic;
};

UnitRootResult adf_test(const TimeSeries& s, const AdfOptions& opts = {});

struct PpOptions {
  Deterministic spec = Deterministic::constant;
  std::optional<int> bandwidth;  // default floor(4 (n/100)^{2/9})
};

UnitRootResult pp_test(const TimeSeries& s, const PpOptions& opts = {});

// MacKinnon (2010) response-surface critical values for a single series,
// evaluated at `nobs` regression observations.
CriticalValues mackinnon_critical_values(Deterministic spec, int nobs);

int default_max_lag(int n);
int default_bandwidth(int n);

}  // namespace ucoint
