#pragma once

#include <cstdint>

#include "ucoint/series.hpp"

namespace ucoint {

// Settings of the trend/gap stochastic-volatility sampler. n_draws counts all
// iterations; the first burn_in are discarded.
struct UcsvConfig {
  double gamma = 0.04;  // variance of the log-volatility random-walk steps
  int n_draws = 5000;
  int burn_in = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

// Posterior means. gap is defined residually per draw, so trend + gap = pi.
struct UcsvPosterior {
  TimeSeries pi;
  TimeSeries trend;
  TimeSeries gap;
  TimeSeries sigma_eta;
  TimeSeries sigma_eps;
  UcsvConfig config;
};

UcsvPosterior estimate_ucsv(const TimeSeries& pi, const UcsvConfig& cfg);

// U_t: posterior mean of the transitory-shock volatility sigma_eta.
TimeSeries uncertainty_series(const UcsvPosterior& post);

// Starting point of a simulated path.
struct UcsvStart {
  double tau0 = 2.0;
  double sigma_eta0 = 1.0;
  double sigma_eps0 = 0.25;
  MonthIndex start{2002, 7};
};

struct UcsvPaths {
  TimeSeries pi;
  TimeSeries tau;
  TimeSeries sigma_eta;
  TimeSeries sigma_eps;
};

// Forward simulation of the trend/gap model with random-walk log variances.
UcsvPaths simulate_ucsv(const UcsvConfig& cfg, int n, std::uint64_t seed, const UcsvStart& start = {});

}  // namespace ucoint
