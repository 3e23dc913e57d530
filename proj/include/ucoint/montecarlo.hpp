#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ucoint/cointegration.hpp"
#include "ucoint/series.hpp"
#include "ucoint/ucsv.hpp"

namespace ucoint {

enum class DgpKind { random_walks_null, cointegrated_with_break, ucsv_dgp, stable_regression, var_diff };

struct DgpParams {
  // cointegrated_with_break: coefficients on the build_design columns.
  // stable_regression: [intercept, slopes...].
  std::vector<double> coefficients;
  double noise_sd = 1.0;
  double ar = 0.3;  // AR(1) coefficient of the cointegration error
  GhModel model = GhModel::RS;
  // stable_regression alternatives, applied after the break fraction.
  std::vector<double> coefficient_step;
  double variance_ratio = 1.0;
  // var_diff: k x k coefficient matrix of the differenced VAR(1), row-major.
  std::vector<double> var_matrix;
  UcsvConfig ucsv;
};

struct DgpSpec {
  DgpKind kind = DgpKind::random_walks_null;
  int m = 1;
  int n = 160;
  double tau = 0.5;
  DgpParams params;
  std::uint64_t seed = 0;

  void validate() const;
};

// Deterministic under spec.seed. Output layouts:
//   random_walks_null, cointegrated_with_break, stable_regression: y, x1..xm
//   ucsv_dgp: pi, tau, sigma_eta, sigma_eps
//   var_diff: m level series whose differences follow the VAR(1)
std::vector<TimeSeries> generate(const DgpSpec& spec);

// Runs fn(index) for index in [0, reps) on `threads` workers; results are
// stored by index, so the output does not depend on scheduling.
std::vector<double> run_replications(int reps, int threads, const std::function<double(int)>& fn);

// Lower-tail empirical quantile (type 7).
double empirical_quantile(std::vector<double> values, double p);

struct CriticalValueTable {
  GhModel model = GhModel::LS;
  int m = 0;
  int n = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  std::vector<double> levels;
  std::map<GhStatistic, std::vector<double>> quantiles;  // aligned with levels
  std::map<GhStatistic, std::vector<double>> draws;      // raw minima by replication

  CriticalValues as_critical_values(GhStatistic s) const;  // needs levels {0.01, 0.05, 0.10}
};

struct SimulationOptions {
  std::uint64_t seed = 1996;
  int threads = 1;
  GhOptions gh;
};

CriticalValueTable simulate_critical_values(GhModel model, int m, int n, int reps,
                                            const std::vector<double>& levels = {0.01, 0.05, 0.10},
                                            const SimulationOptions& opts = {});

// Quantile standard error by nonparametric bootstrap.
double bootstrap_quantile_se(const std::vector<double>& values, double p, int resamples, std::uint64_t seed);

struct ReplicationSummary {
  int reps = 0;
  std::vector<double> levels;
  std::vector<double> null_quantiles;
  std::vector<double> null_rejection;  // per level
  std::vector<double> alt_rejection;
  double seconds = 0.0;
};

// Statistic of one generated data set; left-tailed (reject when below the critical value).
using TestClosure = std::function<double(const std::vector<TimeSeries>&)>;

ReplicationSummary size_power_study(const DgpSpec& null_spec, const DgpSpec& alt_spec, const TestClosure& test,
                                    const std::vector<double>& critical_values, const std::vector<double>& levels,
                                    int reps, std::uint64_t master_seed, int threads = 1);

}  // namespace ucoint
