#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ucoint/ols.hpp"
#include "ucoint/series.hpp"
#include "ucoint/significance.hpp"

namespace ucoint {

// Single-break long-run regressions:
//   LS   level shift                   [1, phi, X]
//   LST  level shift with trend        [1, phi, t, X]
//   RS   regime shift                  [1, phi, X, X*phi]
//   RST  regime shift with trend shift [1, phi, t, t*phi, X, X*phi]
enum class GhModel { LS, LST, RS, RST };

inline constexpr GhModel kAllModels[] = {GhModel::LS, GhModel::LST, GhModel::RS, GhModel::RST};

std::string model_code(GhModel model);  // "LS"
std::string model_name(GhModel model);  // "GH-LS"
GhModel parse_model(const std::string& text);
int design_columns(GhModel model, int m);
bool has_slope_break(GhModel model);

// Fractional trimming of admissible break positions.
struct Trim {
  double lo = 0.15;
  double hi = 0.85;
};

// phi_t = 0 for t <= break_position (1-based), 1 afterwards; break_position = [n tau].
struct BreakDummy {
  double tau = 0.5;
  int break_position = 0;

  static BreakDummy at_fraction(int n, double tau);
  double value(int t) const { return t > break_position ? 1.0 : 0.0; }
};

// First and last admissible break positions for a sample of n.
std::pair<int, int> candidate_range(int n, const Trim& trim);

struct Design {
  GhModel model = GhModel::LS;
  int break_position = 0;
  int m = 0;
  Eigen::MatrixXd X;
  std::vector<std::string> names;
};

// Regressors must be aligned with y. The break must lie inside the trimmed window.
Design build_design(const TimeSeries& y, const std::vector<TimeSeries>& X, GhModel model,
                    int break_position, const Trim& trim = {});

struct LongRunVariance {
  double gamma0 = 0.0;
  double lambda = 0.0;
  double sigma2 = 0.0;  // gamma0 + 2 lambda, floored at 1e-12
};

// Bartlett-kernel long-run variance of a mean-zero series.
LongRunVariance long_run_variance(const Eigen::VectorXd& v, int bandwidth);

struct PhillipsStats {
  double rho = 0.0;
  double rho_star = 0.0;
  double z_alpha = 0.0;
  double z_t = 0.0;
  // Parts: cross = sum_{t<n} e_t e_{t+1}, sum_sq = sum_{t<n} e_t^2.
  double cross = 0.0;
  double sum_sq = 0.0;
  LongRunVariance lrv;
  int n = 0;
};

PhillipsStats phillips_stats(const Eigen::VectorXd& eps, int bandwidth);

struct ResidualAdf {
  double statistic = 0.0;
  int lag = 0;
};

// t-statistic on e_{t-1} in de_t = a e_{t-1} + sum_k b_k de_{t-k}, no deterministic
// terms. Without a fixed lag, K is picked by BIC over 0..max_lag on a common sample.
ResidualAdf adf_on_residuals(const Eigen::VectorXd& eps, std::optional<int> lag = {},
                             std::optional<int> max_lag = {});

enum class GhStatistic { adf, zt, za };
std::string statistic_name(GhStatistic s);

enum class CvSource { embedded, simulated };

struct GhCriticalValues {
  CriticalValues values;
  CvSource source = CvSource::embedded;
};

// Published asymptotic values, m = 1..4 regressors. Anything else raises.
GhCriticalValues gh_critical_values(GhModel model, int m, GhStatistic stat);

struct GhOptions {
  Trim trim;
  std::optional<int> bandwidth;  // default floor(4 (n/100)^{2/9})
  std::optional<int> fixed_lag;
  std::optional<int> max_lag;
  int threads = 1;
};

struct CandidateStats {
  int break_position = 0;
  MonthIndex date;
  double adf = 0.0;
  int adf_lag = 0;
  double zt = 0.0;
  double za = 0.0;
};

struct GhStatResult {
  double statistic = 0.0;
  int break_position = 0;
  MonthIndex break_date;  // last month with phi = 0
  int lag = 0;            // ADF only
  CriticalValues critical_values;
  std::optional<Level> reject_at;
};

struct GhResult {
  GhModel model = GhModel::LS;
  int m = 0;
  int n = 0;
  int bandwidth = 0;
  GhStatResult adf;
  GhStatResult zt;
  GhStatResult za;
  std::vector<CandidateStats> candidate_trace;
  CvSource cv_source = CvSource::embedded;

  const GhStatResult& stat(GhStatistic s) const;
};

// Statistics for one break position, computed from scratch.
CandidateStats evaluate_candidate(const TimeSeries& y, const std::vector<TimeSeries>& X, GhModel model,
                                  int break_position, const GhOptions& opts = {});

// Minimum of each statistic over all trimmed break candidates.
GhResult gh_test(const TimeSeries& y, const std::vector<TimeSeries>& X, GhModel model,
                 const GhOptions& opts = {});

// Same, on raw vectors; used by the simulation engine. No critical values attached.
struct GhMinima {
  double adf, zt, za;
  int adf_break, zt_break, za_break;
};
GhMinima gh_minima(const Eigen::VectorXd& y, const Eigen::MatrixXd& X, GhModel model, const GhOptions& opts = {});

struct DecisionRule {
  Level level = Level::pct10;
  int required = 2;
};

struct ModelDecision {
  GhModel model = GhModel::LS;
  bool adf = false;
  bool zt = false;
  bool za = false;
  int rejections = 0;
  bool passes = false;
};

struct Decision {
  std::vector<ModelDecision> models;
  bool cointegrated = false;
  std::vector<GhModel> passing;
  // Most general passing model (RST > RS > LST > LS); feeds the ECM.
  std::optional<GhModel> representative;
};

Decision decide(const std::vector<GhResult>& results, const DecisionRule& rule = {});

struct CointegrationFit {
  GhModel model = GhModel::LS;
  MonthIndex break_date;
  int break_position = 0;
  int m = 0;
  std::vector<std::string> names;
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::MatrixXd cov;
  TimeSeries residuals{"resid", MonthIndex{}, {0.0}};
  double r_squared = 0.0;
  int nobs = 0;

  double t_stat(int j) const { return coef(j) / se(j); }
  int index_of(const std::string& name) const;
};

// OLS on the break-dummy design with phi = 1 after break_date. A break at or
// after the last observation collapses to the no-break regression; the dummy
// terms are then reported as 0 with NaN standard errors.
CointegrationFit fit_break_regression(const TimeSeries& y, const std::vector<TimeSeries>& X, GhModel model,
                                      MonthIndex break_date,
                                      CovarianceKind cov = CovarianceKind::conventional);

struct WaldResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

WaldResult wald_test(const Eigen::VectorXd& coef, const Eigen::MatrixXd& cov, const Eigen::MatrixXd& R,
                     const Eigen::VectorXd& r);
WaldResult wald_test(const CointegrationFit& fit, const Eigen::MatrixXd& R, const Eigen::VectorXd& r);

// Rows stating that each regressor's post-break slope (own + dummy interaction)
// is zero. Only defined for RS and RST.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> post_break_slope_restriction(const CointegrationFit& fit);

}  // namespace ucoint
