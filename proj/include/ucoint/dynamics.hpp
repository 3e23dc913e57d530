#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ucoint/series.hpp"

namespace ucoint {

struct EcmOptions {
  int difference_lags = 0;  // adds lags 1..p of every differenced regressor
};

struct EcmFit {
  std::vector<std::string> names;  // "C", "ECM(-1)", "dI", "dU", ["dIP"], ...
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  Eigen::MatrixXd cov;
  double r_squared = 0.0;
  int nobs = 0;
  MonthIndex first;  // date of the first modeled change
  Eigen::MatrixXd X;  // design, kept for recursive-residual diagnostics
  Eigen::VectorXd y;
  Eigen::VectorXd resid;
};

// OLS of dDJ_t on [1, ecm_{t-1}, dI_t, dU_t, (dIP_t)]. All inputs share one sample.
EcmFit fit_ecm(const TimeSeries& dj, const TimeSeries& i, const TimeSeries& u, const TimeSeries& ecm_resid,
               const std::optional<TimeSeries>& ip = std::nullopt, const EcmOptions& opts = {});

struct VarFit {
  int p = 0;
  int k = 0;
  std::vector<std::string> names;       // equation variables, "d" + id
  Eigen::VectorXd intercept;            // k
  std::vector<Eigen::MatrixXd> lags;    // p matrices, k x k; row = equation
  Eigen::VectorXd intercept_se;
  std::vector<Eigen::MatrixXd> lag_se;
  Eigen::VectorXd r_squared;
  int nobs = 0;
  double spectral_radius = 0.0;
  bool stable = false;
};

// VAR(p) with intercept on the first differences of `series`.
VarFit fit_var_diff(const std::vector<TimeSeries>& series, int p = 2);

// Lag order minimising AIC (or BIC) over 1..p_max on a common sample.
int select_var_lag(const std::vector<TimeSeries>& series, int p_max, bool bic = false);

Eigen::MatrixXd companion_matrix(const std::vector<Eigen::MatrixXd>& lags);
double spectral_radius(const Eigen::MatrixXd& A);

bool var_stability(const VarFit& fit);

}  // namespace ucoint
