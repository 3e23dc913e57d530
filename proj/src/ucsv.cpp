#include "ucoint/ucsv.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "ucoint/errors.hpp"
#include "ucoint/random.hpp"

namespace ucoint {

namespace {

// Seven-component normal mixture for log(chi^2_1) (Kim, Shephard & Chib 1998).
struct MixtureComponent {
  double prob;
  double mean;
  double var;
};

constexpr std::array<MixtureComponent, 7> kLogChi2Mixture{{
    {0.00730, -10.12999 - 1.2704, 5.79596},
    {0.10556, -3.97281 - 1.2704, 2.61369},
    {0.00002, -8.56686 - 1.2704, 5.17950},
    {0.04395, 2.77786 - 1.2704, 0.16735},
    {0.34001, 0.61942 - 1.2704, 0.64009},
    {0.24566, 1.79518 - 1.2704, 0.34023},
    {0.25750, -1.08819 - 1.2704, 1.26261},
}};

constexpr double kLogOffset = 1e-6;
constexpr double kLogVolPriorVar = 10.0;
constexpr double kMinInitVariance = 1e-4;

// Draw x_{1:n} from a local-level model
//   obs_t = x_t + e_t,  e_t ~ N(0, obs_var_t)   (skipped where observed[t] == false)
//   x_t = x_{t-1} + u_t, u_t ~ N(0, state_var_t) for t >= 1
//   x_0 ~ N(prior_mean, prior_var)
// by forward filtering and backward sampling.
class LocalLevelSampler {
public:
  explicit LocalLevelSampler(std::size_t n) : m_(n), c_(n) {}

  void draw(const std::vector<double>& obs, const std::vector<double>& obs_var,
            const std::vector<char>& observed, const std::vector<double>& state_var,
            double prior_mean, double prior_var, Rng& rng, std::normal_distribution<double>& z,
            std::vector<double>& out) {
    const std::size_t n = obs.size();
    double a = prior_mean;
    double p = prior_var;
    for (std::size_t t = 0; t < n; ++t) {
      if (t > 0) p += state_var[t];
      if (observed[t]) {
        double f = p + obs_var[t];
        double k = p / f;
        a += k * (obs[t] - a);
        p *= (1.0 - k);
      }
      m_[t] = a;
      c_[t] = p;
    }
    out.resize(n);
    out[n - 1] = m_[n - 1] + std::sqrt(c_[n - 1]) * z(rng);
    for (std::size_t t = n - 1; t-- > 0;) {
      double g = c_[t] / (c_[t] + state_var[t + 1]);
      double mean = m_[t] + g * (out[t + 1] - m_[t]);
      double var = c_[t] * (1.0 - g);
      out[t] = mean + std::sqrt(std::max(var, 0.0)) * z(rng);
    }
  }

private:
  std::vector<double> m_;
  std::vector<double> c_;
};

// Given residuals r_t (where observed), sample mixture indicators and then the
// log-variance path h_{1:n}.
class LogVolSampler {
public:
  explicit LogVolSampler(std::size_t n) : level_(n), ystar_(n), obs_var_(n), state_var_(n) {}

  void draw(const std::vector<double>& resid, const std::vector<char>& observed, double gamma,
            double prior_mean, Rng& rng, std::normal_distribution<double>& z,
            std::uniform_real_distribution<double>& u, std::vector<double>& h) {
    const std::size_t n = resid.size();
    std::array<double, 7> w{};
    for (std::size_t t = 0; t < n; ++t) {
      state_var_[t] = gamma;
      if (!observed[t]) continue;
      double y = std::log(resid[t] * resid[t] + kLogOffset);
      double total = 0.0;
      for (std::size_t j = 0; j < kLogChi2Mixture.size(); ++j) {
        const auto& c = kLogChi2Mixture[j];
        double d = y - h[t] - c.mean;
        w[j] = c.prob * std::exp(-0.5 * d * d / c.var) / std::sqrt(c.var);
        total += w[j];
      }
      std::size_t pick = kLogChi2Mixture.size() - 1;
      if (total > 0.0) {
        double target = u(rng) * total;
        double acc = 0.0;
        for (std::size_t j = 0; j < kLogChi2Mixture.size(); ++j) {
          acc += w[j];
          if (target < acc) {
            pick = j;
            break;
          }
        }
      } else {
        u(rng);
      }
      ystar_[t] = y - kLogChi2Mixture[pick].mean;
      obs_var_[t] = kLogChi2Mixture[pick].var;
    }
    level_.draw(ystar_, obs_var_, observed, state_var_, prior_mean, kLogVolPriorVar, rng, z, h);
  }

private:
  LocalLevelSampler level_;
  std::vector<double> ystar_;
  std::vector<double> obs_var_;
  std::vector<double> state_var_;
};

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

// Centered 12-month moving average, truncated at the sample edges.
std::vector<double> centered_moving_average(std::span<const double> x) {
  const auto n = static_cast<long>(x.size());
  std::vector<double> out(x.size());
  for (long t = 0; t < n; ++t) {
    long lo = std::max(0L, t - 6);
    long hi = std::min(n - 1, t + 6);
    double s = 0.0;
    for (long j = lo; j <= hi; ++j) s += x[j];
    out[t] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace

void UcsvConfig::validate() const {
  if (!(gamma > 0.0)) throw DomainError(fmt::format("gamma must be positive, got {}", gamma));
  if (burn_in < 0) throw DomainError("burn_in must be non-negative");
  if (n_draws <= burn_in)
    throw DomainError(fmt::format("n_draws ({}) must exceed burn_in ({})", n_draws, burn_in));
}

UcsvPosterior estimate_ucsv(const TimeSeries& pi, const UcsvConfig& cfg) {
  cfg.validate();
  const std::size_t n = pi.size();
  if (n < 24) throw LengthError(fmt::format("UC-SV needs at least 24 observations, got {}", n));
  for (std::size_t t = 0; t < n; ++t)
    if (!std::isfinite(pi[t]))
      throw DomainError(fmt::format("non-finite inflation at {}", pi.date_at(t).label()));

  std::vector<double> y(pi.values().begin(), pi.values().end());
  std::vector<double> dy(n - 1);
  for (std::size_t t = 1; t < n; ++t) dy[t - 1] = y[t] - y[t - 1];
  const double h_init = std::log(std::max(0.5 * sample_variance(dy), kMinInitVariance));
  const double tau_prior_var = 10.0 * (sample_variance(y) + 1.0);

  std::vector<double> tau = centered_moving_average(pi.values());
  std::vector<double> h_eta(n, h_init);
  std::vector<double> h_eps(n, h_init);
  std::vector<double> var_eta(n), var_eps(n), resid(n);
  std::vector<char> all_observed(n, 1);
  std::vector<char> skip_first(n, 1);
  skip_first[0] = 0;

  Rng rng = make_rng(cfg.seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LocalLevelSampler trend_sampler(n);
  LogVolSampler vol_sampler(n);

  std::vector<double> sum_tau(n, 0.0), sum_gap(n, 0.0), sum_seta(n, 0.0), sum_seps(n, 0.0);
  for (int it = 0; it < cfg.n_draws; ++it) {
    for (std::size_t t = 0; t < n; ++t) {
      var_eta[t] = std::exp(h_eta[t]);
      var_eps[t] = std::exp(h_eps[t]);
    }
    trend_sampler.draw(y, var_eta, all_observed, var_eps, y[0], tau_prior_var, rng, z, tau);

    for (std::size_t t = 0; t < n; ++t) resid[t] = y[t] - tau[t];
    vol_sampler.draw(resid, all_observed, cfg.gamma, h_init, rng, z, u, h_eta);

    resid[0] = 0.0;
    for (std::size_t t = 1; t < n; ++t) resid[t] = tau[t] - tau[t - 1];
    vol_sampler.draw(resid, skip_first, cfg.gamma, h_init, rng, z, u, h_eps);

    if (it >= cfg.burn_in) {
      for (std::size_t t = 0; t < n; ++t) {
        sum_tau[t] += tau[t];
        sum_gap[t] += y[t] - tau[t];
        sum_seta[t] += std::exp(0.5 * h_eta[t]);
        sum_seps[t] += std::exp(0.5 * h_eps[t]);
      }
    }
  }

  const double kept = static_cast<double>(cfg.n_draws - cfg.burn_in);
  auto mean_of = [&](const std::vector<double>& s, const char* id) {
    std::vector<double> v(n);
    for (std::size_t t = 0; t < n; ++t) v[t] = s[t] / kept;
    return TimeSeries(id, pi.start(), std::move(v));
  };
  return UcsvPosterior{pi,
                       mean_of(sum_tau, "trend"),
                       mean_of(sum_gap, "gap"),
                       mean_of(sum_seta, "sigma_eta"),
                       mean_of(sum_seps, "sigma_eps"),
                       cfg};
}

TimeSeries uncertainty_series(const UcsvPosterior& post) { return post.sigma_eta.renamed("U"); }

UcsvPaths simulate_ucsv(const UcsvConfig& cfg, int n, std::uint64_t seed, const UcsvStart& start) {
  if (n < 2) throw LengthError("simulate_ucsv needs n >= 2");
  if (!(cfg.gamma >= 0.0)) throw DomainError("gamma must be non-negative");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double sd_v = std::sqrt(cfg.gamma);

  double h_eta = 2.0 * std::log(start.sigma_eta0);
  double h_eps = 2.0 * std::log(start.sigma_eps0);
  double tau = start.tau0;
  std::vector<double> pi(n), taus(n), s_eta(n), s_eps(n);
  for (int t = 0; t < n; ++t) {
    h_eta += sd_v * z(rng);
    h_eps += sd_v * z(rng);
    s_eta[t] = std::exp(0.5 * h_eta);
    s_eps[t] = std::exp(0.5 * h_eps);
    tau += s_eps[t] * z(rng);
    taus[t] = tau;
    pi[t] = tau + s_eta[t] * z(rng);
  }
  return {TimeSeries("pi", start.start, std::move(pi)), TimeSeries("tau", start.start, std::move(taus)),
          TimeSeries("sigma_eta", start.start, std::move(s_eta)),
          TimeSeries("sigma_eps", start.start, std::move(s_eps))};
}

}  // namespace ucoint
