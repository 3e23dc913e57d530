// Writes the synthetic demo dataset: raw CPI and IP indexes (172 months, so
// year-on-year growth covers 2002M7-2015M10) and ten sector price indexes.
// Eight sectors are cointegrated with inflation and its uncertainty around a
// mid-sample break; two are independent random walks.
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "ucoint/cointegration.hpp"
#include "ucoint/ingest.hpp"
#include "ucoint/random.hpp"
#include "ucoint/ucsv.hpp"

using namespace ucoint;
namespace fs = std::filesystem;

namespace {

const MonthIndex kRawStart{2001, 7};
const MonthIndex kStart{2002, 7};
constexpr int kMonths = 160;

struct Sector {
  const char* id;
  GhModel model;  // LS and RS are not used; LST or RST or a random walk
  bool cointegrated;
  MonthIndex brk;
  std::vector<double> theta;  // build_design order: C, Dum x C, [Trend, Dum x Trend], I, U, [Dum x I, Dum x U]
};

// Index level from annualized monthly growth rates (percent).
TimeSeries from_monthly(const std::string& id, const TimeSeries& growth, double base) {
  std::vector<double> v{base};
  for (std::size_t t = 1; t < growth.size(); ++t) v.push_back(v.back() * (1.0 + growth[t] / 1200.0));
  return {id, growth.start(), v};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("data/demo");
  const std::uint64_t kSeed = argc > 2 ? std::stoull(argv[2]) : 20160201;
  fs::create_directories(dir);

  UcsvConfig cfg;  // matches config.json
  cfg.seed = kSeed;
  Rng rng = make_rng(kSeed);
  std::normal_distribution<double> z(0.0, 1.0);

  // Monthly annualized inflation: slowly drifting trend plus a transitory
  // component whose volatility triples during 2008-2009.
  std::vector<double> monthly_rates;
  double trend = 2.4;
  for (int t = 0; t < kMonths + 12; ++t) {
    const MonthIndex d = kRawStart.plus(t);
    const double vol = (d >= MonthIndex{2008, 1} && d <= MonthIndex{2009, 12}) ? 7.5 : 2.5;
    trend += 0.12 * z(rng);
    monthly_rates.push_back(trend + vol * z(rng));
  }
  const TimeSeries monthly("cpi", kRawStart, monthly_rates);
  const TimeSeries cpi = from_monthly("cpi", monthly, 177.5);
  const TimeSeries inflation = yoy_growth(cpi);

  std::vector<double> ip_growth;
  double g = 1.5;
  for (int t = 0; t < kMonths + 12; ++t) ip_growth.push_back(g = 1.5 + 0.6 * (g - 1.5) + 9.0 * z(rng));
  const TimeSeries ip = from_monthly("ip", TimeSeries("ip", kRawStart, ip_growth), 91.0);

  write_csv(dir / "cpi.csv", cpi);
  write_csv(dir / "ip.csv", ip);

  // The uncertainty regressor the pipeline will estimate from this inflation path.
  const TimeSeries u = estimate_ucsv(inflation, cfg).sigma_eta.renamed("U");

  const std::vector<Sector> sectors{
      {"BASICMAT", GhModel::RST, true, {2009, 4}, {4.96, 0.20, 0.014, -0.006, -0.013, -0.38, 0.026, 0.31}},
      {"CONSGOODS", GhModel::RST, true, {2009, 4}, {5.44, -0.34, 0.008, 0.002, -0.040, -0.24, 0.036, 0.23}},
      {"CONSSERV", GhModel::LST, true, {2010, 2}, {5.69, -0.48, 0.010, -0.098, -0.39}},
      {"FINANCIALS", GhModel::LST, true, {2008, 8}, {6.24, -0.64, 0.003, -0.067, -0.27}},
      {"HEALTH", GhModel::LST, false, {2008, 7}, {}},
      {"INDUSTRIALS", GhModel::LST, true, {2008, 7}, {5.22, -0.52, 0.010, -0.010, -0.07}},
      {"ENERGY", GhModel::LST, false, {2008, 7}, {}},
      {"TECHNOLOGY", GhModel::LST, true, {2008, 7}, {5.94, -0.34, 0.009, -0.020, -0.09}},
      {"TELECOM", GhModel::RST, true, {2009, 10}, {4.64, -0.47, 0.010, -0.004, 0.007, -0.34, 0.057, 0.21}},
      {"UTILITIES", GhModel::RST, true, {2009, 10}, {4.46, -0.51, 0.009, -0.005, -0.044, -0.27, 0.021, 0.28}},
  };

  std::string series_json;
  for (const auto& s : sectors) {
    std::vector<double> logp(kMonths);
    if (s.cointegrated) {
      const int b = months_between(kStart, s.brk) + 1;
      auto d = build_design(inflation, {inflation.renamed("I"), u}, s.model, b, Trim{0.01, 0.99});
      Eigen::Map<const Eigen::VectorXd> theta(s.theta.data(), static_cast<Eigen::Index>(s.theta.size()));
      Eigen::VectorXd mean = d.X * theta;
      double e = 0.0;
      for (int t = 0; t < kMonths; ++t) logp[t] = mean(t) + (e = 0.5 * e + 0.025 * z(rng));
    } else {
      double level = 5.5;
      for (int t = 0; t < kMonths; ++t) logp[t] = level += 0.004 + 0.045 * z(rng);
    }
    std::vector<double> price;
    for (double v : logp) price.push_back(std::round(std::exp(v) * 1e4) / 1e4);
    write_csv(dir / fmt::format("{}.csv", s.id), TimeSeries(s.id, kStart, price));
    series_json += fmt::format(R"(,
    {{"id": "{}", "source": "csv", "location": "{}.csv", "transform": "log", "role": "index"}})",
                               s.id, s.id);
  }

  std::ofstream manifest(dir / "manifest.json");
  manifest << fmt::format(R"({{
  "window": {{"start": "2002-07", "end": "2015-10"}},
  "series": [
    {{"id": "CPI", "source": "csv", "location": "cpi.csv", "transform": "yoy", "role": "cpi"}},
    {{"id": "INDPRO", "source": "csv", "location": "ip.csv", "transform": "yoy", "role": "ip"}}{}
  ]
}}
)",
                          series_json);

  std::ofstream config(dir / "config.json");
  config << fmt::format(R"({{
  "manifest": "manifest.json",
  "output_dir": "out",
  "seed": {},
  "ucsv": {{"gamma": 0.04, "n_draws": 5000, "burn_in": 1000}},
  "trim": [0.15, 0.85],
  "decision": {{"level": 0.10, "required": 2}},
  "var_lags": 2,
  "cusum_level": 0.05
}}
)",
                        kSeed);
  fmt::print("demo dataset written to {}\n", dir.string());
}
