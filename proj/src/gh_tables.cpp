#include <array>

#include <fmt/format.h>

#include "ucoint/cointegration.hpp"
#include "ucoint/errors.hpp"

namespace ucoint {

namespace {

// Gregory & Hansen (1996a, Table 1) for LS, LST, RS and Gregory & Hansen
// (1996b) for RST: asymptotic 1/5/10% values, indexed by m - 1.
// ADF* and Zt* share one table.
using Row = std::array<double, 3>;

constexpr std::array<Row, 4> kTauLS{{{-5.13, -4.61, -4.34}, {-5.44, -4.92, -4.69},
                                     {-5.77, -5.28, -5.02}, {-6.05, -5.56, -5.31}}};
constexpr std::array<Row, 4> kTauLST{{{-5.45, -4.99, -4.72}, {-5.80, -5.29, -5.03},
                                      {-6.05, -5.57, -5.33}, {-6.36, -5.83, -5.59}}};
constexpr std::array<Row, 4> kTauRS{{{-5.47, -4.95, -4.68}, {-5.97, -5.50, -5.23},
                                     {-6.51, -6.00, -5.75}, {-6.92, -6.41, -6.17}}};
constexpr std::array<Row, 4> kTauRST{{{-6.02, -5.50, -5.24}, {-6.45, -5.96, -5.72},
                                      {-6.89, -6.32, -6.06}, {-7.31, -6.84, -6.58}}};

constexpr std::array<Row, 4> kZaLS{{{-50.07, -40.48, -36.19}, {-57.01, -46.98, -42.49},
                                    {-63.64, -53.58, -48.65}, {-70.18, -59.40, -54.38}}};
constexpr std::array<Row, 4> kZaLST{{{-57.28, -47.96, -43.22}, {-64.77, -53.92, -48.94},
                                     {-70.27, -59.76, -54.94}, {-76.95, -65.44, -60.12}}};
constexpr std::array<Row, 4> kZaRS{{{-57.17, -47.04, -41.85}, {-68.21, -58.33, -52.85},
                                    {-80.15, -68.94, -63.42}, {-90.35, -78.52, -72.56}}};
constexpr std::array<Row, 4> kZaRST{{{-69.37, -58.58, -53.31}, {-79.65, -68.43, -63.10},
                                     {-90.84, -78.87, -72.75}, {-100.69, -88.47, -82.30}}};

const std::array<Row, 4>& table_for(GhModel model, GhStatistic stat) {
  bool za = stat == GhStatistic::za;
  switch (model) {
    case GhModel::LS: return za ? kZaLS : kTauLS;
    case GhModel::LST: return za ? kZaLST : kTauLST;
    case GhModel::RS: return za ? kZaRS : kTauRS;
    case GhModel::RST: return za ? kZaRST : kTauRST;
  }
  return kTauLS;
}

}  // namespace

GhCriticalValues gh_critical_values(GhModel model, int m, GhStatistic stat) {
  if (m < 1 || m > 4)
    throw RangeError(fmt::format("no critical values for m = {} regressors (supported: 1..4)", m));
  const Row& row = table_for(model, stat)[static_cast<std::size_t>(m - 1)];
  return {{row[0], row[1], row[2]}, CvSource::embedded};
}

}  // namespace ucoint
