#include "ucoint/series.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

#include <fmt/format.h>

#include "ucoint/errors.hpp"

namespace ucoint {

MonthIndex::MonthIndex(int y, int m) : year(y), month(m) {
  if (m < 1 || m > 12) throw DomainError(fmt::format("month {} outside 1..12", m));
}

MonthIndex MonthIndex::from_ordinal(int ord) {
  int y = ord >= 0 ? ord / 12 : -((-ord + 11) / 12);
  return {y, ord - y * 12 + 1};
}

std::string MonthIndex::label() const { return fmt::format("{}M{}", year, month); }

std::string MonthIndex::iso() const { return fmt::format("{:04d}-{:02d}", year, month); }

MonthIndex MonthIndex::parse(const std::string& text) {
  static const std::regex iso_re(R"(^\s*(\d{4})-(\d{1,2})(-\d{1,2})?\s*$)");
  static const std::regex label_re(R"(^\s*(\d{4})M(\d{1,2})\s*$)");
  std::smatch m;
  if (std::regex_match(text, m, iso_re) || std::regex_match(text, m, label_re)) {
    int month = std::stoi(m[2].str());
    if (month >= 1 && month <= 12) return {std::stoi(m[1].str()), month};
  }
  throw ParseError(fmt::format("cannot parse month '{}'", text));
}

TimeSeries::TimeSeries(std::string id, MonthIndex start, std::vector<double> values)
    : id_(std::move(id)), start_(start), values_(std::move(values)) {
  if (values_.empty()) throw LengthError(fmt::format("series '{}' is empty", id_));
}

std::optional<std::size_t> TimeSeries::index_of(MonthIndex date) const {
  int k = months_between(start_, date);
  if (k < 0 || k >= static_cast<int>(values_.size())) return std::nullopt;
  return static_cast<std::size_t>(k);
}

Eigen::VectorXd TimeSeries::vector() const {
  return Eigen::Map<const Eigen::VectorXd>(values_.data(), static_cast<Eigen::Index>(values_.size()));
}

TimeSeries TimeSeries::slice(MonthIndex from, MonthIndex to) const {
  auto a = index_of(from);
  auto b = index_of(to);
  if (!a || !b || *a > *b)
    throw RangeError(fmt::format("window {}..{} not inside series '{}' ({}..{})", from.label(),
                                 to.label(), id_, start_.label(), end().label()));
  return {id_, from, std::vector<double>(values_.begin() + *a, values_.begin() + *b + 1)};
}

TimeSeries from_vector(std::string id, MonthIndex start, const Eigen::VectorXd& v) {
  return {std::move(id), start, std::vector<double>(v.data(), v.data() + v.size())};
}

TimeSeries log_level(const TimeSeries& s) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0))
      throw DomainError(fmt::format("log of non-positive value {} in '{}' at {}", s[i], s.id(),
                                    s.date_at(i).label()));
    out[i] = std::log(s[i]);
  }
  return {s.id(), s.start(), std::move(out)};
}

namespace {

void require_positive(const TimeSeries& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!(s[i] > 0.0))
      throw DomainError(fmt::format("growth rate needs positive levels; '{}' has {} at {}", s.id(),
                                    s[i], s.date_at(i).label()));
}

}  // namespace

TimeSeries yoy_growth(const TimeSeries& s) {
  if (s.size() < 13)
    throw LengthError(fmt::format("yoy growth of '{}' needs 13 observations, got {}", s.id(), s.size()));
  require_positive(s);
  std::vector<double> out(s.size() - 12);
  for (std::size_t i = 12; i < s.size(); ++i) out[i - 12] = 100.0 * (s[i] / s[i - 12] - 1.0);
  return {s.id(), s.start().plus(12), std::move(out)};
}

TimeSeries mom_annualized(const TimeSeries& s) {
  if (s.size() < 2)
    throw LengthError(fmt::format("mom growth of '{}' needs 2 observations", s.id()));
  require_positive(s);
  std::vector<double> out(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) out[i - 1] = 100.0 * (std::pow(s[i] / s[i - 1], 12.0) - 1.0);
  return {s.id(), s.start().next(), std::move(out)};
}

TimeSeries diff(const TimeSeries& s) {
  if (s.size() < 2) throw LengthError(fmt::format("cannot difference '{}' of length 1", s.id()));
  std::vector<double> out(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) out[i - 1] = s[i] - s[i - 1];
  return {s.id(), s.start().next(), std::move(out)};
}

TimeSeries cumsum(const TimeSeries& s) {
  std::vector<double> out(s.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = acc += s[i];
  return {s.id(), s.start(), std::move(out)};
}

std::vector<TimeSeries> align(const std::vector<TimeSeries>& set) {
  if (set.empty()) throw AlignmentError("align needs at least one series");
  MonthIndex lo = set.front().start();
  MonthIndex hi = set.front().end();
  for (const auto& s : set) {
    lo = std::max(lo, s.start());
    hi = std::min(hi, s.end());
  }
  if (lo > hi) {
    std::string ranges;
    for (const auto& s : set)
      ranges += fmt::format(" {}[{}..{}]", s.id(), s.start().label(), s.end().label());
    throw AlignmentError("series have no common window:" + ranges);
  }
  std::vector<TimeSeries> out;
  out.reserve(set.size());
  for (const auto& s : set) out.push_back(s.slice(lo, hi));
  return out;
}

}  // namespace ucoint
