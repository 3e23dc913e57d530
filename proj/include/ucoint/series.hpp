#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ucoint {

// A calendar month. Ordering and arithmetic go through ordinal().
struct MonthIndex {
  int year = 2000;
  int month = 1;

  MonthIndex() = default;
  MonthIndex(int y, int m);

  int ordinal() const { return year * 12 + (month - 1); }
  static MonthIndex from_ordinal(int ord);

  MonthIndex next() const { return plus(1); }
  MonthIndex plus(int months) const { return from_ordinal(ordinal() + months); }

  // "2009M12", the format used in every report.
  std::string label() const;
  // "2009-12", the CSV format.
  std::string iso() const;

  // Accepts YYYY-MM, YYYY-MM-DD and YYYYMmm.
  static MonthIndex parse(const std::string& text);

  friend bool operator==(const MonthIndex&, const MonthIndex&) = default;
  friend auto operator<=>(const MonthIndex& a, const MonthIndex& b) {
    return a.ordinal() <=> b.ordinal();
  }
};

// Number of months from a to b (b - a).
inline int months_between(const MonthIndex& a, const MonthIndex& b) {
  return b.ordinal() - a.ordinal();
}

// Contiguous monthly observations. Immutable after construction.
class TimeSeries {
public:
  TimeSeries(std::string id, MonthIndex start, std::vector<double> values);

  const std::string& id() const { return id_; }
  MonthIndex start() const { return start_; }
  MonthIndex end() const { return start_.plus(static_cast<int>(values_.size()) - 1); }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  MonthIndex date_at(std::size_t i) const { return start_.plus(static_cast<int>(i)); }
  std::optional<std::size_t> index_of(MonthIndex date) const;

  Eigen::VectorXd vector() const;
  TimeSeries renamed(std::string id) const { return {std::move(id), start_, values_}; }
  // Inclusive sub-window; throws RangeError when outside the series.
  TimeSeries slice(MonthIndex from, MonthIndex to) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
  std::string id_;
  MonthIndex start_;
  std::vector<double> values_;
};

TimeSeries from_vector(std::string id, MonthIndex start, const Eigen::VectorXd& v);

TimeSeries log_level(const TimeSeries& s);
// 100 * (s_t / s_{t-12} - 1)
TimeSeries yoy_growth(const TimeSeries& s);
// 100 * ((s_t / s_{t-1})^12 - 1)
TimeSeries mom_annualized(const TimeSeries& s);
TimeSeries diff(const TimeSeries& s);
TimeSeries cumsum(const TimeSeries& s);

// Restricts every series to the common window [latest start, earliest end].
std::vector<TimeSeries> align(const std::vector<TimeSeries>& set);

}  // namespace ucoint
