#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "qrse/errors.hpp"
#include "qrse/types.hpp"

namespace qrse {

/// Calendar date, ISO-8601 `YYYY-MM-DD` on the wire.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static Date parse(const std::string& text);
  std::string iso() const;

  friend bool operator==(const Date& a, const Date& b) {
    return a.year == b.year && a.month == b.month && a.day == b.day;
  }
  friend bool operator<(const Date& a, const Date& b) {
    return std::tie(a.year, a.month, a.day) < std::tie(b.year, b.month, b.day);
  }
  friend bool operator<=(const Date& a, const Date& b) { return a < b || a == b; }
};

int days_in_month(int year, int month);
Date last_day_of_month(int year, int month);

struct PriceRecord {
  Date date;
  std::string area;
  double price = 0.0;
};

struct ReturnRecord {
  Date date;
  std::string area;
  double value = 0.0;  // percent per quarter
};

struct TermWindow {
  std::string label;
  Date start;
  Date end;  // half-open: [start, end)
};

enum class GroupingKind { Quarterly, Annual, Terms };

struct PeriodGrouping {
  GroupingKind kind = GroupingKind::Quarterly;
  std::vector<TermWindow> terms;

  static PeriodGrouping quarterly() { return {GroupingKind::Quarterly, {}}; }
  static PeriodGrouping annual() { return {GroupingKind::Annual, {}}; }
  static PeriodGrouping with_terms(std::vector<TermWindow> terms);

  /// Boom/bust eras of the study window, mid-year boundaries at July 1.
  static PeriodGrouping default_terms();
};

struct PeriodGroup {
  std::string label;
  std::vector<double> samples;
};

struct ReturnsResult {
  std::vector<ReturnRecord> returns;
  std::vector<std::string> warnings;
};

struct GroupedResult {
  std::vector<PeriodGroup> groups;
  std::vector<std::string> warnings;
};

/// Per area: trailing rolling median of prices over `median_window` calendar
/// months, read at quarter-end months, then quarter-over-quarter percent
/// growth. Areas without two consecutive quarter medians are dropped with a
/// warning; gaps in an area's quarter coverage emit no return across the gap.
ReturnsResult compute_returns(const std::vector<PriceRecord>& records, int median_window = 3);

/// Assign each return to exactly one period (half-open windows); periods come
/// out in chronological order, empty ones dropped with a warning.
GroupedResult group_periods(const std::vector<ReturnRecord>& returns,
                            const PeriodGrouping& grouping);

}  // namespace qrse
