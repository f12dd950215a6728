#include "qrse/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace qrse {
namespace {

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

// Months addressed as year*12 + (month-1) so windows are plain integer ranges.
int month_index(const Date& d) { return d.year * 12 + (d.month - 1); }
int index_year(int mi) { return mi / 12; }
int index_month(int mi) { return mi % 12 + 1; }
bool is_quarter_end(int mi) { return index_month(mi) % 3 == 0; }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

int days_in_month(int year, int month) {
  static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return lengths[month - 1];
}

Date last_day_of_month(int year, int month) { return Date{year, month, days_in_month(year, month)}; }

Date Date::parse(const std::string& text) {
  int y = 0, m = 0, d = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2d%c", &y, &m, &d, &tail) != 3 ||
      text.size() != 10) {
    throw ParseError("bad date (want YYYY-MM-DD): '" + text + "'");
  }
  if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
    throw ParseError("date out of range: '" + text + "'");
  }
  return Date{y, m, d};
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

PeriodGrouping PeriodGrouping::with_terms(std::vector<TermWindow> terms) {
  if (terms.empty()) throw Error("terms grouping needs at least one window");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (!(terms[i].start < terms[i].end)) {
      throw UnsortedTermWindows("term '" + terms[i].label + "' has start >= end");
    }
    if (i > 0 && terms[i].start < terms[i - 1].end) {
      throw UnsortedTermWindows("term '" + terms[i].label + "' overlaps or precedes '" +
                                terms[i - 1].label + "'");
    }
  }
  return {GroupingKind::Terms, std::move(terms)};
}

PeriodGrouping PeriodGrouping::default_terms() {
  return with_terms({
      {"Pre Crash", {2006, 7, 1}, {2008, 1, 1}},
      {"Crash", {2008, 1, 1}, {2009, 1, 1}},
      {"Recovery 1", {2009, 1, 1}, {2011, 7, 1}},
      {"Small Crash", {2011, 7, 1}, {2012, 7, 1}},
      {"Recovery 2", {2012, 7, 1}, {2018, 7, 1}},
      {"Recent Crash", {2018, 7, 1}, {2021, 1, 1}},
  });
}

ReturnsResult compute_returns(const std::vector<PriceRecord>& records, int median_window) {
  if (median_window < 1) throw Error("median window must be at least one month");

  std::map<std::string, std::map<int, std::vector<double>>> by_area_month;
  for (const PriceRecord& r : records) {
    if (!(r.price > 0.0)) throw ParseError("price must be positive (area '" + r.area + "')");
    by_area_month[r.area][month_index(r.date)].push_back(r.price);
  }

  ReturnsResult out;
  for (const auto& [area, months] : by_area_month) {
    const int first = months.begin()->first;
    const int last = months.rbegin()->first;

    // Trailing-window medians read at quarter-end months. A window reaching
    // past the last observation still pools whatever it covers.
    std::map<int, double> quarter_median;
    for (int mi = first; mi <= last + median_window - 1; ++mi) {
      if (!is_quarter_end(mi)) continue;
      std::vector<double> pool;
      for (int w = mi - median_window + 1; w <= mi; ++w) {
        const auto it = months.find(w);
        if (it != months.end()) pool.insert(pool.end(), it->second.begin(), it->second.end());
      }
      if (!pool.empty()) quarter_median[mi] = median(std::move(pool));
    }

    std::size_t emitted = 0;
    for (const auto& [mi, m_now] : quarter_median) {
      const auto prev = quarter_median.find(mi - 3);
      if (prev == quarter_median.end()) continue;
      out.returns.push_back(ReturnRecord{last_day_of_month(index_year(mi), index_month(mi)),
                                         area, 100.0 * (m_now - prev->second) / prev->second});
      ++emitted;
    }
    if (emitted == 0) {
      out.warnings.push_back("InsufficientHistory: area '" + area +
                             "' has no consecutive quarter medians; dropped");
    }
  }

  std::sort(out.returns.begin(), out.returns.end(),
            [](const ReturnRecord& a, const ReturnRecord& b) {
              if (a.date < b.date) return true;
              if (b.date < a.date) return false;
              return a.area < b.area;
            });
  return out;
}

namespace {

std::string quarter_label(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04dQ%d", d.year, (d.month - 1) / 3 + 1);
  return buf;
}

std::string year_label(const Date& d) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%04d", d.year);
  return buf;
}

}  // namespace

GroupedResult group_periods(const std::vector<ReturnRecord>& returns,
                            const PeriodGrouping& grouping) {
  if (returns.empty()) throw Error("no returns to group");
  GroupedResult out;

  if (grouping.kind == GroupingKind::Terms) {
    PeriodGrouping validated = PeriodGrouping::with_terms(grouping.terms);
    std::vector<PeriodGroup> groups;
    for (const TermWindow& t : validated.terms) groups.push_back({t.label, {}});
    std::size_t outside = 0;
    for (const ReturnRecord& r : returns) {
      bool placed = false;
      for (std::size_t i = 0; i < validated.terms.size(); ++i) {
        const TermWindow& t = validated.terms[i];
        if ((t.start < r.date || t.start == r.date) && r.date < t.end) {
          groups[i].samples.push_back(r.value);
          placed = true;
          break;
        }
      }
      if (!placed) ++outside;
    }
    if (outside > 0) {
      out.warnings.push_back(std::to_string(outside) +
                             " returns fall outside every term window; dropped");
    }
    for (auto& g : groups) {
      if (g.samples.empty()) {
        out.warnings.push_back("period '" + g.label + "' is empty; dropped");
      } else {
        out.groups.push_back(std::move(g));
      }
    }
    return out;
  }

  // Quarterly / annual: bucket by calendar label, then walk the full label
  // range so interior empty periods surface as warnings.
  const bool quarterly = grouping.kind == GroupingKind::Quarterly;
  std::map<std::pair<int, int>, PeriodGroup> buckets;
  for (const ReturnRecord& r : returns) {
    const std::pair<int, int> key =
        quarterly ? std::make_pair(r.date.year, (r.date.month - 1) / 3)
                  : std::make_pair(r.date.year, 0);
    auto [it, inserted] = buckets.try_emplace(key);
    if (inserted) it->second.label = quarterly ? quarter_label(r.date) : year_label(r.date);
    it->second.samples.push_back(r.value);
  }
  const auto first = buckets.begin()->first;
  const auto last = buckets.rbegin()->first;
  const int step_per_year = quarterly ? 4 : 1;
  for (int k = first.first * step_per_year + first.second;
       k <= last.first * step_per_year + last.second; ++k) {
    const std::pair<int, int> key{k / step_per_year, k % step_per_year};
    const auto it = buckets.find(key);
    if (it == buckets.end()) {
      char buf[16];
      if (quarterly) {
        std::snprintf(buf, sizeof(buf), "%04dQ%d", key.first, key.second + 1);
      } else {
        std::snprintf(buf, sizeof(buf), "%04d", key.first);
      }
      out.warnings.push_back(std::string("period '") + buf + "' is empty; dropped");
    } else {
      out.groups.push_back(std::move(it->second));
    }
  }
  return out;
}

}  // namespace qrse
