#pragma once

// Long-format CSV for capacity factors and demand: header `date,hour,site,value`, hour 1..24.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "helios/core/error.hpp"
#include "helios/core/types.hpp"

namespace helios::io {

inline constexpr std::string_view kCsvHeader = "date,hour,site,value";

// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct CsvRow {
  int line = 0;
  std::string date;
  int hour = 0;  // 1-based as written
  std::string site;
  double value = 0.0;
  int year = 0, month = 0, day = 0;  // from date; day = 0 for YYYY-MM
};

namespace csv_detail {

inline std::string where(std::string_view src, int line) { return std::string(src) + ":" + std::to_string(line); }

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
bool parse_num(std::string_view s, T& out) {
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

// YYYY-MM-DD or YYYY-MM.
inline bool parse_date(std::string_view s, int& y, int& m, int& d) {
  d = 0;
  if (s.size() != 7 && s.size() != 10) return false;
  if (s[4] != '-' || !parse_num(s.substr(0, 4), y) || !parse_num(s.substr(5, 2), m)) return false;
  if (s.size() == 10 && (s[7] != '-' || !parse_num(s.substr(8, 2), d) || d < 1 || d > 31)) return false;
  return m >= 1 && m <= 12;
}

}  // namespace csv_detail

inline std::vector<CsvRow> read_csv_rows(std::istream& is, std::string_view source, int hours = 24) {
  using namespace csv_detail;
  std::vector<CsvRow> rows;
  std::string text;
  int line = 0;
  bool header = false;
  while (std::getline(is, text)) {
    ++line;
    std::string_view sv = trim(text);
    if (sv.empty()) continue;
    if (!header) {
      if (sv != kCsvHeader) fail(ErrorCode::parse, where(source, line) + ": expected header '" + std::string(kCsvHeader) + "'");
      header = true;
      continue;
    }
    std::string_view f[4];
    int k = 0;
    size_t start = 0;
    for (size_t i = 0; i <= sv.size(); ++i)
      if (i == sv.size() || sv[i] == ',') {
        if (k == 4) fail(ErrorCode::parse, where(source, line) + ": too many fields");
        f[k++] = trim(sv.substr(start, i - start));
        start = i + 1;
      }
    if (k != 4) fail(ErrorCode::parse, where(source, line) + ": expected 4 fields, got " + std::to_string(k));
    CsvRow r;
    r.line = line;
    r.date = std::string(f[0]);
    if (!parse_date(f[0], r.year, r.month, r.day))
      fail(ErrorCode::parse, where(source, line) + ": bad date '" + r.date + "' (YYYY-MM-DD)");
    if (!parse_num(f[1], r.hour)) fail(ErrorCode::parse, where(source, line) + ": bad hour '" + std::string(f[1]) + "'");
    if (r.hour < 1 || r.hour > hours)
      fail(ErrorCode::parse, where(source, line) + ": hour " + std::to_string(r.hour) + " outside 1.." + std::to_string(hours));
    if (f[2].empty()) fail(ErrorCode::parse, where(source, line) + ": empty site");
    r.site = std::string(f[2]);
    if (!parse_num(f[3], r.value) || !std::isfinite(r.value))
      fail(ErrorCode::parse, where(source, line) + ": bad value '" + std::string(f[3]) + "'");
    rows.push_back(std::move(r));
  }
  if (!header) fail(ErrorCode::parse, std::string(source) + ": empty file");
  return rows;
}

// Days sorted by date. `sites` fixes the column order; empty means order of first appearance.
inline CapacityFactorDataset read_capacity_factors(std::istream& is, std::string_view source,
                                                   std::vector<std::string> sites = {}) {
  using namespace csv_detail;
  auto rows = read_csv_rows(is, source);
  const bool fixed = !sites.empty();
  for (const auto& r : rows)
    if (std::find(sites.begin(), sites.end(), r.site) == sites.end()) {
      if (fixed) fail(ErrorCode::schema, where(source, r.line) + ": unknown site " + r.site);
      sites.push_back(r.site);
    }
  std::map<std::string, size_t> day_of;
  for (const auto& r : rows) {
    if (r.day == 0) fail(ErrorCode::parse, where(source, r.line) + ": capacity factors need a full date");
    if (r.value < 0.0 || r.value > 1.0)
      fail(ErrorCode::validation, where(source, r.line) + ": capacity factor outside [0,1]");
    day_of.emplace(r.date, 0);
  }
  CapacityFactorDataset ds;
  ds.sites = sites;
  ds.hours = 24;
  const int S = ds.site_count();
  for (auto& [date, idx] : day_of) {
    idx = ds.days.size();
    CapacityFactorDay d;
    d.date = date;
    d.month = std::stoi(date.substr(5, 2)) - 1;
    d.values.assign(static_cast<size_t>(S) * 24, 0.0);
    ds.days.push_back(std::move(d));
  }
  std::vector<char> seen(ds.days.size() * S * 24, 0);
  for (const auto& r : rows) {
    size_t i = day_of[r.date];
    int s = static_cast<int>(std::find(sites.begin(), sites.end(), r.site) - sites.begin());
    size_t k = (i * S + s) * 24 + (r.hour - 1);
    if (seen[k]) fail(ErrorCode::parse, where(source, r.line) + ": duplicate row for " + r.date + " hour " + std::to_string(r.hour) + " site " + r.site);
    seen[k] = 1;
    ds.days[i].values[static_cast<size_t>(s) * 24 + r.hour - 1] = r.value;
  }
  for (size_t i = 0; i < ds.days.size(); ++i)
    for (int s = 0; s < S; ++s)
      for (int h = 0; h < 24; ++h)
        if (!seen[(i * S + s) * 24 + h])
          fail(ErrorCode::schema, std::string(source) + ": site " + sites[s] + " has no value for " + ds.days[i].date +
                                      " hour " + std::to_string(h + 1));
  return ds;
}

inline void write_capacity_factors(std::ostream& os, const CapacityFactorDataset& ds) {
  os << kCsvHeader << '\n';
  for (const auto& d : ds.days)
    for (int h = 0; h < ds.hours; ++h)
      for (int s = 0; s < ds.site_count(); ++s)
        os << d.date << ',' << h + 1 << ',' << ds.sites[s] << ',' << format_double(d.values[static_cast<size_t>(s) * ds.hours + h]) << '\n';
}

// Demand rows are keyed by month: date YYYY-MM (or any day of that month). Years count from `first_year`,
// or from the earliest year in the file when first_year is 0.
inline DemandProfile read_demand(std::istream& is, std::string_view source, const EnergyNetwork& net, int years,
                                 int first_year = 0) {
  using namespace csv_detail;
  auto rows = read_csv_rows(is, source);
  if (first_year == 0) {
    first_year = 1 << 30;
    for (const auto& r : rows) first_year = std::min(first_year, r.year);
  }
  DemandProfile d;
  d.sites = net.site_count();
  d.years = years;
  d.months = 12;
  d.hours = 24;
  d.values.assign(static_cast<size_t>(d.sites) * years * 12 * 24, 0.0);
  std::vector<char> seen(d.values.size(), 0);
  for (const auto& r : rows) {
    int n = net.site_index(r.site);
    if (n < 0) fail(ErrorCode::schema, where(source, r.line) + ": unknown site " + r.site);
    int y = r.year - first_year;
    if (y < 0 || y >= years)
      fail(ErrorCode::schema, where(source, r.line) + ": year " + std::to_string(r.year) + " outside the planning horizon");
    size_t k = d.index(n, y, r.month - 1, r.hour - 1);
    if (seen[k]) fail(ErrorCode::parse, where(source, r.line) + ": duplicate row for " + r.date + " hour " + std::to_string(r.hour) + " site " + r.site);
    seen[k] = 1;
    d.values[k] = r.value;
  }
  for (int n = 0; n < d.sites; ++n) {
    size_t missing = 0;
    for (int y = 0; y < years; ++y)
      for (int m = 0; m < 12; ++m)
        for (int h = 0; h < 24; ++h) missing += !seen[d.index(n, y, m, h)];
    if (missing == static_cast<size_t>(years) * 12 * 24)
      fail(ErrorCode::schema, std::string(source) + ": demand missing for site " + net.sites[n].id);
    if (missing > 0)
      fail(ErrorCode::schema, std::string(source) + ": site " + net.sites[n].id + " lacks " + std::to_string(missing) + " demand entries");
  }
  return d;
}

inline void write_demand(std::ostream& os, const DemandProfile& d, const EnergyNetwork& net, int first_year) {
  if (d.months != 12) fail(ErrorCode::validation, "demand CSV needs a 12-month calendar");
  os << kCsvHeader << '\n';
  char date[16];
  for (int y = 0; y < d.years; ++y)
    for (int m = 0; m < 12; ++m) {
      std::snprintf(date, sizeof date, "%04d-%02d", first_year + y, m + 1);
      for (int h = 0; h < d.hours; ++h)
        for (int n = 0; n < d.sites; ++n) os << date << ',' << h + 1 << ',' << net.sites[n].id << ',' << format_double(d.at(n, h, m, y)) << '\n';
    }
}

// Scenario centroids, one row per (scenario, hour, site).
inline void write_scenario_profiles(std::ostream& os, const ReducedScenarioSet& sc) {
  os << "scenario,hour,site,value\n";
  for (int d = 0; d < sc.scenarios; ++d)
    for (int h = 0; h < sc.hours; ++h)
      for (int s = 0; s < sc.site_count(); ++s)
        os << d << ',' << h + 1 << ',' << sc.sites[s] << ',' << format_double(sc.centroid(d, s, h)) << '\n';
}

inline void write_scenario_weights(std::ostream& os, const ReducedScenarioSet& sc) {
  os << "month,scenario,weight\n";
  for (int m = 0; m < sc.months; ++m)
    for (int d = 0; d < sc.scenarios; ++d) os << m + 1 << ',' << d << ',' << format_double(sc.weight(d, m)) << '\n';
}

}  // namespace helios::io
