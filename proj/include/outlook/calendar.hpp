#ifndef OUTLOOK_CALENDAR_HPP_
#define OUTLOOK_CALENDAR_HPP_

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace outlook
{

/// Proleptic Gregorian calendar date.
using Date = std::chrono::year_month_day;

/// Calendar month, ordered.
struct YearMonth
{
  int year = 1970;
  unsigned month = 1;  // 1..12

  auto operator<=>(const YearMonth&) const = default;

  static YearMonth of(const Date& d)
  {
    return {static_cast<int>(d.year()), static_cast<unsigned>(d.month())};
  }

  Date first_day() const
  {
    return std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{1};
  }

  unsigned days() const
  {
    const std::chrono::year_month_day_last last{std::chrono::year{year},
                                                std::chrono::month_day_last{std::chrono::month{month}}};
    return static_cast<unsigned>(last.day());
  }

  YearMonth next(int n = 1) const
  {
    const int idx = year * 12 + static_cast<int>(month) - 1 + n;
    return {idx / 12, static_cast<unsigned>(idx % 12) + 1};
  }

  /// Months elapsed since `other` (negative if earlier).
  int minus(const YearMonth& other) const
  {
    return (year * 12 + static_cast<int>(month)) - (other.year * 12 + static_cast<int>(other.month));
  }
};

/// Calendar quarter; q in 1..4.
struct Quarter
{
  int year = 1970;
  int q = 1;

  auto operator<=>(const Quarter&) const = default;

  int index() const { return year * 4 + q - 1; }
  static Quarter from_index(int idx) { return {idx / 4, idx % 4 + 1}; }
  Quarter next(int n = 1) const { return from_index(index() + n); }
  int minus(const Quarter& other) const { return index() - other.index(); }

  static Quarter of(const YearMonth& ym) { return {ym.year, static_cast<int>((ym.month - 1) / 3) + 1}; }

  /// Month m (1..3) within the quarter.
  YearMonth month(int m) const { return {year, static_cast<unsigned>((q - 1) * 3 + m)}; }
};

/// Parses YYYY-MM-DD. Throws outlook::Error on malformed or invalid dates.
Date parse_date(std::string_view s);
std::string format_date(const Date& d);

/// Parses YYYY-MM.
YearMonth parse_year_month(std::string_view s);
std::string format_year_month(const YearMonth& ym);

/// Parses e.g. 1999Q1.
Quarter parse_quarter(std::string_view s);
std::string format_quarter(const Quarter& q);

inline unsigned day_of_month(const Date& d) { return static_cast<unsigned>(d.day()); }

}  // namespace outlook

#endif  // OUTLOOK_CALENDAR_HPP_
