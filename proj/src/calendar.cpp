#include "outlook/calendar.hpp"

#include "outlook/common.hpp"

#include <charconv>
#include <cstdio>

namespace outlook
{

namespace
{

int parse_int(std::string_view s, std::string_view whole)
{
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Error("malformed calendar value '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Date parse_date(std::string_view s)
{
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw Error("malformed date '" + std::string(s) + "'");
  const Date d{std::chrono::year{parse_int(s.substr(0, 4), s)},
               std::chrono::month{static_cast<unsigned>(parse_int(s.substr(5, 2), s))},
               std::chrono::day{static_cast<unsigned>(parse_int(s.substr(8, 2), s))}};
  if (!d.ok()) throw Error("invalid date '" + std::string(s) + "'");
  return d;
}

std::string format_date(const Date& d)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

YearMonth parse_year_month(std::string_view s)
{
  if (s.size() != 7 || s[4] != '-') throw Error("malformed month '" + std::string(s) + "'");
  const int m = parse_int(s.substr(5, 2), s);
  if (m < 1 || m > 12) throw Error("invalid month '" + std::string(s) + "'");
  return {parse_int(s.substr(0, 4), s), static_cast<unsigned>(m)};
}

std::string format_year_month(const YearMonth& ym)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", ym.year, ym.month);
  return buf;
}

Quarter parse_quarter(std::string_view s)
{
  if (s.size() != 6 || (s[4] != 'Q' && s[4] != 'q')) throw Error("malformed quarter '" + std::string(s) + "'");
  const int q = parse_int(s.substr(5, 1), s);
  if (q < 1 || q > 4) throw Error("invalid quarter '" + std::string(s) + "'");
  return {parse_int(s.substr(0, 4), s), q};
}

std::string format_quarter(const Quarter& q)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04dQ%d", q.year, q.q);
  return buf;
}

}  // namespace outlook
