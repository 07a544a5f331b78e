// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#include "sarvi/timeutil.hpp"

#include <charconv>
#include <cstdio>

#include "sarvi/error.hpp"

namespace sarvi {

namespace {

using namespace std::chrono;

int parse_int(std::string_view s, std::size_t pos, std::size_t len, std::string_view whole) {
  if (pos + len > s.size()) throw ValueError("bad timestamp '" + std::string(whole) + "'");
  int v = 0;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
  if (ec != std::errc{} || p != s.data() + pos + len)
    throw ValueError("bad timestamp '" + std::string(whole) + "'");
  return v;
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() < 10 || s[4] != '-' || s[7] != '-')
    throw ValueError("bad timestamp '" + std::string(text) + "'");
  const int y = parse_int(s, 0, 4, text);
  const int mo = parse_int(s, 5, 2, text);
  const int d = parse_int(s, 8, 2, text);
  int hh = 0, mm = 0, ss = 0;
  std::size_t pos = 10;
  if (s.size() > 10) {
    if ((s[10] != 'T' && s[10] != ' ') || s.size() < 19 || s[13] != ':' || s[16] != ':')
      throw ValueError("bad timestamp '" + std::string(text) + "'");
    hh = parse_int(s, 11, 2, text);
    mm = parse_int(s, 14, 2, text);
    ss = parse_int(s, 17, 2, text);
    pos = 19;
  }
  std::string_view zone = s.substr(pos);
  if (!zone.empty() && zone != "Z" && zone != "+00:00" && zone != "+0000")
    throw ValueError("timestamp '" + std::string(text) + "' is not UTC");

  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60)
    throw ValueError("bad timestamp '" + std::string(text) + "'");
  return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_timestamp(Timestamp t) {
  const auto day_start = floor<days>(t);
  const year_month_day ymd{day_start};
  const hh_mm_ss hms{t - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

int year_of(Timestamp t) {
  return static_cast<int>(year_month_day{floor<days>(t)}.year());
}

int day_of_year(Timestamp t) {
  const auto d = floor<days>(t);
  const year_month_day ymd{d};
  const sys_days jan1{ymd.year() / January / 1};
  return static_cast<int>((d - jan1).count()) + 1;
}

int days_in_year(int y) { return year{y}.is_leap() ? 366 : 365; }

Timestamp make_timestamp(int y, int doy, int hour, int minute, int second) {
  if (doy < 1 || doy > days_in_year(y)) throw ValueError("day of year out of range");
  const sys_days jan1{year{y} / January / 1};
  return jan1 + days{doy - 1} + hours{hour} + minutes{minute} + seconds{second};
}

}  // namespace sarvi
