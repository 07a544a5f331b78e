// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The sarvi Authors

#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace sarvi {

/// UTC instant with one-second resolution.
using Timestamp = std::chrono::sys_seconds;

/// Accepts `YYYY-MM-DDTHH:MM:SS` with an optional `Z` or `+00:00` suffix, or
/// a bare `YYYY-MM-DD` (midnight). A space may replace the `T`.
Timestamp parse_timestamp(std::string_view text);

/// Always `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);

int day_of_year(Timestamp t);
int days_in_year(int year);
int year_of(Timestamp t);

Timestamp make_timestamp(int year, int day_of_year, int hour = 0, int minute = 0, int second = 0);

}  // namespace sarvi
