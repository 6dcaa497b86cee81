#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace evacast {

// All timestamps are UTC with one-second resolution.
using Timestamp = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;
using Hours = std::chrono::hours;

// Accepts "YYYY-MM-DDTHH:MM[:SS][.fff][Z|+HH:MM|-HH:MM]" and the same with a
// space instead of 'T'. A missing zone designator means UTC.
Timestamp parse_timestamp(std::string_view text);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_timestamp(Timestamp t);

Timestamp floor_to_day(Timestamp t);

// Signed difference a - b in (fractional) hours.
double hours_between(Timestamp a, Timestamp b);

} // namespace evacast
