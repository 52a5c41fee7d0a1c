#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace procsight {

/// Timestamps are UTC milliseconds since the Unix epoch.
using TimestampMs = std::int64_t;

/// Parses `text` against a strftime-like `format` supporting the tokens
/// %Y %m %d %H %M %S plus literal characters. A fractional-seconds suffix
/// (".fff", 1-3 digits) directly after %S is accepted whether or not the
/// format mentions it. Throws Error(bad_timestamp) on any mismatch.
TimestampMs parse_timestamp(std::string_view text, std::string_view format);

/// Inverse of parse_timestamp. Milliseconds are appended as ".fff" only
/// when non-zero, which keeps write/parse round trips exact.
std::string format_timestamp(TimestampMs ts, std::string_view format);

/// Seconds elapsed since UTC midnight of the timestamp's day.
double seconds_since_midnight(TimestampMs ts);

/// Day of week, 0 = Sunday .. 6 = Saturday.
int weekday(TimestampMs ts);

/// Calendar month, 1..12.
int month(TimestampMs ts);

}  // namespace procsight
