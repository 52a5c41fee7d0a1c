#include "procsight/timeutil.hpp"

#include <chrono>
#include <cstdio>

#include "procsight/errors.hpp"

namespace procsight {

namespace {

constexpr std::int64_t kMsPerDay = 86'400'000;

[[noreturn]] void bad(std::string_view text) {
  throw Error(ErrorCode::bad_timestamp, "BadTimestamp: cannot parse '" + std::string(text) + "'");
}

bool read_digits(std::string_view s, std::size_t& pos, int count, int& out) {
  if (pos + count > s.size()) return false;
  int v = 0;
  for (int i = 0; i < count; ++i) {
    char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  pos += count;
  out = v;
  return true;
}

std::chrono::sys_days to_days(TimestampMs ts) {
  // floor division so pre-1970 instants land on the correct civil day
  std::int64_t d = ts / kMsPerDay;
  if (ts % kMsPerDay < 0) --d;
  return std::chrono::sys_days{std::chrono::days{d}};
}

}  // namespace

TimestampMs parse_timestamp(std::string_view text, std::string_view format) {
  int year = 1970, mon = 1, day = 1, hour = 0, min = 0, sec = 0, millis = 0;
  std::size_t pos = 0;
  bool saw_seconds = false;
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] == '%' && f + 1 < format.size()) {
      char tok = format[++f];
      bool ok = true;
      switch (tok) {
        case 'Y': ok = read_digits(text, pos, 4, year); break;
        case 'm': ok = read_digits(text, pos, 2, mon); break;
        case 'd': ok = read_digits(text, pos, 2, day); break;
        case 'H': ok = read_digits(text, pos, 2, hour); break;
        case 'M': ok = read_digits(text, pos, 2, min); break;
        case 'S':
          ok = read_digits(text, pos, 2, sec);
          saw_seconds = true;
          if (ok && pos < text.size() && text[pos] == '.') {
            ++pos;
            int scale = 100;
            int digits = 0;
            while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9' && digits < 3) {
              millis += (text[pos] - '0') * scale;
              scale /= 10;
              ++pos;
              ++digits;
            }
            if (digits == 0) ok = false;
          }
          break;
        case '%':
          ok = pos < text.size() && text[pos] == '%';
          ++pos;
          break;
        default: ok = false; break;
      }
      if (!ok) bad(text);
    } else {
      if (pos >= text.size() || text[pos] != format[f]) bad(text);
      ++pos;
    }
  }
  if (pos != text.size()) bad(text);
  if (mon < 1 || mon > 12 || day < 1 || day > 31 || hour > 23 || min > 59 || sec > 60) bad(text);
  (void)saw_seconds;

  using namespace std::chrono;
  year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(mon)},
                     std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) bad(text);
  sys_days days{ymd};
  std::int64_t ms = days.time_since_epoch().count() * kMsPerDay;
  ms += (static_cast<std::int64_t>(hour) * 3600 + min * 60 + sec) * 1000 + millis;
  return ms;
}

std::string format_timestamp(TimestampMs ts, std::string_view format) {
  using namespace std::chrono;
  sys_days days = to_days(ts);
  year_month_day ymd{days};
  std::int64_t rem = ts - days.time_since_epoch().count() * kMsPerDay;
  int hour = static_cast<int>(rem / 3'600'000);
  int min = static_cast<int>(rem / 60'000 % 60);
  int sec = static_cast<int>(rem / 1000 % 60);
  int millis = static_cast<int>(rem % 1000);

  std::string out;
  out.reserve(format.size() + 8);
  char buf[8];
  for (std::size_t f = 0; f < format.size(); ++f) {
    if (format[f] == '%' && f + 1 < format.size()) {
      char tok = format[++f];
      switch (tok) {
        case 'Y': std::snprintf(buf, sizeof buf, "%04d", static_cast<int>(ymd.year())); out += buf; break;
        case 'm': std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.month())); out += buf; break;
        case 'd': std::snprintf(buf, sizeof buf, "%02u", static_cast<unsigned>(ymd.day())); out += buf; break;
        case 'H': std::snprintf(buf, sizeof buf, "%02d", hour); out += buf; break;
        case 'M': std::snprintf(buf, sizeof buf, "%02d", min); out += buf; break;
        case 'S':
          std::snprintf(buf, sizeof buf, "%02d", sec);
          out += buf;
          if (millis != 0) {
            std::snprintf(buf, sizeof buf, ".%03d", millis);
            out += buf;
          }
          break;
        case '%': out += '%'; break;
        default: out += '%'; out += tok; break;
      }
    } else {
      out += format[f];
    }
  }
  return out;
}

double seconds_since_midnight(TimestampMs ts) {
  std::int64_t rem = ts - to_days(ts).time_since_epoch().count() * kMsPerDay;
  return static_cast<double>(rem) / 1000.0;
}

int weekday(TimestampMs ts) {
  return static_cast<int>(std::chrono::weekday{to_days(ts)}.c_encoding());
}

int month(TimestampMs ts) {
  return static_cast<int>(static_cast<unsigned>(std::chrono::year_month_day{to_days(ts)}.month()));
}

}  // namespace procsight
