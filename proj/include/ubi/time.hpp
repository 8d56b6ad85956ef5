#pragma once

// UTC instants, RFC 3339 text, and fixed-offset local civil time.

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "ubi/error.hpp"

namespace ubi {

using Instant = std::chrono::sys_seconds;
using Seconds = std::chrono::seconds;
using Days = std::chrono::sys_days;

// Fixed offset from UTC for device-local time. Named zones are not
// supported; "UTC", "Z", "+03:00", "-0530" are.
class UtcOffset {
 public:
  constexpr UtcOffset() = default;
  constexpr explicit UtcOffset(std::chrono::minutes m) : minutes_(m) {}

  constexpr std::chrono::minutes minutes() const { return minutes_; }
  constexpr bool operator==(const UtcOffset&) const = default;

  static UtcOffset parse(std::string_view text);
  std::string to_string() const;

 private:
  std::chrono::minutes minutes_{0};
};

namespace detail {

inline bool parse_fixed_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc{};
}

// Parses "+HH:MM", "-HH:MM", "+HHMM", "-HHMM" into minutes east of UTC.
inline std::optional<int> parse_offset_minutes(std::string_view s) {
  if (s.size() < 5 || (s[0] != '+' && s[0] != '-')) return std::nullopt;
  int sign = s[0] == '-' ? -1 : 1;
  std::string_view hh = s.substr(1, 2);
  std::string_view mm = s.size() == 6 && s[3] == ':' ? s.substr(4, 2)
                        : s.size() == 5              ? s.substr(3, 2)
                                                     : std::string_view{};
  int h = 0, m = 0;
  if (!parse_fixed_int(hh, h) || !parse_fixed_int(mm, m) || h > 23 || m > 59)
    return std::nullopt;
  return sign * (h * 60 + m);
}

}  // namespace detail

inline UtcOffset UtcOffset::parse(std::string_view text) {
  if (text == "UTC" || text == "Z" || text == "utc" || text.empty()) return UtcOffset{};
  auto m = detail::parse_offset_minutes(text);
  if (!m) throw InputError("invalid UTC offset '" + std::string(text) + "'");
  return UtcOffset{std::chrono::minutes(*m)};
}

inline std::string UtcOffset::to_string() const {
  auto total = minutes_.count();
  if (total == 0) return "UTC";
  char buf[16];
  char sign = total < 0 ? '-' : '+';
  if (total < 0) total = -total;
  std::snprintf(buf, sizeof buf, "%c%02d:%02d", sign, static_cast<int>(total / 60),
                static_cast<int>(total % 60));
  return buf;
}

// Parses an RFC 3339 timestamp ("2019-03-05T08:10:00Z", optional fraction,
// optional numeric offset). Fractional seconds are truncated toward the past.
inline std::optional<Instant> parse_rfc3339(std::string_view s) {
  using namespace std::chrono;
  if (s.size() < 20) return std::nullopt;
  if (s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':')
    return std::nullopt;
  int y, mo, d, h, mi, se;
  if (!detail::parse_fixed_int(s.substr(0, 4), y) ||
      !detail::parse_fixed_int(s.substr(5, 2), mo) ||
      !detail::parse_fixed_int(s.substr(8, 2), d) ||
      !detail::parse_fixed_int(s.substr(11, 2), h) ||
      !detail::parse_fixed_int(s.substr(14, 2), mi) ||
      !detail::parse_fixed_int(s.substr(17, 2), se))
    return std::nullopt;
  if (h > 23 || mi > 59 || se > 59) return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  std::string_view rest = s.substr(19);
  if (!rest.empty() && rest[0] == '.') {
    std::size_t i = 1;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    if (i == 1) return std::nullopt;
    rest = rest.substr(i);
  }
  int offset_min = 0;
  if (rest == "Z" || rest == "z") {
    offset_min = 0;
  } else if (auto off = detail::parse_offset_minutes(rest); off && (rest.size() == 6 || rest.size() == 5)) {
    offset_min = *off;
  } else {
    return std::nullopt;
  }
  Instant t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{se};
  return t - minutes{offset_min};
}

inline std::string format_rfc3339(Instant t) {
  using namespace std::chrono;
  auto day_point = floor<days>(t);
  year_month_day ymd{day_point};
  hh_mm_ss hms{t - day_point};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

inline std::string format_date(Days d) {
  using namespace std::chrono;
  year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

inline std::optional<Days> parse_date(std::string_view s) {
  using namespace std::chrono;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  int y, m, d;
  if (!detail::parse_fixed_int(s.substr(0, 4), y) || !detail::parse_fixed_int(s.substr(5, 2), m) ||
      !detail::parse_fixed_int(s.substr(8, 2), d))
    return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

// Local civil time helpers. A "local instant" is the UTC instant shifted by
// the offset, so that calendar arithmetic on it yields local wall time.
inline Instant to_local(Instant t, UtcOffset off) { return t + off.minutes(); }
inline Instant from_local(Instant local, UtcOffset off) { return local - off.minutes(); }

inline int local_hour_of_day(Instant t, UtcOffset off) {
  using namespace std::chrono;
  auto local = to_local(t, off);
  return static_cast<int>(floor<hours>(local - floor<days>(local)).count());
}

inline Days local_date(Instant t, UtcOffset off) {
  return std::chrono::floor<std::chrono::days>(to_local(t, off));
}

// UTC instant at which the local hour containing t begins.
inline Instant local_hour_start(Instant t, UtcOffset off) {
  using namespace std::chrono;
  return from_local(floor<hours>(to_local(t, off)), off);
}

// UTC instant of local midnight starting the given local date.
inline Instant local_midnight(Days d, UtcOffset off) { return from_local(Instant{d}, off); }

// Local date of the Monday starting the ISO week containing d.
inline Days iso_week_monday(Days d) {
  using namespace std::chrono;
  weekday wd{d};
  unsigned iso = wd.iso_encoding();  // Mon=1 .. Sun=7
  return d - days{iso - 1};
}

inline bool is_weekend(Days d) {
  using namespace std::chrono;
  weekday wd{d};
  return wd == Saturday || wd == Sunday;
}

}  // namespace ubi
