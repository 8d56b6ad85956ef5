#pragma once

// Driving-style indicator catalog per device and window.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ubi/accel_bands.hpp"
#include "ubi/calendar.hpp"
#include "ubi/csv.hpp"
#include "ubi/time.hpp"
#include "ubi/trips.hpp"

namespace ubi {

enum class Feature : std::size_t {
  // mileage group
  mileage, trips_day, below_10_pr, below_30_pr, over_200, over_400, d_total_m, avg_trip_mil,
  avg_trip_dur, d_business_m, d_day_m, d_evening_jam_m, d_morning_jam_m, d_holi_m, d_night_m,
  day_m_pr, ej_m_pr,
  // speed group
  avg_sp, max_sp, max_ej_sp, max_mj_sp, max_n_sp, m_pr_below_20, m_pr_below_60, m_pr_over_100,
  m_pr_over_130,
  // acceleration group, events per 100 km
  a1, a2, a3, d1, d2, d3, s1, s2, s3,
  // speeding placeholders
  sp1, sp2, sp3,
  count_
};

inline constexpr std::size_t kFeatureCount = static_cast<std::size_t>(Feature::count_);

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "mileage", "trips_day", "below_10_pr", "below_30_pr", "over_200", "over_400", "d_total_m",
    "avg_trip_mil", "avg_trip_dur", "d_business_m", "d_day_m", "d_evening_jam_m", "d_morning_jam_m",
    "d_holi_m", "d_night_m", "day_m_pr", "ej_m_pr", "avg_sp", "max_sp", "max_ej_sp", "max_mj_sp",
    "max_n_sp", "m_pr_below_20", "m_pr_below_60", "m_pr_over_100", "m_pr_over_130", "a1", "a2", "a3",
    "d1", "d2", "d3", "s1", "s2", "s3", "sp1", "sp2", "sp3"};

inline std::string_view to_string(Feature f) { return kFeatureNames[static_cast<std::size_t>(f)]; }

inline std::optional<Feature> parse_feature(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  }
  return std::nullopt;
}

inline bool is_acceleration_feature(Feature f) {
  return f >= Feature::a1 && f <= Feature::s3;
}

inline Feature accel_feature(AccelBand b) {
  return static_cast<Feature>(static_cast<std::size_t>(Feature::a1) + static_cast<std::size_t>(b));
}

// Local time-of-day slices, [from, to) in hours. Hours 6-7 and 20-24 belong
// to no slice but still count toward totals.
struct HourSlice {
  int from;
  int to;
  constexpr bool contains(int hour) const { return hour >= from && hour < to; }
};
inline constexpr HourSlice kDaytime{7, 19};
inline constexpr HourSlice kMorningRush{8, 10};
inline constexpr HourSlice kEveningRush{18, 20};
inline constexpr HourSlice kNight{0, 6};

enum class WindowKind { weekly, lifetime };

inline std::string_view to_string(WindowKind k) { return k == WindowKind::weekly ? "weekly" : "lifetime"; }

inline WindowKind parse_window_kind(std::string_view s) {
  if (s == "weekly") return WindowKind::weekly;
  if (s == "lifetime") return WindowKind::lifetime;
  throw InputError("unknown window kind '" + std::string(s) + "'");
}

// [start, end) in UTC; both at local midnight.
struct Window {
  WindowKind kind = WindowKind::lifetime;
  Instant start{};
  Instant end{};
  bool operator==(const Window&) const = default;
};

struct FeatureVector {
  std::string device_id;
  Window window;
  std::array<double, kFeatureCount> values{};
  std::vector<std::string> quality_flags;

  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
};

struct FeatureOptions {
  UtcOffset tz{};
  // Values emitted for the undefined speeding indicators.
  std::array<double, 3> speeding_placeholder{0.0, 0.0, 0.0};
};

namespace detail {

inline std::vector<Days> window_dates(const Window& w, UtcOffset tz) {
  std::vector<Days> out;
  for (Days d = local_date(w.start, tz); local_midnight(d, tz) < w.end; d += std::chrono::days{1})
    out.push_back(d);
  return out;
}

}  // namespace detail

// Computes the catalog from hourly records and trips of one device. Records
// and trips outside the window are ignored (trips are assigned by start time).
inline FeatureVector compute_features(const std::vector<HourlyRecord>& hourly, const std::vector<Trip>& trips,
                                      const Window& window, const HolidayCalendar& calendar,
                                      const FeatureOptions& opts = {}) {
  if (!(window.end > window.start)) throw InputError("window end must be after its start");
  using F = Feature;
  FeatureVector fv;
  fv.window = window;
  if (!hourly.empty()) fv.device_id = hourly.front().device_id;
  else if (!trips.empty()) fv.device_id = trips.front().device_id;

  const auto dates = detail::window_dates(window, opts.tz);
  const double n_days = static_cast<double>(dates.size());
  double n_business = 0.0;
  for (auto d : dates) n_business += calendar.is_business_day(d) ? 1.0 : 0.0;
  const double n_holiday = n_days - n_business;

  double total = 0.0, business = 0.0, holiday = 0.0, day = 0.0, morning = 0.0, evening = 0.0, night = 0.0;
  double speed_km = 0.0;
  double max_all = 0.0, max_mj = 0.0, max_ej = 0.0, max_n = 0.0;
  std::array<double, kSpeedBandCount> bands{};
  std::array<double, kAccelBandCount> counts{};
  std::set<Days> covered;

  for (const auto& r : hourly) {
    if (r.hour_start < window.start || r.hour_start >= window.end) continue;
    const int hour = local_hour_of_day(r.hour_start, opts.tz);
    const Days date = local_date(r.hour_start, opts.tz);
    covered.insert(date);
    total += r.mileage_km;
    (calendar.is_business_day(date) ? business : holiday) += r.mileage_km;
    if (kDaytime.contains(hour)) day += r.mileage_km;
    if (kMorningRush.contains(hour)) {
      morning += r.mileage_km;
      max_mj = std::max(max_mj, r.max_speed_kph);
    }
    if (kEveningRush.contains(hour)) {
      evening += r.mileage_km;
      max_ej = std::max(max_ej, r.max_speed_kph);
    }
    if (kNight.contains(hour)) {
      night += r.mileage_km;
      max_n = std::max(max_n, r.max_speed_kph);
    }
    max_all = std::max(max_all, r.max_speed_kph);
    speed_km += r.mileage_km * r.mean_speed_kph;
    for (std::size_t b = 0; b < kSpeedBandCount; ++b) bands[b] += r.band_km[b];
    for (std::size_t b = 0; b < kAccelBandCount; ++b) counts[b] += static_cast<double>(r.accel_counts[b]);
  }

  std::size_t n_trips = 0, lt10 = 0, lt30 = 0, gt200 = 0, gt400 = 0;
  double trip_km = 0.0, trip_s = 0.0;
  for (const auto& t : trips) {
    if (t.start < window.start || t.start >= window.end) continue;
    ++n_trips;
    trip_km += t.mileage_km;
    trip_s += static_cast<double>(t.duration_s);
    lt10 += t.mileage_km < 10.0;
    lt30 += t.mileage_km < 30.0;
    gt200 += t.mileage_km > 200.0;
    gt400 += t.mileage_km > 400.0;
  }

  auto share = [](double part, double whole) { return whole > 0.0 ? 100.0 * part / whole : 0.0; };
  auto per_day = [](double km, double days) { return days > 0.0 ? km / days : 0.0; };

  fv[F::mileage] = total;
  fv[F::trips_day] = covered.empty() ? 0.0 : static_cast<double>(n_trips) / static_cast<double>(covered.size());
  const double nt = static_cast<double>(n_trips);
  fv[F::below_10_pr] = share(static_cast<double>(lt10), nt);
  fv[F::below_30_pr] = share(static_cast<double>(lt30), nt);
  fv[F::over_200] = share(static_cast<double>(gt200), nt);
  fv[F::over_400] = share(static_cast<double>(gt400), nt);
  fv[F::avg_trip_mil] = n_trips ? trip_km / nt : 0.0;
  fv[F::avg_trip_dur] = n_trips ? trip_s / nt : 0.0;
  fv[F::d_total_m] = per_day(total, n_days);
  fv[F::d_business_m] = per_day(business, n_business);
  fv[F::d_holi_m] = per_day(holiday, n_holiday);
  fv[F::d_day_m] = per_day(day, n_days);
  fv[F::d_morning_jam_m] = per_day(morning, n_days);
  fv[F::d_evening_jam_m] = per_day(evening, n_days);
  fv[F::d_night_m] = per_day(night, n_days);
  fv[F::day_m_pr] = share(day, total);
  fv[F::ej_m_pr] = share(evening, total);

  fv[F::avg_sp] = total > 0.0 ? speed_km / total : 0.0;
  fv[F::max_sp] = max_all;
  fv[F::max_ej_sp] = max_ej;
  fv[F::max_mj_sp] = max_mj;
  fv[F::max_n_sp] = max_n;
  fv[F::m_pr_below_20] = share(bands[0], total);
  fv[F::m_pr_below_60] = share(bands[0] + bands[1], total);
  fv[F::m_pr_over_100] = share(bands[3] + bands[4], total);
  fv[F::m_pr_over_130] = share(bands[4], total);

  for (std::size_t b = 0; b < kAccelBandCount; ++b)
    fv[accel_feature(static_cast<AccelBand>(b))] = total > 0.0 ? 100.0 * counts[b] / total : 0.0;

  fv[F::sp1] = opts.speeding_placeholder[0];
  fv[F::sp2] = opts.speeding_placeholder[1];
  fv[F::sp3] = opts.speeding_placeholder[2];

  if (n_trips == 0) fv.quality_flags.emplace_back("no_trips");
  if (total <= 0.0) fv.quality_flags.emplace_back("no_mileage");
  if (n_business == 0.0) fv.quality_flags.emplace_back("no_business_days");
  if (n_holiday == 0.0) fv.quality_flags.emplace_back("no_holidays");
  return fv;
}

// Lifetime window: local midnight of the first active day up to local
// midnight after the last active day.
inline std::optional<Window> lifetime_window(const std::vector<HourlyRecord>& hourly, UtcOffset tz = {}) {
  if (hourly.empty()) return std::nullopt;
  auto [lo, hi] = std::minmax_element(hourly.begin(), hourly.end(), [](const auto& a, const auto& b) {
    return a.hour_start < b.hour_start;
  });
  return Window{WindowKind::lifetime, local_midnight(local_date(lo->hour_start, tz), tz),
                local_midnight(local_date(hi->hour_start, tz) + std::chrono::days{1}, tz)};
}

// ISO weeks (Monday 00:00 local) that contain at least one hourly record.
inline std::vector<Window> weekly_windows(const std::vector<HourlyRecord>& hourly, UtcOffset tz = {}) {
  std::set<Days> mondays;
  for (const auto& r : hourly) mondays.insert(iso_week_monday(local_date(r.hour_start, tz)));
  std::vector<Window> out;
  for (auto m : mondays)
    out.push_back(Window{WindowKind::weekly, local_midnight(m, tz), local_midnight(m + std::chrono::days{7}, tz)});
  return out;
}

// ---- CSV ------------------------------------------------------------------

inline std::vector<std::string> feature_csv_header() {
  std::vector<std::string> h = {"device", "window_kind", "window_start"};
  for (auto n : kFeatureNames) h.emplace_back(n);
  h.emplace_back("quality_flags");
  return h;
}

inline void write_features_csv(std::ostream& out, const std::vector<FeatureVector>& rows) {
  out << csv::join(feature_csv_header()) << '\n';
  for (const auto& fv : rows) {
    csv::check_field(fv.device_id);
    std::vector<std::string> f = {fv.device_id, std::string(to_string(fv.window.kind)),
                                  format_rfc3339(fv.window.start)};
    for (double v : fv.values) f.push_back(csv::format_double(v));
    std::string flags;
    for (const auto& q : fv.quality_flags) flags += (flags.empty() ? "" : "|") + q;
    f.push_back(flags);
    out << csv::join(f) << '\n';
  }
}

// Reads a feature table. The window end is not stored; it is reconstructed as
// start + 7 days for weekly rows and left equal to start for lifetime rows.
inline std::vector<FeatureVector> read_features_csv(std::istream& in) {
  auto table = csv::read(in);
  const auto c_dev = table.require("device"), c_kind = table.require("window_kind"),
             c_start = table.require("window_start");
  std::array<std::optional<std::size_t>, kFeatureCount> cols{};
  for (std::size_t i = 0; i < kFeatureCount; ++i) cols[i] = table.column(kFeatureNames[i]);
  const auto c_flags = table.column("quality_flags");
  std::vector<FeatureVector> out;
  for (const auto& row : table.rows) {
    FeatureVector fv;
    fv.device_id = row[c_dev];
    fv.window.kind = parse_window_kind(row[c_kind]);
    auto s = parse_rfc3339(row[c_start]);
    if (!s) throw InputError("invalid window_start '" + row[c_start] + "'");
    fv.window.start = *s;
    fv.window.end = fv.window.kind == WindowKind::weekly ? *s + std::chrono::days{7} : *s;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      fv.values[i] = cols[i] ? csv::parse_double(row[*cols[i]], kFeatureNames[i]) : std::nan("");
    }
    if (c_flags && !row[*c_flags].empty()) fv.quality_flags = csv::split(row[*c_flags], '|');
    out.push_back(std::move(fv));
  }
  return out;
}

}  // namespace ubi
