#pragma once

// Trip segmentation and hourly roll-up of device logs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ubi/accel_bands.hpp"
#include "ubi/csv.hpp"
#include "ubi/ingest.hpp"
#include "ubi/time.hpp"

namespace ubi {

inline constexpr double kEarthRadiusKm = 6371.0088;

// Great-circle distance on a sphere of radius kEarthRadiusKm.
inline double haversine_km(GeoPoint a, GeoPoint b) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * rad;
  const double dlon = (b.lon - a.lon) * rad;
  const double s1 = std::sin(dlat / 2.0);
  const double s2 = std::sin(dlon / 2.0);
  double h = s1 * s1 + std::cos(a.lat * rad) * std::cos(b.lat * rad) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

struct Trip {
  std::string device_id;
  Instant start{};
  Instant end{};
  double mileage_km = 0.0;
  std::int64_t duration_s = 0;
  double mean_speed_kph = 0.0;

  bool operator==(const Trip&) const = default;
};

struct TripOptions {
  Seconds gap_threshold{600};
  Seconds min_duration{60};
  double min_mileage_km = 0.1;
};

namespace detail {

inline bool is_movement(const EventPackage& e) {
  return e.kind == EventKind::position || e.kind == EventKind::speed;
}

// Positions of a log whose timestamps fall inside [start, end].
inline std::vector<const EventPackage*> positions_between(const DeviceLog& log, Instant start,
                                                          Instant end) {
  std::vector<const EventPackage*> out;
  auto first = std::lower_bound(log.events.begin(), log.events.end(), start,
                                [](const EventPackage& e, Instant t) { return e.timestamp < t; });
  for (auto it = first; it != log.events.end() && it->timestamp <= end; ++it) {
    if (it->kind == EventKind::position) out.push_back(&*it);
  }
  return out;
}

inline double path_km(const std::vector<const EventPackage*>& pts) {
  double km = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) km += haversine_km(*pts[i - 1]->point, *pts[i]->point);
  return km;
}

}  // namespace detail

// Splits a log into trips. Ignition on/off pairs bound trips; movement events
// outside every ignition interval are grouped into trips wherever the silence
// between consecutive events exceeds the gap threshold. Trips shorter than the
// minimum duration or mileage are dropped as jitter.
inline std::vector<Trip> segment_trips(const DeviceLog& log, const TripOptions& opts = {}) {
  std::vector<std::pair<Instant, Instant>> intervals;
  {
    std::optional<Instant> open;
    std::optional<Instant> last_movement;
    auto close_open = [&] {
      if (open && last_movement && *last_movement > *open) intervals.emplace_back(*open, *last_movement);
    };
    for (const auto& e : log.events) {
      if (e.kind == EventKind::ignition_on) {
        close_open();
        open = e.timestamp;
        last_movement.reset();
      } else if (e.kind == EventKind::ignition_off) {
        if (open) intervals.emplace_back(*open, e.timestamp);
        open.reset();
      } else if (open && detail::is_movement(e)) {
        last_movement = e.timestamp;
      }
    }
    close_open();
  }

  auto covered = [&](Instant t) {
    return std::any_of(intervals.begin(), intervals.end(),
                       [&](const auto& iv) { return t >= iv.first && t <= iv.second; });
  };
  auto interval_starts_between = [&](Instant a, Instant b) {
    return std::any_of(intervals.begin(), intervals.end(),
                       [&](const auto& iv) { return iv.first > a && iv.first < b; });
  };

  std::vector<std::pair<Instant, Instant>> spans = intervals;
  {
    std::optional<std::pair<Instant, Instant>> cluster;
    for (const auto& e : log.events) {
      if (!detail::is_movement(e) || covered(e.timestamp)) continue;
      if (cluster && (e.timestamp - cluster->second > opts.gap_threshold ||
                      interval_starts_between(cluster->second, e.timestamp))) {
        spans.push_back(*cluster);
        cluster.reset();
      }
      if (!cluster) cluster.emplace(e.timestamp, e.timestamp);
      else cluster->second = e.timestamp;
    }
    if (cluster) spans.push_back(*cluster);
  }
  std::sort(spans.begin(), spans.end());

  std::vector<Trip> trips;
  for (const auto& [start, end] : spans) {
    const auto duration = end - start;
    if (duration < opts.min_duration || duration.count() <= 0) continue;
    const double km = detail::path_km(detail::positions_between(log, start, end));
    if (km < opts.min_mileage_km) continue;
    Trip t;
    t.device_id = log.device_id;
    t.start = start;
    t.end = end;
    t.mileage_km = km;
    t.duration_s = duration.count();
    t.mean_speed_kph = km / (static_cast<double>(t.duration_s) / 3600.0);
    trips.push_back(std::move(t));
  }
  return trips;
}

// Mileage speed bands, half-open: [0,20) [20,60) [60,100) [100,130) [130,inf).
inline constexpr std::size_t kSpeedBandCount = 5;
inline constexpr std::array<double, kSpeedBandCount - 1> kSpeedBandEdges = {20.0, 60.0, 100.0, 130.0};

inline std::size_t speed_band(double kph) {
  std::size_t b = 0;
  while (b < kSpeedBandEdges.size() && kph >= kSpeedBandEdges[b]) ++b;
  return b;
}

struct HourlyRecord {
  std::string device_id;
  Instant hour_start{};  // UTC instant where the local hour begins
  double mileage_km = 0.0;
  double mean_speed_kph = 0.0;  // mileage-weighted, 0 without movement
  double max_speed_kph = 0.0;   // over speed packages and driven legs
  std::array<std::int64_t, kAccelBandCount> accel_counts{};
  std::array<double, kSpeedBandCount> band_km{};

  bool operator==(const HourlyRecord&) const = default;
};

// Rolls a log up into one record per local hour with any event. Trip legs
// between consecutive positions are split across hour boundaries in
// proportion to elapsed time; leg speed is distance over elapsed time.
inline std::vector<HourlyRecord> aggregate_hourly(const DeviceLog& log, const std::vector<Trip>& trips,
                                                  UtcOffset tz = {}) {
  struct Acc {
    HourlyRecord rec;
    double speed_km = 0.0;
  };
  std::map<Instant, Acc> hours;
  auto at = [&](Instant t) -> Acc& {
    auto h = local_hour_start(t, tz);
    auto [it, inserted] = hours.try_emplace(h);
    if (inserted) {
      it->second.rec.device_id = log.device_id;
      it->second.rec.hour_start = h;
    }
    return it->second;
  };

  for (const auto& e : log.events) {
    Acc& a = at(e.timestamp);
    if (e.kind == EventKind::speed) a.rec.max_speed_kph = std::max(a.rec.max_speed_kph, *e.speed_kph);
    if (e.kind == EventKind::acceleration) {
      auto band = classify_accel_event(e.accel->axis, e.accel->g);
      if (band != AccelBand::none) ++a.rec.accel_counts[static_cast<std::size_t>(band)];
    }
  }

  auto add_leg = [&](Instant hour_of, double km, double speed) {
    if (km <= 0.0) return;
    Acc& a = at(hour_of);
    a.rec.mileage_km += km;
    a.speed_km += km * speed;
    a.rec.band_km[speed_band(speed)] += km;
    a.rec.max_speed_kph = std::max(a.rec.max_speed_kph, speed);
  };

  for (const auto& trip : trips) {
    auto pts = detail::positions_between(log, trip.start, trip.end);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Instant t0 = pts[i - 1]->timestamp;
      const Instant t1 = pts[i]->timestamp;
      const double km = haversine_km(*pts[i - 1]->point, *pts[i]->point);
      const auto dt = (t1 - t0).count();
      if (dt <= 0) {
        add_leg(t0, km, trip.mean_speed_kph);
        continue;
      }
      const double speed = km / (static_cast<double>(dt) / 3600.0);
      Instant cursor = t0;
      while (cursor < t1) {
        const Instant next_hour = local_hour_start(cursor, tz) + std::chrono::hours{1};
        const Instant stop = std::min(next_hour, t1);
        add_leg(cursor, km * static_cast<double>((stop - cursor).count()) / static_cast<double>(dt), speed);
        cursor = stop;
      }
    }
  }

  std::vector<HourlyRecord> out;
  out.reserve(hours.size());
  for (auto& [h, a] : hours) {
    a.rec.mean_speed_kph = a.rec.mileage_km > 0.0 ? a.speed_km / a.rec.mileage_km : 0.0;
    out.push_back(std::move(a.rec));
  }
  return out;
}

// ---- CSV ------------------------------------------------------------------

inline const std::vector<std::string>& hourly_csv_header() {
  static const std::vector<std::string> h = {
      "device", "hour_start", "mileage_km", "mean_speed_kph", "a1",        "a2",      "a3",
      "d1",     "d2",         "d3",         "s1",             "s2",        "s3",      "m_lt20",
      "m_20_60", "m_60_100",  "m_100_130",  "m_gt130",        "max_speed_kph"};
  return h;
}

inline void write_hourly_csv(std::ostream& out, const std::vector<HourlyRecord>& records) {
  out << csv::join(hourly_csv_header()) << '\n';
  for (const auto& r : records) {
    csv::check_field(r.device_id);
    std::vector<std::string> f = {r.device_id, format_rfc3339(r.hour_start), csv::format_double(r.mileage_km),
                                  csv::format_double(r.mean_speed_kph)};
    for (auto c : r.accel_counts) f.push_back(std::to_string(c));
    for (auto km : r.band_km) f.push_back(csv::format_double(km));
    f.push_back(csv::format_double(r.max_speed_kph));
    out << csv::join(f) << '\n';
  }
}

inline std::vector<HourlyRecord> read_hourly_csv(std::istream& in) {
  auto table = csv::read(in);
  std::vector<std::size_t> cols;
  for (const auto& name : hourly_csv_header()) cols.push_back(table.require(name));
  std::vector<HourlyRecord> out;
  for (const auto& row : table.rows) {
    HourlyRecord r;
    r.device_id = row[cols[0]];
    auto t = parse_rfc3339(row[cols[1]]);
    if (!t) throw InputError("invalid hour_start '" + row[cols[1]] + "'");
    r.hour_start = *t;
    r.mileage_km = csv::parse_double(row[cols[2]], "mileage_km");
    r.mean_speed_kph = csv::parse_double(row[cols[3]], "mean_speed_kph");
    for (std::size_t b = 0; b < kAccelBandCount; ++b) r.accel_counts[b] = csv::parse_int(row[cols[4 + b]], "count");
    for (std::size_t b = 0; b < kSpeedBandCount; ++b) r.band_km[b] = csv::parse_double(row[cols[13 + b]], "band");
    r.max_speed_kph = csv::parse_double(row[cols[18]], "max_speed_kph");
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_trips_csv(std::ostream& out, const std::vector<Trip>& trips) {
  out << "device,start,end,mileage_km,duration_s,mean_speed_kph\n";
  for (const auto& t : trips) {
    csv::check_field(t.device_id);
    out << csv::join({t.device_id, format_rfc3339(t.start), format_rfc3339(t.end),
                      csv::format_double(t.mileage_km), std::to_string(t.duration_s),
                      csv::format_double(t.mean_speed_kph)})
        << '\n';
  }
}

inline std::vector<Trip> read_trips_csv(std::istream& in) {
  auto table = csv::read(in);
  const auto c_dev = table.require("device"), c_start = table.require("start"), c_end = table.require("end"),
             c_km = table.require("mileage_km"), c_dur = table.require("duration_s"),
             c_sp = table.require("mean_speed_kph");
  std::vector<Trip> out;
  for (const auto& row : table.rows) {
    Trip t;
    t.device_id = row[c_dev];
    auto s = parse_rfc3339(row[c_start]);
    auto e = parse_rfc3339(row[c_end]);
    if (!s || !e) throw InputError("invalid trip timestamp for device " + t.device_id);
    t.start = *s;
    t.end = *e;
    t.mileage_km = csv::parse_double(row[c_km], "mileage_km");
    t.duration_s = csv::parse_int(row[c_dur], "duration_s");
    t.mean_speed_kph = csv::parse_double(row[c_sp], "mean_speed_kph");
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace ubi
