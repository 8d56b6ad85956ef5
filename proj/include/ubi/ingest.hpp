#pragma once

// Raw telematics event model and the JSON-lines device log reader/writer.
//
// One event per line:
//   {"device":"d1","ts":"2019-03-05T08:10:00Z","kind":"position","lat":55.7,"lon":37.6}
// Keys that do not apply to the kind are absent; unknown keys are ignored.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ubi/error.hpp"
#include "ubi/time.hpp"

namespace ubi {

enum class EventKind { ignition_on, ignition_off, position, speed, acceleration };
enum class Axis { longitudinal, lateral };

inline constexpr double kMaxAbsAccelG = 24.0;
inline constexpr double kSuspectSpeedKph = 300.0;

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::ignition_on: return "ignition_on";
    case EventKind::ignition_off: return "ignition_off";
    case EventKind::position: return "position";
    case EventKind::speed: return "speed";
    case EventKind::acceleration: return "acceleration";
  }
  return "?";
}

inline std::optional<EventKind> parse_event_kind(std::string_view s) {
  if (s == "ignition_on") return EventKind::ignition_on;
  if (s == "ignition_off") return EventKind::ignition_off;
  if (s == "position") return EventKind::position;
  if (s == "speed") return EventKind::speed;
  if (s == "acceleration") return EventKind::acceleration;
  return std::nullopt;
}

inline std::string_view to_string(Axis a) {
  return a == Axis::longitudinal ? "longitudinal" : "lateral";
}

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
  bool operator==(const GeoPoint&) const = default;
};

struct Acceleration {
  Axis axis = Axis::longitudinal;
  double g = 0.0;  // signed; sign matters on the longitudinal axis
  bool operator==(const Acceleration&) const = default;
};

// One raw device record. Which optional members are engaged depends on kind:
//   position      -> point
//   speed         -> speed_kph, optional point
//   acceleration  -> accel, optional point
//   ignition_*    -> nothing
struct EventPackage {
  std::string device_id;
  Instant timestamp{};
  EventKind kind = EventKind::position;
  std::optional<GeoPoint> point;
  std::optional<double> speed_kph;
  std::optional<Acceleration> accel;

  bool operator==(const EventPackage&) const = default;

  static EventPackage ignition(std::string device, Instant t, bool on) {
    return {std::move(device), t, on ? EventKind::ignition_on : EventKind::ignition_off, {}, {}, {}};
  }
  static EventPackage position(std::string device, Instant t, GeoPoint p) {
    return {std::move(device), t, EventKind::position, p, {}, {}};
  }
  static EventPackage speed(std::string device, Instant t, double kph,
                            std::optional<GeoPoint> p = std::nullopt) {
    return {std::move(device), t, EventKind::speed, p, kph, {}};
  }
  static EventPackage acceleration(std::string device, Instant t, Axis axis, double g,
                                   std::optional<GeoPoint> p = std::nullopt) {
    return {std::move(device), t, EventKind::acceleration, p, {}, Acceleration{axis, g}};
  }
};

// A single device's time-ordered event stream.
struct DeviceLog {
  std::string device_id;
  std::vector<EventPackage> events;
  Instant observation_start{};
  Instant observation_end{};

  bool operator==(const DeviceLog&) const = default;
};

// Builds a DeviceLog from events of one device: sorts stably by timestamp and
// sets the observation bounds to the first and last event.
inline DeviceLog make_device_log(std::string device_id, std::vector<EventPackage> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const EventPackage& a, const EventPackage& b) { return a.timestamp < b.timestamp; });
  DeviceLog log{std::move(device_id), std::move(events), {}, {}};
  if (!log.events.empty()) {
    log.observation_start = log.events.front().timestamp;
    log.observation_end = log.events.back().timestamp;
  }
  return log;
}

struct ParseDiagnostic {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct ParseResult {
  std::vector<DeviceLog> logs;  // ordered by device id
  std::vector<ParseDiagnostic> diagnostics;
  std::size_t data_lines = 0;   // non-blank, non-comment lines
  std::size_t emitted = 0;
  std::size_t skipped = 0;      // malformed + duplicates; data_lines == emitted + skipped
};

namespace detail {

inline nlohmann::ordered_json event_to_json(const EventPackage& e) {
  nlohmann::ordered_json j;
  j["device"] = e.device_id;
  j["ts"] = format_rfc3339(e.timestamp);
  j["kind"] = std::string(to_string(e.kind));
  if (e.point) {
    j["lat"] = e.point->lat;
    j["lon"] = e.point->lon;
  }
  if (e.speed_kph) j["speed_kph"] = *e.speed_kph;
  if (e.accel) {
    j["axis"] = std::string(to_string(e.accel->axis));
    j["accel_g"] = e.accel->g;
  }
  return j;
}

// Returns an empty string on success, otherwise the rejection reason.
inline std::string event_from_json(const nlohmann::json& j, EventPackage& out) {
  if (!j.is_object()) return "record is not a JSON object";
  auto dev = j.find("device");
  if (dev == j.end() || !dev->is_string() || dev->get_ref<const std::string&>().empty())
    return "missing or invalid 'device'";
  auto ts = j.find("ts");
  if (ts == j.end() || !ts->is_string()) return "missing or invalid 'ts'";
  auto when = parse_rfc3339(ts->get_ref<const std::string&>());
  if (!when) return "timestamp not parseable";
  auto kind_it = j.find("kind");
  if (kind_it == j.end() || !kind_it->is_string()) return "missing or invalid 'kind'";
  auto kind = parse_event_kind(kind_it->get_ref<const std::string&>());
  if (!kind) return "unknown kind '" + kind_it->get<std::string>() + "'";

  auto number = [&](const char* key, std::optional<double>& v) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return {};
    if (!it->is_number()) return std::string("'") + key + "' is not a number";
    double x = it->get<double>();
    if (!std::isfinite(x)) return std::string("'") + key + "' is not finite";
    v = x;
    return {};
  };
  std::optional<double> lat, lon, speed, accel;
  for (auto [key, slot] : {std::pair{"lat", &lat}, std::pair{"lon", &lon},
                           std::pair{"speed_kph", &speed}, std::pair{"accel_g", &accel}}) {
    if (auto err = number(key, *slot); !err.empty()) return err;
  }
  std::optional<Axis> axis;
  if (auto it = j.find("axis"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) return "'axis' is not a string";
    const auto& a = it->get_ref<const std::string&>();
    if (a == "longitudinal") axis = Axis::longitudinal;
    else if (a == "lateral") axis = Axis::lateral;
    else return "unknown axis '" + a + "'";
  }

  if (lat.has_value() != lon.has_value()) return "'lat' and 'lon' must appear together";
  if (lat && (*lat < -90.0 || *lat > 90.0)) return "latitude out of range";
  if (lon && (*lon < -180.0 || *lon > 180.0)) return "longitude out of range";

  const bool coords_allowed = *kind == EventKind::position || *kind == EventKind::speed ||
                              *kind == EventKind::acceleration;
  if (lat && !coords_allowed) return "coordinates not applicable to " + std::string(to_string(*kind));
  if (*kind == EventKind::position && !lat) return "position without coordinates";
  if (speed && *kind != EventKind::speed) return "'speed_kph' not applicable to " + std::string(to_string(*kind));
  if (*kind == EventKind::speed) {
    if (!speed) return "speed without 'speed_kph'";
    if (*speed < 0.0) return "negative speed";
  }
  if ((axis || accel) && *kind != EventKind::acceleration)
    return "acceleration fields not applicable to " + std::string(to_string(*kind));
  if (*kind == EventKind::acceleration) {
    if (!axis || !accel) return "acceleration without 'axis' and 'accel_g'";
    if (std::fabs(*accel) > kMaxAbsAccelG) return "acceleration beyond device ceiling";
  }

  out.device_id = dev->get<std::string>();
  out.timestamp = *when;
  out.kind = *kind;
  out.point = lat ? std::optional<GeoPoint>(GeoPoint{*lat, *lon}) : std::nullopt;
  out.speed_kph = speed;
  out.accel = accel ? std::optional<Acceleration>(Acceleration{*axis, *accel}) : std::nullopt;
  return {};
}

}  // namespace detail

// Reads a JSONL event stream. Malformed lines, out-of-range values and exact
// duplicates are skipped with a diagnostic; blank lines and lines starting
// with '#' are ignored.
inline ParseResult parse_event_log(std::istream& in) {
  if (!in) throw InputError("event stream is not readable");
  ParseResult result;
  std::map<std::string, std::vector<EventPackage>> by_device;
  std::map<std::string, std::set<std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    ++result.data_lines;

    nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) {
      result.diagnostics.push_back({line_no, "malformed JSON"});
      ++result.skipped;
      continue;
    }
    EventPackage ev;
    if (auto reason = detail::event_from_json(j, ev); !reason.empty()) {
      result.diagnostics.push_back({line_no, reason});
      ++result.skipped;
      continue;
    }
    auto key = detail::event_to_json(ev).dump();
    if (!seen[ev.device_id].insert(key).second) {
      result.diagnostics.push_back({line_no, "duplicate event"});
      ++result.skipped;
      continue;
    }
    by_device[ev.device_id].push_back(std::move(ev));
    ++result.emitted;
  }
  if (in.bad()) throw InputError("error while reading event stream");
  for (auto& [device, events] : by_device) {
    result.logs.push_back(make_device_log(device, std::move(events)));
  }
  return result;
}

inline ParseResult parse_event_log(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_event_log(in);
}

inline void write_event(std::ostream& out, const EventPackage& e) {
  out << detail::event_to_json(e).dump() << '\n';
}

inline void serialize_event_log(std::ostream& out, const std::vector<DeviceLog>& logs) {
  for (const auto& log : logs) {
    for (const auto& e : log.events) write_event(out, e);
  }
}

struct ValidationIssue {
  enum class Level { error, warning, suspect };
  Level level = Level::warning;
  std::size_t event_index = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool empty() const { return issues.empty(); }
  std::size_t count(ValidationIssue::Level level) const {
    return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(),
                                                  [&](const auto& i) { return i.level == level; }));
  }
};

inline std::string_view to_string(ValidationIssue::Level l) {
  switch (l) {
    case ValidationIssue::Level::error: return "error";
    case ValidationIssue::Level::warning: return "warning";
    case ValidationIssue::Level::suspect: return "suspect";
  }
  return "?";
}

// Checks a log against the event-model invariants without modifying it.
inline ValidationReport validate_log(const DeviceLog& log) {
  using Level = ValidationIssue::Level;
  ValidationReport report;
  auto add = [&](Level level, std::size_t i, std::string msg) {
    report.issues.push_back({level, i, std::move(msg)});
  };
  // Index of the unmatched ignition_on, or kNone.
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t open_ignition = kNone;
  for (std::size_t i = 0; i < log.events.size(); ++i) {
    const auto& e = log.events[i];
    if (e.device_id != log.device_id) add(Level::error, i, "event belongs to another device");
    if (i > 0 && e.timestamp < log.events[i - 1].timestamp) add(Level::error, i, "non-monotone time");
    if (e.timestamp < log.observation_start || e.timestamp > log.observation_end)
      add(Level::error, i, "timestamp outside observation period");
    if (e.point) {
      if (e.point->lat < -90.0 || e.point->lat > 90.0) add(Level::error, i, "latitude out of range");
      if (e.point->lon < -180.0 || e.point->lon > 180.0) add(Level::error, i, "longitude out of range");
    }
    switch (e.kind) {
      case EventKind::ignition_on:
        if (open_ignition != kNone) add(Level::warning, open_ignition, "unterminated trip");
        open_ignition = i;
        break;
      case EventKind::ignition_off:
        if (open_ignition == kNone) add(Level::warning, i, "ignition_off without ignition_on");
        open_ignition = kNone;
        break;
      default:
        break;
    }
    const bool wrong_fields =
        (e.kind == EventKind::position && (!e.point || e.speed_kph || e.accel)) ||
        (e.kind == EventKind::speed && (!e.speed_kph || e.accel)) ||
        (e.kind == EventKind::acceleration && (!e.accel || e.speed_kph)) ||
        ((e.kind == EventKind::ignition_on || e.kind == EventKind::ignition_off) &&
         (e.point || e.speed_kph || e.accel));
    if (wrong_fields) add(Level::error, i, "fields do not match kind");
    if (e.speed_kph) {
      if (*e.speed_kph < 0.0) add(Level::error, i, "negative speed");
      else if (*e.speed_kph > kSuspectSpeedKph) add(Level::suspect, i, "speed above 300 kph");
    }
    if (e.accel && std::fabs(e.accel->g) > kMaxAbsAccelG)
      add(Level::error, i, "acceleration beyond device ceiling");
  }
  if (open_ignition != kNone) add(Level::warning, open_ignition, "unterminated trip");
  return report;
}

}  // namespace ubi
