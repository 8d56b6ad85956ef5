#pragma once

// Reading and writing synthetic-population parameters as an INI file
// ([population], [claims], [profile], [accident], [medium_vs_weak],
// [strong_vs_weak]). A predictor section, when present, replaces that
// predictor's terms entirely.

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "ubi/csv.hpp"
#include "ubi/error.hpp"
#include "ubi/synthgen.hpp"

namespace ubi::synth {

class ParamsError : public InputError {
 public:
  using InputError::InputError;
};

namespace detail {

inline double to_number(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ParamsError("parameter '" + key + "': not a number: '" + text + "'");
  return v;
}

inline std::uint64_t to_count(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ParamsError("parameter '" + key + "': not a count: '" + text + "'");
  return v;
}

// Scalar parameters addressable by "section.key".
inline std::map<std::string, std::function<void(const std::string&, const std::string&)>> scalar_setters(
    SynthConfig& c) {
  std::map<std::string, std::function<void(const std::string&, const std::string&)>> m;
  auto num = [&m](std::string key, double& field) {
    m[std::move(key)] = [&field](const std::string& k, const std::string& v) { field = to_number(k, v); };
  };
  auto& d = c.profiles;
  m["population.n_drivers"] = [&c](const std::string& k, const std::string& v) { c.n_drivers = to_count(k, v); };
  m["population.weeks"] = [&c](const std::string& k, const std::string& v) {
    c.weeks = static_cast<int>(to_count(k, v));
  };
  m["population.seed"] = [&c](const std::string& k, const std::string& v) { c.seed = to_count(k, v); };
  m["population.event_drivers"] = [&c](const std::string& k, const std::string& v) {
    c.event_drivers = to_count(k, v);
  };
  m["population.position_interval_s"] = [&c](const std::string& k, const std::string& v) {
    c.position_interval_s = static_cast<int>(to_count(k, v));
  };
  m["population.start"] = [&c](const std::string& k, const std::string& v) {
    auto day = parse_date(v);
    if (!day) throw ParamsError("parameter '" + k + "': not a date: '" + v + "'");
    c.start = *day;
  };
  m["population.tz"] = [&c](const std::string&, const std::string& v) { c.tz = UtcOffset::parse(v); };
  num("claims.zero_loss_claim_rate", c.zero_loss_claim_rate);
  num("claims.non_culprit_claim_rate", c.non_culprit_claim_rate);
  num("claims.ins_sum_mean", c.ins_sum_mean);
  num("claims.ins_sum_sd", c.ins_sum_sd);
  num("profile.trips_per_day_median", d.trips_per_day_median);
  num("profile.trips_per_day_sigma", d.trips_per_day_sigma);
  num("profile.holiday_factor_min", d.holiday_factor_min);
  num("profile.holiday_factor_max", d.holiday_factor_max);
  num("profile.trip_len_median_km", d.trip_len_median_km);
  num("profile.trip_len_median_sigma", d.trip_len_median_sigma);
  num("profile.trip_len_sigma_min", d.trip_len_sigma_min);
  num("profile.trip_len_sigma_max", d.trip_len_sigma_max);
  num("profile.night_share_a", d.night_share[0]);
  num("profile.night_share_b", d.night_share[1]);
  num("profile.morning_share_a", d.morning_share[0]);
  num("profile.morning_share_b", d.morning_share[1]);
  num("profile.evening_share_a", d.evening_share[0]);
  num("profile.evening_share_b", d.evening_share[1]);
  num("profile.late_share_a", d.late_share[0]);
  num("profile.late_share_b", d.late_share[1]);
  num("profile.speed_median_kph", d.speed_median_kph);
  num("profile.speed_median_sigma", d.speed_median_sigma);
  num("profile.speed_sigma_min", d.speed_sigma_min);
  num("profile.speed_sigma_max", d.speed_sigma_max);
  num("profile.top_speed_mean", d.top_speed_mean);
  num("profile.top_speed_sd", d.top_speed_sd);
  num("profile.top_speed_min", d.top_speed_min);
  num("profile.top_speed_max", d.top_speed_max);
  num("profile.night_top_min", d.night_top[0]);
  num("profile.night_top_max", d.night_top[1]);
  num("profile.morning_top_min", d.morning_top[0]);
  num("profile.morning_top_max", d.morning_top[1]);
  num("profile.evening_top_min", d.evening_top[0]);
  num("profile.evening_top_max", d.evening_top[1]);
  for (std::size_t b = 0; b < kAccelBandCount; ++b) {
    const std::string band(kAccelBandNames[b]);
    num("profile.accel_" + band + "_mean", d.accel[b][0]);
    num("profile.accel_" + band + "_sd", d.accel[b][1]);
  }
  return m;
}

inline void validate(const SynthConfig& c) {
  if (c.n_drivers < 2) throw ParamsError("n_drivers must be at least 2");
  if (c.weeks < 1) throw ParamsError("weeks must be at least 1");
  if (c.position_interval_s < 1) throw ParamsError("position_interval_s must be positive");
  const auto& d = c.profiles;
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ParamsError(std::string(name) + " must be positive");
  };
  positive(d.trips_per_day_median, "trips_per_day_median");
  positive(d.trip_len_median_km, "trip_len_median_km");
  positive(d.speed_median_kph, "speed_median_kph");
  positive(c.ins_sum_mean, "ins_sum_mean");
  for (const auto& ab : {d.night_share, d.morning_share, d.evening_share, d.late_share}) {
    positive(ab[0], "share beta a");
    positive(ab[1], "share beta b");
  }
  for (const auto& [mean, sd] : d.accel) {
    positive(mean, "accel mean");
    if (sd < 0.0) throw ParamsError("accel sd must be non-negative");
  }
  if (c.zero_loss_claim_rate < 0.0 || c.non_culprit_claim_rate < 0.0 ||
      c.zero_loss_claim_rate + c.non_culprit_claim_rate > 1.0)
    throw ParamsError("extra-claim rates must be non-negative and sum to at most 1");
}

}  // namespace detail

// Applies an INI parameter file on top of `base`.
inline SynthConfig read_synth_params(std::istream& in, SynthConfig base = SynthConfig::defaults()) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ParamsError(std::string("parameter file: ") + e.what());
  }
  SynthConfig c = std::move(base);
  auto setters = detail::scalar_setters(c);
  std::map<std::string, LinearPredictor*> predictors = {
      {"accident", &c.accident}, {"medium_vs_weak", &c.medium_vs_weak}, {"strong_vs_weak", &c.strong_vs_weak}};
  std::set<std::string> replaced;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (item.parents.size() != 1) throw ParamsError("parameter '" + item.fullname() + "' is outside a section");
    const std::string& section = item.parents.front();
    const std::string key = section + "." + item.name;
    if (item.inputs.size() != 1) throw ParamsError("parameter '" + key + "' must have exactly one value");
    const std::string& value = item.inputs.front();
    if (auto p = predictors.find(section); p != predictors.end()) {
      LinearPredictor& lp = *p->second;
      if (replaced.insert(section).second) lp.terms.clear();
      if (item.name == "intercept") {
        lp.intercept = detail::to_number(key, value);
      } else {
        if (!parse_feature(item.name)) throw ParamsError("parameter '" + key + "': unknown feature");
        lp.terms.emplace_back(item.name, detail::to_number(key, value));
      }
      continue;
    }
    auto s = setters.find(key);
    if (s == setters.end()) throw ParamsError("unknown parameter '" + key + "'");
    s->second(key, value);
  }
  detail::validate(c);
  return c;
}

inline SynthConfig read_synth_params_file(const std::string& path, SynthConfig base = SynthConfig::defaults()) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open parameter file '" + path + "'");
  return read_synth_params(in, std::move(base));
}

inline void write_synth_params(std::ostream& out, const SynthConfig& c) {
  auto num = [](double v) { return csv::format_double(v); };
  const auto& d = c.profiles;
  out << "[population]\n"
      << "n_drivers = " << c.n_drivers << "\n"
      << "weeks = " << c.weeks << "\n"
      << "seed = " << c.seed << "\n"
      << "start = " << format_date(c.start) << "\n"
      << "tz = " << c.tz.to_string() << "\n"
      << "event_drivers = " << c.event_drivers << "\n"
      << "position_interval_s = " << c.position_interval_s << "\n\n"
      << "[claims]\n"
      << "zero_loss_claim_rate = " << num(c.zero_loss_claim_rate) << "\n"
      << "non_culprit_claim_rate = " << num(c.non_culprit_claim_rate) << "\n"
      << "ins_sum_mean = " << num(c.ins_sum_mean) << "\n"
      << "ins_sum_sd = " << num(c.ins_sum_sd) << "\n\n"
      << "[profile]\n"
      << "trips_per_day_median = " << num(d.trips_per_day_median) << "\n"
      << "trips_per_day_sigma = " << num(d.trips_per_day_sigma) << "\n"
      << "holiday_factor_min = " << num(d.holiday_factor_min) << "\n"
      << "holiday_factor_max = " << num(d.holiday_factor_max) << "\n"
      << "trip_len_median_km = " << num(d.trip_len_median_km) << "\n"
      << "trip_len_median_sigma = " << num(d.trip_len_median_sigma) << "\n"
      << "trip_len_sigma_min = " << num(d.trip_len_sigma_min) << "\n"
      << "trip_len_sigma_max = " << num(d.trip_len_sigma_max) << "\n";
  auto pair = [&](const char* name, const std::array<double, 2>& v, const char* a, const char* b) {
    out << name << "_" << a << " = " << num(v[0]) << "\n" << name << "_" << b << " = " << num(v[1]) << "\n";
  };
  pair("night_share", d.night_share, "a", "b");
  pair("morning_share", d.morning_share, "a", "b");
  pair("evening_share", d.evening_share, "a", "b");
  pair("late_share", d.late_share, "a", "b");
  out << "speed_median_kph = " << num(d.speed_median_kph) << "\n"
      << "speed_median_sigma = " << num(d.speed_median_sigma) << "\n"
      << "speed_sigma_min = " << num(d.speed_sigma_min) << "\n"
      << "speed_sigma_max = " << num(d.speed_sigma_max) << "\n"
      << "top_speed_mean = " << num(d.top_speed_mean) << "\n"
      << "top_speed_sd = " << num(d.top_speed_sd) << "\n"
      << "top_speed_min = " << num(d.top_speed_min) << "\n"
      << "top_speed_max = " << num(d.top_speed_max) << "\n";
  pair("night_top", d.night_top, "min", "max");
  pair("morning_top", d.morning_top, "min", "max");
  pair("evening_top", d.evening_top, "min", "max");
  for (std::size_t b = 0; b < kAccelBandCount; ++b) {
    out << "accel_" << kAccelBandNames[b] << "_mean = " << num(d.accel[b][0]) << "\n"
        << "accel_" << kAccelBandNames[b] << "_sd = " << num(d.accel[b][1]) << "\n";
  }
  auto predictor = [&](const char* section, const LinearPredictor& lp) {
    out << "\n[" << section << "]\nintercept = " << num(lp.intercept) << "\n";
    for (const auto& [name, beta] : lp.terms) out << name << " = " << num(beta) << "\n";
  };
  predictor("accident", c.accident);
  predictor("medium_vs_weak", c.medium_vs_weak);
  predictor("strong_vs_weak", c.strong_vs_weak);
}

}  // namespace ubi::synth
