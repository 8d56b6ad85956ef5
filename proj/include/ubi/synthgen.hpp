#pragma once

// Synthetic driver population with planted accident risk.
//
// Each driver gets a style profile (trip rate, trip-length and speed
// distributions, time-of-day propensities, harsh-event intensities). Its
// expected feature vector follows analytically from the profile. Accidents
// are drawn in two stages:
//   accident        ~ Bernoulli(sigmoid(x . beta_accident))
//   class | accident ~ softmax(0, x . gamma_medium, x . gamma_strong)
// over (weak, medium, strong). The "any" target is therefore exactly
// logistic; severity targets are not, and their reference coefficients are
// the population-level logistic projection (see reference_coefficients).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ubi/calendar.hpp"
#include "ubi/digest.hpp"
#include "ubi/features.hpp"
#include "ubi/glm.hpp"
#include "ubi/ingest.hpp"
#include "ubi/labeling.hpp"
#include "ubi/trips.hpp"
#include "ubi/version.hpp"

namespace ubi::synth {

// Trip start slots in local hours. The day slot excludes both rush hours.
enum class Slot : std::size_t { night, morning_rush, day, evening_rush, late };
inline constexpr std::size_t kSlotCount = 5;

inline std::span<const int> slot_hours(Slot s) {
  static constexpr int night[] = {0, 1, 2, 3, 4, 5};
  static constexpr int morning[] = {8, 9};
  static constexpr int day[] = {7, 10, 11, 12, 13, 14, 15, 16, 17};
  static constexpr int evening[] = {18, 19};
  static constexpr int late[] = {6, 20, 21, 22, 23};
  switch (s) {
    case Slot::night: return night;
    case Slot::morning_rush: return morning;
    case Slot::day: return day;
    case Slot::evening_rush: return evening;
    case Slot::late: return late;
  }
  return {};
}

// Share of a slot's start hours that lie in the 07-19 daytime slice.
inline double slot_daytime_fraction(Slot s) {
  auto hours = slot_hours(s);
  auto n = std::count_if(hours.begin(), hours.end(), [](int h) { return kDaytime.contains(h); });
  return static_cast<double>(n) / static_cast<double>(hours.size());
}

struct DriverProfile {
  std::string device_id;
  double trips_per_day = 4.0;     // Poisson rate on business days
  double holiday_factor = 1.0;    // rate multiplier on non-business days
  double trip_len_median_km = 6.0;
  double trip_len_sigma = 0.9;    // log-normal shape
  std::array<double, kSlotCount> slot_share{};  // sums to 1
  double speed_median_kph = 25.0;
  double speed_sigma = 0.45;
  std::array<double, kSlotCount> slot_top_speed{};  // peak speed per slot
  std::array<double, kAccelBandCount> accel_per_100km{};
  GeoPoint home{};
};

// Fraction of the slot's top speed below which cruise speeds are capped.
inline constexpr double kCruiseCap = 0.85;
// Per-trip peak speed is top * (1 - kPeakSpread * U), U ~ Uniform(0, 1).
inline constexpr double kPeakSpread = 0.15;

// Linear predictor over named catalog features.
struct LinearPredictor {
  double intercept = 0.0;
  std::vector<std::pair<std::string, double>> terms;

  double operator()(const FeatureVector& x) const {
    double eta = intercept;
    for (const auto& [name, beta] : terms) {
      auto f = parse_feature(name);
      if (!f) throw InputError("unknown feature '" + name + "' in planted coefficients");
      eta += beta * x[*f];
    }
    return eta;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& t : terms) out.push_back(t.first);
    return out;
  }

  bool operator==(const LinearPredictor&) const = default;
};

// Population distribution of driver profiles.
struct ProfileDistribution {
  double trips_per_day_median = 4.2;  // log-normal across drivers
  double trips_per_day_sigma = 0.45;
  double holiday_factor_min = 0.5;    // uniform across drivers
  double holiday_factor_max = 1.1;
  double trip_len_median_km = 7.5;    // median of per-driver medians (log-normal)
  double trip_len_median_sigma = 0.35;
  double trip_len_sigma_min = 0.8;    // per-driver log-normal shape, uniform
  double trip_len_sigma_max = 1.1;
  // Beta(a, b) shares of trips starting in each slot; the day slot takes the rest.
  std::array<double, 2> night_share{2.0, 14.0};
  std::array<double, 2> morning_share{3.0, 14.0};
  std::array<double, 2> evening_share{2.0, 20.0};
  std::array<double, 2> late_share{2.0, 30.0};
  double speed_median_kph = 24.0;     // median of per-driver cruise medians
  double speed_median_sigma = 0.2;
  double speed_sigma_min = 0.35;      // per-driver cruise log-normal shape
  double speed_sigma_max = 0.55;
  double top_speed_mean = 146.0;      // normal, clamped
  double top_speed_sd = 30.0;
  double top_speed_min = 80.0;
  double top_speed_max = 230.0;
  // Uniform fraction of the top speed reached in each clock slot.
  std::array<double, 2> night_top{0.6, 1.0};
  std::array<double, 2> morning_top{0.6, 1.0};
  std::array<double, 2> evening_top{0.55, 1.0};
  // Mean and standard deviation (log-normal) of events per 100 km by band.
  std::array<std::array<double, 2>, kAccelBandCount> accel{{
      {17.0, 12.0}, {2.4, 1.6}, {1.4, 1.0}, {6.0, 4.0}, {1.4, 1.0}, {1.0, 0.8}, {5.7, 4.0}, {1.0, 0.8}, {1.5, 1.2}}};

  bool operator==(const ProfileDistribution&) const = default;
};

struct SynthConfig {
  std::size_t n_drivers = 5000;
  int weeks = 26;
  std::uint64_t seed = 1;
  Days start = Days{std::chrono::year{2019} / std::chrono::January / 7};
  UtcOffset tz{};
  ProfileDistribution profiles;
  LinearPredictor accident;        // P(any accident)
  LinearPredictor medium_vs_weak;  // log P(medium | acc) / P(weak | acc)
  LinearPredictor strong_vs_weak;  // log P(strong | acc) / P(weak | acc)
  double zero_loss_claim_rate = 0.006;
  double non_culprit_claim_rate = 0.03;
  double ins_sum_mean = 1728042.0;
  double ins_sum_sd = 1276152.0;
  int position_interval_s = 120;
  std::size_t event_drivers = 10;  // leading drivers whose raw event logs are generated

  bool operator==(const SynthConfig&) const = default;

  // Signs follow the published factor table: accidents rise with mileage,
  // level-1 accelerations and night/morning top speeds and fall with level-2
  // accelerations and average speed; night mileage favours medium accidents;
  // evening top speed, side accelerations and level-1 accelerations favour
  // strong ones.
  static SynthConfig defaults() {
    SynthConfig c;
    c.accident = {-3.13,
                  {{"mileage", 4.0e-5},
                   {"a1", 0.0208},
                   {"a2", -0.16},
                   {"max_mj_sp", 0.0076},
                   {"avg_sp", -0.036},
                   {"max_n_sp", 0.0084}}};
    c.medium_vs_weak = {-1.29, {{"d_night_m", 0.06}, {"mileage", -1.5e-5}, {"s1", 0.12}}};
    c.strong_vs_weak = {-7.15, {{"max_ej_sp", 0.027}, {"max_n_sp", 0.012}, {"a1", 0.02}, {"a2", -0.4}, {"s1", 0.19}}};
    return c;
  }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent per-driver streams derived from the root seed.
enum class Stream : std::uint64_t { profile = 1, events = 2, pseudo = 3 };
inline std::uint64_t driver_seed(std::uint64_t root, std::size_t index, Stream stream) {
  return splitmix64(splitmix64(root ^ (static_cast<std::uint64_t>(stream) << 56)) + index);
}

namespace detail {

inline double lognormal_from_moments(std::mt19937_64& rng, double mean, double sd) {
  const double s2 = std::log1p((sd * sd) / (mean * mean));
  std::lognormal_distribution<double> d(std::log(mean) - s2 / 2.0, std::sqrt(s2));
  return d(rng);
}

inline double beta_draw(std::mt19937_64& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng), y = gb(rng);
  return x / (x + y);
}

}  // namespace detail

inline DriverProfile sample_profile(std::mt19937_64& rng, std::string device_id,
                                    const ProfileDistribution& dist = {}) {
  DriverProfile p;
  p.device_id = std::move(device_id);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unif(rng); };
  auto lognormal = [&](double median, double sigma) {
    return std::lognormal_distribution<double>(std::log(median), sigma)(rng);
  };

  p.trips_per_day = lognormal(dist.trips_per_day_median, dist.trips_per_day_sigma);
  p.holiday_factor = uniform(dist.holiday_factor_min, dist.holiday_factor_max);
  p.trip_len_median_km = lognormal(dist.trip_len_median_km, dist.trip_len_median_sigma);
  p.trip_len_sigma = uniform(dist.trip_len_sigma_min, dist.trip_len_sigma_max);

  auto& s = p.slot_share;
  s[static_cast<std::size_t>(Slot::night)] = detail::beta_draw(rng, dist.night_share[0], dist.night_share[1]);
  s[static_cast<std::size_t>(Slot::morning_rush)] = detail::beta_draw(rng, dist.morning_share[0], dist.morning_share[1]);
  s[static_cast<std::size_t>(Slot::evening_rush)] = detail::beta_draw(rng, dist.evening_share[0], dist.evening_share[1]);
  s[static_cast<std::size_t>(Slot::late)] = detail::beta_draw(rng, dist.late_share[0], dist.late_share[1]);
  double others = 0.0;
  for (std::size_t i = 0; i < kSlotCount; ++i) {
    if (i != static_cast<std::size_t>(Slot::day)) others += s[i];
  }
  if (others > 0.9) {
    for (auto& v : s) v *= 0.9 / others;
    others = 0.9;
  }
  s[static_cast<std::size_t>(Slot::day)] = 1.0 - others;

  p.speed_median_kph = lognormal(dist.speed_median_kph, dist.speed_median_sigma);
  p.speed_sigma = uniform(dist.speed_sigma_min, dist.speed_sigma_max);
  const double top = std::clamp(std::normal_distribution<double>(dist.top_speed_mean, dist.top_speed_sd)(rng),
                                dist.top_speed_min, dist.top_speed_max);
  auto& t = p.slot_top_speed;
  t[static_cast<std::size_t>(Slot::night)] = top * uniform(dist.night_top[0], dist.night_top[1]);
  t[static_cast<std::size_t>(Slot::morning_rush)] = top * uniform(dist.morning_top[0], dist.morning_top[1]);
  t[static_cast<std::size_t>(Slot::day)] = top;
  t[static_cast<std::size_t>(Slot::evening_rush)] = top * uniform(dist.evening_top[0], dist.evening_top[1]);
  t[static_cast<std::size_t>(Slot::late)] = top;

  for (std::size_t b = 0; b < kAccelBandCount; ++b)
    p.accel_per_100km[b] = detail::lognormal_from_moments(rng, dist.accel[b][0], dist.accel[b][1]);

  p.home = {uniform(54.5, 56.5), uniform(36.5, 38.5)};
  return p;
}

inline Window observation_window(const SynthConfig& c) {
  return Window{WindowKind::lifetime, local_midnight(c.start, c.tz),
                local_midnight(c.start + std::chrono::days{7 * c.weeks}, c.tz)};
}

namespace detail {

// E[min(V, c)], E[1 / min(V, c)], P(min(V, c) < x) for V log-normal(mu, s).
struct CappedLognormal {
  double mu, s, cap;

  double mean() const {
    const double z = (std::log(cap) - mu) / s;
    return std::exp(mu + s * s / 2.0) * normal_cdf(z - s) + cap * (1.0 - normal_cdf(z));
  }
  double mean_inverse() const {
    const double z = (std::log(cap) - mu) / s;
    return std::exp(-mu + s * s / 2.0) * normal_cdf(z + s) + (1.0 - normal_cdf(z)) / cap;
  }
  double below(double x) const {
    if (x > cap) return 1.0;
    return normal_cdf((std::log(x) - mu) / s);
  }
};

}  // namespace detail

// Expected feature vector of a profile over a window, computed from the
// profile's distributions. Mileage of a trip is attributed to the slot in
// which the trip starts.
inline FeatureVector oracle_features(const DriverProfile& p, const Window& window, const HolidayCalendar& calendar,
                                     UtcOffset tz = {}) {
  using F = Feature;
  FeatureVector fv;
  fv.device_id = p.device_id;
  fv.window = window;

  double n_days = 0.0, n_business = 0.0;
  for (Days d = local_date(window.start, tz); local_midnight(d, tz) < window.end; d += std::chrono::days{1}) {
    n_days += 1.0;
    n_business += calendar.is_business_day(d) ? 1.0 : 0.0;
  }
  const double n_holiday = n_days - n_business;
  const double rate_b = p.trips_per_day, rate_h = p.trips_per_day * p.holiday_factor;
  const double trips = rate_b * n_business + rate_h * n_holiday;
  const double mu_len = std::log(p.trip_len_median_km), s_len = p.trip_len_sigma;
  const double mean_len = std::exp(mu_len + s_len * s_len / 2.0);
  const double mileage = trips * mean_len;
  const double covered = n_business * (1.0 - std::exp(-rate_b)) + n_holiday * (1.0 - std::exp(-rate_h));
  auto share_below = [&](double km) { return 100.0 * normal_cdf((std::log(km) - mu_len) / s_len); };

  fv[F::mileage] = mileage;
  fv[F::trips_day] = covered > 0.0 ? trips / covered : 0.0;
  fv[F::below_10_pr] = trips > 0.0 ? share_below(10.0) : 0.0;
  fv[F::below_30_pr] = trips > 0.0 ? share_below(30.0) : 0.0;
  fv[F::over_200] = trips > 0.0 ? 100.0 - share_below(200.0) : 0.0;
  fv[F::over_400] = trips > 0.0 ? 100.0 - share_below(400.0) : 0.0;
  fv[F::avg_trip_mil] = trips > 0.0 ? mean_len : 0.0;
  fv[F::d_total_m] = n_days > 0.0 ? mileage / n_days : 0.0;
  fv[F::d_business_m] = n_business > 0.0 ? rate_b * mean_len : 0.0;
  fv[F::d_holi_m] = n_holiday > 0.0 ? rate_h * mean_len : 0.0;

  const auto share = [&](Slot s) { return p.slot_share[static_cast<std::size_t>(s)]; };
  double day_share = 0.0;
  for (std::size_t i = 0; i < kSlotCount; ++i) day_share += p.slot_share[i] * slot_daytime_fraction(static_cast<Slot>(i));
  auto per_day = [&](double km) { return n_days > 0.0 ? km / n_days : 0.0; };
  fv[F::d_day_m] = per_day(mileage * day_share);
  fv[F::d_morning_jam_m] = per_day(mileage * share(Slot::morning_rush));
  fv[F::d_evening_jam_m] = per_day(mileage * share(Slot::evening_rush));
  fv[F::d_night_m] = per_day(mileage * share(Slot::night));
  fv[F::day_m_pr] = mileage > 0.0 ? 100.0 * day_share : 0.0;
  fv[F::ej_m_pr] = mileage > 0.0 ? 100.0 * share(Slot::evening_rush) : 0.0;

  const double mu_v = std::log(p.speed_median_kph);
  double avg_sp = 0.0, inv_speed = 0.0, lt20 = 0.0, lt60 = 0.0, ge100 = 0.0, ge130 = 0.0;
  std::array<double, kSlotCount> top_expected{};
  for (std::size_t i = 0; i < kSlotCount; ++i) {
    const detail::CappedLognormal v{mu_v, p.speed_sigma, kCruiseCap * p.slot_top_speed[i]};
    const double w = p.slot_share[i];
    avg_sp += w * v.mean();
    inv_speed += w * v.mean_inverse();
    lt20 += w * v.below(20.0);
    lt60 += w * v.below(60.0);
    ge100 += w * (1.0 - v.below(100.0));
    ge130 += w * (1.0 - v.below(130.0));
    const double n_slot = trips * w;
    top_expected[i] = n_slot > 0.0 ? p.slot_top_speed[i] * (1.0 - kPeakSpread / (n_slot + 1.0)) : 0.0;
  }
  const bool moving = mileage > 0.0;
  fv[F::avg_trip_dur] = trips > 0.0 ? 3600.0 * mean_len * inv_speed : 0.0;
  fv[F::avg_sp] = moving ? avg_sp : 0.0;
  fv[F::m_pr_below_20] = moving ? 100.0 * lt20 : 0.0;
  fv[F::m_pr_below_60] = moving ? 100.0 * lt60 : 0.0;
  fv[F::m_pr_over_100] = moving ? 100.0 * ge100 : 0.0;
  fv[F::m_pr_over_130] = moving ? 100.0 * ge130 : 0.0;
  fv[F::max_sp] = *std::max_element(top_expected.begin(), top_expected.end());
  fv[F::max_mj_sp] = top_expected[static_cast<std::size_t>(Slot::morning_rush)];
  fv[F::max_ej_sp] = top_expected[static_cast<std::size_t>(Slot::evening_rush)];
  fv[F::max_n_sp] = top_expected[static_cast<std::size_t>(Slot::night)];

  for (std::size_t b = 0; b < kAccelBandCount; ++b)
    fv[accel_feature(static_cast<AccelBand>(b))] = moving ? p.accel_per_100km[b] : 0.0;
  return fv;
}

// Probability of a positive outcome on `target` for features x.
inline double target_probability(const SynthConfig& c, const FeatureVector& x, Target target) {
  const double p_acc = sigmoid(c.accident(x));
  if (target == Target::any) return p_acc;
  const double em = std::exp(c.medium_vs_weak(x)), es = std::exp(c.strong_vs_weak(x));
  const double denom = 1.0 + em + es;
  switch (target) {
    case Target::weak: return p_acc / denom;
    case Target::medium: return p_acc * em / denom;
    case Target::strong: return p_acc * es / denom;
    default: return p_acc;
  }
}

// Loss-ratio intervals used to draw a claim of each class, kept clear of the
// class boundaries.
inline std::pair<double, double> loss_ratio_range(Severity s) {
  switch (s) {
    case Severity::weak: return {0.0005, 0.0495};
    case Severity::medium: return {0.0505, 0.1995};
    case Severity::strong: return {0.2005, 0.8};
    default: return {0.0, 0.0};
  }
}

struct Population {
  SynthConfig config;
  Window window;
  std::vector<DriverProfile> profiles;
  std::vector<FeatureVector> features;   // oracle features, one per driver
  std::vector<ClaimRecord> claims;
  std::vector<Severity> intended;        // intended class per claim
  std::vector<DeviceLog> logs;           // first config.event_drivers drivers
};

inline std::string device_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "drv%05zu", i);
  return buf;
}

// Raw event log of one driver over the observation window.
inline DeviceLog generate_driver_log(const DriverProfile& p, const SynthConfig& c, const HolidayCalendar& calendar,
                                     std::mt19937_64& rng) {
  using namespace std::chrono;
  const Window window = observation_window(c);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::discrete_distribution<std::size_t> slot_pick(p.slot_share.begin(), p.slot_share.end());
  std::lognormal_distribution<double> len_dist(std::log(p.trip_len_median_km), p.trip_len_sigma);
  std::lognormal_distribution<double> speed_dist(std::log(p.speed_median_kph), p.speed_sigma);

  struct Planned {
    Instant start;
    std::int64_t duration_s;
    double km;
    double raw_speed;  // uncapped cruise draw
    double u_peak;
    double u_start;
    std::size_t slot;
    double cruise = 0.0;
    double peak = 0.0;
  };
  auto finish = [&](Planned& t, std::size_t slot) {
    t.slot = slot;
    const double top = p.slot_top_speed[slot];
    t.cruise = std::min(t.raw_speed, kCruiseCap * top);
    t.peak = top * (1.0 - kPeakSpread * t.u_peak);
    t.duration_s = std::max<std::int64_t>(90, std::llround(t.km / t.cruise * 3600.0));
  };
  std::array<std::size_t, 24> slot_of_hour{};
  for (std::size_t sl = 0; sl < kSlotCount; ++sl)
    for (int h : slot_hours(static_cast<Slot>(sl))) slot_of_hour[static_cast<std::size_t>(h)] = sl;

  constexpr std::int64_t kGapS = 300;  // minimum pause between trips
  std::vector<Planned> plan;
  for (Days d = c.start; local_midnight(d, c.tz) < window.end; d += days{1}) {
    const double rate = calendar.is_business_day(d) ? p.trips_per_day : p.trips_per_day * p.holiday_factor;
    const int n = std::poisson_distribution<int>(rate)(rng);
    std::array<std::vector<Planned>, 24> by_hour;
    for (int k = 0; k < n; ++k) {
      const auto slot = slot_pick(rng);
      const auto hours_of = slot_hours(static_cast<Slot>(slot));
      const int hour = hours_of[std::min<std::size_t>(static_cast<std::size_t>(unif(rng) * hours_of.size()),
                                                      hours_of.size() - 1)];
      Planned t{local_midnight(d, c.tz) + std::chrono::hours{hour}, 0, 0.0, 0.0, 0.0, 0.0, slot};
      t.u_start = unif(rng);
      t.km = std::max(0.15, len_dist(rng));
      t.raw_speed = speed_dist(rng);
      t.u_peak = unif(rng);
      finish(t, slot);
      by_hour[static_cast<std::size_t>(hour)].push_back(t);
    }
    // Trips drawn for the same hour all start within it: they run back to
    // back (longest last) with the remaining room spread randomly before
    // them. A lone trip shorter than an hour also ends within it.
    for (auto& bucket : by_hour) {
      if (bucket.empty()) continue;
      std::stable_sort(bucket.begin(), bucket.end(),
                       [](const auto& a, const auto& b) { return a.duration_s < b.duration_s; });
      std::int64_t lead = 0;  // busy time before the last start
      for (std::size_t k = 0; k + 1 < bucket.size(); ++k) lead += bucket[k].duration_s + kGapS;
      const std::int64_t room = bucket.size() == 1 ? 3600 - bucket[0].duration_s : 3599 - lead;
      const double slack = static_cast<double>(std::max<std::int64_t>(0, room));
      std::vector<double> offsets;
      for (const auto& t : bucket) offsets.push_back(t.u_start * slack);
      std::sort(offsets.begin(), offsets.end());
      std::int64_t used = 0;
      for (std::size_t k = 0; k < bucket.size(); ++k) {
        bucket[k].start += seconds{static_cast<std::int64_t>(offsets[k]) + used};
        used += bucket[k].duration_s + kGapS;
      }
      plan.insert(plan.end(), bucket.begin(), bucket.end());
    }
  }
  // Trips never overlap: a long trip pushes later ones back. A trip pushed
  // into another slot takes that slot's speed limits.
  std::vector<Planned> trips;
  for (auto t : plan) {
    if (!trips.empty()) {
      const Instant earliest = trips.back().start + seconds{trips.back().duration_s + kGapS};
      if (t.start < earliest) {
        t.start = earliest;
        const auto slot = slot_of_hour[static_cast<std::size_t>(local_hour_of_day(t.start, c.tz))];
        if (slot != t.slot) finish(t, slot);
      }
    }
    if (t.start + seconds{t.duration_s} >= window.end) break;
    trips.push_back(t);
  }

  std::vector<EventPackage> events;
  const double rad = std::numbers::pi / 180.0;
  for (const auto& t : trips) {
    const double bearing = unif(rng) * 2.0 * std::numbers::pi;
    const double lat1 = p.home.lat * rad, lon1 = p.home.lon * rad;
    auto point_at = [&](double km) {
      const double delta = km / kEarthRadiusKm;
      const double lat2 = std::asin(std::sin(lat1) * std::cos(delta) + std::cos(lat1) * std::sin(delta) * std::cos(bearing));
      const double lon2 = lon1 + std::atan2(std::sin(bearing) * std::sin(delta) * std::cos(lat1),
                                            std::cos(delta) - std::sin(lat1) * std::sin(lat2));
      return GeoPoint{lat2 / rad, lon2 / rad};
    };
    std::vector<EventPackage> trip_events;
    trip_events.push_back(EventPackage::ignition(p.device_id, t.start, true));
    for (std::int64_t s = 0;; s += c.position_interval_s) {
      const std::int64_t at = std::min(s, t.duration_s);
      trip_events.push_back(EventPackage::position(
          p.device_id, t.start + seconds{at}, point_at(t.km * static_cast<double>(at) / static_cast<double>(t.duration_s))));
      if (at == t.duration_s) break;
    }
    trip_events.push_back(EventPackage::speed(p.device_id, t.start, t.peak, point_at(0.0)));
    for (std::size_t b = 0; b < kAccelBandCount; ++b) {
      const int k = std::poisson_distribution<int>(p.accel_per_100km[b] * t.km / 100.0)(rng);
      for (int e = 0; e < k; ++e) {
        const auto at = t.start + seconds{static_cast<std::int64_t>(unif(rng) * static_cast<double>(t.duration_s))};
        const auto band = static_cast<AccelBand>(b);
        double lo = 0.0, hi = 0.0;
        Axis axis = Axis::longitudinal;
        double sign = 1.0;
        switch (band) {
          case AccelBand::a1: lo = 0.3, hi = 0.4; break;
          case AccelBand::a2: lo = 0.4, hi = 0.5; break;
          case AccelBand::a3: lo = 0.5, hi = 0.8; break;
          case AccelBand::d1: lo = 0.2, hi = 0.3, sign = -1.0; break;
          case AccelBand::d2: lo = 0.3, hi = 0.4, sign = -1.0; break;
          case AccelBand::d3: lo = 0.5, hi = 0.8, sign = -1.0; break;
          case AccelBand::s1: lo = 0.3, hi = 0.4, axis = Axis::lateral; break;
          case AccelBand::s2: lo = 0.4, hi = 0.6, axis = Axis::lateral; break;
          case AccelBand::s3: lo = 0.6, hi = 0.9, axis = Axis::lateral; break;
          default: break;
        }
        if (axis == Axis::lateral && unif(rng) < 0.5) sign = -1.0;
        // Round to milli-G, staying inside the band.
        double g = std::round((lo + (hi - lo) * unif(rng)) * 1000.0) / 1000.0;
        g = std::clamp(g, lo + 0.001, hi - 0.001);
        trip_events.push_back(EventPackage::acceleration(p.device_id, at, axis, sign * g));
      }
    }
    trip_events.push_back(EventPackage::ignition(p.device_id, t.start + seconds{t.duration_s}, false));
    std::stable_sort(trip_events.begin() + 1, trip_events.end() - 1,
                     [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
    events.insert(events.end(), trip_events.begin(), trip_events.end());
  }
  return make_device_log(p.device_id, std::move(events));
}

inline Population generate_population(const SynthConfig& c,
                                      const HolidayCalendar& calendar = russian_holiday_calendar()) {
  if (c.n_drivers < 2) throw InputError("synthetic population needs at least 2 drivers");
  if (c.weeks < 1) throw InputError("synthetic population needs at least 1 week");
  Population pop;
  pop.config = c;
  pop.window = observation_window(c);
  const double s2 = std::log1p((c.ins_sum_sd * c.ins_sum_sd) / (c.ins_sum_mean * c.ins_sum_mean));
  std::lognormal_distribution<double> ins_dist(std::log(c.ins_sum_mean) - s2 / 2.0, std::sqrt(s2));

  for (std::size_t i = 0; i < c.n_drivers; ++i) {
    std::mt19937_64 rng(driver_seed(c.seed, i, Stream::profile));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto profile = sample_profile(rng, device_name(i), c.profiles);
    auto x = oracle_features(profile, pop.window, calendar, c.tz);

    auto draw_claim = [&](Severity cls, bool culprit) {
      const double ins = std::round(ins_dist(rng));
      ClaimRecord claim{profile.device_id, 0.0, ins, culprit};
      if (cls != Severity::none) {
        const auto [lo, hi] = loss_ratio_range(cls);
        // The ratio is checked as if culprit; redraw if cent rounding leaves the class.
        do {
          claim.loss_size = std::round((lo + (hi - lo) * unif(rng)) * ins * 100.0) / 100.0;
        } while (classify_severity(ClaimRecord{claim.device_id, claim.loss_size, ins, true}) != cls);
      }
      return claim;
    };

    const double u = unif(rng);
    const double u_class = unif(rng);
    const double u_extra = unif(rng);
    if (u < sigmoid(c.accident(x))) {
      const double em = std::exp(c.medium_vs_weak(x)), es = std::exp(c.strong_vs_weak(x));
      const double denom = 1.0 + em + es;
      const Severity cls = u_class < 1.0 / denom          ? Severity::weak
                           : u_class < (1.0 + em) / denom ? Severity::medium
                                                          : Severity::strong;
      pop.claims.push_back(draw_claim(cls, true));
      pop.intended.push_back(cls);
    } else if (u_extra < c.zero_loss_claim_rate) {
      pop.claims.push_back(draw_claim(Severity::none, true));
      pop.intended.push_back(Severity::none);
    } else if (u_extra < c.zero_loss_claim_rate + c.non_culprit_claim_rate) {
      auto claim = draw_claim(Severity::medium, false);
      pop.claims.push_back(claim);
      pop.intended.push_back(Severity::none);
    }
    pop.profiles.push_back(std::move(profile));
    pop.features.push_back(std::move(x));
  }

  const std::size_t n_logs = std::min(c.event_drivers, c.n_drivers);
  for (std::size_t i = 0; i < n_logs; ++i) {
    std::mt19937_64 rng(driver_seed(c.seed, i, Stream::events));
    pop.logs.push_back(generate_driver_log(pop.profiles[i], c, calendar, rng));
  }
  return pop;
}

// Population-level logistic coefficients for `target` on the given columns:
// the maximiser of the expected Bernoulli log-likelihood under the planted
// outcome probabilities, evaluated on n_pseudo fresh profiles. For the "any"
// target over a superset of the planted columns this recovers the planted
// coefficients exactly (up to the solver tolerance).
inline FittedModel reference_coefficients(const SynthConfig& c, Target target, const std::vector<std::string>& columns,
                                          std::size_t n_pseudo = 100000,
                                          const HolidayCalendar& calendar = russian_holiday_calendar()) {
  const Window window = observation_window(c);
  std::vector<Feature> feats;
  for (const auto& name : columns) {
    auto f = parse_feature(name);
    if (!f) throw InputError("unknown feature '" + name + "'");
    feats.push_back(*f);
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n_pseudo), static_cast<Eigen::Index>(feats.size() + 1));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n_pseudo));
  for (std::size_t i = 0; i < n_pseudo; ++i) {
    std::mt19937_64 rng(driver_seed(c.seed, i, Stream::pseudo));
    const auto fv = oracle_features(sample_profile(rng, "pseudo", c.profiles), window, calendar, c.tz);
    const auto r = static_cast<Eigen::Index>(i);
    x(r, 0) = 1.0;
    for (std::size_t j = 0; j < feats.size(); ++j) x(r, static_cast<Eigen::Index>(j + 1)) = fv[feats[j]];
    y(r) = target_probability(c, fv, target);
  }
  std::vector<std::string> names{kInterceptName};
  names.insert(names.end(), columns.begin(), columns.end());
  FitOptions opts;
  opts.tol = 1e-9 * static_cast<double>(n_pseudo);
  auto r = ubi::detail::irls(x, y, names, opts);
  FittedModel m;
  m.target = std::string(to_string(target));
  m.terms = names;
  m.n_obs = n_pseudo;
  m.converged = r.converged;
  m.log_likelihood = r.log_likelihood;
  for (Eigen::Index j = 0; j < r.beta.size(); ++j) m.coefficients.push_back(r.beta(j));
  m.std_errors.assign(m.coefficients.size(), std::nan(""));
  m.p_values.assign(m.coefficients.size(), std::nan(""));
  return m;
}

// Candidate columns per target, matching the published factor table.
inline std::vector<std::string> planted_columns(Target t) {
  switch (t) {
    case Target::any: return {"mileage", "a1", "a2", "max_mj_sp", "avg_sp", "max_n_sp"};
    case Target::weak: return {"mileage", "a1", "max_mj_sp", "s1", "avg_sp"};
    case Target::medium: return {"mileage", "a1", "max_n_sp", "d_night_m"};
    case Target::strong: return {"max_ej_sp", "a1", "a2", "s1", "max_n_sp"};
  }
  return {};
}

inline std::string profiles_digest(const std::vector<DriverProfile>& profiles) {
  Sha256 h;
  for (const auto& p : profiles) {
    nlohmann::ordered_json j;
    j["device"] = p.device_id;
    j["trips_per_day"] = p.trips_per_day;
    j["holiday_factor"] = p.holiday_factor;
    j["trip_len_median_km"] = p.trip_len_median_km;
    j["trip_len_sigma"] = p.trip_len_sigma;
    j["slot_share"] = p.slot_share;
    j["speed_median_kph"] = p.speed_median_kph;
    j["speed_sigma"] = p.speed_sigma;
    j["slot_top_speed"] = p.slot_top_speed;
    j["accel_per_100km"] = p.accel_per_100km;
    j["home"] = {p.home.lat, p.home.lon};
    h.update(j.dump());
    h.update("\n");
  }
  return h.hex();
}

inline nlohmann::ordered_json predictor_json(const LinearPredictor& lp) {
  nlohmann::ordered_json j;
  j["intercept"] = lp.intercept;
  nlohmann::ordered_json terms = nlohmann::ordered_json::object();
  for (const auto& [n, b] : lp.terms) terms[n] = b;
  j["terms"] = terms;
  return j;
}

// Ground truth for closed-loop checks: planted predictors, reference
// coefficients per target on its candidate columns, profile digest, seed.
inline nlohmann::ordered_json truth_json(const Population& pop, const std::vector<FittedModel>& references) {
  nlohmann::ordered_json j;
  j["tool_version"] = std::string(kToolVersion);
  j["seed"] = pop.config.seed;
  j["n_drivers"] = pop.config.n_drivers;
  j["weeks"] = pop.config.weeks;
  j["window_start"] = format_rfc3339(pop.window.start);
  j["window_end"] = format_rfc3339(pop.window.end);
  j["planted"] = {{"accident", predictor_json(pop.config.accident)},
                  {"medium_vs_weak", predictor_json(pop.config.medium_vs_weak)},
                  {"strong_vs_weak", predictor_json(pop.config.strong_vs_weak)}};
  nlohmann::ordered_json refs = nlohmann::ordered_json::object();
  for (const auto& m : references) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < m.terms.size(); ++k) r[m.terms[k]] = m.coefficients[k];
    refs[m.target] = r;
  }
  j["reference_coefficients"] = refs;
  j["profiles_sha256"] = profiles_digest(pop.profiles);
  std::size_t positives = 0;
  for (auto s : pop.intended) positives += s != Severity::none;
  j["accidents"] = positives;
  return j;
}

}  // namespace ubi::synth
