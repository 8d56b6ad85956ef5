#pragma once

#include <map>

#include "ubi/features.hpp"

namespace ubi::test {

// Hand-computed for the fixture: week 2019-03-04..10 (D = 7), 8 March is a
// holiday (B = 4 business days, H = 3 non-working days). Trips of 5 km
// (Tue 08:10, 12 min, 25 km/h), 250 km (Fri 10:00, 2 h, 125 km/h) and
// 15 km (Sun 02:00, 20 min, 45 km/h); speed packages 30 / 140 / 50;
// a1 x3, d2 x1, s3 x1.
inline std::map<Feature, double> golden_expected() {
  using F = Feature;
  return {
      {F::mileage, 270.0},
      {F::trips_day, 1.0},
      {F::below_10_pr, 100.0 / 3.0},
      {F::below_30_pr, 200.0 / 3.0},
      {F::over_200, 100.0 / 3.0},
      {F::over_400, 0.0},
      {F::d_total_m, 270.0 / 7.0},
      {F::avg_trip_mil, 90.0},
      {F::avg_trip_dur, 3040.0},
      {F::d_business_m, 1.25},
      {F::d_day_m, 255.0 / 7.0},
      {F::d_evening_jam_m, 0.0},
      {F::d_morning_jam_m, 5.0 / 7.0},
      {F::d_holi_m, 265.0 / 3.0},
      {F::d_night_m, 15.0 / 7.0},
      {F::day_m_pr, 100.0 * 255.0 / 270.0},
      {F::ej_m_pr, 0.0},
      {F::avg_sp, 32050.0 / 270.0},
      {F::max_sp, 140.0},
      {F::max_ej_sp, 0.0},
      {F::max_mj_sp, 30.0},
      {F::max_n_sp, 50.0},
      {F::m_pr_below_20, 0.0},
      {F::m_pr_below_60, 2000.0 / 270.0},
      {F::m_pr_over_100, 25000.0 / 270.0},
      {F::m_pr_over_130, 0.0},
      {F::a1, 300.0 / 270.0},
      {F::a2, 0.0},
      {F::a3, 0.0},
      {F::d1, 0.0},
      {F::d2, 100.0 / 270.0},
      {F::d3, 0.0},
      {F::s1, 0.0},
      {F::s2, 0.0},
      {F::s3, 100.0 / 270.0},
      {F::sp1, 0.0},
      {F::sp2, 0.0},
      {F::sp3, 0.0},
  };
}

}  // namespace ubi::test
