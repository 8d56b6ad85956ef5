#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string_view>

#include "ubi/ingest.hpp"

namespace ubi {

// Harsh-event bands. Order matches the column order of every table.
enum class AccelBand { a1, a2, a3, d1, d2, d3, s1, s2, s3, none };

inline constexpr std::size_t kAccelBandCount = 9;
inline constexpr std::array<std::string_view, kAccelBandCount> kAccelBandNames = {
    "a1", "a2", "a3", "d1", "d2", "d3", "s1", "s2", "s3"};

inline std::string_view to_string(AccelBand b) {
  return b == AccelBand::none ? "none" : kAccelBandNames[static_cast<std::size_t>(b)];
}

// Band edges in G, half-open [lo, hi).
//   acceleration (longitudinal, > 0): a1 [0.3,0.4) a2 [0.4,0.5) a3 [0.5,inf)
//   deceleration (longitudinal, < 0): d1 [0.2,0.3) d2 [0.3,0.4) d3 [0.4,inf)
//   side (lateral, |g|):              s1 [0.3,0.4) s2 [0.4,0.6) s3 [0.6,inf)
// The 0.4-0.5 G deceleration range has no band of its own and falls into d3.
inline AccelBand classify_accel_event(Axis axis, double g) {
  auto pick = [](double v, double lo1, double lo2, double lo3, AccelBand b1, AccelBand b2,
                 AccelBand b3) {
    if (v >= lo3) return b3;
    if (v >= lo2) return b2;
    if (v >= lo1) return b1;
    return AccelBand::none;
  };
  if (axis == Axis::lateral)
    return pick(std::fabs(g), 0.3, 0.4, 0.6, AccelBand::s1, AccelBand::s2, AccelBand::s3);
  if (g > 0.0) return pick(g, 0.3, 0.4, 0.5, AccelBand::a1, AccelBand::a2, AccelBand::a3);
  return pick(-g, 0.2, 0.3, 0.4, AccelBand::d1, AccelBand::d2, AccelBand::d3);
}

}  // namespace ubi
