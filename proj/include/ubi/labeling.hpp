#pragma once

// Claim severity classes and the binary accident targets built from them.

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "ubi/csv.hpp"
#include "ubi/error.hpp"

namespace ubi {

struct ClaimRecord {
  std::string device_id;
  double loss_size = 0.0;
  double ins_sum = 0.0;
  bool culprit = true;

  bool operator==(const ClaimRecord&) const = default;
};

enum class Severity { none, weak, medium, strong };

inline std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::none: return "none";
    case Severity::weak: return "weak";
    case Severity::medium: return "medium";
    case Severity::strong: return "strong";
  }
  return "?";
}

inline Severity parse_severity(std::string_view s) {
  if (s == "none") return Severity::none;
  if (s == "weak") return Severity::weak;
  if (s == "medium") return Severity::medium;
  if (s == "strong") return Severity::strong;
  throw InputError("unknown severity class '" + std::string(s) + "'");
}

inline constexpr double kWeakUpperRatio = 0.05;
inline constexpr double kMediumUpperRatio = 0.20;
inline constexpr double kRatioSlack = 1e-12;  // relative; far below any cent-level step

// Loss ratio r = loss / insured sum: 0 -> none, (0, 0.05) -> weak,
// [0.05, 0.20] -> medium, > 0.20 -> strong. Claims where the driver was not
// the culprit never count as accidents.
inline Severity classify_severity(const ClaimRecord& claim) {
  if (!(claim.ins_sum > 0.0)) throw InputError("claim for " + claim.device_id + ": ins_sum must be positive");
  if (!(claim.loss_size >= 0.0)) throw InputError("claim for " + claim.device_id + ": negative loss_size");
  if (!claim.culprit || claim.loss_size == 0.0) return Severity::none;
  // Amounts are decimal money, so a ratio of exactly 5% or 20% can come out
  // a few ulps off the boundary in binary; such ratios count as on it (both
  // boundaries belong to the medium class).
  const double r = claim.loss_size / claim.ins_sum;
  auto on = [r](double boundary) { return std::fabs(r - boundary) <= kRatioSlack * boundary; };
  if (r < kWeakUpperRatio && !on(kWeakUpperRatio)) return Severity::weak;
  if (r <= kMediumUpperRatio || on(kMediumUpperRatio)) return Severity::medium;
  return Severity::strong;
}

enum class Target { any, weak, medium, strong };

inline constexpr std::array<Target, 4> kAllTargets = {Target::any, Target::weak, Target::medium, Target::strong};

inline std::string_view to_string(Target t) {
  switch (t) {
    case Target::any: return "any";
    case Target::weak: return "weak";
    case Target::medium: return "medium";
    case Target::strong: return "strong";
  }
  return "?";
}

inline Target parse_target(std::string_view s) {
  for (auto t : kAllTargets) {
    if (to_string(t) == s) return t;
  }
  throw InputError("unknown target '" + std::string(s) + "'");
}

// A device's outcome on one target: any -> at least one accident of any
// class; otherwise at least one accident of exactly that class. Several
// severity targets can be set for the same device.
inline int build_target(const std::vector<Severity>& device_labels, Target target) {
  for (auto s : device_labels) {
    if (s == Severity::none) continue;
    if (target == Target::any) return 1;
    if (static_cast<int>(s) == static_cast<int>(target)) return 1;
  }
  return 0;
}

// Targets for an ordered list of devices; devices without labels get 0.
inline std::vector<int> build_targets(const std::map<std::string, std::vector<Severity>>& labels_by_device,
                                      const std::vector<std::string>& devices, Target target) {
  std::vector<int> y;
  y.reserve(devices.size());
  static const std::vector<Severity> kNoClaims;
  for (const auto& d : devices) {
    auto it = labels_by_device.find(d);
    y.push_back(build_target(it == labels_by_device.end() ? kNoClaims : it->second, target));
  }
  return y;
}

// ---- CSV ------------------------------------------------------------------

inline bool parse_bool(std::string_view s) {
  if (s == "1" || s == "true" || s == "TRUE" || s == "True" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "FALSE" || s == "False" || s == "no") return false;
  throw InputError("invalid boolean '" + std::string(s) + "'");
}

inline std::vector<ClaimRecord> read_claims_csv(std::istream& in) {
  auto table = csv::read(in);
  std::vector<ClaimRecord> out;
  if (table.header.empty()) return out;
  const auto c_dev = table.require("device"), c_loss = table.require("loss_size"),
             c_ins = table.require("ins_sum"), c_cul = table.require("culprit");
  for (const auto& row : table.rows) {
    ClaimRecord c{row[c_dev], csv::parse_double(row[c_loss], "loss_size"), csv::parse_double(row[c_ins], "ins_sum"),
                  parse_bool(row[c_cul])};
    out.push_back(std::move(c));
  }
  return out;
}

inline void write_claims_csv(std::ostream& out, const std::vector<ClaimRecord>& claims) {
  out << "device,loss_size,ins_sum,culprit\n";
  for (const auto& c : claims) {
    csv::check_field(c.device_id);
    out << csv::join({c.device_id, csv::format_double(c.loss_size), csv::format_double(c.ins_sum),
                      c.culprit ? "1" : "0"})
        << '\n';
  }
}

struct DeviceLabel {
  std::string device_id;
  Severity severity = Severity::none;
};

inline void write_labels_csv(std::ostream& out, const std::vector<DeviceLabel>& labels) {
  out << "device,class\n";
  for (const auto& l : labels) out << l.device_id << ',' << to_string(l.severity) << '\n';
}

inline std::vector<DeviceLabel> read_labels_csv(std::istream& in) {
  auto table = csv::read(in);
  std::vector<DeviceLabel> out;
  if (table.header.empty()) return out;
  const auto c_dev = table.require("device"), c_cls = table.require("class");
  for (const auto& row : table.rows) out.push_back({row[c_dev], parse_severity(row[c_cls])});
  return out;
}

inline std::map<std::string, std::vector<Severity>> group_labels(const std::vector<DeviceLabel>& labels) {
  std::map<std::string, std::vector<Severity>> out;
  for (const auto& l : labels) out[l.device_id].push_back(l.severity);
  return out;
}

}  // namespace ubi
