#pragma once

// Command-line front end. One subcommand per pipeline stage; commands talk
// to each other only through files. Every artifact is written atomically
// (temp file + rename) and starts with a provenance block: tool version,
// seed and the SHA-256 of every input. Paths and clocks never enter an
// artifact, so identical inputs and options give byte-identical outputs.
//
// Exit codes: 0 success, 1 other error, 2 missing input, 3 model-fit
// failure, 4 malformed configuration.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ubi/calendar.hpp"
#include "ubi/csv.hpp"
#include "ubi/digest.hpp"
#include "ubi/error.hpp"
#include "ubi/eval.hpp"
#include "ubi/features.hpp"
#include "ubi/glm.hpp"
#include "ubi/ingest.hpp"
#include "ubi/labeling.hpp"
#include "ubi/model_io.hpp"
#include "ubi/synth_params.hpp"
#include "ubi/synthgen.hpp"
#include "ubi/trips.hpp"
#include "ubi/version.hpp"

namespace ubi::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kFailure = 1, kMissingInput = 2, kFitFailure = 3, kBadConfig = 4 };

inline constexpr std::string_view kPublishedModels = "paper-reference";

// ---- provenance and artifacts ---------------------------------------------

struct Provenance {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::vector<std::pair<std::string, std::string>> inputs;      // role, sha256
  std::vector<std::pair<std::string, std::string>> parameters;  // name, value

  std::string comment_block() const {
    std::ostringstream o;
    o << "# ubi " << kToolVersion << '\n';
    o << "# command: " << command << '\n';
    o << "# seed: " << (seed ? std::to_string(*seed) : "none") << '\n';
    for (const auto& [role, sha] : inputs) o << "# input " << role << ": sha256 " << sha << '\n';
    for (const auto& [name, value] : parameters) o << "# " << name << ": " << value << '\n';
    return o.str();
  }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["tool_version"] = std::string(kToolVersion);
    j["command"] = command;
    j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json(nullptr);
    j["inputs"] = nlohmann::ordered_json::object();
    for (const auto& [role, sha] : inputs) j["inputs"][role] = sha;
    j["parameters"] = nlohmann::ordered_json::object();
    for (const auto& [name, value] : parameters) j["parameters"][name] = value;
    return j;
  }
};

inline void write_artifact(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write failed for '" + path.string() + "'");
  }
  fs::rename(tmp, path);
}

inline fs::path prepare_out_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

struct InputFile {
  std::string content;
  std::string sha256;
};

inline InputFile load_input(const std::string& role, const std::string& path) {
  if (path.empty()) throw MissingInputError("no " + role + " file given");
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw MissingInputError(role + " file '" + path + "' does not exist");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open " + role + " file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  InputFile f{buf.str(), {}};
  f.sha256 = sha256_hex(f.content);
  return f;
}

// Free text bound for a CSV cell.
inline std::string cell_text(std::string s) {
  for (auto& c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return s;
}

inline std::string num(double v) { return csv::format_double(v); }

// ---- shared loading helpers -----------------------------------------------

struct CalendarChoice {
  HolidayCalendar calendar;
  std::optional<std::string> sha256;  // empty for the embedded calendar
};

inline CalendarChoice load_calendar(const std::string& path) {
  if (path.empty()) return {russian_holiday_calendar(), std::nullopt};
  auto f = load_input("holidays", path);
  return {HolidayCalendar::parse(std::string_view(f.content)), f.sha256};
}

inline void record_calendar(Provenance& prov, const CalendarChoice& cal) {
  if (cal.sha256) prov.inputs.emplace_back("holidays", *cal.sha256);
  else prov.parameters.emplace_back("holidays", "embedded");
}

inline ParseResult parse_events(const InputFile& f) {
  std::istringstream in(f.content);
  return parse_event_log(in);
}

// Feature rows plus per-device severity labels, taken either from a labels
// table or classified from a claims table.
struct LabeledData {
  std::vector<FeatureVector> rows;
  std::map<std::string, std::vector<Severity>> labels;
  std::vector<std::pair<std::string, std::string>> inputs;
};

struct LabelSource {
  std::string features;
  std::string labels;
  std::string claims;
};

inline LabeledData load_labeled(const LabelSource& src) {
  if (src.labels.empty() == src.claims.empty()) throw InputError("give exactly one of --labels or --claims");
  LabeledData d;
  auto feat = load_input("features", src.features);
  {
    std::istringstream in(feat.content);
    d.rows = read_features_csv(in);
  }
  if (d.rows.empty()) throw InputError("feature table has no rows");
  std::set<WindowKind> kinds;
  for (const auto& r : d.rows) kinds.insert(r.window.kind);
  if (kinds.size() > 1) throw InputError("feature table mixes weekly and lifetime windows");
  d.inputs.emplace_back("features", feat.sha256);
  if (!src.labels.empty()) {
    auto f = load_input("labels", src.labels);
    std::istringstream in(f.content);
    d.labels = group_labels(read_labels_csv(in));
    d.inputs.emplace_back("labels", f.sha256);
  } else {
    auto f = load_input("claims", src.claims);
    std::istringstream in(f.content);
    std::vector<DeviceLabel> labels;
    for (const auto& c : read_claims_csv(in)) labels.push_back({c.device_id, classify_severity(c)});
    d.labels = group_labels(labels);
    d.inputs.emplace_back("claims", f.sha256);
  }
  return d;
}

inline double feature_value(const FeatureVector& fv, const std::string& name) {
  auto f = parse_feature(name);
  if (!f) throw InputError("unknown feature '" + name + "'");
  return fv[*f];
}

inline DesignMatrix make_design(const LabeledData& d, Target target, const std::vector<std::string>& columns) {
  std::vector<std::string> devices;
  std::vector<std::vector<double>> rows;
  devices.reserve(d.rows.size());
  rows.reserve(d.rows.size());
  for (const auto& fv : d.rows) {
    devices.push_back(fv.device_id);
    std::vector<double> r;
    r.reserve(columns.size());
    for (const auto& c : columns) r.push_back(feature_value(fv, c));
    rows.push_back(std::move(r));
  }
  return DesignMatrix(columns, rows, build_targets(d.labels, devices, target), std::string(to_string(target)));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  for (auto& item : csv::split(s, ',')) {
    auto b = item.find_first_not_of(' ');
    auto e = item.find_last_not_of(' ');
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

inline std::vector<std::string> all_feature_names(bool with_placeholders) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const auto f = static_cast<Feature>(i);
    if (!with_placeholders && f >= Feature::sp1) continue;
    out.emplace_back(kFeatureNames[i]);
  }
  return out;
}

inline std::vector<std::string> validated_features(const std::vector<std::string>& names) {
  if (names.empty()) throw InputError("empty feature list");
  std::set<std::string> seen;
  for (const auto& n : names) {
    if (!parse_feature(n)) throw InputError("unknown feature '" + n + "'");
    if (!seen.insert(n).second) throw InputError("feature '" + n + "' listed twice");
  }
  return names;
}

// Candidate columns per target: "published" (the published per-target sets),
// "union" (all of those sets), "all" (every catalog feature except the
// speeding placeholders) or an explicit comma-separated list.
inline std::vector<std::string> candidate_columns(const std::string& spec, Target target) {
  if (spec == "published") return reference_model(target).model.feature_names();
  if (spec == "union") {
    std::set<std::string> u;
    for (auto t : kAllTargets) {
      for (const auto& n : reference_model(t).model.feature_names()) u.insert(n);
    }
    std::vector<std::string> out;
    for (auto n : kFeatureNames) {
      if (u.count(std::string(n))) out.emplace_back(n);
    }
    return out;
  }
  if (spec == "all") return all_feature_names(false);
  return validated_features(split_list(spec));
}

inline std::vector<std::string> group_columns(const std::string& spec) {
  if (spec == "accel") {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (is_acceleration_feature(static_cast<Feature>(i))) out.emplace_back(kFeatureNames[i]);
    }
    return out;
  }
  return validated_features(split_list(spec));
}

template <class Fn>
auto with_target(Target t, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DegenerateLabelsError& e) {
    throw DegenerateLabelsError("target " + std::string(to_string(t)) + ": " + e.what(), e.columns());
  } catch (const SeparationError& e) {
    throw SeparationError("target " + std::string(to_string(t)) + ": " + e.what(), e.columns());
  } catch (const CollinearityError& e) {
    throw CollinearityError("target " + std::string(to_string(t)) + ": " + e.what(), e.columns());
  }
}

// ---- command options --------------------------------------------------------

struct ParseOptions {
  std::string input;
  std::string out_dir = ".";
};

struct AggregateOptions {
  std::string input;
  std::string out_dir = ".";
  std::string tz = "UTC";
  int gap_s = 600;
  int min_duration_s = 60;
  double min_mileage_km = 0.1;
};

struct FeaturesOptions {
  std::string hourly;
  std::string trips;
  std::string out = "features.csv";
  std::string window = "lifetime";
  std::string tz = "UTC";
  std::string holidays;
  std::string start;
  std::string end;
};

struct LabelOptions {
  std::string claims;
  std::string out = "labels.csv";
};

struct FitCommandOptions {
  LabelSource source;
  std::string out_dir = ".";
  std::string candidates = "published";
  double alpha = 0.05;
  double test_fraction = 0.10;
  std::uint64_t seed = 1;
  bool stratify = false;
};

struct ScoreOptions {
  std::string features;
  std::vector<std::string> models;
  std::vector<std::string> targets;
  std::string out = "scores.csv";
};

struct PremiumOptions {
  std::string scores;
  std::string out = "premiums.csv";
  std::string target = "any";
  double loss = 0.0;
  double admin = 0.0;
  double margin = 0.0;
};

struct EvaluateOptions {
  LabelSource source;
  std::string out = "eval_report.csv";
  std::string candidates = "published";
  double alpha = 0.05;
  double test_fraction = 0.10;
  std::uint64_t seed = 1;
  bool stratify = false;
  std::size_t repeats = 1;
};

struct AblateOptions {
  LabelSource source;
  std::string out = "ablation.csv";
  std::string candidates = "published";
  std::string group = "accel";
};

struct ReportOptions {
  LabelSource source;
  std::string out_dir = ".";
  std::string target = "any";
  std::string columns = "all";
};

struct SynthOptions {
  std::string out_dir = ".";
  std::string params;
  std::string holidays;
  std::size_t n = 0;
  int weeks = 0;
  std::uint64_t seed = 0;
  std::size_t event_drivers = 0;
  std::size_t pseudo_n = 100000;
  bool has_n = false, has_weeks = false, has_seed = false, has_event_drivers = false;
};

// ---- commands -----------------------------------------------------------------

inline int cmd_parse(const ParseOptions& o, std::ostream& out) {
  auto in = load_input("events", o.input);
  const auto res = parse_events(in);
  Provenance prov{"parse", std::nullopt, {{"events", in.sha256}}, {}};
  const auto dir = prepare_out_dir(o.out_dir);

  std::ostringstream events;
  events << prov.comment_block();
  serialize_event_log(events, res.logs);
  write_artifact(dir / "events.jsonl", events.str());

  std::ostringstream report;
  report << prov.comment_block() << "line,reason\n";
  for (const auto& d : res.diagnostics) report << d.line << ',' << cell_text(d.reason) << '\n';
  write_artifact(dir / "parse_report.csv", report.str());

  std::ostringstream validation;
  validation << prov.comment_block() << "device,event_index,level,message\n";
  std::size_t n_issues = 0;
  for (const auto& log : res.logs) {
    for (const auto& issue : validate_log(log).issues) {
      validation << log.device_id << ',' << issue.event_index << ',' << to_string(issue.level) << ','
                 << cell_text(issue.message) << '\n';
      ++n_issues;
    }
  }
  write_artifact(dir / "validation.csv", validation.str());

  out << "parse: " << res.data_lines << " lines, " << res.emitted << " events kept, " << res.skipped
      << " skipped, " << res.logs.size() << " devices, " << n_issues << " validation issues\n";
  return kOk;
}

inline int cmd_aggregate(const AggregateOptions& o, std::ostream& out, std::ostream& err) {
  auto in = load_input("events", o.input);
  const auto tz = UtcOffset::parse(o.tz);
  if (o.gap_s <= 0 || o.min_duration_s < 0 || !(o.min_mileage_km >= 0.0))
    throw InputError("trip thresholds must be non-negative (gap positive)");
  const auto res = parse_events(in);
  if (res.skipped > 0) err << "ubi: warning: " << res.skipped << " malformed or duplicate event lines skipped\n";

  TripOptions topts;
  topts.gap_threshold = Seconds{o.gap_s};
  topts.min_duration = Seconds{o.min_duration_s};
  topts.min_mileage_km = o.min_mileage_km;
  std::vector<Trip> all_trips;
  std::vector<HourlyRecord> all_hourly;
  for (const auto& log : res.logs) {
    auto trips = segment_trips(log, topts);
    auto hourly = aggregate_hourly(log, trips, tz);
    all_trips.insert(all_trips.end(), trips.begin(), trips.end());
    all_hourly.insert(all_hourly.end(), hourly.begin(), hourly.end());
  }

  Provenance prov{"aggregate",
                  std::nullopt,
                  {{"events", in.sha256}},
                  {{"tz", tz.to_string()},
                   {"gap_s", std::to_string(o.gap_s)},
                   {"min_duration_s", std::to_string(o.min_duration_s)},
                   {"min_mileage_km", num(o.min_mileage_km)}}};
  const auto dir = prepare_out_dir(o.out_dir);
  std::ostringstream hourly, trips;
  hourly << prov.comment_block();
  write_hourly_csv(hourly, all_hourly);
  trips << prov.comment_block();
  write_trips_csv(trips, all_trips);
  write_artifact(dir / "hourly.csv", hourly.str());
  write_artifact(dir / "trips.csv", trips.str());
  out << "aggregate: " << res.logs.size() << " devices, " << all_trips.size() << " trips, " << all_hourly.size()
      << " hourly records\n";
  return kOk;
}

inline int cmd_features(const FeaturesOptions& o, std::ostream& out) {
  auto hourly_in = load_input("hourly", o.hourly);
  auto trips_in = load_input("trips", o.trips);
  const auto kind = parse_window_kind(o.window);
  const auto tz = UtcOffset::parse(o.tz);
  const auto cal = load_calendar(o.holidays);

  std::optional<Window> fixed;
  if (!o.start.empty() || !o.end.empty()) {
    if (kind != WindowKind::lifetime) throw InputError("--start/--end apply to lifetime windows only");
    auto s = parse_date(o.start);
    auto e = parse_date(o.end);
    if (!s || !e) throw InputError("--start and --end must both be dates (YYYY-MM-DD)");
    fixed = Window{WindowKind::lifetime, local_midnight(*s, tz), local_midnight(*e, tz)};
  }

  std::map<std::string, std::vector<HourlyRecord>> hourly_by_device;
  std::map<std::string, std::vector<Trip>> trips_by_device;
  {
    std::istringstream in(hourly_in.content);
    for (auto& r : read_hourly_csv(in)) hourly_by_device[r.device_id].push_back(std::move(r));
  }
  {
    std::istringstream in(trips_in.content);
    for (auto& t : read_trips_csv(in)) trips_by_device[t.device_id].push_back(std::move(t));
  }

  FeatureOptions fopts;
  fopts.tz = tz;
  std::vector<FeatureVector> rows;
  for (const auto& [device, hourly] : hourly_by_device) {
    static const std::vector<Trip> kNoTrips;
    auto it = trips_by_device.find(device);
    const auto& trips = it == trips_by_device.end() ? kNoTrips : it->second;
    std::vector<Window> windows;
    if (kind == WindowKind::weekly) windows = weekly_windows(hourly, tz);
    else if (fixed) windows = {*fixed};
    else if (auto w = lifetime_window(hourly, tz)) windows = {*w};
    for (const auto& w : windows) {
      auto fv = compute_features(hourly, trips, w, cal.calendar, fopts);
      fv.device_id = device;
      rows.push_back(std::move(fv));
    }
  }

  Provenance prov{"features",
                  std::nullopt,
                  {{"hourly", hourly_in.sha256}, {"trips", trips_in.sha256}},
                  {{"window", std::string(to_string(kind))}, {"tz", tz.to_string()}}};
  if (fixed) {
    prov.parameters.emplace_back("start", o.start);
    prov.parameters.emplace_back("end", o.end);
  }
  record_calendar(prov, cal);
  std::ostringstream buf;
  buf << prov.comment_block();
  write_features_csv(buf, rows);
  write_artifact(o.out, buf.str());
  out << "features: " << rows.size() << " rows for " << hourly_by_device.size() << " devices\n";
  return kOk;
}

inline int cmd_label(const LabelOptions& o, std::ostream& out) {
  auto in = load_input("claims", o.claims);
  std::istringstream is(in.content);
  std::vector<DeviceLabel> labels;
  std::map<Severity, std::size_t> counts;
  for (const auto& c : read_claims_csv(is)) {
    labels.push_back({c.device_id, classify_severity(c)});
    ++counts[labels.back().severity];
  }
  Provenance prov{"label", std::nullopt, {{"claims", in.sha256}}, {}};
  std::ostringstream buf;
  buf << prov.comment_block();
  write_labels_csv(buf, labels);
  write_artifact(o.out, buf.str());
  out << "label: " << labels.size() << " claims";
  for (auto s : {Severity::none, Severity::weak, Severity::medium, Severity::strong})
    out << ", " << to_string(s) << ' ' << counts[s];
  out << '\n';
  return kOk;
}

inline int cmd_fit(const FitCommandOptions& o, std::ostream& out, std::ostream& err) {
  const auto data = load_labeled(o.source);
  if (!(o.alpha > 0.0 && o.alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]; 1 keeps every candidate");
  const SplitSpec split{o.test_fraction, o.seed, o.stratify};

  std::vector<FittedModel> models;
  std::vector<EvalReport> reports;
  for (auto t : kAllTargets) {
    with_target(t, [&] {
      const auto design = make_design(data, t, candidate_columns(o.candidates, t));
      auto model = backward_eliminate(design, o.alpha);
      auto report = evaluate_model(design.select(model.feature_names()), split);
      for (const auto& d : report.diagnostics) err << "ubi: note: target " << to_string(t) << ": " << d << '\n';
      models.push_back(std::move(model));
      reports.push_back(std::move(report));
      return 0;
    });
  }

  Provenance prov{"fit",
                  o.seed,
                  data.inputs,
                  {{"candidates", o.candidates},
                   {"alpha", num(o.alpha)},
                   {"test_fraction", num(o.test_fraction)},
                   {"stratify", o.stratify ? "true" : "false"}}};
  const auto dir = prepare_out_dir(o.out_dir);
  for (const auto& m : models) {
    std::ostringstream buf;
    write_model_json(buf, m, prov.json());
    write_artifact(dir / ("model_" + m.target + ".json"), buf.str());
  }
  std::ostringstream report;
  report << prov.comment_block();
  write_eval_report_csv(report, reports);
  write_artifact(dir / "eval_report.csv", report.str());

  for (std::size_t i = 0; i < models.size(); ++i) {
    out << "fit " << models[i].target << ": " << csv::join(models[i].feature_names(), ' ')
        << " | AIC " << num(models[i].aic) << " | AUC in " << num(reports[i].auc_in_sample) << " out "
        << num(reports[i].auc_out_of_sample) << '\n';
  }
  return kOk;
}

struct NamedModel {
  FittedModel model;
  std::string source;  // sha256 of the file or "paper-reference"
};

inline int cmd_score(const ScoreOptions& o, std::ostream& out) {
  auto feat = load_input("features", o.features);
  std::vector<FeatureVector> rows;
  {
    std::istringstream in(feat.content);
    rows = read_features_csv(in);
  }
  if (o.models.empty()) throw InputError("give at least one --model");
  std::vector<Target> ref_targets;
  for (const auto& t : o.targets) ref_targets.push_back(parse_target(t));
  if (ref_targets.empty()) ref_targets.assign(kAllTargets.begin(), kAllTargets.end());

  Provenance prov{"score", std::nullopt, {{"features", feat.sha256}}, {}};
  std::vector<NamedModel> models;
  std::size_t file_index = 0;
  for (const auto& m : o.models) {
    if (m == kPublishedModels) {
      for (auto t : ref_targets) models.push_back({reference_model(t).model, std::string(kPublishedModels)});
      std::vector<std::string> names;
      for (auto t : ref_targets) names.emplace_back(to_string(t));
      prov.parameters.emplace_back("model", std::string(kPublishedModels) + " " + csv::join(names, ' '));
    } else {
      auto f = load_input("model", m);
      std::istringstream in(f.content);
      models.push_back({read_model_json(in), f.sha256});
      prov.inputs.emplace_back("model" + std::to_string(++file_index), f.sha256);
    }
  }

  std::ostringstream buf;
  buf << prov.comment_block() << "device,window_kind,window_start,target,log_odds,probability\n";
  for (const auto& fv : rows) {
    for (const auto& nm : models) {
      const double eta = log_odds(nm.model, [&](const std::string& name) -> std::optional<double> {
        auto f = parse_feature(name);
        if (!f) return std::nullopt;
        return fv[*f];
      });
      buf << csv::join({fv.device_id, std::string(to_string(fv.window.kind)), format_rfc3339(fv.window.start),
                        nm.model.target, num(eta), num(sigmoid(eta))})
          << '\n';
    }
  }
  write_artifact(o.out, buf.str());
  out << "score: " << rows.size() << " rows x " << models.size() << " models\n";
  return kOk;
}

inline int cmd_premium(const PremiumOptions& o, std::ostream& out) {
  auto in = load_input("scores", o.scores);
  const auto target = parse_target(o.target);
  std::istringstream is(in.content);
  const auto table = csv::read(is);
  if (table.header.empty()) throw InputError("scores table is empty");
  const auto c_dev = table.require("device"), c_kind = table.require("window_kind"),
             c_start = table.require("window_start"), c_target = table.require("target"),
             c_p = table.require("probability");
  Provenance prov{"premium",
                  std::nullopt,
                  {{"scores", in.sha256}},
                  {{"target", std::string(to_string(target))},
                   {"loss", num(o.loss)},
                   {"admin", num(o.admin)},
                   {"margin", num(o.margin)}}};
  std::ostringstream buf;
  buf << prov.comment_block() << "device,window_kind,window_start,target,probability,premium\n";
  std::size_t n = 0;
  for (const auto& row : table.rows) {
    if (row[c_target] != to_string(target)) continue;
    const double p = csv::parse_double(row[c_p], "probability");
    buf << csv::join({row[c_dev], row[c_kind], row[c_start], row[c_target], row[c_p],
                      num(compute_premium(p, o.loss, o.admin, o.margin))})
        << '\n';
    ++n;
  }
  write_artifact(o.out, buf.str());
  out << "premium: " << n << " rows for target " << to_string(target) << '\n';
  return kOk;
}

inline int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  const auto data = load_labeled(o.source);
  if (!(o.alpha > 0.0 && o.alpha <= 1.0)) throw InputError("alpha must lie in (0, 1]; 1 keeps every candidate");
  const SplitSpec split{o.test_fraction, o.seed, o.stratify};
  Provenance prov{"evaluate",
                  o.seed,
                  data.inputs,
                  {{"candidates", o.candidates},
                   {"alpha", num(o.alpha)},
                   {"test_fraction", num(o.test_fraction)},
                   {"stratify", o.stratify ? "true" : "false"},
                   {"repeats", std::to_string(o.repeats)}}};
  std::ostringstream buf;
  buf << prov.comment_block();
  if (o.repeats <= 1) {
    std::vector<EvalReport> reports;
    for (auto t : kAllTargets) {
      with_target(t, [&] {
        const auto design = make_design(data, t, candidate_columns(o.candidates, t));
        const auto model = backward_eliminate(design, o.alpha);
        auto r = evaluate_model(design.select(model.feature_names()), split);
        for (const auto& d : r.diagnostics) err << "ubi: note: target " << to_string(t) << ": " << d << '\n';
        out << "evaluate " << r.target << ": AUC in " << num(r.auc_in_sample) << " out "
            << num(r.auc_out_of_sample) << " | McFadden R2 " << num(r.mcfadden_r2) << '\n';
        reports.push_back(std::move(r));
        return 0;
      });
    }
    write_eval_report_csv(buf, reports);
  } else {
    std::vector<RepeatedEval> reports;
    for (auto t : kAllTargets) {
      with_target(t, [&] {
        const auto design = make_design(data, t, candidate_columns(o.candidates, t));
        const auto model = backward_eliminate(design, o.alpha);
        auto r = evaluate_repeated(design.select(model.feature_names()), split, o.repeats);
        out << "evaluate " << r.target << " (" << r.repeats << " splits): AUC in " << num(r.auc_in_sample.mean)
            << " out " << num(r.auc_out_of_sample.mean) << '\n';
        reports.push_back(std::move(r));
        return 0;
      });
    }
    write_repeated_eval_csv(buf, reports);
  }
  write_artifact(o.out, buf.str());
  return kOk;
}

inline int cmd_ablate(const AblateOptions& o, std::ostream& out, std::ostream& err) {
  const auto data = load_labeled(o.source);
  const auto group = group_columns(o.group);
  std::vector<AblationResult> results;
  for (auto t : kAllTargets) {
    const auto columns = candidate_columns(o.candidates, t);
    std::vector<std::string> present;
    for (const auto& g : group) {
      if (std::find(columns.begin(), columns.end(), g) != columns.end()) present.push_back(g);
    }
    if (present.empty()) {
      err << "ubi: note: target " << to_string(t) << ": no group feature among the candidates, skipped\n";
      continue;
    }
    if (present.size() == columns.size()) {
      err << "ubi: note: target " << to_string(t) << ": every candidate is in the group, skipped\n";
      continue;
    }
    with_target(t, [&] {
      auto r = ablation_compare(make_design(data, t, columns), present);
      out << "ablate " << r.target << ": R2 with " << num(r.r2_with) << " without " << num(r.r2_without)
          << " difference " << num(r.difference) << '\n';
      results.push_back(std::move(r));
      return 0;
    });
  }
  Provenance prov{"ablate", std::nullopt, data.inputs, {{"candidates", o.candidates}, {"group", o.group}}};
  std::ostringstream buf;
  buf << prov.comment_block();
  write_ablation_csv(buf, results);
  write_artifact(o.out, buf.str());
  return kOk;
}

inline int cmd_report(const ReportOptions& o, std::ostream& out, std::ostream& err) {
  const auto data = load_labeled(o.source);
  const auto target = parse_target(o.target);
  const auto names = o.columns == "all" ? all_feature_names(true) : validated_features(split_list(o.columns));
  std::vector<std::vector<double>> columns(names.size());
  std::vector<std::string> devices;
  for (const auto& fv : data.rows) devices.push_back(fv.device_id);
  for (std::size_t j = 0; j < names.size(); ++j) {
    for (const auto& fv : data.rows) columns[j].push_back(feature_value(fv, names[j]));
  }
  const auto y = build_targets(data.labels, devices, target);

  std::vector<std::string> diagnostics;
  const auto descriptive = descriptive_stats(names, columns, y, &diagnostics);
  std::vector<std::size_t> zero_variance;
  const auto corr = correlation_matrix(columns, &zero_variance);
  for (auto j : zero_variance) diagnostics.push_back("zero variance, correlations left empty: " + names[j]);
  for (const auto& d : diagnostics) err << "ubi: note: " << d << '\n';

  Provenance prov{"report", std::nullopt, data.inputs,
                  {{"target", std::string(to_string(target))}, {"columns", o.columns}}};
  const auto dir = prepare_out_dir(o.out_dir);
  std::ostringstream desc, cor;
  desc << prov.comment_block();
  write_descriptive_csv(desc, descriptive);
  cor << prov.comment_block();
  write_correlation_csv(cor, names, corr);
  write_artifact(dir / "descriptive.csv", desc.str());
  write_artifact(dir / "correlation.csv", cor.str());
  const auto positives = std::count(y.begin(), y.end(), 1);
  out << "report: " << data.rows.size() << " rows, " << positives << " with target " << to_string(target) << ", "
      << names.size() << " features\n";
  return kOk;
}

inline int cmd_synth(const SynthOptions& o, std::ostream& out) {
  Provenance prov{"synth", std::nullopt, {}, {}};
  synth::SynthConfig c = synth::SynthConfig::defaults();
  if (!o.params.empty()) {
    auto f = load_input("params", o.params);
    std::istringstream in(f.content);
    c = synth::read_synth_params(in);
    prov.inputs.emplace_back("params", f.sha256);
  } else {
    prov.parameters.emplace_back("params", "defaults");
  }
  if (o.has_n) c.n_drivers = o.n;
  if (o.has_weeks) c.weeks = o.weeks;
  if (o.has_seed) c.seed = o.seed;
  if (o.has_event_drivers) c.event_drivers = o.event_drivers;
  if (o.pseudo_n < 1000) throw InputError("--pseudo-n must be at least 1000");
  const auto cal = load_calendar(o.holidays);
  record_calendar(prov, cal);
  prov.seed = c.seed;
  prov.parameters.emplace_back("n_drivers", std::to_string(c.n_drivers));
  prov.parameters.emplace_back("weeks", std::to_string(c.weeks));
  prov.parameters.emplace_back("event_drivers", std::to_string(c.event_drivers));
  prov.parameters.emplace_back("pseudo_n", std::to_string(o.pseudo_n));

  const auto pop = synth::generate_population(c, cal.calendar);
  std::vector<FittedModel> references;
  for (auto t : kAllTargets)
    references.push_back(synth::reference_coefficients(c, t, synth::planted_columns(t), o.pseudo_n, cal.calendar));

  const auto dir = prepare_out_dir(o.out_dir);
  std::ostringstream events, claims, features, params;
  events << prov.comment_block();
  serialize_event_log(events, pop.logs);
  claims << prov.comment_block();
  write_claims_csv(claims, pop.claims);
  features << prov.comment_block();
  write_features_csv(features, pop.features);
  params << prov.comment_block();
  synth::write_synth_params(params, c);
  auto truth = synth::truth_json(pop, references);
  truth["provenance"] = prov.json();

  write_artifact(dir / "events.jsonl", events.str());
  write_artifact(dir / "claims.csv", claims.str());
  write_artifact(dir / "features.csv", features.str());
  write_artifact(dir / "params.ini", params.str());
  write_artifact(dir / "truth.json", truth.dump(2) + "\n");

  std::size_t accidents = 0;
  for (auto s : pop.intended) accidents += s != Severity::none;
  out << "synth: " << c.n_drivers << " drivers, " << c.weeks << " weeks, " << accidents << " accidents, "
      << pop.claims.size() << " claims, event logs for " << pop.logs.size() << " drivers\n";
  return kOk;
}

// ---- entry point ----------------------------------------------------------------

inline void add_label_source(CLI::App* sub, LabelSource& src) {
  sub->add_option("--features", src.features, "Feature table (features.csv)")->required();
  sub->add_option("--labels", src.labels, "Labels table from `label`");
  sub->add_option("--claims", src.claims, "Claims table; severity is classified on the fly");
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Driver-risk pipeline: telematics events to features, accident models, scores and premiums", "ubi"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.set_config("--config", "", "INI file with one [section] per subcommand; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);

  ParseOptions parse_o;
  auto* parse = app.add_subcommand("parse", "Parse and validate a JSONL event log");
  parse->add_option("--input,-i", parse_o.input, "Event log (JSONL)")->required();
  parse->add_option("--out-dir,-o", parse_o.out_dir, "Output directory")->capture_default_str();

  AggregateOptions agg_o;
  auto* aggregate = app.add_subcommand("aggregate", "Segment trips and roll events up into hourly records");
  aggregate->add_option("--input,-i", agg_o.input, "Event log (JSONL)")->required();
  aggregate->add_option("--out-dir,-o", agg_o.out_dir, "Output directory")->capture_default_str();
  aggregate->add_option("--tz", agg_o.tz, "Fixed UTC offset for local hours, e.g. +03:00")->capture_default_str();
  aggregate->add_option("--gap-s", agg_o.gap_s, "Idle gap that ends a trip, seconds")->capture_default_str();
  aggregate->add_option("--min-duration-s", agg_o.min_duration_s, "Shortest kept trip, seconds")
      ->capture_default_str();
  aggregate->add_option("--min-mileage-km", agg_o.min_mileage_km, "Shortest kept trip, km")->capture_default_str();

  FeaturesOptions feat_o;
  auto* features = app.add_subcommand("features", "Compute the feature catalog per device and window");
  features->add_option("--hourly", feat_o.hourly, "Hourly records (hourly.csv)")->required();
  features->add_option("--trips", feat_o.trips, "Trips (trips.csv)")->required();
  features->add_option("--out,-o", feat_o.out, "Output feature table")->capture_default_str();
  features->add_option("--window", feat_o.window, "Window kind")
      ->check(CLI::IsMember({"weekly", "lifetime"}))
      ->capture_default_str();
  features->add_option("--tz", feat_o.tz, "Fixed UTC offset for local time")->capture_default_str();
  features->add_option("--holidays", feat_o.holidays, "Holiday calendar file (default: embedded)");
  features->add_option("--start", feat_o.start, "Lifetime window start date (local, inclusive)");
  features->add_option("--end", feat_o.end, "Lifetime window end date (local, exclusive)");

  LabelOptions label_o;
  auto* label = app.add_subcommand("label", "Classify claims into severity labels");
  label->add_option("--claims", label_o.claims, "Claims table")->required();
  label->add_option("--out,-o", label_o.out, "Output labels table")->capture_default_str();

  FitCommandOptions fit_o;
  auto* fit = app.add_subcommand("fit", "Fit the four accident models with backward elimination");
  add_label_source(fit, fit_o.source);
  fit->add_option("--out-dir,-o", fit_o.out_dir, "Output directory")->capture_default_str();
  fit->add_option("--candidates", fit_o.candidates, "published | union | all | comma-separated features")
      ->capture_default_str();
  fit->add_option("--alpha", fit_o.alpha, "Wald p-value threshold for elimination (1 disables it)")->capture_default_str();
  fit->add_option("--test-fraction", fit_o.test_fraction, "Hold-out share for eval_report.csv")
      ->capture_default_str();
  fit->add_option("--seed", fit_o.seed, "Split seed")->capture_default_str();
  fit->add_flag("--stratify", fit_o.stratify, "Stratify the hold-out split by target");

  ScoreOptions score_o;
  auto* score = app.add_subcommand("score", "Accident probabilities from models and features");
  score->add_option("--features", score_o.features, "Feature table")->required();
  score->add_option("--model,-m", score_o.models, "Model JSON file or 'paper-reference' (repeatable)")->required();
  score->add_option("--target", score_o.targets, "Targets for paper-reference (default: all four)")
      ->check(CLI::IsMember({"any", "weak", "medium", "strong"}));
  score->add_option("--out,-o", score_o.out, "Output scores table")->capture_default_str();

  PremiumOptions prem_o;
  auto* premium = app.add_subcommand("premium", "Premiums from accident probabilities");
  premium->add_option("--scores", prem_o.scores, "Scores table from `score`")->required();
  premium->add_option("--loss", prem_o.loss, "Predicted loss size")->required();
  premium->add_option("--admin", prem_o.admin, "Administrative costs")->required();
  premium->add_option("--margin", prem_o.margin, "Margin")->required();
  premium->add_option("--target", prem_o.target, "Which model's probability to price")
      ->check(CLI::IsMember({"any", "weak", "medium", "strong"}))
      ->capture_default_str();
  premium->add_option("--out,-o", prem_o.out, "Output premiums table")->capture_default_str();

  EvaluateOptions eval_o;
  auto* evaluate = app.add_subcommand("evaluate", "In- and out-of-sample AUC of the four models");
  add_label_source(evaluate, eval_o.source);
  evaluate->add_option("--out,-o", eval_o.out, "Output report")->capture_default_str();
  evaluate->add_option("--candidates", eval_o.candidates, "published | union | all | comma-separated features")
      ->capture_default_str();
  evaluate->add_option("--alpha", eval_o.alpha, "Wald p-value threshold for elimination (1 disables it)")->capture_default_str();
  evaluate->add_option("--test-fraction", eval_o.test_fraction, "Hold-out share")->capture_default_str();
  evaluate->add_option("--seed", eval_o.seed, "Split seed")->capture_default_str();
  evaluate->add_flag("--stratify", eval_o.stratify, "Stratify the hold-out split by target");
  evaluate->add_option("--repeats", eval_o.repeats, "Average over this many splits (seeds seed, seed+1, ...)")
      ->capture_default_str();

  AblateOptions abl_o;
  auto* ablate = app.add_subcommand("ablate", "McFadden R2 with and without a feature group");
  add_label_source(ablate, abl_o.source);
  ablate->add_option("--out,-o", abl_o.out, "Output report")->capture_default_str();
  ablate->add_option("--candidates", abl_o.candidates, "published | union | all | comma-separated features")
      ->capture_default_str();
  ablate->add_option("--group", abl_o.group, "accel | comma-separated features")->capture_default_str();

  ReportOptions rep_o;
  auto* report = app.add_subcommand("report", "Descriptive statistics by target and correlation matrix");
  add_label_source(report, rep_o.source);
  report->add_option("--out-dir,-o", rep_o.out_dir, "Output directory")->capture_default_str();
  report->add_option("--target", rep_o.target, "Target splitting the descriptive table")
      ->check(CLI::IsMember({"any", "weak", "medium", "strong"}))
      ->capture_default_str();
  report->add_option("--columns", rep_o.columns, "all | comma-separated features")->capture_default_str();

  SynthOptions syn_o;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic driver population with planted models");
  synth->add_option("--out-dir,-o", syn_o.out_dir, "Output directory")->capture_default_str();
  synth->add_option("--params", syn_o.params, "Generator parameter file (INI; default: built-in)");
  synth->add_option("--holidays", syn_o.holidays, "Holiday calendar file (default: embedded)");
  auto* opt_n = synth->add_option("--n", syn_o.n, "Number of drivers");
  auto* opt_weeks = synth->add_option("--weeks", syn_o.weeks, "Observation length in weeks");
  auto* opt_seed = synth->add_option("--seed", syn_o.seed, "Root seed");
  auto* opt_events = synth->add_option("--event-drivers", syn_o.event_drivers, "Drivers with raw event logs");
  synth->add_option("--pseudo-n", syn_o.pseudo_n, "Pseudo population for reference coefficients")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    if (dynamic_cast<const CLI::FileError*>(&e)) {
      err << "ubi: error: " << e.what() << '\n';
      return kMissingInput;
    }
    if (dynamic_cast<const CLI::ConfigError*>(&e)) {
      err << "ubi: error: config: " << e.what() << '\n';
      return kBadConfig;
    }
    app.exit(e, out, err);
    return kFailure;
  }
  syn_o.has_n = opt_n->count() > 0;
  syn_o.has_weeks = opt_weeks->count() > 0;
  syn_o.has_seed = opt_seed->count() > 0;
  syn_o.has_event_drivers = opt_events->count() > 0;

  try {
    if (*parse) return cmd_parse(parse_o, out);
    if (*aggregate) return cmd_aggregate(agg_o, out, err);
    if (*features) return cmd_features(feat_o, out);
    if (*label) return cmd_label(label_o, out);
    if (*fit) return cmd_fit(fit_o, out, err);
    if (*score) return cmd_score(score_o, out);
    if (*premium) return cmd_premium(prem_o, out);
    if (*evaluate) return cmd_evaluate(eval_o, out, err);
    if (*ablate) return cmd_ablate(abl_o, out, err);
    if (*report) return cmd_report(rep_o, out, err);
    if (*synth) return cmd_synth(syn_o, out);
  } catch (const MissingInputError& e) {
    err << "ubi: error: " << e.what() << '\n';
    return kMissingInput;
  } catch (const synth::ParamsError& e) {
    err << "ubi: error: params: " << e.what() << '\n';
    return kBadConfig;
  } catch (const FitError& e) {
    err << "ubi: error: " << e.what() << '\n';
    return kFitFailure;
  } catch (const std::exception& e) {
    err << "ubi: error: " << e.what() << '\n';
    return kFailure;
  }
  err << "ubi: error: no subcommand\n";
  return kFailure;
}

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv{"ubi"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace ubi::cli
