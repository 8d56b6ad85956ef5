#include <sstream>

#include <gtest/gtest.h>

#include "test_support.hpp"
#include "ubi/accel_bands.hpp"
#include "ubi/ingest.hpp"

namespace ubi {
namespace {

Instant at(const char* s) { return *parse_rfc3339(s); }

TEST(Rfc3339, ParsesZuluAndOffsets) {
  auto z = parse_rfc3339("2019-03-05T08:10:00Z");
  auto off = parse_rfc3339("2019-03-05T11:10:00+03:00");
  ASSERT_TRUE(z && off);
  EXPECT_EQ(*z, *off);
  EXPECT_EQ(format_rfc3339(*z), "2019-03-05T08:10:00Z");
  EXPECT_FALSE(parse_rfc3339("2019-02-30T00:00:00Z"));
  EXPECT_FALSE(parse_rfc3339("2019-03-05 08:10:00"));
  EXPECT_FALSE(parse_rfc3339("2019-03-05T25:00:00Z"));
}

TEST(ParseEventLog, KeepsValidLinesAndGroupsByDevice) {
  std::istringstream in(
      "# comment\n"
      "{\"device\":\"b\",\"ts\":\"2019-01-01T00:00:10Z\",\"kind\":\"speed\",\"speed_kph\":50}\n"
      "\n"
      "{\"device\":\"a\",\"ts\":\"2019-01-01T00:00:00Z\",\"kind\":\"ignition_on\"}\n"
      "{\"device\":\"a\",\"ts\":\"2019-01-01T00:00:05Z\",\"kind\":\"position\",\"lat\":55.7,\"lon\":37.6}\n");
  auto r = parse_event_log(in);
  EXPECT_EQ(r.data_lines, 3u);
  EXPECT_EQ(r.emitted, 3u);
  EXPECT_EQ(r.skipped, 0u);
  ASSERT_EQ(r.logs.size(), 2u);
  EXPECT_EQ(r.logs[0].device_id, "a");
  EXPECT_EQ(r.logs[0].events.size(), 2u);
  EXPECT_EQ(r.logs[1].events[0].speed_kph, 50.0);
}

TEST(ParseEventLog, SkipsMalformedLinesWithReasons) {
  std::istringstream in(
      "not json\n"
      "{\"device\":\"a\",\"ts\":\"2019-01-01T00:00:00Z\",\"kind\":\"teleport\"}\n"
      "{\"device\":\"a\",\"ts\":\"2019-01-01T00:00:00Z\",\"kind\":\"position\",\"lat\":95,\"lon\":0}\n"
      "{\"device\":\"a\",\"ts\":\"2019-01-01T00:00:00Z\",\"kind\":\"ignition_on\",\"speed_kph\":3}\n"
      "{\"device\":\"a\",\"ts\":\"2019-01-01T00:00:00Z\",\"kind\":\"acceleration\",\"axis\":\"lateral\",\"accel_g\":30}\n"
      "{\"device\":\"a\",\"ts\":\"2019-01-01T00:00:00Z\",\"kind\":\"position\",\"lat\":1}\n"
      "{\"device\":\"a\",\"ts\":\"yesterday\",\"kind\":\"ignition_on\"}\n"
      "{\"device\":\"a\",\"ts\":\"2019-01-01T00:00:00Z\",\"kind\":\"ignition_on\"}\n"
      "{\"device\":\"a\",\"ts\":\"2019-01-01T00:00:00Z\",\"kind\":\"ignition_on\"}\n");
  auto r = parse_event_log(in);
  EXPECT_EQ(r.data_lines, 9u);
  EXPECT_EQ(r.emitted, 1u);
  EXPECT_EQ(r.skipped, 8u);
  EXPECT_EQ(r.data_lines, r.emitted + r.skipped);
  ASSERT_EQ(r.diagnostics.size(), 8u);
  EXPECT_EQ(r.diagnostics[0].line, 1u);
  EXPECT_EQ(r.diagnostics.back().line, 9u);  // exact duplicate
  for (const auto& d : r.diagnostics) EXPECT_FALSE(d.reason.empty());
}

TEST(ParseEventLog, SerializeRoundTrips) {
  std::vector<EventPackage> ev = {
      EventPackage::ignition("d1", at("2019-01-01T10:00:00Z"), true),
      EventPackage::position("d1", at("2019-01-01T10:00:00Z"), {55.123456789, 37.987654321}),
      EventPackage::speed("d1", at("2019-01-01T10:01:00Z"), 87.5),
      EventPackage::acceleration("d1", at("2019-01-01T10:02:00Z"), Axis::longitudinal, -0.345),
      EventPackage::ignition("d1", at("2019-01-01T10:05:00Z"), false),
  };
  const auto log = make_device_log("d1", ev);
  std::ostringstream out;
  serialize_event_log(out, {log});
  auto r = parse_event_log(out.str());
  ASSERT_EQ(r.logs.size(), 1u);
  EXPECT_EQ(r.skipped, 0u);
  EXPECT_EQ(r.logs[0], log);
}

TEST(ValidateLog, FlagsOrderingAndIgnitionProblems) {
  DeviceLog log;
  log.device_id = "d";
  log.events = {
      EventPackage::ignition("d", at("2019-01-01T10:00:00Z"), true),
      EventPackage::ignition("d", at("2019-01-01T10:10:00Z"), true),
      EventPackage::speed("d", at("2019-01-01T10:05:00Z"), 40.0),
      EventPackage::ignition("d", at("2019-01-01T10:20:00Z"), false),
      EventPackage::ignition("d", at("2019-01-01T10:30:00Z"), false),
      EventPackage::speed("other", at("2019-01-01T10:40:00Z"), 320.0),
  };
  log.observation_start = at("2019-01-01T10:00:00Z");
  log.observation_end = at("2019-01-01T10:40:00Z");
  auto rep = validate_log(log);
  auto has = [&](const std::string& msg, std::size_t idx) {
    return std::any_of(rep.issues.begin(), rep.issues.end(),
                       [&](const auto& i) { return i.message == msg && i.event_index == idx; });
  };
  EXPECT_TRUE(has("unterminated trip", 0));
  EXPECT_TRUE(has("non-monotone time", 2));
  EXPECT_TRUE(has("ignition_off without ignition_on", 4));
  EXPECT_TRUE(has("event belongs to another device", 5));
  EXPECT_EQ(rep.count(ValidationIssue::Level::suspect), 1u);  // 320 km/h
}

TEST(ValidateLog, CleanLogHasNoIssues) {
  const auto log = make_device_log(
      "d", {EventPackage::ignition("d", at("2019-01-01T10:00:00Z"), true),
            EventPackage::position("d", at("2019-01-01T10:00:00Z"), {55.0, 37.0}),
            EventPackage::position("d", at("2019-01-01T10:10:00Z"), {55.1, 37.0}),
            EventPackage::ignition("d", at("2019-01-01T10:10:00Z"), false)});
  EXPECT_TRUE(validate_log(log).empty());
}

TEST(AccelBands, HalfOpenEdges) {
  using B = AccelBand;
  EXPECT_EQ(classify_accel_event(Axis::longitudinal, 0.29), B::none);
  EXPECT_EQ(classify_accel_event(Axis::longitudinal, 0.3), B::a1);
  EXPECT_EQ(classify_accel_event(Axis::longitudinal, 0.4), B::a2);
  EXPECT_EQ(classify_accel_event(Axis::longitudinal, 0.5), B::a3);
  EXPECT_EQ(classify_accel_event(Axis::longitudinal, -0.19), B::none);
  EXPECT_EQ(classify_accel_event(Axis::longitudinal, -0.2), B::d1);
  EXPECT_EQ(classify_accel_event(Axis::longitudinal, -0.3), B::d2);
  EXPECT_EQ(classify_accel_event(Axis::longitudinal, -0.45), B::d3);
  EXPECT_EQ(classify_accel_event(Axis::lateral, -0.35), B::s1);
  EXPECT_EQ(classify_accel_event(Axis::lateral, 0.59), B::s2);
  EXPECT_EQ(classify_accel_event(Axis::lateral, 0.6), B::s3);
  EXPECT_EQ(classify_accel_event(Axis::lateral, 0.1), B::none);
}

TEST(GoldenFixture, ParsesCleanly) {
  std::ifstream in(test::data_path("golden_week.jsonl"));
  auto r = parse_event_log(in);
  EXPECT_EQ(r.skipped, 0u);
  ASSERT_EQ(r.logs.size(), 1u);
  EXPECT_EQ(r.logs[0].events.size(), 21u);
  EXPECT_TRUE(validate_log(r.logs[0]).empty());
}

}  // namespace
}  // namespace ubi
