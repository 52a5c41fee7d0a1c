#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "procsight/errors.hpp"
#include "procsight/event_log.hpp"

using namespace procsight;
using namespace procsight::testing;

namespace {

LogSchema basic_schema() {
  LogSchema schema;
  schema.case_id_column = "case_id";
  schema.activity_column = "activity";
  schema.timestamp_column = "timestamp";
  return schema;
}

EventLog parse(const std::string& csv, LogSchema schema = basic_schema()) {
  std::istringstream in(csv);
  return parse_csv(in, schema);
}

// Brute-force oracle for the eventually-followed rule: enumerate every
// occurrence pair instead of scanning forward.
bool eventually_followed_oracle(const Trace& trace, const std::string& first,
                                const std::string& second) {
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    if (trace.events[i].activity != first) continue;
    bool found = false;
    for (std::size_t j = 0; j < trace.events.size(); ++j) {
      if (j > i && trace.events[j].activity == second) found = true;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parse_csv groups rows into traces") {
  const auto log = parse(
      "case_id,activity,timestamp\n"
      "c1,A,2020-01-01 09:00:00\n"
      "c1,B,2020-01-01 09:05:00\n"
      "c2,A,2020-01-01 10:00:00\n");
  REQUIRE(log.traces.size() == 2);
  CHECK(log.traces[0].case_id == "c1");
  CHECK(log.traces[0].events.size() == 2);
  CHECK(log.traces[1].events.size() == 1);
}

TEST_CASE("parse_csv sorts events by timestamp, ties keep input order") {
  const auto log = parse(
      "case_id,activity,timestamp\n"
      "c1,C,2020-01-01 09:10:00\n"
      "c1,A,2020-01-01 09:00:00\n"
      "c1,B1,2020-01-01 09:05:00\n"
      "c1,B2,2020-01-01 09:05:00\n");
  const auto& events = log.traces[0].events;
  CHECK(events[0].activity == "A");
  CHECK(events[1].activity == "B1");
  CHECK(events[2].activity == "B2");
  CHECK(events[3].activity == "C");
}

TEST_CASE("parse_csv errors") {
  CHECK_THROWS_AS(parse("case_id,activity\nc1,A\n"), Error);  // missing timestamp column
  CHECK_THROWS_AS(parse("case_id,activity,timestamp\nc1,A,not-a-time\n"), Error);
  CHECK_THROWS_AS(parse("case_id,activity,timestamp\n"), Error);  // empty log
  try {
    parse("case_id,activity,timestamp\nc1,A,nope\n");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::bad_timestamp);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("column type inference: mixed values demote to categorical") {
  const auto log = parse(
      "case_id,activity,timestamp,amount\n"
      "c1,A,2020-01-01 09:00:00,10\n"
      "c1,B,2020-01-01 09:01:00,x\n");
  const auto& events = log.traces[0].events;
  CHECK(events[0].categorical_attrs.at("amount") == "10");
  CHECK(events[0].numeric_attrs.empty());

  // all-numeric column stays numeric
  const auto log2 = parse(
      "case_id,activity,timestamp,amount\n"
      "c1,A,2020-01-01 09:00:00,10\n"
      "c1,B,2020-01-01 09:01:00,12.5\n");
  CHECK(log2.traces[0].events[1].numeric_attrs.at("amount") == 12.5);
}

TEST_CASE("round trip: parse, serialize, parse is the identity") {
  LogSchema schema = basic_schema();
  schema.resource_column = "resource";
  schema.case_attr_columns = {"channel", "budget"};
  const std::string csv =
      "case_id,activity,timestamp,resource,channel,budget,duration,note\n"
      "c1,A,2020-01-01 09:00:00,r1,web,100.5,3,ok\n"
      "c1,B,2020-01-01 09:05:00.250,r2,web,100.5,4.5,\n"
      "c2,A,2020-01-02 10:00:00,r1,phone,,7,odd value\n";
  const EventLog first = parse(csv, schema);
  std::ostringstream out;
  write_csv(first, out);
  std::istringstream back(out.str());
  const EventLog second = parse_csv(back, schema);
  CHECK(first == second);

  // and once more, to make sure serialization itself is stable
  std::ostringstream out2;
  write_csv(second, out2);
  CHECK(out.str() == out2.str());
}

TEST_CASE("label_outcome: activity_occurs with truncation") {
  auto log = make_log({make_trace("c1", {"A", "B", "C"}), make_trace("c2", {"A", "B"})});
  LabelingRule rule;
  rule.variant = LabelingRule::Variant::activity_occurs;
  rule.activity = "C";
  rule.truncate = true;

  const auto labeled = label_outcome(log, rule);
  REQUIRE(labeled.entries.size() == 2);
  CHECK(labeled.entries[0].label == 1);
  REQUIRE(labeled.entries[0].trace.events.size() == 2);  // truncated to [A,B]
  CHECK(labeled.entries[0].trace.events[1].activity == "B");
  CHECK(labeled.entries[1].label == 0);
  CHECK(labeled.entries[1].trace.events.size() == 2);  // negatives untouched

  // truncated traces never contain the label activity
  for (const auto& entry : labeled.entries) {
    for (const auto& ev : entry.trace.events) CHECK(ev.activity != "C");
  }
}

TEST_CASE("label_outcome: truncation at the first event drops the trace") {
  auto log = make_log({make_trace("c1", {"C", "A"}), make_trace("c2", {"A", "B"})});
  LabelingRule rule;
  rule.variant = LabelingRule::Variant::activity_occurs;
  rule.activity = "C";
  rule.truncate = true;
  const auto labeled = label_outcome(log, rule);
  CHECK(labeled.entries.size() == 1);
  CHECK(labeled.dropped_empty_after_truncation == 1);
}

TEST_CASE("label_outcome: eventually_followed matches the pairwise oracle") {
  LabelingRule rule;
  rule.variant = LabelingRule::Variant::eventually_followed;
  rule.first = "X";
  rule.second = "Y";

  // the spec's worked example: [X,Y,X] is negative
  auto log = make_log({make_trace("c1", {"X", "Y", "X"})});
  CHECK(label_outcome(log, rule).entries[0].label == 0);

  // zero occurrences of X are vacuously positive
  auto log2 = make_log({make_trace("c1", {"A", "B"})});
  CHECK(label_outcome(log2, rule).entries[0].label == 1);

  std::mt19937_64 rng(7);
  std::vector<Trace> traces;
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> acts;
    const int len = 1 + static_cast<int>(rng() % 8);
    for (int j = 0; j < len; ++j) {
      acts.push_back(rng() % 3 == 0 ? "X" : rng() % 2 == 0 ? "Y" : "Z");
    }
    traces.push_back(make_trace("c" + std::to_string(i), acts));
  }
  const auto labeled = label_outcome(make_log(traces), rule);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    CHECK(labeled.entries[i].label == (eventually_followed_oracle(traces[i], "X", "Y") ? 1 : 0));
  }
}

TEST_CASE("label counts partition the log") {
  const auto log = random_log(50, 3);
  LabelingRule rule;
  rule.variant = LabelingRule::Variant::activity_occurs;
  rule.activity = "C";
  const auto labeled = label_outcome(log, rule);
  int pos = 0, neg = 0;
  for (const auto& e : labeled.entries) (e.label == 1 ? pos : neg)++;
  CHECK(pos + neg == 50);
}

TEST_CASE("degenerate labels are flagged, not thrown") {
  auto log = make_log({make_trace("c1", {"A"}), make_trace("c2", {"B"})});
  LabelingRule rule;
  rule.variant = LabelingRule::Variant::activity_occurs;
  rule.activity = "nope";
  CHECK(label_outcome(log, rule).degenerate_labels);
}

TEST_CASE("remaining_time_targets") {
  auto trace = make_trace("c1", {"A", "B", "C"}, kEpoch, 0);
  trace.events[1].timestamp = kEpoch + 60'000;
  trace.events[2].timestamp = kEpoch + 90'000;
  const auto labeled = remaining_time_targets(make_log({trace}));
  const auto& targets = labeled.entries[0].remaining_seconds;
  CHECK(targets[0] == 90.0);
  CHECK(targets[1] == 30.0);
  CHECK(targets[2] == 0.0);  // completed case

  // single-event trace gets target 0 at l=1
  const auto single = remaining_time_targets(make_log({make_trace("c2", {"A"})}));
  CHECK(single.entries[0].remaining_seconds == std::vector<double>{0.0});
}

TEST_CASE("remaining_time_targets: constructed 10s-per-step generator") {
  const auto log = fixed_step_log(5, 8, 10.0);
  const auto labeled = remaining_time_targets(log);
  for (const auto& entry : labeled.entries) {
    const int len = static_cast<int>(entry.trace.events.size());
    for (int l = 1; l <= len; ++l) {
      CHECK(entry.remaining_seconds[l - 1] == doctest::Approx(10.0 * (len - l)));
    }
  }
}

TEST_CASE("remaining_time_targets is antitone in prefix length") {
  const auto labeled = remaining_time_targets(random_log(30, 11));
  for (const auto& entry : labeled.entries) {
    for (std::size_t l = 1; l < entry.remaining_seconds.size(); ++l) {
      CHECK(entry.remaining_seconds[l - 1] >= entry.remaining_seconds[l]);
    }
  }
}
