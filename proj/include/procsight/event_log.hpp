#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "procsight/timeutil.hpp"

namespace procsight {

/// Case attributes are either numeric or categorical; the choice is made
/// per column at parse time and stays fixed for the whole log.
using AttrValue = std::variant<double, std::string>;

struct Event {
  std::string case_id;
  std::string activity;
  TimestampMs timestamp = 0;
  std::optional<std::string> resource;
  std::map<std::string, double> numeric_attrs;
  std::map<std::string, std::string> categorical_attrs;

  bool operator==(const Event&) const = default;
};

/// One case: events sorted ascending by timestamp, ties keeping input order.
struct Trace {
  std::string case_id;
  std::vector<Event> events;
  std::map<std::string, AttrValue> case_attrs;

  bool operator==(const Trace&) const = default;
};

/// Column-role mapping supplied by the caller. Columns not mentioned here
/// become event attributes: numeric when every non-empty value parses as a
/// number, categorical otherwise.
struct LogSchema {
  std::string case_id_column;
  std::string activity_column;
  std::string timestamp_column;
  std::optional<std::string> resource_column;
  std::vector<std::string> case_attr_columns;
  std::string timestamp_format = "%Y-%m-%d %H:%M:%S";
  char delimiter = ',';

  bool operator==(const LogSchema&) const = default;
};

struct EventLog {
  std::vector<Trace> traces;
  LogSchema schema;

  bool operator==(const EventLog&) const = default;
};

struct LabelingRule {
  enum class Variant { activity_occurs, eventually_followed };
  Variant variant = Variant::activity_occurs;
  std::string activity;      // activity_occurs
  bool truncate = false;     // activity_occurs: cut the trace just before the first occurrence
  std::string first;         // eventually_followed
  std::string second;        // eventually_followed
  std::string positive_class = "positive";
};

enum class Task { classify, regress };

struct LabeledTrace {
  Trace trace;
  int label = -1;                          // classify: 0/1
  std::vector<double> remaining_seconds;   // regress: target at each prefix length l (index l-1)
};

struct LabeledLog {
  Task task = Task::classify;
  std::vector<LabeledTrace> entries;
  /// Set when an outcome rule produced a single class everywhere
  /// (RuleActivityAbsentEverywhere is reported at this level, not thrown).
  bool degenerate_labels = false;
  /// Traces removed because truncation at the very first event left them empty.
  int dropped_empty_after_truncation = 0;
};

/// Parses a delimited event stream into traces grouped by case id.
/// Events are stably sorted by timestamp inside each case.
EventLog parse_csv(std::istream& source, const LogSchema& schema);

/// Re-serializes a log in a schema-compatible layout; parse_csv(write_csv(log))
/// reproduces the log exactly.
void write_csv(const EventLog& log, std::ostream& out);

/// Applies an outcome labeling rule.
///  - activity_occurs: positive iff the activity appears; with truncate=true
///    positive traces are cut to end immediately before its first occurrence.
///  - eventually_followed: positive iff every occurrence of `first` has a
///    later occurrence of `second` (vacuously positive with zero occurrences).
LabeledLog label_outcome(const EventLog& log, const LabelingRule& rule);

/// Remaining-time targets: at prefix length l the target is the span in
/// seconds between event l and the trace's last event (0 at full length).
LabeledLog remaining_time_targets(const EventLog& log);

}  // namespace procsight
