#include "procsight/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "procsight/csv.hpp"
#include "procsight/errors.hpp"

namespace procsight {

namespace {

bool parse_number(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

std::string render_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

int find_column(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw Error(ErrorCode::missing_column, "MissingColumn: '" + name + "' not found in header");
  }
  return static_cast<int>(it - header.begin());
}

}  // namespace

EventLog parse_csv(std::istream& source, const LogSchema& schema) {
  csv::Table table = csv::read(source, schema.delimiter);
  if (table.header.empty() || table.rows.empty()) {
    throw Error(ErrorCode::empty_log, "EmptyLog: no data rows");
  }

  const int case_col = find_column(table.header, schema.case_id_column);
  const int act_col = find_column(table.header, schema.activity_column);
  const int ts_col = find_column(table.header, schema.timestamp_column);
  int res_col = -1;
  if (schema.resource_column) res_col = find_column(table.header, *schema.resource_column);

  std::set<int> case_attr_cols;
  for (const auto& name : schema.case_attr_columns) case_attr_cols.insert(find_column(table.header, name));

  // Remaining columns are event attributes; a column is numeric iff every
  // non-empty value parses as a number (mixed content demotes to categorical).
  std::vector<int> attr_cols;
  for (int c = 0; c < static_cast<int>(table.header.size()); ++c) {
    if (c == case_col || c == act_col || c == ts_col || c == res_col) continue;
    attr_cols.push_back(c);
  }
  std::vector<bool> numeric(table.header.size(), true);
  std::vector<bool> has_value(table.header.size(), false);
  for (const auto& row : table.rows) {
    for (int c : attr_cols) {
      const std::string& cell = row[c];
      if (cell.empty()) continue;
      has_value[c] = true;
      double unused;
      if (!parse_number(cell, unused)) numeric[c] = false;
    }
  }

  struct PendingCase {
    Trace trace;
    std::vector<int> order;  // input order, for the stable sort tie-break
  };
  std::vector<std::string> case_order;
  std::unordered_map<std::string, PendingCase> cases;

  int row_number = 1;  // header is row 1
  for (const auto& row : table.rows) {
    ++row_number;
    const std::string& case_id = row[case_col];
    Event ev;
    ev.case_id = case_id;
    ev.activity = row[act_col];
    if (ev.activity.empty()) {
      throw Error(ErrorCode::bad_row, "BadRow: row " + std::to_string(row_number) + ": empty activity");
    }
    try {
      ev.timestamp = parse_timestamp(row[ts_col], schema.timestamp_format);
    } catch (const Error&) {
      throw Error(ErrorCode::bad_timestamp, "BadTimestamp: row " + std::to_string(row_number) +
                                                ", value '" + row[ts_col] + "'");
    }
    if (res_col >= 0 && !row[res_col].empty()) ev.resource = row[res_col];

    auto [it, inserted] = cases.try_emplace(case_id);
    if (inserted) {
      it->second.trace.case_id = case_id;
      case_order.push_back(case_id);
    }
    PendingCase& pending = it->second;

    for (int c : attr_cols) {
      const std::string& cell = row[c];
      const std::string& name = table.header[c];
      bool is_case_attr = case_attr_cols.count(c) > 0;
      if (is_case_attr) {
        if (pending.trace.case_attrs.count(name)) continue;  // first non-empty value wins
        if (cell.empty()) continue;
        if (numeric[c]) {
          double v;
          parse_number(cell, v);
          pending.trace.case_attrs.emplace(name, v);
        } else {
          pending.trace.case_attrs.emplace(name, cell);
        }
      } else {
        if (cell.empty()) continue;  // missing values stay absent
        if (numeric[c]) {
          double v;
          parse_number(cell, v);
          ev.numeric_attrs.emplace(name, v);
        } else {
          ev.categorical_attrs.emplace(name, cell);
        }
      }
    }
    pending.order.push_back(static_cast<int>(pending.trace.events.size()));
    pending.trace.events.push_back(std::move(ev));
  }

  EventLog log;
  log.schema = schema;
  for (const auto& case_id : case_order) {
    PendingCase& pending = cases[case_id];
    auto& events = pending.trace.events;
    std::vector<int> idx(events.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return events[a].timestamp < events[b].timestamp; });
    std::vector<Event> sorted;
    sorted.reserve(events.size());
    for (int i : idx) sorted.push_back(std::move(events[i]));
    pending.trace.events = std::move(sorted);
    log.traces.push_back(std::move(pending.trace));
  }
  if (log.traces.empty()) throw Error(ErrorCode::empty_log, "EmptyLog: no traces");
  return log;
}

void write_csv(const EventLog& log, std::ostream& out) {
  const LogSchema& schema = log.schema;
  std::set<std::string> case_attr_names;
  std::set<std::string> event_attr_names;
  for (const auto& trace : log.traces) {
    for (const auto& [name, _] : trace.case_attrs) case_attr_names.insert(name);
    for (const auto& ev : trace.events) {
      for (const auto& [name, _] : ev.numeric_attrs) event_attr_names.insert(name);
      for (const auto& [name, _] : ev.categorical_attrs) event_attr_names.insert(name);
    }
  }

  std::vector<std::string> header = {schema.case_id_column, schema.activity_column,
                                     schema.timestamp_column};
  if (schema.resource_column) header.push_back(*schema.resource_column);
  for (const auto& n : case_attr_names) header.push_back(n);
  for (const auto& n : event_attr_names) header.push_back(n);
  csv::write_row(out, header, schema.delimiter);

  for (const auto& trace : log.traces) {
    for (const auto& ev : trace.events) {
      std::vector<std::string> row = {trace.case_id, ev.activity,
                                      format_timestamp(ev.timestamp, schema.timestamp_format)};
      if (schema.resource_column) row.push_back(ev.resource.value_or(""));
      for (const auto& n : case_attr_names) {
        auto it = trace.case_attrs.find(n);
        if (it == trace.case_attrs.end()) {
          row.emplace_back();
        } else if (std::holds_alternative<double>(it->second)) {
          row.push_back(render_number(std::get<double>(it->second)));
        } else {
          row.push_back(std::get<std::string>(it->second));
        }
      }
      for (const auto& n : event_attr_names) {
        if (auto it = ev.numeric_attrs.find(n); it != ev.numeric_attrs.end()) {
          row.push_back(render_number(it->second));
        } else if (auto jt = ev.categorical_attrs.find(n); jt != ev.categorical_attrs.end()) {
          row.push_back(jt->second);
        } else {
          row.emplace_back();
        }
      }
      csv::write_row(out, row, schema.delimiter);
    }
  }
}

LabeledLog label_outcome(const EventLog& log, const LabelingRule& rule) {
  if (log.traces.empty()) throw Error(ErrorCode::empty_log, "EmptyLog: nothing to label");

  LabeledLog labeled;
  labeled.task = Task::classify;
  int positives = 0;
  for (const auto& trace : log.traces) {
    LabeledTrace entry;
    entry.trace = trace;
    if (rule.variant == LabelingRule::Variant::activity_occurs) {
      auto hit = std::find_if(trace.events.begin(), trace.events.end(),
                              [&](const Event& e) { return e.activity == rule.activity; });
      entry.label = hit != trace.events.end() ? 1 : 0;
      if (entry.label == 1 && rule.truncate) {
        auto cut = static_cast<std::size_t>(hit - trace.events.begin());
        if (cut == 0) {
          // The label activity opens the trace; cutting before it leaves
          // nothing to predict from, so the case is dropped and counted.
          ++labeled.dropped_empty_after_truncation;
          continue;
        }
        entry.trace.events.resize(cut);
      }
    } else {
      bool positive = true;
      for (std::size_t i = 0; i < trace.events.size(); ++i) {
        if (trace.events[i].activity != rule.first) continue;
        bool followed = false;
        for (std::size_t j = i + 1; j < trace.events.size(); ++j) {
          if (trace.events[j].activity == rule.second) {
            followed = true;
            break;
          }
        }
        if (!followed) {
          positive = false;
          break;
        }
      }
      entry.label = positive ? 1 : 0;
    }
    positives += entry.label;
    labeled.entries.push_back(std::move(entry));
  }
  labeled.degenerate_labels =
      positives == 0 || positives == static_cast<int>(labeled.entries.size());
  return labeled;
}

LabeledLog remaining_time_targets(const EventLog& log) {
  if (log.traces.empty()) throw Error(ErrorCode::empty_log, "EmptyLog: nothing to label");

  LabeledLog labeled;
  labeled.task = Task::regress;
  for (const auto& trace : log.traces) {
    LabeledTrace entry;
    entry.trace = trace;
    const TimestampMs end = trace.events.back().timestamp;
    entry.remaining_seconds.reserve(trace.events.size());
    for (const auto& ev : trace.events) {
      entry.remaining_seconds.push_back(static_cast<double>(end - ev.timestamp) / 1000.0);
    }
    labeled.entries.push_back(std::move(entry));
  }
  return labeled;
}

}  // namespace procsight
