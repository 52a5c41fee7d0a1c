#pragma once

// Synthetic event-log builders shared by the unit and acceptance suites.
// Everything is seeded and deterministic.

#include <random>
#include <string>
#include <vector>

#include "procsight/event_log.hpp"

namespace procsight::testing {

constexpr TimestampMs kEpoch = 1577836800000;  // 2020-01-01 00:00:00 UTC

inline Event make_event(const std::string& case_id, const std::string& activity, TimestampMs ts,
                        const std::string& resource = {}) {
  Event ev;
  ev.case_id = case_id;
  ev.activity = activity;
  ev.timestamp = ts;
  if (!resource.empty()) ev.resource = resource;
  return ev;
}

/// Events `step_seconds` apart, starting at `start`.
inline Trace make_trace(const std::string& case_id, const std::vector<std::string>& activities,
                        TimestampMs start = kEpoch, double step_seconds = 60.0) {
  Trace trace;
  trace.case_id = case_id;
  TimestampMs ts = start;
  for (const auto& act : activities) {
    trace.events.push_back(make_event(case_id, act, ts));
    ts += static_cast<TimestampMs>(step_seconds * 1000);
  }
  return trace;
}

inline EventLog make_log(std::vector<Trace> traces) {
  EventLog log;
  log.traces = std::move(traces);
  log.schema.case_id_column = "case_id";
  log.schema.activity_column = "activity";
  log.schema.timestamp_column = "timestamp";
  return log;
}

/// Random-activity log. Trace i starts i minutes after the epoch so the
/// temporal split is unambiguous.
inline EventLog random_log(int n_traces, std::uint64_t seed, int min_len = 3, int max_len = 10,
                           int n_activities = 6) {
  std::mt19937_64 rng(seed);
  std::vector<Trace> traces;
  for (int i = 0; i < n_traces; ++i) {
    const int len = min_len + static_cast<int>(rng() % (max_len - min_len + 1));
    std::vector<std::string> acts;
    for (int j = 0; j < len; ++j) {
      acts.push_back(std::string(1, static_cast<char>('A' + rng() % n_activities)));
    }
    traces.push_back(make_trace("case_" + std::to_string(i), acts, kEpoch + i * 60'000LL));
  }
  return make_log(std::move(traces));
}

/// Separable outcome task: positive traces open with activity "K", so every
/// prefix already carries the signal.
inline EventLog separable_outcome_log(int n_traces, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Trace> traces;
  for (int i = 0; i < n_traces; ++i) {
    const bool positive = rng() % 2 == 0;
    const int len = 4 + static_cast<int>(rng() % 6);
    std::vector<std::string> acts;
    if (positive) acts.push_back("K");
    while (static_cast<int>(acts.size()) < len) {
      acts.push_back(std::string(1, static_cast<char>('A' + rng() % 5)));
    }
    traces.push_back(make_trace("case_" + std::to_string(i), acts, kEpoch + i * 60'000LL));
  }
  return make_log(std::move(traces));
}

/// Deterministic remaining time: every trace has `len` events 10 s apart, so
/// the target at prefix length l is exactly 10 * (len - l).
inline EventLog fixed_step_log(int n_traces, int len, double step_seconds = 10.0) {
  std::vector<Trace> traces;
  for (int i = 0; i < n_traces; ++i) {
    std::vector<std::string> acts;
    for (int j = 0; j < len; ++j) {
      acts.push_back(std::string(1, static_cast<char>('A' + j % 4)));
    }
    traces.push_back(
        make_trace("case_" + std::to_string(i), acts, kEpoch + i * 3'600'000LL, step_seconds));
  }
  return make_log(std::move(traces));
}

/// Planted-leakage fixture: the label depends on activity "K" with some
/// noise, and the numeric case attribute `leak` copies the label verbatim,
/// so the encoded column static__leak equals the label exactly.
inline EventLog planted_leak_log(int n_traces, std::uint64_t seed, double noise = 0.3) {
  std::mt19937_64 rng(seed);
  auto coin = [&](double p) { return (rng() >> 11) * 0x1.0p-53 < p; };
  std::vector<Trace> traces;
  for (int i = 0; i < n_traces; ++i) {
    const bool has_k = coin(0.5);
    const bool label = coin(noise) ? !has_k : has_k;
    const int len = 4 + static_cast<int>(rng() % 4);
    std::vector<std::string> acts;
    if (has_k) acts.push_back("K");
    while (static_cast<int>(acts.size()) < len) {
      acts.push_back(std::string(1, static_cast<char>('A' + rng() % 5)));
    }
    Trace trace = make_trace("case_" + std::to_string(i), acts, kEpoch + i * 60'000LL);
    trace.case_attrs.emplace("leak", label ? 1.0 : 0.0);
    // "label_marker" closes positive traces so an activity_occurs rule labels them
    if (label) trace.events.push_back(make_event(trace.case_id, "label_marker",
                                                 trace.events.back().timestamp + 60'000));
    traces.push_back(std::move(trace));
  }
  return make_log(std::move(traces));
}

/// Order-signal log for EventuallyFollowed(X, Y) labeling: aggregation counts
/// cannot see order, so no single encoded column correlates strongly with the
/// label. Backs the "clean audit" scenarios.
inline EventLog order_signal_log(int n_traces, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::vector<std::string> pool = {"A", "B", "C", "D", "X", "Y"};
  std::vector<Trace> traces;
  for (int i = 0; i < n_traces; ++i) {
    const int len = 5 + static_cast<int>(rng() % 5);
    std::vector<std::string> acts;
    for (int j = 0; j < len; ++j) acts.push_back(pool[rng() % pool.size()]);
    traces.push_back(make_trace("case_" + std::to_string(i), acts, kEpoch + i * 60'000LL));
  }
  return make_log(std::move(traces));
}

/// Availability fixture: half the traces contain activity "Z", always first
/// at position `z_position`.
inline EventLog availability_log(int n_traces, int z_position, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Trace> traces;
  for (int i = 0; i < n_traces; ++i) {
    const bool has_z = i % 2 == 0;
    const int len = z_position + 2 + static_cast<int>(rng() % 3);
    std::vector<std::string> acts;
    for (int j = 1; j <= len; ++j) {
      if (has_z && j == z_position) {
        acts.push_back("Z");
      } else {
        acts.push_back(std::string(1, static_cast<char>('A' + rng() % 4)));
      }
    }
    traces.push_back(make_trace("case_" + std::to_string(i), acts, kEpoch + i * 60'000LL));
  }
  return make_log(std::move(traces));
}

}  // namespace procsight::testing
