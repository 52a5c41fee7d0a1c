#include "procsight/encoding.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "procsight/errors.hpp"

namespace procsight {

namespace {

constexpr std::array<AggStat, 5> kStatOrder = {AggStat::min, AggStat::max, AggStat::mean,
                                               AggStat::std_dev, AggStat::sum};

const std::vector<std::string>& engineered_names() {
  static const std::vector<std::string> names = {
      "time_since_last_event", "time_since_case_start", "time_since_midnight",
      "weekday",               "month",                 "event_number",
      "open_cases"};
  return names;
}

void build_names(FeatureSpec& spec) {
  spec.names.clear();
  for (const auto& block : spec.static_blocks) {
    if (block.numeric) {
      spec.names.push_back(FeatureName::static_attr_name(block.attr));
    } else {
      for (const auto& v : block.values) spec.names.push_back(FeatureName::one_hot(block.attr, v));
    }
  }
  if (spec.kind == EncodingKind::aggregation) {
    for (const auto& v : spec.agg_values) spec.names.push_back(FeatureName::agg_count_name(v));
    for (const auto& attr : spec.numeric_event_attrs) {
      for (AggStat stat : kStatOrder) spec.names.push_back(FeatureName::agg_stat_name(stat, attr));
    }
  } else {
    for (int idx = 1; idx <= spec.max_index; ++idx) {
      for (const auto& a : spec.activity_vocab) {
        spec.names.push_back(FeatureName::index_name(IndexField::activity, idx, a));
      }
      for (const auto& r : spec.resource_vocab) {
        spec.names.push_back(FeatureName::index_name(IndexField::resource, idx, r));
      }
    }
  }
  if (spec.engineered) {
    for (const auto& n : engineered_names()) spec.names.push_back(FeatureName::engineered_name(n));
  }
}

}  // namespace

LogContext LogContext::from_log(const EventLog& log) {
  LogContext ctx;
  ctx.spans.reserve(log.traces.size());
  for (const auto& trace : log.traces) {
    ctx.spans.push_back({trace.case_id, trace.events.front().timestamp, trace.events.back().timestamp});
  }
  return ctx;
}

LogContext LogContext::from_labeled(const LabeledLog& log) {
  LogContext ctx;
  ctx.spans.reserve(log.entries.size());
  for (const auto& entry : log.entries) {
    const auto& events = entry.trace.events;
    ctx.spans.push_back({entry.trace.case_id, events.front().timestamp, events.back().timestamp});
  }
  return ctx;
}

FeatureSpec build_spec(const Bucket& bucket, EncodingKind kind, bool engineered) {
  FeatureSpec spec;
  spec.kind = kind;
  spec.engineered = engineered;

  std::map<std::string, bool> case_attr_numeric;      // attr -> numeric?
  std::map<std::string, std::set<std::string>> case_values;
  std::map<std::string, bool> case_attr_missing_somewhere;
  std::map<std::string, std::pair<double, int>> case_sums;  // attr -> (sum, n)
  std::set<std::string> agg_values;
  std::set<std::string> activities;
  std::set<std::string> resources;
  std::map<std::string, std::pair<double, int>> event_sums;

  for (const auto& sample : bucket.samples) {
    const Prefix& p = sample.prefix;
    spec.max_index = std::max(spec.max_index, p.length);
    for (const auto& [attr, value] : p.case_attrs) {
      if (std::holds_alternative<double>(value)) {
        case_attr_numeric[attr] = true;
        auto& [sum, n] = case_sums[attr];
        sum += std::get<double>(value);
        ++n;
      } else {
        case_attr_numeric[attr] = false;
        case_values[attr].insert(std::get<std::string>(value));
      }
    }
    for (const auto& ev : p.events) {
      activities.insert(ev.activity);
      agg_values.insert(ev.activity);
      if (ev.resource) {
        resources.insert(*ev.resource);
        agg_values.insert(*ev.resource);
      }
      for (const auto& [attr, v] : ev.numeric_attrs) {
        auto& [sum, n] = event_sums[attr];
        sum += v;
        ++n;
      }
    }
  }
  // A categorical case attribute absent from some trace gets a dedicated
  // missing category so its block can still one-hot online.
  for (auto& [attr, numeric] : case_attr_numeric) {
    for (const auto& sample : bucket.samples) {
      if (!sample.prefix.case_attrs.count(attr)) {
        case_attr_missing_somewhere[attr] = true;
        break;
      }
    }
  }

  for (const auto& [attr, numeric] : case_attr_numeric) {
    StaticBlock block;
    block.attr = attr;
    block.numeric = numeric;
    if (numeric) {
      const auto& [sum, n] = case_sums[attr];
      spec.case_numeric_means[attr] = n > 0 ? sum / n : 0.0;
    } else {
      auto values = case_values[attr];
      if (case_attr_missing_somewhere[attr]) values.insert(kMissingCategory);
      block.values.assign(values.begin(), values.end());
    }
    spec.static_blocks.push_back(std::move(block));
  }

  spec.agg_values.assign(agg_values.begin(), agg_values.end());
  spec.activity_vocab.assign(activities.begin(), activities.end());
  spec.resource_vocab.assign(resources.begin(), resources.end());
  for (const auto& [attr, acc] : event_sums) {
    spec.numeric_event_attrs.push_back(attr);
    spec.event_numeric_means[attr] = acc.second > 0 ? acc.first / acc.second : 0.0;
  }

  build_names(spec);
  return spec;
}

std::map<std::string, double> engineered_features(const Prefix& prefix, const LogContext& ctx) {
  const Event& last = prefix.events.back();
  const TimestampMs t = last.timestamp;
  std::map<std::string, double> out;
  out["eng__time_since_last_event"] =
      prefix.length >= 2 ? (t - prefix.events[prefix.length - 2].timestamp) / 1000.0 : 0.0;
  out["eng__time_since_case_start"] = (t - prefix.events.front().timestamp) / 1000.0;
  out["eng__time_since_midnight"] = seconds_since_midnight(t);
  out["eng__weekday"] = static_cast<double>(weekday(t));
  out["eng__month"] = static_cast<double>(month(t));
  out["eng__event_number"] = static_cast<double>(prefix.length);
  int open = 0;
  for (const auto& span : ctx.spans) {
    if (span.case_id == prefix.case_id) continue;
    if (span.first <= t && t <= span.last) ++open;
  }
  out["eng__open_cases"] = static_cast<double>(open);
  return out;
}

Eigen::RowVectorXd encode(const Prefix& prefix, const FeatureSpec& spec, const LogContext& ctx) {
  if (spec.kind == EncodingKind::index && prefix.length > spec.max_index) {
    throw Error(ErrorCode::spec_mismatch,
                "SpecMismatch: prefix length " + std::to_string(prefix.length) +
                    " exceeds spec max_index " + std::to_string(spec.max_index));
  }

  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(spec.width());
  int col = 0;

  for (const auto& block : spec.static_blocks) {
    auto it = prefix.case_attrs.find(block.attr);
    if (block.numeric) {
      if (it != prefix.case_attrs.end() && std::holds_alternative<double>(it->second)) {
        row(col) = std::get<double>(it->second);
      } else {
        row(col) = spec.case_numeric_means.at(block.attr);
      }
      ++col;
    } else {
      const std::string* value = nullptr;
      if (it != prefix.case_attrs.end() && std::holds_alternative<std::string>(it->second)) {
        value = &std::get<std::string>(it->second);
      }
      const std::string missing = kMissingCategory;
      const std::string& key = value ? *value : missing;
      auto pos = std::lower_bound(block.values.begin(), block.values.end(), key);
      if (pos != block.values.end() && *pos == key) {
        row(col + static_cast<int>(pos - block.values.begin())) = 1.0;
      }
      col += static_cast<int>(block.values.size());
    }
  }

  if (spec.kind == EncodingKind::aggregation) {
    for (const auto& ev : prefix.events) {
      auto bump = [&](const std::string& v) {
        auto pos = std::lower_bound(spec.agg_values.begin(), spec.agg_values.end(), v);
        if (pos != spec.agg_values.end() && *pos == v) {
          row(col + static_cast<int>(pos - spec.agg_values.begin())) += 1.0;
        }
      };
      bump(ev.activity);
      if (ev.resource && *ev.resource != ev.activity) bump(*ev.resource);
    }
    col += static_cast<int>(spec.agg_values.size());

    for (const auto& attr : spec.numeric_event_attrs) {
      const double mean_impute = spec.event_numeric_means.at(attr);
      double mn = 0, mx = 0, sum = 0, sum2 = 0;
      bool first = true;
      for (const auto& ev : prefix.events) {
        auto it = ev.numeric_attrs.find(attr);
        const double v = it != ev.numeric_attrs.end() ? it->second : mean_impute;
        if (first) {
          mn = mx = v;
          first = false;
        } else {
          mn = std::min(mn, v);
          mx = std::max(mx, v);
        }
        sum += v;
        sum2 += v * v;
      }
      const double n = static_cast<double>(prefix.length);
      const double mean = sum / n;
      // population convention; a single value has std 0
      const double var = std::max(0.0, sum2 / n - mean * mean);
      row(col + 0) = mn;
      row(col + 1) = mx;
      row(col + 2) = mean;
      row(col + 3) = std::sqrt(var);
      row(col + 4) = sum;
      col += 5;
    }
  } else {
    const int act_n = static_cast<int>(spec.activity_vocab.size());
    const int res_n = static_cast<int>(spec.resource_vocab.size());
    for (int idx = 1; idx <= spec.max_index; ++idx) {
      if (idx <= prefix.length) {
        const Event& ev = prefix.events[idx - 1];
        auto pos = std::lower_bound(spec.activity_vocab.begin(), spec.activity_vocab.end(), ev.activity);
        if (pos != spec.activity_vocab.end() && *pos == ev.activity) {
          row(col + static_cast<int>(pos - spec.activity_vocab.begin())) = 1.0;
        }
        if (ev.resource) {
          auto rpos = std::lower_bound(spec.resource_vocab.begin(), spec.resource_vocab.end(), *ev.resource);
          if (rpos != spec.resource_vocab.end() && *rpos == *ev.resource) {
            row(col + act_n + static_cast<int>(rpos - spec.resource_vocab.begin())) = 1.0;
          }
        }
      }
      col += act_n + res_n;
    }
  }

  if (spec.engineered) {
    auto eng = engineered_features(prefix, ctx);
    for (const auto& n : engineered_names()) row(col++) = eng.at("eng__" + n);
  }
  return row;
}

FeatureMatrix encode_bucket(const Bucket& bucket, const FeatureSpec& spec, const LogContext& ctx) {
  FeatureMatrix matrix;
  matrix.spec = spec;
  const int n = static_cast<int>(bucket.samples.size());
  matrix.rows.resize(n, spec.width());
  matrix.targets.resize(n);
  matrix.row_meta.reserve(n);
  for (int i = 0; i < n; ++i) {
    const auto& sample = bucket.samples[i];
    matrix.rows.row(i) = encode(sample.prefix, spec, ctx);
    matrix.targets(i) = sample.target;
    matrix.row_meta.push_back({sample.prefix.case_id, sample.prefix.length});
  }
  return matrix;
}

int find_column(const FeatureSpec& spec, const std::string& rendered_name) {
  for (int i = 0; i < spec.width(); ++i) {
    if (spec.names[i].render() == rendered_name) return i;
  }
  return -1;
}

}  // namespace procsight
