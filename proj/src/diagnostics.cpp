#include "procsight/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "procsight/errors.hpp"

namespace procsight {

namespace {

constexpr int kTopImportance = 10;

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double ma = a.mean();
  const double mb = b.mean();
  const double va = (a.array() - ma).square().sum();
  const double vb = (b.array() - mb).square().sum();
  if (va == 0.0 || vb == 0.0) return 0.0;
  const double cov = ((a.array() - ma) * (b.array() - mb)).sum();
  return cov / std::sqrt(va * vb);
}

}  // namespace

const char* severity_name(Severity s) {
  switch (s) {
    case Severity::info: return "info";
    case Severity::warn: return "warn";
    case Severity::critical: return "critical";
  }
  return "info";
}

LeakageReport leakage_scan(const Eigen::MatrixXd& X, const std::vector<FeatureName>& names,
                           const Eigen::VectorXd& labels, double threshold,
                           const GbtModel* model) {
  if (threshold <= 0.0 || threshold > 1.0) {
    throw Error(ErrorCode::bad_config, "BadConfig: leakage threshold must be in (0,1]");
  }
  const double mean = labels.mean();
  if ((labels.array() - mean).square().sum() == 0.0) {
    throw Error(ErrorCode::zero_variance_label, "ZeroVarianceLabel: labels are constant");
  }

  std::map<int, int> rank_of;  // column -> 1-based importance rank
  if (model != nullptr) {
    const GlobalImportance importance = feature_importance(*model);
    const auto ranking = importance.ranking();
    for (int r = 0; r < static_cast<int>(ranking.size()); ++r) {
      if (importance.values(ranking[r]) > 0) rank_of[ranking[r]] = r + 1;
    }
  }

  LeakageReport report;
  report.threshold = threshold;
  for (int j = 0; j < X.cols(); ++j) {
    LeakageFinding finding;
    finding.column = j;
    finding.feature = j < static_cast<int>(names.size()) ? names[j].render()
                                                         : "feature_" + std::to_string(j);
    finding.correlation = pearson(X.col(j), labels);
    finding.flagged = std::abs(finding.correlation) >= threshold;
    auto it = rank_of.find(j);
    if (it != rank_of.end()) finding.importance_rank = it->second;
    if (finding.flagged) {
      finding.severity = (finding.importance_rank >= 1 && finding.importance_rank <= kTopImportance)
                             ? Severity::critical
                             : Severity::warn;
    }
    report.any_critical = report.any_critical || finding.severity == Severity::critical;
    report.per_feature.push_back(std::move(finding));
  }
  return report;
}

LeakageReport leakage_scan(const FeatureMatrix& matrix, double threshold, const GbtModel* model) {
  return leakage_scan(matrix.rows, matrix.spec.names, matrix.targets, threshold, model);
}

AvailabilityReport availability_scan(const EventLog& log, const GbtModel* model,
                                     const std::vector<FeatureName>* model_feature_names,
                                     int query_prefix_len) {
  struct Occurrence {
    int min_first_index = 0;
    int support = 0;
  };
  std::map<std::string, Occurrence> activities;
  std::map<std::string, Occurrence> resources;

  auto record = [](std::map<std::string, Occurrence>& table, const std::string& value, int index) {
    auto [it, inserted] = table.try_emplace(value);
    if (inserted || index < it->second.min_first_index) it->second.min_first_index = index;
    ++it->second.support;
  };

  for (const auto& trace : log.traces) {
    std::set<std::string> seen_act, seen_res;
    for (int i = 0; i < static_cast<int>(trace.events.size()); ++i) {
      const Event& ev = trace.events[i];
      if (seen_act.insert(ev.activity).second) record(activities, ev.activity, i + 1);
      if (ev.resource && seen_res.insert(*ev.resource).second) record(resources, *ev.resource, i + 1);
    }
  }

  AvailabilityReport report;
  report.query_prefix_len = query_prefix_len;
  for (const auto& [value, occ] : activities) {
    report.entries.push_back({value, "activity", occ.min_first_index, occ.support});
  }
  for (const auto& [value, occ] : resources) {
    report.entries.push_back({value, "resource", occ.min_first_index, occ.support});
  }

  if (model != nullptr && model_feature_names != nullptr) {
    // A value referenced by a top-importance feature whose earliest possible
    // occurrence lies beyond the query length cannot inform the prediction.
    auto min_index_of = [&](const std::string& value) -> int {
      int best = 0;
      if (auto it = activities.find(value); it != activities.end()) best = it->second.min_first_index;
      if (auto it = resources.find(value); it != resources.end()) {
        if (best == 0 || it->second.min_first_index < best) best = it->second.min_first_index;
      }
      return best;
    };

    const GlobalImportance importance = feature_importance(*model);
    const auto ranking = importance.ranking();
    const int top = std::min<int>(kTopImportance, static_cast<int>(ranking.size()));
    for (int r = 0; r < top; ++r) {
      const int col = ranking[r];
      if (importance.values(col) <= 0) break;
      if (col >= static_cast<int>(model_feature_names->size())) continue;
      const FeatureName& name = (*model_feature_names)[col];
      if (name.kind != FeatureKind::agg_count && name.kind != FeatureKind::index_attr) continue;
      const int min_index = min_index_of(name.payload);
      if (min_index > query_prefix_len && min_index > 0) {
        report.flagged.push_back({name.render(), name.payload, min_index, r + 1});
      }
    }
  }
  return report;
}

SparsityReport sparsity_report(const FeatureMatrix& matrix, int raw_attr_count) {
  SparsityReport report;
  report.n_raw_attributes = raw_attr_count;
  report.n_encoded_features = matrix.spec.width();
  report.growth = raw_attr_count > 0
                      ? static_cast<double>(report.n_encoded_features) / raw_attr_count
                      : 0.0;

  const auto count_nonzero = [&](int col_begin, int col_end) {
    long nz = 0;
    for (int i = 0; i < matrix.rows.rows(); ++i) {
      for (int j = col_begin; j < col_end; ++j) nz += matrix.rows(i, j) != 0.0;
    }
    return nz;
  };

  const long total = static_cast<long>(matrix.rows.rows()) * matrix.rows.cols();
  report.density = total > 0 ? static_cast<double>(count_nonzero(0, matrix.rows.cols())) / total : 0.0;

  // Per-block densities follow the spec's column layout.
  const FeatureSpec& spec = matrix.spec;
  int col = 0;
  auto add_block = [&](const std::string& label, int width) {
    if (width <= 0 || matrix.rows.rows() == 0) return;
    const long cells = static_cast<long>(matrix.rows.rows()) * width;
    report.per_block_density[label] = static_cast<double>(count_nonzero(col, col + width)) / cells;
    col += width;
  };
  for (const auto& block : spec.static_blocks) {
    add_block("static__" + block.attr, block.numeric ? 1 : static_cast<int>(block.values.size()));
  }
  if (spec.kind == EncodingKind::aggregation) {
    add_block("agg_counts", static_cast<int>(spec.agg_values.size()));
    add_block("agg_stats", static_cast<int>(spec.numeric_event_attrs.size()) * 5);
  } else {
    add_block("index", spec.max_index * static_cast<int>(spec.activity_vocab.size() +
                                                         spec.resource_vocab.size()));
  }
  if (spec.engineered) add_block("engineered", 7);
  return report;
}

}  // namespace procsight
