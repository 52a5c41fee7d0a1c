#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "procsight/encoding.hpp"
#include "procsight/learner.hpp"

namespace procsight {

enum class Severity { info, warn, critical };

const char* severity_name(Severity s);

struct LeakageFinding {
  int column = -1;
  std::string feature;
  double correlation = 0.0;
  bool flagged = false;
  int importance_rank = 0;  // 1-based; 0 when no model supplied or unused
  Severity severity = Severity::info;
};

struct LeakageReport {
  double threshold = 0.7;
  std::vector<LeakageFinding> per_feature;  // one per encoded column
  bool any_critical = false;
};

/// Pearson correlation of every encoded column against the binary label
/// (the phi coefficient on indicator columns). |corr| >= threshold flags a
/// column; a flagged column inside the model's top-10 gain importance
/// escalates to critical.
LeakageReport leakage_scan(const Eigen::MatrixXd& X, const std::vector<FeatureName>& names,
                           const Eigen::VectorXd& labels, double threshold,
                           const GbtModel* model = nullptr);

LeakageReport leakage_scan(const FeatureMatrix& matrix, double threshold,
                           const GbtModel* model = nullptr);

struct AvailabilityEntry {
  std::string value;
  std::string kind;  // "activity" or "resource"
  int min_first_index = 0;  // 1-based, over traces containing the value
  int support = 0;
};

struct AvailabilityFlag {
  std::string feature;
  std::string value;
  int min_first_index = 0;
  int importance_rank = 0;
};

struct AvailabilityReport {
  std::vector<AvailabilityEntry> entries;
  int query_prefix_len = 0;
  /// Top-importance features whose underlying value cannot have occurred yet
  /// at the queried prefix length (future-event dependence).
  std::vector<AvailabilityFlag> flagged;
};

AvailabilityReport availability_scan(const EventLog& log, const GbtModel* model,
                                     const std::vector<FeatureName>* model_feature_names,
                                     int query_prefix_len);

struct SparsityReport {
  int n_raw_attributes = 0;
  int n_encoded_features = 0;
  double growth = 0.0;
  double density = 0.0;  // fraction of non-zero entries
  std::map<std::string, double> per_block_density;
};

SparsityReport sparsity_report(const FeatureMatrix& matrix, int raw_attr_count);

}  // namespace procsight
