#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "procsight/event_log.hpp"

namespace procsight {

/// AUC by the Mann-Whitney formulation P(s+ > s-) + P(s+ = s-)/2, computed
/// with average ranks so ties are exact. Throws SingleClass when a class is
/// missing.
double auc(const Eigen::VectorXd& scores, const std::vector<int>& labels);

/// F1 on the positive class; empty precision/recall denominators count as 0.
double f1(const std::vector<int>& predictions, const std::vector<int>& labels);

double mae(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets);

enum class ThresholdDirection { at_least, at_most };

struct EarlinessResult {
  double threshold = 0.0;
  std::optional<int> earliness;  // smallest l meeting the threshold
};

EarlinessResult earliness(const std::map<int, double>& per_prefix_curve, double threshold,
                          ThresholdDirection direction);

/// Temporal holdout: cases ordered by first-event timestamp (ties by case id),
/// earliest fraction to train. No case straddles the split.
std::pair<LabeledLog, LabeledLog> temporal_split(const LabeledLog& log, double train_fraction);

struct PrefixCell {
  std::optional<double> metric;  // absent when undefined (e.g. one-class AUC cell)
  int n = 0;
  bool low_support = false;  // fewer than 5 test prefixes
};

struct EvalResult {
  Task task = Task::classify;
  double overall = 0.0;  // AUC for classify, MAE for regress
  std::optional<double> overall_f1;
  std::map<int, PrefixCell> per_prefix_length;
  int skipped_no_bucket = 0;
  std::optional<EarlinessResult> earliness_result;
};

}  // namespace procsight
