#include "procsight/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "procsight/errors.hpp"

namespace procsight {

double auc(const Eigen::VectorXd& scores, const std::vector<int>& labels) {
  const int n = static_cast<int>(scores.size());
  if (n != static_cast<int>(labels.size())) {
    throw Error(ErrorCode::length_mismatch, "LengthMismatch: scores vs labels");
  }
  long n_pos = std::count(labels.begin(), labels.end(), 1);
  long n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw Error(ErrorCode::single_class, "SingleClass: AUC needs both classes");
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores(a) < scores(b); });

  // Average ranks over tied score groups make the tie term exact.
  double rank_sum_pos = 0;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j < n && scores(order[j]) == scores(order[i])) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + j) / 2.0;
    for (int k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  return (rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0) /
         (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double f1(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::length_mismatch, "LengthMismatch: predictions vs labels");
  }
  long tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    tp += predictions[i] == 1 && labels[i] == 1;
    fp += predictions[i] == 1 && labels[i] == 0;
    fn += predictions[i] == 0 && labels[i] == 1;
  }
  if (tp == 0) return 0.0;  // covers the empty-positive conventions
  const double precision = static_cast<double>(tp) / (tp + fp);
  const double recall = static_cast<double>(tp) / (tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

double mae(const Eigen::VectorXd& predictions, const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size() || predictions.size() == 0) {
    throw Error(ErrorCode::length_mismatch, "LengthMismatch: predictions vs targets");
  }
  return (predictions - targets).array().abs().mean();
}

EarlinessResult earliness(const std::map<int, double>& per_prefix_curve, double threshold,
                          ThresholdDirection direction) {
  EarlinessResult result;
  result.threshold = threshold;
  for (const auto& [l, metric] : per_prefix_curve) {
    const bool ok = direction == ThresholdDirection::at_least ? metric >= threshold
                                                              : metric <= threshold;
    if (ok) {
      result.earliness = l;
      break;
    }
  }
  return result;
}

std::pair<LabeledLog, LabeledLog> temporal_split(const LabeledLog& log, double train_fraction) {
  if (train_fraction <= 0.0 || train_fraction >= 1.0) {
    throw Error(ErrorCode::bad_config, "BadConfig: train_fraction must be in (0,1)");
  }
  const int n = static_cast<int>(log.entries.size());
  if (n < 2) throw Error(ErrorCode::too_few_cases, "TooFewCases: cannot split fewer than 2 cases");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const TimestampMs ta = log.entries[a].trace.events.front().timestamp;
    const TimestampMs tb = log.entries[b].trace.events.front().timestamp;
    if (ta != tb) return ta < tb;
    return log.entries[a].trace.case_id < log.entries[b].trace.case_id;
  });

  const int n_train = std::clamp(static_cast<int>(train_fraction * n), 1, n - 1);
  LabeledLog train, test;
  train.task = test.task = log.task;
  for (int i = 0; i < n; ++i) {
    (i < n_train ? train : test).entries.push_back(log.entries[order[i]]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace procsight
