#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "procsight/encoding.hpp"

namespace procsight {

struct TrainConfig {
  int n_trees = 200;
  int max_depth = 4;
  double learning_rate = 0.1;
  double min_child_weight = 1.0;
  double l2_reg = 1.0;  // lambda
  double subsample_ratio = 1.0;
  std::uint64_t seed = 0;
  Task task = Task::classify;
  // Optional holdout monitoring; off by default, never used for stopping.
  double validation_fraction = 0.0;
};

/// One node of a regression tree stored in a flat vector; root at index 0.
struct TreeNode {
  bool leaf = true;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;    // split gain, feeds feature importance
  double weight = 0.0;  // leaf value (unscaled Newton step)
  int left = -1;
  int right = -1;
};

struct Tree {
  std::vector<TreeNode> nodes;

  /// Index of the leaf the row is routed to (strictly-less goes left).
  int route(const Eigen::RowVectorXd& row) const;
  double value(const Eigen::RowVectorXd& row) const { return nodes[route(row)].weight; }
};

/// Boosted-tree ensemble. Margins sum base_score plus learning_rate-scaled
/// leaf weights; classification passes the margin through a sigmoid.
struct GbtModel {
  Task task = Task::classify;
  double base_score = 0.0;
  int n_features = 0;
  std::vector<Tree> trees;
  TrainConfig config;
  std::string spec_hash;
  bool degenerate_targets = false;   // classification with a single label value
  std::vector<double> train_loss;    // mean loss per boosting round (not serialized)
  std::vector<double> validation_loss;

  double margin(const Eigen::RowVectorXd& row) const;
  /// Probability in (0,1) for classify, raw value for regress.
  double predict_row(const Eigen::RowVectorXd& row) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& rows) const;
};

/// Per-feature total split gain, normalized to sum 1 over non-zero entries.
struct GlobalImportance {
  Eigen::VectorXd values;
  /// Column indices sorted by importance, descending (ties by column index).
  std::vector<int> ranking() const;
};

/// Newton boosting with exact greedy splits. Gain for a candidate split is
///   1/2 [ GL^2/(HL+lambda) + GR^2/(HR+lambda) - (GL+GR)^2/(HL+HR+lambda) ]
/// and leaf weights are -G/(H+lambda). Ties break on the lowest feature
/// index, then the lowest threshold, so training is fully deterministic.
GbtModel train(const Eigen::MatrixXd& rows, const Eigen::VectorXd& targets, const TrainConfig& config,
               const std::string& spec_hash = {});

GbtModel train(const FeatureMatrix& matrix, const TrainConfig& config);

GlobalImportance feature_importance(const GbtModel& model);

// Loss primitives, exposed for gradient verification.
double logistic_loss(double margin, double y);
double logistic_gradient(double margin, double y);
double logistic_hessian(double margin, double y);
double sigmoid(double x);

}  // namespace procsight
