#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "procsight/encoding.hpp"
#include "procsight/learner.hpp"

namespace procsight {

/// Everything here is model-agnostic: the black box is just a row->double
/// function (probability for classifiers, value for regressors).
using PredictFn = std::function<double(const Eigen::RowVectorXd&)>;

PredictFn predictor(const GbtModel& model);

enum class SurrogateKind { tree, linear };

/// A small regression tree used as the interpretable surrogate; splits are
/// exact-greedy on squared error.
struct SurrogateTree {
  std::vector<TreeNode> nodes;
  double predict_row(const Eigen::RowVectorXd& row) const;
};

struct SurrogateModel {
  SurrogateKind kind = SurrogateKind::linear;
  Task task = Task::regress;  // decides the fidelity measure
  // linear
  Eigen::VectorXd coefficients;
  double intercept = 0.0;
  // tree
  SurrogateTree tree;
  /// R^2 against the black box for regress (1.0 by convention when the black
  /// box is constant); class-agreement rate at threshold 0.5 for classify.
  double fidelity = 0.0;

  double predict_row(const Eigen::RowVectorXd& row) const;
  /// Human-readable rendering: coefficient table or indented split rules.
  std::string render(const std::vector<FeatureName>& names) const;
};

/// Fits an interpretable model to the black box's predictions over X and
/// measures how faithfully it reproduces them.
SurrogateModel fit_global_surrogate(const Eigen::MatrixXd& X, const PredictFn& blackbox,
                                    SurrogateKind kind, Task task, int tree_max_depth = 3);

/// Per-column training statistics backing perturbation, standardization and
/// quartile binarization. Serialized with the model bundle.
struct ColumnStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;   // population
  Eigen::MatrixXd quartiles;  // 3 x d: q1, q2, q3
  std::vector<bool> is_binary;  // column took only {0,1} in training

  static ColumnStats from_matrix(const Eigen::MatrixXd& X);
};

struct LocalParams {
  int n_samples = 5000;
  std::optional<double> kernel_width;  // default 0.75 * sqrt(d)
  int k_features = 10;
  std::uint64_t seed = 0;
};

/// exp(-dist^2/width^2): 1 at the instance itself, falling off to (0,1].
double lime_kernel(double distance, double width);

struct Effect {
  std::string condition;  // e.g. "agg__A > 0" or "eng__time_since_case_start <= 42.5"
  double weight = 0.0;
};

struct LocalExplanation {
  std::string case_id;
  int prefix_length = 0;
  double prediction = 0.0;
  std::vector<Effect> effects;  // ordered by |weight| descending
  double intercept = 0.0;
  double local_fidelity = 0.0;  // kernel-weighted R^2
  int n_samples = 0;
};

/// LIME-style local surrogate: perturb around the instance (one-hot blocks
/// toggled as a unit, numerics resampled from training statistics), weight
/// samples by exp(-dist^2/width^2) over standardized features, pick the
/// k most output-correlated binarized conditions and fit weighted least
/// squares on them.
LocalExplanation explain_local(const PredictFn& blackbox, const Eigen::RowVectorXd& instance,
                               const FeatureSpec& spec, const ColumnStats& stats,
                               const LocalParams& params);

struct PdpCurve {
  std::string feature;
  std::vector<double> grid;  // strictly increasing
  std::vector<double> mean_prediction;
};

/// Single-feature partial dependence over a quantile grid of the feature's
/// training distribution.
PdpCurve partial_dependence(const PredictFn& blackbox, const Eigen::MatrixXd& X, int feature_col,
                            int grid_size, const std::string& feature_label = {});

PdpCurve partial_dependence(const PredictFn& blackbox, const Eigen::MatrixXd& X,
                            const FeatureSpec& spec, const std::string& feature_name, int grid_size);

}  // namespace procsight
