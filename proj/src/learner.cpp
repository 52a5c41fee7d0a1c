#include "procsight/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "procsight/errors.hpp"

namespace procsight {

namespace {

constexpr double kProbFloor = 1e-15;

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

struct SplitCandidate {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

double leaf_objective(double g, double h, double lambda) { return g * g / (h + lambda); }

// Deterministic bounded draw; avoids the implementation-defined
// distributions so the same seed gives the same model everywhere.
std::size_t bounded(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

class TreeBuilder {
 public:
  TreeBuilder(const Eigen::MatrixXd& rows, const std::vector<std::vector<int>>& sorted_order,
              const Eigen::VectorXd& grad, const Eigen::VectorXd& hess, const TrainConfig& config)
      : rows_(rows), sorted_order_(sorted_order), grad_(grad), hess_(hess), config_(config) {}

  Tree build(const std::vector<int>& root_rows) {
    tree_.nodes.clear();
    membership_.assign(rows_.rows(), -1);
    for (int r : root_rows) membership_[r] = 0;
    tree_.nodes.emplace_back();
    grow(0, root_rows, 0);
    return std::move(tree_);
  }

 private:
  void grow(int node, const std::vector<int>& members, int depth) {
    double g = 0, h = 0;
    for (int r : members) {
      g += grad_(r);
      h += hess_(r);
    }
    SplitCandidate best;
    if (depth < config_.max_depth && members.size() >= 2) best = find_split(node, g, h);

    if (!best.found) {
      tree_.nodes[node].leaf = true;
      tree_.nodes[node].weight = -g / (h + config_.l2_reg);
      return;
    }

    std::vector<int> left_rows, right_rows;
    left_rows.reserve(members.size());
    right_rows.reserve(members.size());
    for (int r : members) {
      (rows_(r, best.feature) < best.threshold ? left_rows : right_rows).push_back(r);
    }

    TreeNode& parent = tree_.nodes[node];
    parent.leaf = false;
    parent.feature = best.feature;
    parent.threshold = best.threshold;
    parent.gain = best.gain;
    parent.left = static_cast<int>(tree_.nodes.size());
    parent.right = parent.left + 1;
    tree_.nodes.emplace_back();
    tree_.nodes.emplace_back();
    const int left_id = tree_.nodes[node].left;
    const int right_id = tree_.nodes[node].right;
    for (int r : left_rows) membership_[r] = left_id;
    for (int r : right_rows) membership_[r] = right_id;
    grow(left_id, left_rows, depth + 1);
    grow(right_id, right_rows, depth + 1);
  }

  SplitCandidate find_split(int node, double g_total, double h_total) const {
    SplitCandidate best;
    const double lambda = config_.l2_reg;
    const double parent_obj = leaf_objective(g_total, h_total, lambda);

    for (int f = 0; f < rows_.cols(); ++f) {
      double gl = 0, hl = 0;
      double prev_value = 0;
      bool have_prev = false;
      for (int r : sorted_order_[f]) {
        if (membership_[r] != node) continue;
        const double v = rows_(r, f);
        if (have_prev && v > prev_value) {
          const double gr = g_total - gl;
          const double hr = h_total - hl;
          if (hl >= config_.min_child_weight && hr >= config_.min_child_weight) {
            const double gain =
                0.5 * (leaf_objective(gl, hl, lambda) + leaf_objective(gr, hr, lambda) - parent_obj);
            if (gain > best.gain + 1e-12) {
              best.found = true;
              best.feature = f;
              best.threshold = prev_value + (v - prev_value) / 2.0;
              best.gain = gain;
            }
          }
        }
        gl += grad_(r);
        hl += hess_(r);
        prev_value = v;
        have_prev = true;
      }
    }
    return best;
  }

  const Eigen::MatrixXd& rows_;
  const std::vector<std::vector<int>>& sorted_order_;
  const Eigen::VectorXd& grad_;
  const Eigen::VectorXd& hess_;
  const TrainConfig& config_;
  Tree tree_;
  std::vector<int> membership_;
};

}  // namespace

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logistic_loss(double margin, double y) {
  const double p = clamp_prob(sigmoid(margin));
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

double logistic_gradient(double margin, double y) { return sigmoid(margin) - y; }

double logistic_hessian(double margin, double y) {
  (void)y;
  const double p = sigmoid(margin);
  return std::max(p * (1.0 - p), 1e-16);
}

int Tree::route(const Eigen::RowVectorXd& row) const {
  int node = 0;
  while (!nodes[node].leaf) {
    node = row(nodes[node].feature) < nodes[node].threshold ? nodes[node].left : nodes[node].right;
  }
  return node;
}

double GbtModel::margin(const Eigen::RowVectorXd& row) const {
  if (row.size() != n_features) {
    throw Error(ErrorCode::width_mismatch, "WidthMismatch: row width " + std::to_string(row.size()) +
                                               ", model expects " + std::to_string(n_features));
  }
  double m = base_score;
  for (const auto& tree : trees) m += config.learning_rate * tree.value(row);
  return m;
}

double GbtModel::predict_row(const Eigen::RowVectorXd& row) const {
  const double m = margin(row);
  return task == Task::classify ? clamp_prob(sigmoid(m)) : m;
}

Eigen::VectorXd GbtModel::predict(const Eigen::MatrixXd& rows) const {
  Eigen::VectorXd out(rows.rows());
  for (int i = 0; i < rows.rows(); ++i) out(i) = predict_row(rows.row(i));
  return out;
}

std::vector<int> GlobalImportance::ranking() const {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return values(a) > values(b); });
  return idx;
}

GbtModel train(const Eigen::MatrixXd& rows, const Eigen::VectorXd& targets, const TrainConfig& config,
               const std::string& spec_hash) {
  const int n = static_cast<int>(rows.rows());
  if (n < 2) throw Error(ErrorCode::too_few_cases, "TooFewCases: need at least 2 training rows");
  if (targets.size() != n) {
    throw Error(ErrorCode::length_mismatch, "LengthMismatch: targets vs rows");
  }
  if (config.n_trees < 1 || config.learning_rate <= 0 || config.learning_rate > 1 ||
      config.subsample_ratio <= 0 || config.subsample_ratio > 1) {
    throw Error(ErrorCode::bad_config, "BadConfig: invalid training configuration");
  }

  GbtModel model;
  model.task = config.task;
  model.config = config;
  model.spec_hash = spec_hash;
  model.n_features = static_cast<int>(rows.cols());

  if (config.task == Task::classify) {
    double positives = 0;
    for (int i = 0; i < n; ++i) {
      if (targets(i) != 0.0 && targets(i) != 1.0) {
        throw Error(ErrorCode::bad_config, "BadConfig: classification targets must be 0/1");
      }
      positives += targets(i);
    }
    const double rate = std::clamp(positives / n, 1e-6, 1.0 - 1e-6);
    model.base_score = std::log(rate / (1.0 - rate));
    if (positives == 0 || positives == n) {
      model.degenerate_targets = true;  // base-score-only model
      return model;
    }
  } else {
    model.base_score = targets.mean();
  }

  // Per-feature row order, computed once; ties keep row order so scans are
  // reproducible.
  std::vector<std::vector<int>> sorted_order(rows.cols());
  for (int f = 0; f < rows.cols(); ++f) {
    auto& order = sorted_order[f];
    order.resize(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return rows(a, f) < rows(b, f); });
  }

  std::mt19937_64 rng(config.seed);
  Eigen::VectorXd margins = Eigen::VectorXd::Constant(n, model.base_score);
  Eigen::VectorXd grad(n), hess(n);

  // Optional holdout: the last rows are monitored, never trained on and
  // never used to stop.
  const int n_val = std::clamp(static_cast<int>(config.validation_fraction * n), 0, n - 2);
  const int n_fit = n - n_val;

  std::vector<int> all_rows(n_fit);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  const int sample_size = std::max(2, static_cast<int>(config.subsample_ratio * n_fit));

  for (int round = 0; round < config.n_trees; ++round) {
    for (int i = 0; i < n; ++i) {
      if (config.task == Task::classify) {
        grad(i) = logistic_gradient(margins(i), targets(i));
        hess(i) = logistic_hessian(margins(i), targets(i));
      } else {
        grad(i) = margins(i) - targets(i);
        hess(i) = 1.0;
      }
    }

    std::vector<int> tree_rows = all_rows;
    if (sample_size < n_fit) {
      // Fisher-Yates prefix draw, then restored to ascending order.
      for (int i = 0; i < sample_size; ++i) {
        const std::size_t j = i + bounded(rng, n_fit - i);
        std::swap(tree_rows[i], tree_rows[j]);
      }
      tree_rows.resize(sample_size);
      std::sort(tree_rows.begin(), tree_rows.end());
    }

    TreeBuilder builder(rows, sorted_order, grad, hess, config);
    Tree tree = builder.build(tree_rows);

    for (int i = 0; i < n; ++i) {
      margins(i) += config.learning_rate * tree.value(rows.row(i));
    }
    model.trees.push_back(std::move(tree));

    auto mean_loss = [&](int begin, int end) {
      double loss = 0;
      for (int i = begin; i < end; ++i) {
        loss += config.task == Task::classify
                    ? logistic_loss(margins(i), targets(i))
                    : 0.5 * (margins(i) - targets(i)) * (margins(i) - targets(i));
      }
      return loss / std::max(1, end - begin);
    };
    model.train_loss.push_back(mean_loss(0, n_fit));
    if (n_val > 0) model.validation_loss.push_back(mean_loss(n_fit, n));
  }
  return model;
}

GbtModel train(const FeatureMatrix& matrix, const TrainConfig& config) {
  return train(matrix.rows, matrix.targets, config, std::string{});
}

GlobalImportance feature_importance(const GbtModel& model) {
  GlobalImportance importance;
  importance.values = Eigen::VectorXd::Zero(model.n_features);
  for (const auto& tree : model.trees) {
    for (const auto& node : tree.nodes) {
      if (!node.leaf) importance.values(node.feature) += node.gain;
    }
  }
  const double total = importance.values.sum();
  if (total > 0) importance.values /= total;
  return importance;
}

}  // namespace procsight
