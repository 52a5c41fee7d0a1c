#include "procsight/explainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "procsight/errors.hpp"

namespace procsight {

namespace {

std::string trim_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Greedy squared-error regression tree (the interpretable surrogate)
// ---------------------------------------------------------------------------

struct CartBuilder {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  int max_depth;
  std::vector<TreeNode> nodes;

  int build(std::vector<int> members, int depth) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();

    double sum = 0, sum2 = 0;
    for (int r : members) {
      sum += y(r);
      sum2 += y(r) * y(r);
    }
    const double n = static_cast<double>(members.size());
    const double sse_parent = sum2 - sum * sum / n;

    int best_feature = -1;
    double best_threshold = 0, best_gain = 1e-12;
    if (depth < max_depth && members.size() >= 2) {
      for (int f = 0; f < X.cols(); ++f) {
        std::vector<int> order = members;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return X(a, f) < X(b, f); });
        double ls = 0, ls2 = 0;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          const int r = order[i];
          ls += y(r);
          ls2 += y(r) * y(r);
          const double v = X(r, f);
          const double next = X(order[i + 1], f);
          if (next <= v) continue;
          const double nl = static_cast<double>(i + 1);
          const double nr = n - nl;
          const double rs = sum - ls;
          const double rs2 = sum2 - ls2;
          const double gain = sse_parent - (ls2 - ls * ls / nl) - (rs2 - rs * rs / nr);
          if (gain > best_gain + 1e-12) {
            best_gain = gain;
            best_feature = f;
            best_threshold = v + (next - v) / 2.0;
          }
        }
      }
    }

    if (best_feature < 0) {
      nodes[id].leaf = true;
      nodes[id].weight = sum / n;
      return id;
    }

    std::vector<int> left, right;
    for (int r : members) {
      (X(r, best_feature) < best_threshold ? left : right).push_back(r);
    }
    nodes[id].leaf = false;
    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    nodes[id].gain = best_gain;
    nodes[id].left = build(std::move(left), depth + 1);
    nodes[id].right = build(std::move(right), depth + 1);
    return id;
  }
};

double r_squared(const Eigen::VectorXd& truth, const Eigen::VectorXd& approx) {
  const double mean = truth.mean();
  const double ss_tot = (truth.array() - mean).square().sum();
  if (ss_tot == 0.0) return 1.0;  // constant target: perfect by convention
  const double ss_res = (truth - approx).array().square().sum();
  return 1.0 - ss_res / ss_tot;
}

double agreement_rate(const Eigen::VectorXd& truth, const Eigen::VectorXd& approx) {
  int agree = 0;
  for (int i = 0; i < truth.size(); ++i) {
    agree += (truth(i) >= 0.5) == (approx(i) >= 0.5);
  }
  return static_cast<double>(agree) / static_cast<double>(truth.size());
}

void render_tree_rules(const SurrogateTree& tree, const std::vector<FeatureName>& names, int node,
                       int depth, std::ostringstream& os) {
  const TreeNode& nd = tree.nodes[node];
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (nd.leaf) {
    os << pad << "-> " << trim_number(nd.weight) << "\n";
    return;
  }
  const std::string fname =
      nd.feature < static_cast<int>(names.size()) ? names[nd.feature].render()
                                                  : "feature_" + std::to_string(nd.feature);
  os << pad << "if " << fname << " < " << trim_number(nd.threshold) << ":\n";
  render_tree_rules(tree, names, nd.left, depth + 1, os);
  os << pad << "else:\n";
  render_tree_rules(tree, names, nd.right, depth + 1, os);
}

}  // namespace

PredictFn predictor(const GbtModel& model) {
  return [model](const Eigen::RowVectorXd& row) { return model.predict_row(row); };
}

double lime_kernel(double distance, double width) {
  return std::exp(-(distance * distance) / (width * width));
}

double SurrogateTree::predict_row(const Eigen::RowVectorXd& row) const {
  int node = 0;
  while (!nodes[node].leaf) {
    node = row(nodes[node].feature) < nodes[node].threshold ? nodes[node].left : nodes[node].right;
  }
  return nodes[node].weight;
}

double SurrogateModel::predict_row(const Eigen::RowVectorXd& row) const {
  if (kind == SurrogateKind::linear) return intercept + coefficients.dot(row);
  return tree.predict_row(row);
}

std::string SurrogateModel::render(const std::vector<FeatureName>& names) const {
  std::ostringstream os;
  if (kind == SurrogateKind::linear) {
    os << "intercept " << trim_number(intercept) << "\n";
    std::vector<int> order(coefficients.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(coefficients(a)) > std::abs(coefficients(b));
    });
    for (int j : order) {
      if (coefficients(j) == 0.0) continue;
      const std::string fname = j < static_cast<int>(names.size())
                                    ? names[j].render()
                                    : "feature_" + std::to_string(j);
      os << (coefficients(j) >= 0 ? "+" : "") << trim_number(coefficients(j)) << " * " << fname
         << "\n";
    }
  } else {
    render_tree_rules(tree, names, 0, 0, os);
  }
  return os.str();
}

SurrogateModel fit_global_surrogate(const Eigen::MatrixXd& X, const PredictFn& blackbox,
                                    SurrogateKind kind, Task task, int tree_max_depth) {
  const int n = static_cast<int>(X.rows());
  if (n < 1) throw Error(ErrorCode::too_few_cases, "TooFewCases: empty X");

  Eigen::VectorXd preds(n);
  for (int i = 0; i < n; ++i) preds(i) = blackbox(X.row(i));

  SurrogateModel surrogate;
  surrogate.kind = kind;
  surrogate.task = task;

  if (kind == SurrogateKind::linear) {
    Eigen::MatrixXd design(n, X.cols() + 1);
    design.col(0).setOnes();
    design.rightCols(X.cols()) = X;
    Eigen::VectorXd beta = design.colPivHouseholderQr().solve(preds);
    surrogate.intercept = beta(0);
    surrogate.coefficients = beta.tail(X.cols());
  } else {
    CartBuilder builder{X, preds, tree_max_depth, {}};
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    builder.build(std::move(all), 0);
    surrogate.tree.nodes = std::move(builder.nodes);
  }

  Eigen::VectorXd approx(n);
  for (int i = 0; i < n; ++i) approx(i) = surrogate.predict_row(X.row(i));
  surrogate.fidelity =
      task == Task::classify ? agreement_rate(preds, approx) : r_squared(preds, approx);
  return surrogate;
}

ColumnStats ColumnStats::from_matrix(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  ColumnStats stats;
  stats.mean.resize(d);
  stats.stddev.resize(d);
  stats.quartiles.resize(3, d);
  stats.is_binary.resize(d);

  std::vector<double> column(n);
  for (int j = 0; j < d; ++j) {
    stats.mean(j) = X.col(j).mean();
    stats.stddev(j) = std::sqrt((X.col(j).array() - stats.mean(j)).square().sum() / n);
    bool binary = true;
    for (int i = 0; i < n; ++i) {
      column[i] = X(i, j);
      binary = binary && (column[i] == 0.0 || column[i] == 1.0);
    }
    stats.is_binary[j] = binary;
    std::sort(column.begin(), column.end());
    for (int q = 1; q <= 3; ++q) {
      const double pos = 0.25 * q * (n - 1);
      const int lo = static_cast<int>(pos);
      const int hi = std::min(lo + 1, n - 1);
      stats.quartiles(q - 1, j) = column[lo] + (pos - lo) * (column[hi] - column[lo]);
    }
  }
  return stats;
}

namespace {

struct Condition {
  int column = -1;
  std::string text;
  // Bin over (lo, hi]; binary conditions use the same mechanism with
  // lo/hi at the 0/1 boundary.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double evaluate(double v) const { return (v > lo && v <= hi) ? 1.0 : 0.0; }
};

Condition make_condition(const std::string& name, double instance_value, bool binary,
                         const Eigen::Vector3d& q) {
  Condition c;
  if (binary) {
    if (instance_value > 0.5) {
      c.text = name + " > 0";
      c.lo = 0.5;
    } else {
      c.text = name + " <= 0";
      c.hi = 0.5;
    }
    return c;
  }
  if (instance_value <= q(0)) {
    c.text = name + " <= " + trim_number(q(0));
    c.hi = q(0);
  } else if (instance_value <= q(1)) {
    c.text = trim_number(q(0)) + " < " + name + " <= " + trim_number(q(1));
    c.lo = q(0);
    c.hi = q(1);
  } else if (instance_value <= q(2)) {
    c.text = trim_number(q(1)) + " < " + name + " <= " + trim_number(q(2));
    c.lo = q(1);
    c.hi = q(2);
  } else {
    c.text = name + " > " + trim_number(q(2));
    c.lo = q(2);
  }
  return c;
}

/// Contiguous one-hot column ranges of the spec, toggled as a unit.
std::vector<std::pair<int, int>> one_hot_groups(const FeatureSpec& spec) {
  std::vector<std::pair<int, int>> groups;
  int col = 0;
  for (const auto& block : spec.static_blocks) {
    if (block.numeric) {
      ++col;
    } else {
      groups.emplace_back(col, col + static_cast<int>(block.values.size()));
      col += static_cast<int>(block.values.size());
    }
  }
  if (spec.kind == EncodingKind::index) {
    const int act_n = static_cast<int>(spec.activity_vocab.size());
    const int res_n = static_cast<int>(spec.resource_vocab.size());
    for (int idx = 1; idx <= spec.max_index; ++idx) {
      if (act_n > 0) groups.emplace_back(col, col + act_n);
      col += act_n;
      if (res_n > 0) groups.emplace_back(col, col + res_n);
      col += res_n;
    }
  }
  return groups;
}

}  // namespace

LocalExplanation explain_local(const PredictFn& blackbox, const Eigen::RowVectorXd& instance,
                               const FeatureSpec& spec, const ColumnStats& stats,
                               const LocalParams& params) {
  const int d = static_cast<int>(instance.size());
  if (d != spec.width()) {
    throw Error(ErrorCode::width_mismatch, "WidthMismatch: instance width vs spec");
  }
  const double width = params.kernel_width.value_or(0.75 * std::sqrt(static_cast<double>(d)));
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw Error(ErrorCode::non_finite_kernel, "NonFiniteKernel: kernel_width must be positive");
  }
  const int n = std::max(2, params.n_samples);

  const auto groups = one_hot_groups(spec);
  std::vector<bool> grouped(d, false);
  for (const auto& [lo, hi] : groups) {
    for (int j = lo; j < hi; ++j) grouped[j] = true;
  }

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::MatrixXd samples(n, d);
  samples.row(0) = instance;  // the instance itself, kernel weight 1
  for (int i = 1; i < n; ++i) {
    Eigen::RowVectorXd row = instance;
    for (const auto& [lo, hi] : groups) {
      if (uniform(rng) < 0.5) continue;
      int active = -1;
      for (int j = lo; j < hi; ++j) {
        if (row(j) > 0.5) {
          active = j;
          break;
        }
      }
      row.segment(lo, hi - lo).setZero();
      if (active < 0) {
        const int pick = lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo));
        row(pick) = 1.0;
      }
    }
    for (int j = 0; j < d; ++j) {
      if (grouped[j]) continue;
      if (stats.is_binary[j]) {
        if (uniform(rng) >= 0.5) row(j) = row(j) > 0.5 ? 0.0 : 1.0;
      } else {
        row(j) = stats.stddev(j) > 0 ? stats.mean(j) + stats.stddev(j) * normal(rng)
                                     : stats.mean(j);
      }
    }
    samples.row(i) = row;
  }

  Eigen::VectorXd weights(n);
  Eigen::VectorXd outputs(n);
  for (int i = 0; i < n; ++i) {
    double dist2 = 0;
    for (int j = 0; j < d; ++j) {
      if (stats.stddev(j) <= 0) continue;
      const double delta = (samples(i, j) - instance(j)) / stats.stddev(j);
      dist2 += delta * delta;
    }
    weights(i) = lime_kernel(std::sqrt(dist2), width);
    outputs(i) = blackbox(samples.row(i));
  }

  LocalExplanation explanation;
  explanation.prediction = outputs(0);
  explanation.n_samples = n;

  const double w_total = weights.sum();
  const double f_mean = weights.dot(outputs) / w_total;
  const double f_var = (weights.array() * (outputs.array() - f_mean).square()).sum() / w_total;
  // guard against summation dust on an exactly constant black box
  if (f_var <= 1e-18 * std::max(1.0, f_mean * f_mean)) {
    explanation.intercept = f_mean;
    explanation.local_fidelity = 1.0;
    return explanation;
  }

  std::vector<Condition> conditions;
  conditions.reserve(d);
  for (int j = 0; j < d; ++j) {
    const bool binary = grouped[j] || stats.is_binary[j];
    conditions.push_back(
        make_condition(spec.names[j].render(), instance(j), binary, stats.quartiles.col(j)));
    conditions.back().column = j;
  }

  // Weighted correlation of each binarized condition with the output.
  std::vector<std::pair<double, int>> scored;
  Eigen::MatrixXd z(n, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < n; ++i) z(i, j) = conditions[j].evaluate(samples(i, j));
    const double z_mean = weights.dot(z.col(j)) / w_total;
    const double z_var = (weights.array() * (z.col(j).array() - z_mean).square()).sum() / w_total;
    if (z_var <= 0) continue;
    const double cov =
        (weights.array() * (z.col(j).array() - z_mean) * (outputs.array() - f_mean)).sum() / w_total;
    const double corr = cov / std::sqrt(z_var * f_var);
    scored.emplace_back(-std::abs(corr), j);
  }
  std::stable_sort(scored.begin(), scored.end());
  const int k = std::min(params.k_features, static_cast<int>(scored.size()));

  Eigen::MatrixXd design(n, k + 1);
  design.col(0).setOnes();
  for (int s = 0; s < k; ++s) design.col(s + 1) = z.col(scored[s].second);

  const Eigen::VectorXd sw = weights.array().sqrt();
  Eigen::MatrixXd wd = sw.asDiagonal() * design;
  Eigen::VectorXd wf = sw.asDiagonal() * outputs;
  Eigen::MatrixXd gram = wd.transpose() * wd;
  gram.diagonal().array() += 1e-10;
  Eigen::VectorXd beta = gram.ldlt().solve(wd.transpose() * wf);

  explanation.intercept = beta(0);
  for (int s = 0; s < k; ++s) {
    explanation.effects.push_back({conditions[scored[s].second].text, beta(s + 1)});
  }
  std::stable_sort(explanation.effects.begin(), explanation.effects.end(),
                   [](const Effect& a, const Effect& b) { return std::abs(a.weight) > std::abs(b.weight); });

  const Eigen::VectorXd fitted = design * beta;
  const double ss_res = (weights.array() * (outputs - fitted).array().square()).sum() / w_total;
  explanation.local_fidelity = 1.0 - ss_res / f_var;
  return explanation;
}

PdpCurve partial_dependence(const PredictFn& blackbox, const Eigen::MatrixXd& X, int feature_col,
                            int grid_size, const std::string& feature_label) {
  if (feature_col < 0 || feature_col >= X.cols()) {
    throw Error(ErrorCode::unknown_feature, "UnknownFeature: column " + std::to_string(feature_col));
  }
  if (grid_size < 2) throw Error(ErrorCode::bad_config, "BadConfig: grid_size must be >= 2");

  const int n = static_cast<int>(X.rows());
  std::vector<double> column(n);
  for (int i = 0; i < n; ++i) column[i] = X(i, feature_col);
  std::sort(column.begin(), column.end());

  PdpCurve curve;
  curve.feature = feature_label.empty() ? "feature_" + std::to_string(feature_col) : feature_label;
  for (int g = 0; g < grid_size; ++g) {
    const double pos = static_cast<double>(g) / (grid_size - 1) * (n - 1);
    const int lo = static_cast<int>(pos);
    const int hi = std::min(lo + 1, n - 1);
    const double v = column[lo] + (pos - lo) * (column[hi] - column[lo]);
    if (!curve.grid.empty() && v <= curve.grid.back()) continue;  // keep strictly increasing
    curve.grid.push_back(v);
  }

  Eigen::RowVectorXd scratch(X.cols());
  for (double v : curve.grid) {
    double total = 0;
    for (int i = 0; i < n; ++i) {
      scratch = X.row(i);
      scratch(feature_col) = v;
      total += blackbox(scratch);
    }
    curve.mean_prediction.push_back(total / n);
  }
  return curve;
}

PdpCurve partial_dependence(const PredictFn& blackbox, const Eigen::MatrixXd& X,
                            const FeatureSpec& spec, const std::string& feature_name, int grid_size) {
  const int col = find_column(spec, feature_name);
  if (col < 0) throw Error(ErrorCode::unknown_feature, "UnknownFeature: '" + feature_name + "'");
  return partial_dependence(blackbox, X, col, grid_size, feature_name);
}

}  // namespace procsight
