#include "procsight/serialize.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "procsight/errors.hpp"

namespace procsight {

namespace {

Json vector_to_json(const Eigen::VectorXd& v) {
  Json arr = Json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd vector_from_json(const Json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<int>(i)) = arr[i].get<double>();
  return v;
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

Json spec_to_json(const FeatureSpec& spec) {
  Json j;
  j["kind"] = spec.kind == EncodingKind::aggregation ? "aggregation" : "index";
  j["engineered"] = spec.engineered;
  j["max_index"] = spec.max_index;
  Json blocks = Json::array();
  for (const auto& block : spec.static_blocks) {
    blocks.push_back({{"attr", block.attr}, {"numeric", block.numeric}, {"values", block.values}});
  }
  j["static_blocks"] = std::move(blocks);
  j["agg_values"] = spec.agg_values;
  j["numeric_event_attrs"] = spec.numeric_event_attrs;
  j["activity_vocab"] = spec.activity_vocab;
  j["resource_vocab"] = spec.resource_vocab;
  j["case_numeric_means"] = spec.case_numeric_means;
  j["event_numeric_means"] = spec.event_numeric_means;
  Json names = Json::array();
  for (const auto& n : spec.names) names.push_back(n.render());
  j["names"] = std::move(names);
  return j;
}

FeatureSpec spec_from_json(const Json& j) {
  FeatureSpec spec;
  spec.kind = j.at("kind").get<std::string>() == "index" ? EncodingKind::index
                                                         : EncodingKind::aggregation;
  spec.engineered = j.at("engineered").get<bool>();
  spec.max_index = j.at("max_index").get<int>();
  for (const auto& b : j.at("static_blocks")) {
    StaticBlock block;
    block.attr = b.at("attr").get<std::string>();
    block.numeric = b.at("numeric").get<bool>();
    block.values = b.at("values").get<std::vector<std::string>>();
    spec.static_blocks.push_back(std::move(block));
  }
  spec.agg_values = j.at("agg_values").get<std::vector<std::string>>();
  spec.numeric_event_attrs = j.at("numeric_event_attrs").get<std::vector<std::string>>();
  spec.activity_vocab = j.at("activity_vocab").get<std::vector<std::string>>();
  spec.resource_vocab = j.at("resource_vocab").get<std::vector<std::string>>();
  spec.case_numeric_means = j.at("case_numeric_means").get<std::map<std::string, double>>();
  spec.event_numeric_means = j.at("event_numeric_means").get<std::map<std::string, double>>();
  for (const auto& n : j.at("names")) spec.names.push_back(FeatureName::parse(n.get<std::string>()));
  return spec;
}

std::string spec_hash(const FeatureSpec& spec) { return fnv1a_hex(spec_to_json(spec).dump()); }

Json model_to_json(const GbtModel& model) {
  Json j;
  j["format_version"] = 1;
  j["task"] = model.task == Task::classify ? "classify" : "regress";
  j["base_score"] = model.base_score;
  j["n_features"] = model.n_features;
  j["spec_hash"] = model.spec_hash;
  j["degenerate_targets"] = model.degenerate_targets;
  j["config"] = {{"n_trees", model.config.n_trees},
                 {"max_depth", model.config.max_depth},
                 {"learning_rate", model.config.learning_rate},
                 {"min_child_weight", model.config.min_child_weight},
                 {"l2_reg", model.config.l2_reg},
                 {"subsample_ratio", model.config.subsample_ratio},
                 {"seed", model.config.seed},
                 {"validation_fraction", model.config.validation_fraction}};
  Json trees = Json::array();
  for (const auto& tree : model.trees) {
    Json nodes = Json::array();
    for (const auto& nd : tree.nodes) {
      if (nd.leaf) {
        nodes.push_back({{"weight", nd.weight}});
      } else {
        nodes.push_back({{"feature", nd.feature},
                         {"threshold", nd.threshold},
                         {"gain", nd.gain},
                         {"left", nd.left},
                         {"right", nd.right}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j;
}

GbtModel model_from_json(const Json& j) {
  GbtModel model;
  model.task = j.at("task").get<std::string>() == "classify" ? Task::classify : Task::regress;
  model.base_score = j.at("base_score").get<double>();
  model.n_features = j.at("n_features").get<int>();
  model.spec_hash = j.at("spec_hash").get<std::string>();
  model.degenerate_targets = j.at("degenerate_targets").get<bool>();
  const Json& cfg = j.at("config");
  model.config.n_trees = cfg.at("n_trees").get<int>();
  model.config.max_depth = cfg.at("max_depth").get<int>();
  model.config.learning_rate = cfg.at("learning_rate").get<double>();
  model.config.min_child_weight = cfg.at("min_child_weight").get<double>();
  model.config.l2_reg = cfg.at("l2_reg").get<double>();
  model.config.subsample_ratio = cfg.at("subsample_ratio").get<double>();
  model.config.seed = cfg.at("seed").get<std::uint64_t>();
  model.config.validation_fraction = cfg.at("validation_fraction").get<double>();
  model.config.task = model.task;
  for (const auto& tj : j.at("trees")) {
    Tree tree;
    for (const auto& nj : tj) {
      TreeNode node;
      if (nj.contains("feature")) {
        node.leaf = false;
        node.feature = nj.at("feature").get<int>();
        node.threshold = nj.at("threshold").get<double>();
        node.gain = nj.at("gain").get<double>();
        node.left = nj.at("left").get<int>();
        node.right = nj.at("right").get<int>();
      } else {
        node.weight = nj.at("weight").get<double>();
      }
      tree.nodes.push_back(node);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

Json stats_to_json(const ColumnStats& stats) {
  Json j;
  j["mean"] = vector_to_json(stats.mean);
  j["stddev"] = vector_to_json(stats.stddev);
  Json q = Json::array();
  for (int r = 0; r < 3; ++r) q.push_back(vector_to_json(stats.quartiles.row(r).transpose()));
  j["quartiles"] = std::move(q);
  j["is_binary"] = stats.is_binary;
  return j;
}

ColumnStats stats_from_json(const Json& j) {
  ColumnStats stats;
  stats.mean = vector_from_json(j.at("mean"));
  stats.stddev = vector_from_json(j.at("stddev"));
  stats.quartiles.resize(3, stats.mean.size());
  for (int r = 0; r < 3; ++r) {
    stats.quartiles.row(r) = vector_from_json(j.at("quartiles")[r]).transpose();
  }
  stats.is_binary = j.at("is_binary").get<std::vector<bool>>();
  return stats;
}

Json importance_to_json(const GlobalImportance& importance, const std::vector<FeatureName>& names) {
  Json arr = Json::array();
  for (int col : importance.ranking()) {
    if (importance.values(col) <= 0) break;
    const std::string fname = col < static_cast<int>(names.size())
                                  ? names[col].render()
                                  : "feature_" + std::to_string(col);
    arr.push_back({{"feature", fname}, {"importance", importance.values(col)}, {"column", col}});
  }
  return arr;
}

Json explanation_to_json(const LocalExplanation& explanation) {
  Json effects = Json::array();
  for (const auto& e : explanation.effects) {
    effects.push_back({{"condition", e.condition}, {"weight", e.weight}});
  }
  return Json{{"case_id", explanation.case_id},
              {"prefix_length", explanation.prefix_length},
              {"prediction", explanation.prediction},
              {"effects", std::move(effects)},
              {"intercept", explanation.intercept},
              {"local_fidelity", explanation.local_fidelity},
              {"n_samples", explanation.n_samples}};
}

Json pdp_to_json(const PdpCurve& curve) {
  return Json{{"feature", curve.feature},
              {"grid", curve.grid},
              {"mean_prediction", curve.mean_prediction}};
}

Json surrogate_to_json(const SurrogateModel& surrogate, const std::vector<FeatureName>& names) {
  Json j;
  j["kind"] = surrogate.kind == SurrogateKind::linear ? "linear" : "tree";
  j["fidelity"] = surrogate.fidelity;
  j["fidelity_measure"] = surrogate.task == Task::classify ? "agreement" : "r2";
  j["rendering"] = surrogate.render(names);
  if (surrogate.kind == SurrogateKind::linear) {
    j["intercept"] = surrogate.intercept;
    Json coefs = Json::array();
    for (int i = 0; i < surrogate.coefficients.size(); ++i) {
      if (surrogate.coefficients(i) == 0.0) continue;
      const std::string fname =
          i < static_cast<int>(names.size()) ? names[i].render() : "feature_" + std::to_string(i);
      coefs.push_back({{"feature", fname}, {"coefficient", surrogate.coefficients(i)}});
    }
    j["coefficients"] = std::move(coefs);
  }
  return j;
}

Json leakage_to_json(const LeakageReport& report) {
  Json findings = Json::array();
  for (const auto& f : report.per_feature) {
    if (!f.flagged) continue;
    findings.push_back({{"feature", f.feature},
                        {"correlation", f.correlation},
                        {"importance_rank", f.importance_rank},
                        {"severity", severity_name(f.severity)}});
  }
  Json all = Json::array();
  for (const auto& f : report.per_feature) {
    all.push_back({{"feature", f.feature}, {"correlation", f.correlation}});
  }
  return Json{{"threshold", report.threshold},
              {"flagged", std::move(findings)},
              {"any_critical", report.any_critical},
              {"correlations", std::move(all)}};
}

Json availability_to_json(const AvailabilityReport& report) {
  Json entries = Json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"value", e.value},
                       {"kind", e.kind},
                       {"min_first_index", e.min_first_index},
                       {"support", e.support}});
  }
  Json flagged = Json::array();
  for (const auto& f : report.flagged) {
    flagged.push_back({{"feature", f.feature},
                       {"value", f.value},
                       {"min_first_index", f.min_first_index},
                       {"importance_rank", f.importance_rank}});
  }
  return Json{{"query_prefix_len", report.query_prefix_len},
              {"entries", std::move(entries)},
              {"flagged", std::move(flagged)}};
}

Json sparsity_to_json(const SparsityReport& report) {
  return Json{{"n_raw_attributes", report.n_raw_attributes},
              {"n_encoded_features", report.n_encoded_features},
              {"growth", report.growth},
              {"density", report.density},
              {"per_block_density", report.per_block_density}};
}

Json eval_to_json(const EvalResult& result) {
  Json cells = Json::object();
  for (const auto& [l, cell] : result.per_prefix_length) {
    Json c;
    if (cell.metric) c["metric"] = *cell.metric;
    c["n"] = cell.n;
    c["low_support"] = cell.low_support;
    cells[std::to_string(l)] = std::move(c);
  }
  Json j;
  j["task"] = result.task == Task::classify ? "classify" : "regress";
  j["overall"] = {{result.task == Task::classify ? "auc" : "mae", result.overall}};
  if (result.overall_f1) j["overall"]["f1"] = *result.overall_f1;
  j["per_prefix_length"] = std::move(cells);
  j["skipped_no_bucket"] = result.skipped_no_bucket;
  if (result.earliness_result) {
    Json e;
    e["threshold"] = result.earliness_result->threshold;
    if (result.earliness_result->earliness) e["earliness"] = *result.earliness_result->earliness;
    j["earliness"] = std::move(e);
  }
  return j;
}

std::string eval_curve_csv(const EvalResult& result) {
  std::ostringstream os;
  os << "prefix_length,metric,n\n";
  for (const auto& [l, cell] : result.per_prefix_length) {
    os << l << ",";
    if (cell.metric) {
      char buf[32];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, *cell.metric);
      os.write(buf, ptr - buf);
    }
    os << "," << cell.n << "\n";
  }
  return os.str();
}

std::string explanation_bars(const LocalExplanation& explanation) {
  std::ostringstream os;
  os << "prediction " << explanation.prediction << "  (local fit R2 "
     << explanation.local_fidelity << ", " << explanation.n_samples << " samples)\n";
  double max_abs = 1e-12;
  for (const auto& e : explanation.effects) max_abs = std::max(max_abs, std::abs(e.weight));
  for (const auto& e : explanation.effects) {
    const int len = static_cast<int>(std::round(std::abs(e.weight) / max_abs * 30.0));
    os << (e.weight >= 0 ? "+ " : "- ") << std::string(static_cast<std::size_t>(len), '#') << " "
       << e.weight << "  " << e.condition << "\n";
  }
  return os.str();
}

}  // namespace procsight
