#include "procsight/config.hpp"

#include <fstream>

#include "procsight/errors.hpp"

namespace procsight {

namespace {

using Json = nlohmann::json;

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::bad_config, "BadConfig: " + what);
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

RunConfig parse_config(const Json& doc) {
  RunConfig config;
  if (!doc.contains("log")) bad("missing 'log' section");
  const Json& log = doc.at("log");
  config.log_path = get_or<std::string>(log, "path", "");
  const Json& cols = log.contains("columns") ? log.at("columns") : Json::object();
  config.schema.case_id_column = get_or<std::string>(cols, "case_id", "case_id");
  config.schema.activity_column = get_or<std::string>(cols, "activity", "activity");
  config.schema.timestamp_column = get_or<std::string>(cols, "timestamp", "timestamp");
  if (cols.contains("resource") && !cols.at("resource").is_null()) {
    config.schema.resource_column = cols.at("resource").get<std::string>();
  }
  config.schema.case_attr_columns =
      get_or<std::vector<std::string>>(log, "case_attributes", {});
  config.schema.timestamp_format =
      get_or<std::string>(log, "timestamp_format", "%Y-%m-%d %H:%M:%S");
  const std::string delim = get_or<std::string>(log, "delimiter", ",");
  if (delim.size() != 1) bad("delimiter must be a single character");
  config.schema.delimiter = delim[0];

  const Json& task = doc.contains("task") ? doc.at("task") : Json::object();
  const std::string task_type = get_or<std::string>(task, "type", "outcome");
  if (task_type == "outcome") {
    config.task = Task::classify;
    if (!task.contains("rule")) bad("outcome task needs a labeling rule");
    const Json& rule = task.at("rule");
    const std::string variant = get_or<std::string>(rule, "variant", "activity_occurs");
    if (variant == "activity_occurs") {
      config.rule.variant = LabelingRule::Variant::activity_occurs;
      config.rule.activity = get_or<std::string>(rule, "activity", "");
      config.rule.truncate = get_or<bool>(rule, "truncate", false);
      if (config.rule.activity.empty()) bad("activity_occurs rule needs a non-empty activity");
    } else if (variant == "eventually_followed") {
      config.rule.variant = LabelingRule::Variant::eventually_followed;
      config.rule.first = get_or<std::string>(rule, "first", "");
      config.rule.second = get_or<std::string>(rule, "second", "");
      if (config.rule.first.empty() || config.rule.second.empty()) {
        bad("eventually_followed rule needs non-empty 'first' and 'second'");
      }
    } else {
      bad("unknown rule variant '" + variant + "'");
    }
    config.rule.positive_class = get_or<std::string>(rule, "positive_class", "positive");
  } else if (task_type == "remaining_time") {
    config.task = Task::regress;
  } else {
    bad("unknown task type '" + task_type + "'");
  }

  const Json& bucketing = doc.contains("bucketing") ? doc.at("bucketing") : Json::object();
  const std::string strategy = get_or<std::string>(bucketing, "strategy", "single");
  if (strategy == "single") {
    config.bucketing.kind = BucketingStrategy::Kind::single_bucket;
  } else if (strategy == "prefix_length") {
    config.bucketing.kind = BucketingStrategy::Kind::prefix_length;
  } else {
    bad("unknown bucketing strategy '" + strategy + "'");
  }
  config.bucketing.min_len = get_or<int>(bucketing, "min_len", 1);
  config.bucketing.max_len = get_or<int>(bucketing, "max_len", 40);
  config.bucketing.gap = get_or<int>(bucketing, "gap", 1);
  if (config.bucketing.min_len < 1 || config.bucketing.min_len > config.bucketing.max_len ||
      config.bucketing.gap < 1) {
    bad("invalid prefix grid");
  }

  const Json& encoding = doc.contains("encoding") ? doc.at("encoding") : Json::object();
  const std::string kind = get_or<std::string>(encoding, "kind", "aggregation");
  if (kind == "aggregation") {
    config.encoding_kind = EncodingKind::aggregation;
  } else if (kind == "index") {
    config.encoding_kind = EncodingKind::index;
  } else {
    bad("unknown encoding kind '" + kind + "'");
  }
  config.engineered = get_or<bool>(encoding, "engineered", false);

  config.seed = get_or<std::uint64_t>(doc, "seed", 0);

  const Json& training = doc.contains("training") ? doc.at("training") : Json::object();
  config.training.n_trees = get_or<int>(training, "n_trees", 200);
  config.training.max_depth = get_or<int>(training, "max_depth", 4);
  config.training.learning_rate = get_or<double>(training, "learning_rate", 0.1);
  config.training.min_child_weight = get_or<double>(training, "min_child_weight", 1.0);
  config.training.l2_reg = get_or<double>(training, "l2_reg", 1.0);
  config.training.subsample_ratio = get_or<double>(training, "subsample_ratio", 1.0);
  config.training.validation_fraction = get_or<double>(training, "validation_fraction", 0.0);
  config.training.seed = config.seed;
  config.training.task = config.task;

  const Json& split = doc.contains("split") ? doc.at("split") : Json::object();
  config.train_fraction = get_or<double>(split, "train_fraction", 0.8);
  if (config.train_fraction <= 0.0 || config.train_fraction >= 1.0) {
    bad("train_fraction must be in (0,1)");
  }

  const Json& explainer = doc.contains("explainer") ? doc.at("explainer") : Json::object();
  config.explainer_params.n_samples = get_or<int>(explainer, "n_samples", 5000);
  if (explainer.contains("kernel_width") && !explainer.at("kernel_width").is_null()) {
    config.explainer_params.kernel_width = explainer.at("kernel_width").get<double>();
  }
  config.explainer_params.k_features = get_or<int>(explainer, "k_features", 10);
  config.explainer_params.seed = config.seed;

  const Json& audit = doc.contains("audit") ? doc.at("audit") : Json::object();
  config.leakage_threshold = get_or<double>(audit, "leakage_threshold", 0.7);
  config.query_prefix_len = get_or<int>(audit, "query_prefix_len", 5);

  const Json& evaluation = doc.contains("evaluation") ? doc.at("evaluation") : Json::object();
  if (evaluation.contains("earliness_threshold") && !evaluation.at("earliness_threshold").is_null()) {
    config.earliness_threshold = evaluation.at("earliness_threshold").get<double>();
  }

  config.output_dir = get_or<std::string>(doc, "output_dir", "out");
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open config file '" + path + "'");
  Json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

nlohmann::json compat_config_json(const RunConfig& config) {
  Json schema;
  schema["case_id"] = config.schema.case_id_column;
  schema["activity"] = config.schema.activity_column;
  schema["timestamp"] = config.schema.timestamp_column;
  if (config.schema.resource_column) schema["resource"] = *config.schema.resource_column;
  schema["case_attributes"] = config.schema.case_attr_columns;
  schema["timestamp_format"] = config.schema.timestamp_format;
  schema["delimiter"] = std::string(1, config.schema.delimiter);

  Json task;
  task["type"] = config.task == Task::classify ? "outcome" : "remaining_time";
  if (config.task == Task::classify) {
    if (config.rule.variant == LabelingRule::Variant::activity_occurs) {
      task["rule"] = {{"variant", "activity_occurs"},
                      {"activity", config.rule.activity},
                      {"truncate", config.rule.truncate}};
    } else {
      task["rule"] = {{"variant", "eventually_followed"},
                      {"first", config.rule.first},
                      {"second", config.rule.second}};
    }
  }

  return Json{
      {"schema", std::move(schema)},
      {"task", std::move(task)},
      {"bucketing",
       {{"strategy",
         config.bucketing.kind == BucketingStrategy::Kind::single_bucket ? "single" : "prefix_length"},
        {"min_len", config.bucketing.min_len},
        {"max_len", config.bucketing.max_len},
        {"gap", config.bucketing.gap}}},
      {"encoding",
       {{"kind", config.encoding_kind == EncodingKind::aggregation ? "aggregation" : "index"},
        {"engineered", config.engineered}}},
      {"training",
       {{"n_trees", config.training.n_trees},
        {"max_depth", config.training.max_depth},
        {"learning_rate", config.training.learning_rate},
        {"min_child_weight", config.training.min_child_weight},
        {"l2_reg", config.training.l2_reg},
        {"subsample_ratio", config.training.subsample_ratio},
        {"validation_fraction", config.training.validation_fraction}}},
      {"split", {{"train_fraction", config.train_fraction}}},
      {"seed", config.seed},
  };
}

}  // namespace procsight
