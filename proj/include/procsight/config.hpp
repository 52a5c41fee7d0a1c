#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "procsight/encoding.hpp"
#include "procsight/event_log.hpp"
#include "procsight/explainer.hpp"
#include "procsight/learner.hpp"
#include "procsight/prefixing.hpp"

namespace procsight {

/// One JSON document drives every command; all defaults live here, none are
/// hidden in code paths. The single `seed` feeds every stochastic component.
struct RunConfig {
  std::string log_path;
  LogSchema schema;

  Task task = Task::classify;
  LabelingRule rule;  // outcome task only

  BucketingStrategy bucketing;
  EncodingKind encoding_kind = EncodingKind::aggregation;
  bool engineered = false;

  TrainConfig training;
  double train_fraction = 0.8;

  LocalParams explainer_params;

  double leakage_threshold = 0.7;
  int query_prefix_len = 5;

  std::optional<double> earliness_threshold;  // deliberately has no default

  std::string output_dir = "out";
  std::uint64_t seed = 0;
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// The bundle-compatibility view of a config: everything that shapes parsing,
/// labeling, encoding and training. Paths, output and explain/audit knobs are
/// excluded so the same bundle can score new logs.
nlohmann::json compat_config_json(const RunConfig& config);

}  // namespace procsight
