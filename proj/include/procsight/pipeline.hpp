#pragma once

#include <string>
#include <vector>

#include "procsight/config.hpp"
#include "procsight/evaluation.hpp"
#include "procsight/explainer.hpp"

namespace procsight {

/// One trained bucket: the frozen encoding spec, the boosted-tree model and
/// the encoded-column statistics that back local explanations online.
struct BucketModel {
  std::string id;
  FeatureSpec spec;
  GbtModel model;
  ColumnStats stats;
};

struct ModelBundle {
  Task task = Task::classify;
  BucketingStrategy strategy;
  std::vector<BucketModel> buckets;
  /// FNV hash over all FeatureSpec documents plus the training config;
  /// detects online/offline encoding drift.
  std::string content_hash;
  nlohmann::json run_config;  // the compat view of the producing config

  const BucketModel* find(const std::string& bucket_id) const;
  std::vector<std::string> bucket_ids() const;
};

/// Labels the raw log according to the configured task.
LabeledLog apply_task(const EventLog& log, const RunConfig& config);

/// The offline phase: prefixes, buckets, one spec + model + stats per bucket.
ModelBundle train_bundle(const LabeledLog& train_split, const RunConfig& config);

/// Routes every test prefix to its bucket (clamping down where needed),
/// predicts, and aggregates metrics overall and per prefix length. Prefixes
/// with no usable bucket are excluded from cells and counted.
EvalResult evaluate_pipeline(const ModelBundle& bundle, const LabeledLog& test,
                             std::optional<double> earliness_threshold = std::nullopt);

/// A prefix re-cut and encoded for the routed bucket. Prefix-length buckets
/// see exactly their trained length; a single index-encoded bucket clamps to
/// its trained max_index.
Eigen::RowVectorXd encode_for_bucket(const Prefix& running, const BucketModel& bucket,
                                     const BucketingStrategy& strategy, const LogContext& ctx);

void save_bundle(const ModelBundle& bundle, const std::string& dir);

/// Reloads and re-verifies: every stored spec must hash to what its model
/// was trained against, and the whole bundle must match the manifest hash.
ModelBundle load_bundle(const std::string& dir);

/// BundleMismatch when the supplied config is not the one the bundle was
/// built with (paths and explain/audit knobs excluded).
void check_bundle_compat(const ModelBundle& bundle, const RunConfig& config);

}  // namespace procsight
