#include "procsight/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "procsight/errors.hpp"
#include "procsight/serialize.hpp"

namespace procsight {

namespace fs = std::filesystem;

namespace {

int bucket_length(const std::string& id) {
  return id.rfind("len_", 0) == 0 ? std::stoi(id.substr(4)) : 0;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::bundle_mismatch, "BundleMismatch: missing file " + path.string());
  }
  Json j;
  in >> j;
  return j;
}

std::string bundle_hash(const std::vector<BucketModel>& buckets, const Json& train_config) {
  std::string blob;
  for (const auto& bucket : buckets) blob += spec_to_json(bucket.spec).dump();
  blob += train_config.dump();
  return fnv1a_hex(blob);
}

}  // namespace

const BucketModel* ModelBundle::find(const std::string& bucket_id) const {
  for (const auto& bucket : buckets) {
    if (bucket.id == bucket_id) return &bucket;
  }
  return nullptr;
}

std::vector<std::string> ModelBundle::bucket_ids() const {
  std::vector<std::string> ids;
  ids.reserve(buckets.size());
  for (const auto& bucket : buckets) ids.push_back(bucket.id);
  return ids;
}

LabeledLog apply_task(const EventLog& log, const RunConfig& config) {
  return config.task == Task::classify ? label_outcome(log, config.rule)
                                       : remaining_time_targets(log);
}

ModelBundle train_bundle(const LabeledLog& train_split, const RunConfig& config) {
  ModelBundle bundle;
  bundle.task = config.task;
  bundle.strategy = config.bucketing;
  bundle.run_config = compat_config_json(config);

  auto samples = generate_prefixes(train_split, config.bucketing);
  auto buckets = assign_buckets(std::move(samples), config.bucketing);
  const LogContext ctx = LogContext::from_labeled(train_split);

  for (auto& bucket : buckets) {
    BucketModel bm;
    bm.id = bucket.id;
    bm.spec = build_spec(bucket, config.encoding_kind, config.engineered);
    FeatureMatrix matrix = encode_bucket(bucket, bm.spec, ctx);
    TrainConfig tc = config.training;
    tc.task = config.task;
    bm.model = train(matrix.rows, matrix.targets, tc, spec_hash(bm.spec));
    bm.stats = ColumnStats::from_matrix(matrix.rows);
    bundle.buckets.push_back(std::move(bm));
  }

  bundle.content_hash = bundle_hash(bundle.buckets, bundle.run_config.at("training"));
  return bundle;
}

Eigen::RowVectorXd encode_for_bucket(const Prefix& running, const BucketModel& bucket,
                                     const BucketingStrategy& strategy, const LogContext& ctx) {
  int effective = running.length;
  if (strategy.kind == BucketingStrategy::Kind::prefix_length) {
    effective = std::min(effective, bucket_length(bucket.id));
  } else if (bucket.spec.kind == EncodingKind::index) {
    effective = std::min(effective, bucket.spec.max_index);
  }
  if (effective == running.length) return encode(running, bucket.spec, ctx);
  Prefix cut = running;
  cut.length = effective;
  cut.events.resize(static_cast<std::size_t>(effective));
  return encode(cut, bucket.spec, ctx);
}

EvalResult evaluate_pipeline(const ModelBundle& bundle, const LabeledLog& test,
                             std::optional<double> earliness_threshold) {
  EvalResult result;
  result.task = bundle.task;

  auto samples = generate_prefixes(test, bundle.strategy);
  const LogContext ctx = LogContext::from_labeled(test);
  const auto ids = bundle.bucket_ids();

  struct Scored {
    int length;
    double score;
    double target;
  };
  std::vector<Scored> scored;
  scored.reserve(samples.size());

  for (const auto& sample : samples) {
    std::string bucket_id;
    try {
      bucket_id = bucket_for(sample.prefix, bundle.strategy, ids);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::no_usable_bucket) {
        ++result.skipped_no_bucket;
        continue;
      }
      throw;
    }
    const BucketModel* bucket = bundle.find(bucket_id);
    if (bucket == nullptr) {
      throw Error(ErrorCode::bundle_mismatch, "BundleMismatch: bucket " + bucket_id + " missing");
    }
    const Eigen::RowVectorXd row = encode_for_bucket(sample.prefix, *bucket, bundle.strategy, ctx);
    scored.push_back({sample.prefix.length, bucket->model.predict_row(row), sample.target});
  }

  if (scored.empty()) {
    throw Error(ErrorCode::empty_prefix_set, "EmptyPrefixSet: nothing to evaluate");
  }

  std::map<int, std::vector<const Scored*>> by_length;
  for (const auto& s : scored) by_length[s.length].push_back(&s);

  if (bundle.task == Task::classify) {
    Eigen::VectorXd pooled(scored.size());
    std::vector<int> labels(scored.size());
    std::vector<int> predicted(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
      pooled(static_cast<int>(i)) = scored[i].score;
      labels[i] = scored[i].target != 0.0 ? 1 : 0;
      predicted[i] = scored[i].score >= 0.5 ? 1 : 0;  // fixed decision threshold
    }
    result.overall = auc(pooled, labels);
    result.overall_f1 = f1(predicted, labels);

    for (const auto& [l, group] : by_length) {
      PrefixCell cell;
      cell.n = static_cast<int>(group.size());
      cell.low_support = cell.n < 5;
      Eigen::VectorXd s(cell.n);
      std::vector<int> y(group.size());
      bool has_pos = false, has_neg = false;
      for (std::size_t i = 0; i < group.size(); ++i) {
        s(static_cast<int>(i)) = group[i]->score;
        y[i] = group[i]->target != 0.0 ? 1 : 0;
        (y[i] ? has_pos : has_neg) = true;
      }
      if (has_pos && has_neg) cell.metric = auc(s, y);
      result.per_prefix_length[l] = std::move(cell);
    }
  } else {
    Eigen::VectorXd preds(scored.size()), targets(scored.size());
    for (std::size_t i = 0; i < scored.size(); ++i) {
      preds(static_cast<int>(i)) = scored[i].score;
      targets(static_cast<int>(i)) = scored[i].target;
    }
    result.overall = mae(preds, targets);

    for (const auto& [l, group] : by_length) {
      PrefixCell cell;
      cell.n = static_cast<int>(group.size());
      cell.low_support = cell.n < 5;
      double total = 0;
      for (const auto* s : group) total += std::abs(s->score - s->target);
      cell.metric = total / cell.n;
      result.per_prefix_length[l] = std::move(cell);
    }
  }

  if (earliness_threshold) {
    std::map<int, double> curve;
    for (const auto& [l, cell] : result.per_prefix_length) {
      if (cell.metric) curve[l] = *cell.metric;
    }
    result.earliness_result =
        earliness(curve, *earliness_threshold,
                  bundle.task == Task::classify ? ThresholdDirection::at_least
                                                : ThresholdDirection::at_most);
  }
  return result;
}

void save_bundle(const ModelBundle& bundle, const std::string& dir) {
  fs::create_directories(dir);
  Json manifest;
  manifest["format_version"] = 1;
  manifest["task"] = bundle.task == Task::classify ? "classify" : "regress";
  manifest["strategy"] = {
      {"kind",
       bundle.strategy.kind == BucketingStrategy::Kind::single_bucket ? "single" : "prefix_length"},
      {"min_len", bundle.strategy.min_len},
      {"max_len", bundle.strategy.max_len},
      {"gap", bundle.strategy.gap}};
  manifest["buckets"] = bundle.bucket_ids();
  manifest["content_hash"] = bundle.content_hash;
  manifest["run_config"] = bundle.run_config;

  write_text(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
  for (const auto& bucket : bundle.buckets) {
    write_text(fs::path(dir) / ("spec_" + bucket.id + ".json"),
               spec_to_json(bucket.spec).dump(2) + "\n");
    write_text(fs::path(dir) / ("model_" + bucket.id + ".json"),
               model_to_json(bucket.model).dump(2) + "\n");
    write_text(fs::path(dir) / ("stats_" + bucket.id + ".json"),
               stats_to_json(bucket.stats).dump(2) + "\n");
  }
}

ModelBundle load_bundle(const std::string& dir) {
  const Json manifest = read_json(fs::path(dir) / "manifest.json");
  ModelBundle bundle;
  bundle.task = manifest.at("task").get<std::string>() == "classify" ? Task::classify : Task::regress;
  const Json& strategy = manifest.at("strategy");
  bundle.strategy.kind = strategy.at("kind").get<std::string>() == "single"
                             ? BucketingStrategy::Kind::single_bucket
                             : BucketingStrategy::Kind::prefix_length;
  bundle.strategy.min_len = strategy.at("min_len").get<int>();
  bundle.strategy.max_len = strategy.at("max_len").get<int>();
  bundle.strategy.gap = strategy.at("gap").get<int>();
  bundle.run_config = manifest.at("run_config");
  bundle.content_hash = manifest.at("content_hash").get<std::string>();

  for (const auto& id : manifest.at("buckets").get<std::vector<std::string>>()) {
    BucketModel bm;
    bm.id = id;
    bm.spec = spec_from_json(read_json(fs::path(dir) / ("spec_" + id + ".json")));
    bm.model = model_from_json(read_json(fs::path(dir) / ("model_" + id + ".json")));
    bm.stats = stats_from_json(read_json(fs::path(dir) / ("stats_" + id + ".json")));
    if (spec_hash(bm.spec) != bm.model.spec_hash) {
      throw Error(ErrorCode::bundle_mismatch,
                  "BundleMismatch: spec for bucket '" + id + "' does not match its model");
    }
    bundle.buckets.push_back(std::move(bm));
  }

  if (bundle_hash(bundle.buckets, bundle.run_config.at("training")) != bundle.content_hash) {
    throw Error(ErrorCode::bundle_mismatch, "BundleMismatch: bundle content hash check failed");
  }
  return bundle;
}

void check_bundle_compat(const ModelBundle& bundle, const RunConfig& config) {
  if (bundle.run_config != compat_config_json(config)) {
    throw Error(ErrorCode::bundle_mismatch,
                "BundleMismatch: supplied config differs from the one the bundle was trained with");
  }
}

}  // namespace procsight
