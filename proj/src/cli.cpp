#include "procsight/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "procsight/errors.hpp"
#include "procsight/pipeline.hpp"
#include "procsight/serialize.hpp"

namespace procsight::cli {

namespace fs = std::filesystem;

namespace {

enum class LogLevel { debug = 0, info = 1, warn = 2, quiet = 3 };

LogLevel log_level() {
  const char* env = std::getenv("PROCSIGHT_LOG_LEVEL");
  if (env == nullptr) return LogLevel::info;
  const std::string value = env;
  if (value == "debug") return LogLevel::debug;
  if (value == "warn") return LogLevel::warn;
  if (value == "quiet" || value == "error") return LogLevel::quiet;
  return LogLevel::info;
}

void log_line(LogLevel level, const std::string& message) {
  static const LogLevel threshold = log_level();
  if (level < threshold) return;
  const char* tag = level == LogLevel::debug ? "debug" : level == LogLevel::info ? "info" : "warn";
  std::cerr << "procsight [" << tag << "] " << message << "\n";
}

EventLog load_log(const RunConfig& config) {
  std::ifstream in(config.log_path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::bad_config, "BadConfig: cannot open log file '" + config.log_path + "'");
  }
  return parse_csv(in, config.schema);
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

void write_artifact_manifest(const std::string& out_dir, const std::string& command,
                             const std::vector<std::string>& files) {
  Json manifest{{"command", command}, {"files", files}};
  write_text(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
}

/// Attribute-bearing columns of the parsed log: the activity, the resource if
/// mapped, every case attribute and every event attribute. Feeds the sparsity
/// report's raw-attribute count.
int raw_attribute_count(const EventLog& log) {
  std::set<std::string> names;
  for (const auto& trace : log.traces) {
    for (const auto& [name, _] : trace.case_attrs) names.insert("case:" + name);
    for (const auto& ev : trace.events) {
      for (const auto& [name, _] : ev.numeric_attrs) names.insert("event:" + name);
      for (const auto& [name, _] : ev.categorical_attrs) names.insert("event:" + name);
    }
  }
  int count = 1 + static_cast<int>(names.size());  // activity
  if (log.schema.resource_column) ++count;
  return count;
}

struct TrainData {
  LabeledLog train;
  LabeledLog test;
};

TrainData split_by_config(const LabeledLog& labeled, const RunConfig& config) {
  auto [train, test] = temporal_split(labeled, config.train_fraction);
  return {std::move(train), std::move(test)};
}

/// Rebuilds the training-side matrix of one bucket exactly as cmd_train saw
/// it; used by explain and audit so reports refer to the real training data.
FeatureMatrix rebuild_training_matrix(const ModelBundle& bundle, const BucketModel& bucket,
                                      const LabeledLog& train) {
  auto samples = generate_prefixes(train, bundle.strategy);
  auto buckets = assign_buckets(std::move(samples), bundle.strategy);
  const LogContext ctx = LogContext::from_labeled(train);
  for (auto& b : buckets) {
    if (b.id == bucket.id) return encode_bucket(b, bucket.spec, ctx);
  }
  throw Error(ErrorCode::bundle_mismatch,
              "BundleMismatch: bucket '" + bucket.id + "' not reproducible from the log");
}

}  // namespace

int cmd_validate(const RunConfig& config, std::ostream& out) {
  const EventLog log = load_log(config);
  const LabeledLog labeled = apply_task(log, config);

  std::size_t min_len = std::numeric_limits<std::size_t>::max(), max_len = 0, total_events = 0;
  for (const auto& trace : log.traces) {
    min_len = std::min(min_len, trace.events.size());
    max_len = std::max(max_len, trace.events.size());
    total_events += trace.events.size();
  }

  std::set<std::string> activities, resources, case_attrs, event_attrs;
  for (const auto& trace : log.traces) {
    for (const auto& [name, _] : trace.case_attrs) case_attrs.insert(name);
    for (const auto& ev : trace.events) {
      activities.insert(ev.activity);
      if (ev.resource) resources.insert(*ev.resource);
      for (const auto& [name, _] : ev.numeric_attrs) event_attrs.insert(name);
      for (const auto& [name, _] : ev.categorical_attrs) event_attrs.insert(name);
    }
  }

  Json summary;
  summary["traces"] = log.traces.size();
  summary["events"] = total_events;
  summary["trace_length"] = {{"min", min_len}, {"max", max_len},
                             {"mean", static_cast<double>(total_events) / log.traces.size()}};
  summary["activities"] = activities.size();
  summary["resources"] = resources.size();
  summary["case_attributes"] = std::vector<std::string>(case_attrs.begin(), case_attrs.end());
  summary["event_attributes"] = std::vector<std::string>(event_attrs.begin(), event_attrs.end());

  if (config.task == Task::classify) {
    int positives = 0;
    for (const auto& e : labeled.entries) positives += e.label;
    summary["labels"] = {{"positive", positives},
                         {"negative", labeled.entries.size() - positives},
                         {"positive_class", config.rule.positive_class}};
    if (labeled.dropped_empty_after_truncation > 0) {
      summary["labels"]["dropped_empty_after_truncation"] = labeled.dropped_empty_after_truncation;
    }
    if (labeled.degenerate_labels) {
      summary["warnings"] = Json::array({"DegenerateTargets: all labels identical"});
      log_line(LogLevel::warn, "DegenerateTargets: the labeling rule produced a single class");
    }
  } else {
    double max_remaining = 0;
    for (const auto& e : labeled.entries) {
      max_remaining = std::max(max_remaining, e.remaining_seconds.front());
    }
    summary["remaining_time"] = {{"max_seconds", max_remaining}};
  }

  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_train(const RunConfig& config, const std::string& out_dir) {
  const EventLog log = load_log(config);
  const LabeledLog labeled = apply_task(log, config);
  TrainData data = split_by_config(labeled, config);

  log_line(LogLevel::info, "training on " + std::to_string(data.train.entries.size()) + " cases");
  const ModelBundle bundle = train_bundle(data.train, config);
  for (const auto& bucket : bundle.buckets) {
    if (bucket.model.degenerate_targets) {
      log_line(LogLevel::warn, "DegenerateTargets: bucket '" + bucket.id +
                                   "' trained on a single class; model is base-score only");
    }
  }
  save_bundle(bundle, out_dir);
  log_line(LogLevel::info,
           "bundle with " + std::to_string(bundle.buckets.size()) + " bucket(s) -> " + out_dir);
  return kExitOk;
}

int cmd_evaluate(const RunConfig& config, const std::string& bundle_dir, const std::string& out_dir) {
  const ModelBundle bundle = load_bundle(bundle_dir);
  check_bundle_compat(bundle, config);

  const EventLog log = load_log(config);
  const LabeledLog labeled = apply_task(log, config);
  TrainData data = split_by_config(labeled, config);

  const EvalResult result = evaluate_pipeline(bundle, data.test, config.earliness_threshold);
  write_text(fs::path(out_dir) / "eval.json", eval_to_json(result).dump(2) + "\n");
  write_text(fs::path(out_dir) / "curves.csv", eval_curve_csv(result));
  write_artifact_manifest(out_dir, "evaluate", {"eval.json", "curves.csv"});
  log_line(LogLevel::info, std::string(bundle.task == Task::classify ? "AUC " : "MAE ") +
                               std::to_string(result.overall));
  return kExitOk;
}

int cmd_explain(const RunConfig& config, const std::string& bundle_dir, const ExplainRequest& request,
                const std::string& out_dir) {
  const ModelBundle bundle = load_bundle(bundle_dir);
  check_bundle_compat(bundle, config);
  std::vector<std::string> files;

  if (request.global) {
    const EventLog log = load_log(config);
    TrainData data = split_by_config(apply_task(log, config), config);
    for (const auto& bucket : bundle.buckets) {
      const GlobalImportance importance = feature_importance(bucket.model);
      write_text(fs::path(out_dir) / ("global_importance_" + bucket.id + ".json"),
                 importance_to_json(importance, bucket.spec.names).dump(2) + "\n");
      files.push_back("global_importance_" + bucket.id + ".json");

      const FeatureMatrix matrix = rebuild_training_matrix(bundle, bucket, data.train);
      const SurrogateModel surrogate = fit_global_surrogate(
          matrix.rows, predictor(bucket.model), SurrogateKind::tree, bundle.task);
      write_text(fs::path(out_dir) / ("surrogate_" + bucket.id + ".json"),
                 surrogate_to_json(surrogate, bucket.spec.names).dump(2) + "\n");
      files.push_back("surrogate_" + bucket.id + ".json");
    }
  }

  if (request.local_case_id) {
    const EventLog log = load_log(config);
    const Trace* trace = nullptr;
    for (const auto& t : log.traces) {
      if (t.case_id == *request.local_case_id) {
        trace = &t;
        break;
      }
    }
    if (trace == nullptr) {
      throw Error(ErrorCode::unknown_case, "UnknownCase: '" + *request.local_case_id + "'");
    }
    const Prefix running = prefix(*trace, request.local_prefix_len);
    const std::string bucket_id = bucket_for(running, bundle.strategy, bundle.bucket_ids());
    const BucketModel* bucket = bundle.find(bucket_id);
    const LogContext ctx = LogContext::from_log(log);
    const Eigen::RowVectorXd row = encode_for_bucket(running, *bucket, bundle.strategy, ctx);

    LocalParams params = config.explainer_params;
    LocalExplanation explanation =
        explain_local(predictor(bucket->model), row, bucket->spec, bucket->stats, params);
    explanation.case_id = trace->case_id;
    explanation.prefix_length = running.length;

    write_text(fs::path(out_dir) / "local_explanation.json",
               explanation_to_json(explanation).dump(2) + "\n");
    write_text(fs::path(out_dir) / "local_explanation.txt", explanation_bars(explanation));
    files.push_back("local_explanation.json");
    files.push_back("local_explanation.txt");
  }

  if (request.pdp_feature) {
    const EventLog log = load_log(config);
    TrainData data = split_by_config(apply_task(log, config), config);
    const std::string bucket_id = request.bucket_id.value_or(bundle.buckets.front().id);
    const BucketModel* bucket = bundle.find(bucket_id);
    if (bucket == nullptr) {
      throw Error(ErrorCode::no_usable_bucket, "NoUsableBucket: '" + bucket_id + "'");
    }
    const FeatureMatrix matrix = rebuild_training_matrix(bundle, *bucket, data.train);
    const PdpCurve curve = partial_dependence(predictor(bucket->model), matrix.rows, bucket->spec,
                                              *request.pdp_feature, request.pdp_grid_size);
    write_text(fs::path(out_dir) / "pdp.json", pdp_to_json(curve).dump(2) + "\n");
    files.push_back("pdp.json");
  }

  if (files.empty()) {
    throw Error(ErrorCode::bad_config, "BadConfig: explain needs --global, --local or --pdp");
  }
  write_artifact_manifest(out_dir, "explain", files);
  return kExitOk;
}

int cmd_audit(const RunConfig& config, const std::string& bundle_dir, const std::string& out_dir) {
  const ModelBundle bundle = load_bundle(bundle_dir);
  check_bundle_compat(bundle, config);

  const EventLog log = load_log(config);
  const LabeledLog labeled = apply_task(log, config);
  TrainData data = split_by_config(labeled, config);
  const int raw_attrs = raw_attribute_count(log);

  Json report;
  report["leakage_threshold"] = config.leakage_threshold;
  report["query_prefix_len"] = config.query_prefix_len;
  bool any_critical = false;
  std::ostringstream md;
  md << "# Audit report\n\n";

  if (config.task == Task::classify && config.rule.variant == LabelingRule::Variant::activity_occurs &&
      config.rule.truncate) {
    const std::string note =
        "Positive traces are truncated before '" + config.rule.activity +
        "' while negative traces keep their full length; trace length itself may carry label "
        "signal.";
    report["notes"] = Json::array({note});
    md << "> " << note << "\n\n";
  }

  for (const auto& bucket : bundle.buckets) {
    const FeatureMatrix matrix = rebuild_training_matrix(bundle, bucket, data.train);
    Json section;

    md << "## Bucket `" << bucket.id << "`\n\n";

    if (bundle.task == Task::classify) {
      const LeakageReport leakage =
          leakage_scan(matrix, config.leakage_threshold, &bucket.model);
      section["leakage"] = leakage_to_json(leakage);
      any_critical = any_critical || leakage.any_critical;
      md << "### Leakage (threshold " << config.leakage_threshold << ")\n\n";
      int flagged = 0;
      for (const auto& f : leakage.per_feature) {
        if (!f.flagged) continue;
        ++flagged;
        md << "- [" << severity_name(f.severity) << "] `" << f.feature << "` corr "
           << f.correlation;
        if (f.importance_rank > 0) md << ", importance rank " << f.importance_rank;
        md << "\n";
      }
      if (flagged == 0) md << "- no features at or above the threshold\n";
      md << "\n";
    }

    const AvailabilityReport availability =
        availability_scan(log, &bucket.model, &bucket.spec.names, config.query_prefix_len);
    section["availability"] = availability_to_json(availability);
    md << "### Availability (query prefix length " << config.query_prefix_len << ")\n\n";
    if (availability.flagged.empty()) {
      md << "- no important feature depends on values first seen after the query length\n";
    }
    for (const auto& f : availability.flagged) {
      md << "- [warn] `" << f.feature << "` first occurs at index " << f.min_first_index
         << " (importance rank " << f.importance_rank << ")\n";
    }
    md << "\n";

    const SparsityReport sparsity = sparsity_report(matrix, raw_attrs);
    section["sparsity"] = sparsity_to_json(sparsity);
    md << "### Sparsity\n\n";
    md << "- " << sparsity.n_raw_attributes << " raw attributes -> " << sparsity.n_encoded_features
       << " encoded features (growth " << sparsity.growth << ")\n";
    md << "- matrix density " << sparsity.density << "\n\n";

    report["buckets"][bucket.id] = std::move(section);
  }
  report["any_critical"] = any_critical;

  write_text(fs::path(out_dir) / "audit.json", report.dump(2) + "\n");
  write_text(fs::path(out_dir) / "audit.md", md.str());
  write_artifact_manifest(out_dir, "audit", {"audit.json", "audit.md"});

  if (any_critical) {
    log_line(LogLevel::warn, "critical audit finding; see audit.md");
    return kExitCritical;
  }
  return kExitOk;
}

}  // namespace procsight::cli
