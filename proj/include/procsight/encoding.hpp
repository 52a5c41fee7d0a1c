#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "procsight/feature_names.hpp"
#include "procsight/prefixing.hpp"

namespace procsight {

/// The static case-attribute block is always emitted; `kind` selects how the
/// event sequence itself is represented.
enum class EncodingKind { aggregation, index };

/// Token used for the dedicated missing-value category of one-hot blocks.
inline constexpr const char* kMissingCategory = "__missing__";

/// One case attribute: a single numeric column, or a one-hot block over the
/// values seen in training.
struct StaticBlock {
  std::string attr;
  bool numeric = false;
  std::vector<std::string> values;  // one-hot categories, sorted; empty when numeric
};

/// Frozen encoding contract. Built from a bucket's training prefixes and
/// serialized with the model so online encoding is identical to training.
struct FeatureSpec {
  EncodingKind kind = EncodingKind::aggregation;
  bool engineered = false;
  int max_index = 0;  // index encoding: number of encoded positions

  std::vector<StaticBlock> static_blocks;          // sorted by attribute name
  std::vector<std::string> agg_values;             // sorted activity+resource values
  std::vector<std::string> numeric_event_attrs;    // sorted
  std::vector<std::string> activity_vocab;         // sorted, index encoding
  std::vector<std::string> resource_vocab;         // sorted, index encoding
  std::map<std::string, double> case_numeric_means;   // training-data imputation means
  std::map<std::string, double> event_numeric_means;  // training-data imputation means

  std::vector<FeatureName> names;  // full ordered column list

  int width() const { return static_cast<int>(names.size()); }
};

/// Case activity spans used by eng__open_cases; built from the log the
/// prefixes are being scored against.
struct LogContext {
  struct Span {
    std::string case_id;
    TimestampMs first = 0;
    TimestampMs last = 0;
  };
  std::vector<Span> spans;

  static LogContext from_log(const EventLog& log);
  static LogContext from_labeled(const LabeledLog& log);
};

struct RowMeta {
  std::string case_id;
  int prefix_length = 0;
};

/// Encoded design matrix for one bucket.
struct FeatureMatrix {
  FeatureSpec spec;
  Eigen::MatrixXd rows;
  std::vector<RowMeta> row_meta;
  Eigen::VectorXd targets;
};

FeatureSpec build_spec(const Bucket& bucket, EncodingKind kind, bool engineered);

/// Encodes one prefix against a frozen spec. Unseen categorical values map to
/// all-zero blocks; missing numerics use the spec's training means; index
/// positions past the prefix length stay zero. Throws SpecMismatch when an
/// index-encoded prefix is longer than the spec's max_index.
Eigen::RowVectorXd encode(const Prefix& prefix, const FeatureSpec& spec, const LogContext& ctx);

/// The engineered temporal features of a prefix, keyed by rendered name.
/// All times are seconds; open_cases counts other cases whose active span
/// contains the prefix's last timestamp.
std::map<std::string, double> engineered_features(const Prefix& prefix, const LogContext& ctx);

FeatureMatrix encode_bucket(const Bucket& bucket, const FeatureSpec& spec, const LogContext& ctx);

/// Column index of a rendered feature name, or -1.
int find_column(const FeatureSpec& spec, const std::string& rendered_name);

}  // namespace procsight
