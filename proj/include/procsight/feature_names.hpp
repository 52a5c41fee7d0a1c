#pragma once

#include <string>
#include <string_view>

namespace procsight {

/// Feature naming grammar shared by encoding, explanations and reports:
///
///   static__{attr}                      case attribute (one-hot names carry
///                                       the value fused into {attr})
///   agg__{value}                        frequency of an activity/resource value
///   agg_{min|max|mean|std|sum}_{attr}   summary of a numeric event attribute
///   index__{Activity|Resource}_{idx}_{name}   indicator at 1-based index
///   eng__{name}                         engineered temporal feature
///
/// parse(render(f)) == f for every name the encoder generates. The static
/// form is deliberately flat: "static__a_b" keeps "a_b" as one payload, and
/// whether that payload is a raw attribute or an attr/value one-hot is
/// recorded by the FeatureSpec block table, not by the name.
enum class FeatureKind { static_attr, agg_count, agg_stat, index_attr, engineered };

enum class AggStat { min, max, mean, std_dev, sum };

enum class IndexField { activity, resource };

struct FeatureName {
  FeatureKind kind = FeatureKind::static_attr;
  std::string payload;              // attr, value, or engineered name depending on kind
  AggStat stat = AggStat::min;      // agg_stat only
  IndexField field = IndexField::activity;  // index_attr only
  int index = 0;                    // index_attr only, 1-based

  std::string render() const;
  static FeatureName parse(std::string_view text);

  bool operator==(const FeatureName&) const = default;

  static FeatureName static_attr_name(std::string attr);
  static FeatureName one_hot(const std::string& attr, const std::string& value);
  static FeatureName agg_count_name(std::string value);
  static FeatureName agg_stat_name(AggStat stat, std::string attr);
  static FeatureName index_name(IndexField field, int index, std::string value);
  static FeatureName engineered_name(std::string name);
};

const char* agg_stat_token(AggStat stat);

}  // namespace procsight
