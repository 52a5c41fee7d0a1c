#include "procsight/feature_names.hpp"

#include <array>
#include <charconv>

#include "procsight/errors.hpp"

namespace procsight {

namespace {

constexpr std::array<const char*, 5> kStatTokens = {"min", "max", "mean", "std", "sum"};

[[noreturn]] void unparseable(std::string_view text) {
  throw Error(ErrorCode::unknown_feature, "UnknownFeature: '" + std::string(text) + "'");
}

bool consume(std::string_view& s, std::string_view prefix) {
  if (s.substr(0, prefix.size()) != prefix) return false;
  s.remove_prefix(prefix.size());
  return true;
}

}  // namespace

const char* agg_stat_token(AggStat stat) { return kStatTokens[static_cast<int>(stat)]; }

std::string FeatureName::render() const {
  switch (kind) {
    case FeatureKind::static_attr: return "static__" + payload;
    case FeatureKind::agg_count: return "agg__" + payload;
    case FeatureKind::agg_stat: return std::string("agg_") + agg_stat_token(stat) + "_" + payload;
    case FeatureKind::index_attr:
      return std::string("index__") + (field == IndexField::activity ? "Activity" : "Resource") +
             "_" + std::to_string(index) + "_" + payload;
    case FeatureKind::engineered: return "eng__" + payload;
  }
  return {};
}

FeatureName FeatureName::parse(std::string_view text) {
  std::string_view s = text;
  if (consume(s, "static__")) return static_attr_name(std::string(s));
  if (consume(s, "eng__")) return engineered_name(std::string(s));
  if (consume(s, "index__")) {
    IndexField field;
    if (consume(s, "Activity_")) {
      field = IndexField::activity;
    } else if (consume(s, "Resource_")) {
      field = IndexField::resource;
    } else {
      unparseable(text);
    }
    int idx = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
    if (ec != std::errc{} || ptr == s.data() + s.size() || *ptr != '_' || idx < 1) unparseable(text);
    s.remove_prefix(static_cast<std::size_t>(ptr - s.data()) + 1);
    return index_name(field, idx, std::string(s));
  }
  // "agg__" (count) takes precedence over "agg_{stat}_".
  if (consume(s, "agg__")) return agg_count_name(std::string(s));
  if (consume(s, "agg_")) {
    for (int i = 0; i < static_cast<int>(kStatTokens.size()); ++i) {
      std::string token = std::string(kStatTokens[i]) + "_";
      std::string_view rest = s;
      if (consume(rest, token)) return agg_stat_name(static_cast<AggStat>(i), std::string(rest));
    }
    unparseable(text);
  }
  unparseable(text);
}

FeatureName FeatureName::static_attr_name(std::string attr) {
  FeatureName f;
  f.kind = FeatureKind::static_attr;
  f.payload = std::move(attr);
  return f;
}

FeatureName FeatureName::one_hot(const std::string& attr, const std::string& value) {
  return static_attr_name(attr + "_" + value);
}

FeatureName FeatureName::agg_count_name(std::string value) {
  FeatureName f;
  f.kind = FeatureKind::agg_count;
  f.payload = std::move(value);
  return f;
}

FeatureName FeatureName::agg_stat_name(AggStat stat, std::string attr) {
  FeatureName f;
  f.kind = FeatureKind::agg_stat;
  f.stat = stat;
  f.payload = std::move(attr);
  return f;
}

FeatureName FeatureName::index_name(IndexField field, int index, std::string value) {
  FeatureName f;
  f.kind = FeatureKind::index_attr;
  f.field = field;
  f.index = index;
  f.payload = std::move(value);
  return f;
}

FeatureName FeatureName::engineered_name(std::string name) {
  FeatureName f;
  f.kind = FeatureKind::engineered;
  f.payload = std::move(name);
  return f;
}

}  // namespace procsight
