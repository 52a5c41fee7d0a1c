#pragma once

#include <json.hpp>
#include <string>

#include "procsight/diagnostics.hpp"
#include "procsight/encoding.hpp"
#include "procsight/evaluation.hpp"
#include "procsight/explainer.hpp"
#include "procsight/learner.hpp"

namespace procsight {

using Json = nlohmann::json;

/// FNV-1a over a string, rendered as 16 hex digits. Content hashes of spec
/// and config JSON guard against online/offline encoding drift.
std::string fnv1a_hex(const std::string& text);

Json spec_to_json(const FeatureSpec& spec);
FeatureSpec spec_from_json(const Json& j);
std::string spec_hash(const FeatureSpec& spec);

/// Versioned model document: trees, spec hash, config, base score.
/// Reloading reproduces predictions bit-exactly.
Json model_to_json(const GbtModel& model);
GbtModel model_from_json(const Json& j);

Json stats_to_json(const ColumnStats& stats);
ColumnStats stats_from_json(const Json& j);

Json importance_to_json(const GlobalImportance& importance, const std::vector<FeatureName>& names);
Json explanation_to_json(const LocalExplanation& explanation);
Json pdp_to_json(const PdpCurve& curve);
Json surrogate_to_json(const SurrogateModel& surrogate, const std::vector<FeatureName>& names);

Json leakage_to_json(const LeakageReport& report);
Json availability_to_json(const AvailabilityReport& report);
Json sparsity_to_json(const SparsityReport& report);

Json eval_to_json(const EvalResult& result);
/// CSV rows (prefix_length, metric, n) for external plotting.
std::string eval_curve_csv(const EvalResult& result);

/// Plain-text signed bar rendering of a local explanation for terminal output.
std::string explanation_bars(const LocalExplanation& explanation);

}  // namespace procsight
