#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "procsight/config.hpp"

namespace procsight::cli {

/// Stable exit contract: 0 success, 1 audit found a critical issue,
/// 2 input/config error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCritical = 1;
inline constexpr int kExitInputError = 2;

struct ExplainRequest {
  bool global = false;
  std::optional<std::string> local_case_id;
  int local_prefix_len = 0;
  std::optional<std::string> pdp_feature;
  std::optional<std::string> bucket_id;  // default: first bucket
  int pdp_grid_size = 20;
};

int cmd_validate(const RunConfig& config, std::ostream& out);
int cmd_train(const RunConfig& config, const std::string& out_dir);
int cmd_evaluate(const RunConfig& config, const std::string& bundle_dir, const std::string& out_dir);
int cmd_explain(const RunConfig& config, const std::string& bundle_dir, const ExplainRequest& request,
                const std::string& out_dir);
int cmd_audit(const RunConfig& config, const std::string& bundle_dir, const std::string& out_dir);

}  // namespace procsight::cli
