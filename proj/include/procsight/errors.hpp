#pragma once

#include <stdexcept>
#include <string>

namespace procsight {

enum class ErrorCode {
  missing_column,
  bad_timestamp,
  bad_row,
  empty_log,
  length_out_of_range,
  empty_prefix_set,
  no_usable_bucket,
  spec_mismatch,
  width_mismatch,
  zero_variance_label,
  single_class,
  length_mismatch,
  too_few_cases,
  unknown_feature,
  unknown_case,
  bundle_mismatch,
  non_finite_kernel,
  bad_config,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

}  // namespace procsight
