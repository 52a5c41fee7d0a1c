#include "procsight/errors.hpp"

namespace procsight {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::missing_column: return "MissingColumn";
    case ErrorCode::bad_timestamp: return "BadTimestamp";
    case ErrorCode::bad_row: return "BadRow";
    case ErrorCode::empty_log: return "EmptyLog";
    case ErrorCode::length_out_of_range: return "LengthOutOfRange";
    case ErrorCode::empty_prefix_set: return "EmptyPrefixSet";
    case ErrorCode::no_usable_bucket: return "NoUsableBucket";
    case ErrorCode::spec_mismatch: return "SpecMismatch";
    case ErrorCode::width_mismatch: return "WidthMismatch";
    case ErrorCode::zero_variance_label: return "ZeroVarianceLabel";
    case ErrorCode::single_class: return "SingleClass";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::too_few_cases: return "TooFewCases";
    case ErrorCode::unknown_feature: return "UnknownFeature";
    case ErrorCode::unknown_case: return "UnknownCase";
    case ErrorCode::bundle_mismatch: return "BundleMismatch";
    case ErrorCode::non_finite_kernel: return "NonFiniteKernel";
    case ErrorCode::bad_config: return "BadConfig";
  }
  return "UnknownError";
}

}  // namespace procsight
