#pragma once

#include <string>
#include <vector>

#include "procsight/event_log.hpp"

namespace procsight {

/// The first `length` events of a trace, with the case attributes carried along.
struct Prefix {
  std::string case_id;
  int length = 0;
  std::vector<Event> events;
  std::map<std::string, AttrValue> case_attrs;
};

struct BucketingStrategy {
  enum class Kind { single_bucket, prefix_length };
  Kind kind = Kind::single_bucket;
  // Prefix grid, shared by both strategies: lengths min_len, min_len+gap, ...
  int min_len = 1;
  int max_len = 40;
  int gap = 1;
};

/// A prefix paired with its training target (outcome label as 0/1, or the
/// prefix-specific remaining time in seconds).
struct PrefixSample {
  Prefix prefix;
  double target = 0.0;
};

struct Bucket {
  std::string id;  // "single" or "len_{l}"
  std::vector<PrefixSample> samples;
};

Prefix prefix(const Trace& trace, int l);

std::string bucket_id_for_length(int l);

/// Expands every labeled trace into prefixes on the strategy's length grid.
/// Traces shorter than min_len contribute nothing; an entirely empty result
/// raises EmptyPrefixSet.
std::vector<PrefixSample> generate_prefixes(const LabeledLog& log, const BucketingStrategy& strategy);

/// Partitions prefixes into buckets: one "single" bucket, or one bucket per
/// distinct prefix length present (ascending by length).
std::vector<Bucket> assign_buckets(std::vector<PrefixSample> prefixes, const BucketingStrategy& strategy);

/// Online routing. Prefix-length bucketing clamps down to the nearest trained
/// length <= the running length; a running length below every trained bucket
/// raises NoUsableBucket.
std::string bucket_for(const Prefix& running_prefix, const BucketingStrategy& strategy,
                       const std::vector<std::string>& known_bucket_ids);

}  // namespace procsight
