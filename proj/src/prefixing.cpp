#include "procsight/prefixing.hpp"

#include <algorithm>
#include <map>

#include "procsight/errors.hpp"

namespace procsight {

Prefix prefix(const Trace& trace, int l) {
  const int len = static_cast<int>(trace.events.size());
  if (l < 1 || l > len) {
    throw Error(ErrorCode::length_out_of_range,
                "LengthOutOfRange: l=" + std::to_string(l) + ", trace length " + std::to_string(len));
  }
  Prefix p;
  p.case_id = trace.case_id;
  p.length = l;
  p.events.assign(trace.events.begin(), trace.events.begin() + l);
  p.case_attrs = trace.case_attrs;
  return p;
}

std::string bucket_id_for_length(int l) { return "len_" + std::to_string(l); }

std::vector<PrefixSample> generate_prefixes(const LabeledLog& log, const BucketingStrategy& strategy) {
  if (strategy.min_len < 1 || strategy.min_len > strategy.max_len || strategy.gap < 1) {
    throw Error(ErrorCode::bad_config, "BadConfig: invalid prefix grid");
  }
  std::vector<PrefixSample> out;
  for (const auto& entry : log.entries) {
    const int len = static_cast<int>(entry.trace.events.size());
    const int cap = std::min(strategy.max_len, len);
    for (int l = strategy.min_len; l <= cap; l += strategy.gap) {
      PrefixSample sample;
      sample.prefix = prefix(entry.trace, l);
      sample.target = log.task == Task::classify ? static_cast<double>(entry.label)
                                                 : entry.remaining_seconds[l - 1];
      out.push_back(std::move(sample));
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::empty_prefix_set, "EmptyPrefixSet: no trace reaches min_len");
  }
  return out;
}

std::vector<Bucket> assign_buckets(std::vector<PrefixSample> prefixes, const BucketingStrategy& strategy) {
  if (prefixes.empty()) throw Error(ErrorCode::empty_prefix_set, "EmptyPrefixSet: nothing to bucket");

  std::vector<Bucket> buckets;
  if (strategy.kind == BucketingStrategy::Kind::single_bucket) {
    buckets.push_back({"single", std::move(prefixes)});
    return buckets;
  }
  std::map<int, Bucket> by_length;
  for (auto& sample : prefixes) {
    const int l = sample.prefix.length;
    auto [it, inserted] = by_length.try_emplace(l);
    if (inserted) it->second.id = bucket_id_for_length(l);
    it->second.samples.push_back(std::move(sample));
  }
  buckets.reserve(by_length.size());
  for (auto& [_, bucket] : by_length) buckets.push_back(std::move(bucket));
  return buckets;
}

std::string bucket_for(const Prefix& running_prefix, const BucketingStrategy& strategy,
                       const std::vector<std::string>& known_bucket_ids) {
  if (strategy.kind == BucketingStrategy::Kind::single_bucket) return "single";

  int best = -1;
  for (const auto& id : known_bucket_ids) {
    if (id.rfind("len_", 0) != 0) continue;
    const int l = std::stoi(id.substr(4));
    if (l <= running_prefix.length && l > best) best = l;
  }
  if (best < 0) {
    throw Error(ErrorCode::no_usable_bucket,
                "NoUsableBucket: running length " + std::to_string(running_prefix.length) +
                    " is below every trained bucket");
  }
  return bucket_id_for_length(best);
}

}  // namespace procsight
