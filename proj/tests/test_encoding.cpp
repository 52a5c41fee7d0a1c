#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "procsight/encoding.hpp"
#include "procsight/errors.hpp"

using namespace procsight;
using namespace procsight::testing;

namespace {

Bucket bucket_of(std::vector<Prefix> prefixes) {
  Bucket bucket;
  bucket.id = "single";
  for (auto& p : prefixes) bucket.samples.push_back({std::move(p), 0.0});
  return bucket;
}

Prefix whole_trace(const Trace& trace) {
  return prefix(trace, static_cast<int>(trace.events.size()));
}

double at(const Eigen::RowVectorXd& row, const FeatureSpec& spec, const std::string& name) {
  const int col = find_column(spec, name);
  REQUIRE(col >= 0);
  return row(col);
}

bool same(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace

TEST_CASE("feature name grammar round-trips") {
  const std::vector<FeatureName> names = {
      FeatureName::static_attr_name("Age"),
      FeatureName::one_hot("Diagnosis_code", "DC822"),
      FeatureName::agg_count_name("O_SENT_BACK"),
      FeatureName::agg_count_name("max_d"),  // value resembling a stat token
      FeatureName::agg_stat_name(AggStat::std_dev, "duration"),
      FeatureName::agg_stat_name(AggStat::mean, "open_cases"),
      FeatureName::index_name(IndexField::activity, 3, "W_Validate Request"),
      FeatureName::index_name(IndexField::resource, 12, "r_10"),
      FeatureName::engineered_name("time_since_last_event"),
  };
  for (const auto& name : names) {
    CAPTURE(name.render());
    CHECK(FeatureName::parse(name.render()) == name);
  }
  CHECK(names[2].render() == "agg__O_SENT_BACK");
  CHECK(names[4].render() == "agg_std_duration");
  CHECK(names[6].render() == "index__Activity_3_W_Validate Request");
  CHECK_THROWS_AS(FeatureName::parse("mystery__thing"), Error);
}

TEST_CASE("build_spec enumerates vocabularies") {
  auto t1 = make_trace("c1", {"A", "B"});
  t1.events[0].resource = "r1";
  auto b = bucket_of({whole_trace(t1)});
  const auto spec = build_spec(b, EncodingKind::aggregation, false);
  CHECK(find_column(spec, "agg__A") >= 0);
  CHECK(find_column(spec, "agg__B") >= 0);
  CHECK(find_column(spec, "agg__r1") >= 0);
}

TEST_CASE("one categorical case attribute with three values -> three one-hot features") {
  std::vector<Prefix> prefixes;
  for (int i = 0; i < 3; ++i) {
    auto t = make_trace("c" + std::to_string(i), {"A"});
    t.case_attrs.emplace("channel", std::string(1, static_cast<char>('x' + i)));
    prefixes.push_back(whole_trace(t));
  }
  const auto spec = build_spec(bucket_of(prefixes), EncodingKind::aggregation, false);
  int one_hots = 0;
  for (const auto& name : spec.names) {
    if (name.render().rfind("static__channel_", 0) == 0) ++one_hots;
  }
  CHECK(one_hots == 3);
}

TEST_CASE("index encoding: cardinality times index count") {
  auto t1 = make_trace("c1", {"A", "B"});
  auto t2 = make_trace("c2", {"B", "A"});
  const auto spec = build_spec(bucket_of({whole_trace(t1), whole_trace(t2)}), EncodingKind::index, false);
  CHECK(spec.max_index == 2);
  int indicators = 0;
  for (const auto& name : spec.names) {
    if (name.kind == FeatureKind::index_attr) ++indicators;
  }
  CHECK(indicators == 4);  // 2 activities x 2 positions
}

TEST_CASE("aggregation encoding counts activities") {
  auto t = make_trace("c1", {"A", "A", "B"});
  const auto b = bucket_of({whole_trace(t)});
  const auto spec = build_spec(b, EncodingKind::aggregation, false);
  const auto row = encode(whole_trace(t), spec, {});
  CHECK(at(row, spec, "agg__A") == 2.0);
  CHECK(at(row, spec, "agg__B") == 1.0);
}

TEST_CASE("index encoding one-hots each position and pads with zeros") {
  auto t3 = make_trace("c0", {"A", "B", "A"});
  auto t2 = make_trace("c1", {"A", "B"});
  const auto spec = build_spec(bucket_of({whole_trace(t3), whole_trace(t2)}), EncodingKind::index, false);
  REQUIRE(spec.max_index == 3);
  const auto row = encode(whole_trace(t2), spec, {});
  CHECK(at(row, spec, "index__Activity_1_A") == 1.0);
  CHECK(at(row, spec, "index__Activity_1_B") == 0.0);
  CHECK(at(row, spec, "index__Activity_2_B") == 1.0);
  CHECK(at(row, spec, "index__Activity_3_A") == 0.0);  // padding
  CHECK(at(row, spec, "index__Activity_3_B") == 0.0);
}

TEST_CASE("numeric event attribute summary uses the population std") {
  auto t = make_trace("c1", {"A", "B"});
  t.events[0].numeric_attrs["d"] = 2.0;
  t.events[1].numeric_attrs["d"] = 4.0;
  const auto b = bucket_of({whole_trace(t)});
  const auto spec = build_spec(b, EncodingKind::aggregation, false);
  const auto row = encode(whole_trace(t), spec, {});
  CHECK(at(row, spec, "agg_min_d") == 2.0);
  CHECK(at(row, spec, "agg_max_d") == 4.0);
  CHECK(at(row, spec, "agg_mean_d") == 3.0);
  CHECK(at(row, spec, "agg_std_d") == 1.0);
  CHECK(at(row, spec, "agg_sum_d") == 6.0);

  // std of a single value is 0
  auto single = make_trace("c2", {"A"});
  single.events[0].numeric_attrs["d"] = 5.0;
  const auto row1 = encode(whole_trace(single), spec, {});
  CHECK(at(row1, spec, "agg_std_d") == 0.0);
}

TEST_CASE("missing values: categorical gets a dedicated category, numeric the training mean") {
  auto t1 = make_trace("c1", {"A"});
  t1.case_attrs.emplace("channel", std::string("web"));
  t1.case_attrs.emplace("budget", 10.0);
  auto t2 = make_trace("c2", {"A"});  // both attrs missing
  auto t3 = make_trace("c3", {"A"});
  t3.case_attrs.emplace("channel", std::string("phone"));
  t3.case_attrs.emplace("budget", 30.0);

  const auto b = bucket_of({whole_trace(t1), whole_trace(t2), whole_trace(t3)});
  const auto spec = build_spec(b, EncodingKind::aggregation, false);
  const auto row = encode(whole_trace(t2), spec, {});
  CHECK(at(row, spec, std::string("static__channel_") + kMissingCategory) == 1.0);
  CHECK(at(row, spec, "static__budget") == 20.0);  // mean of 10 and 30
}

TEST_CASE("unseen categorical values map to an all-zero block") {
  auto t1 = make_trace("c1", {"A"});
  t1.case_attrs.emplace("channel", std::string("web"));
  const auto spec = build_spec(bucket_of({whole_trace(t1)}), EncodingKind::aggregation, false);

  auto t2 = make_trace("c9", {"A"});
  t2.case_attrs.emplace("channel", std::string("carrier-pigeon"));
  const auto row = encode(whole_trace(t2), spec, {});
  CHECK(at(row, spec, "static__channel_web") == 0.0);

  // unseen activity likewise stays invisible, the width never changes
  auto t3 = make_trace("c10", {"A", "NEW"});
  const auto row2 = encode(whole_trace(t3), spec, {});
  CHECK(static_cast<int>(row2.size()) == spec.width());
}

TEST_CASE("engineered features") {
  auto t = make_trace("c1", {"A", "B"}, kEpoch + 9 * 3'600'000, 300.0);  // 09:00 and 09:05 UTC
  const auto eng = engineered_features(whole_trace(t), {});
  CHECK(eng.at("eng__time_since_last_event") == 300.0);
  CHECK(eng.at("eng__time_since_case_start") == 300.0);
  CHECK(eng.at("eng__time_since_midnight") == 9 * 3600 + 300);
  CHECK(eng.at("eng__weekday") == 3.0);  // 2020-01-01 was a Wednesday
  CHECK(eng.at("eng__month") == 1.0);
  CHECK(eng.at("eng__event_number") == 2.0);

  const auto single = engineered_features(prefix(t, 1), {});
  CHECK(single.at("eng__time_since_last_event") == 0.0);
  CHECK(single.at("eng__time_since_case_start") == 0.0);
}

TEST_CASE("open_cases matches a brute-force interval scan") {
  std::mt19937_64 rng(21);
  std::vector<Trace> traces;
  for (int i = 0; i < 20; ++i) {
    const int len = 2 + static_cast<int>(rng() % 5);
    std::vector<std::string> acts(len, "A");
    traces.push_back(make_trace("c" + std::to_string(i), acts,
                                kEpoch + static_cast<TimestampMs>(rng() % 3600) * 1000, 120.0));
  }
  const auto log = make_log(traces);
  const auto ctx = LogContext::from_log(log);

  for (const auto& trace : log.traces) {
    for (int l = 1; l <= static_cast<int>(trace.events.size()); ++l) {
      const auto p = prefix(trace, l);
      const double got = engineered_features(p, ctx).at("eng__open_cases");
      int expected = 0;
      for (const auto& other : log.traces) {
        if (other.case_id == trace.case_id) continue;
        const TimestampMs t = p.events.back().timestamp;
        if (other.events.front().timestamp <= t && t <= other.events.back().timestamp) ++expected;
      }
      CHECK(got == static_cast<double>(expected));
    }
  }

  // three overlapping cases -> 2 others at the shared instant
  auto o1 = make_trace("o1", {"A", "B"}, kEpoch, 600.0);
  auto o2 = make_trace("o2", {"A", "B"}, kEpoch, 600.0);
  auto o3 = make_trace("o3", {"A", "B"}, kEpoch, 600.0);
  const auto ctx3 = LogContext::from_log(make_log({o1, o2, o3}));
  CHECK(engineered_features(whole_trace(o1), ctx3).at("eng__open_cases") == 2.0);
}

TEST_CASE("aggregation encoding is order-invariant, index encoding is not") {
  auto t = make_trace("c1", {"A", "B", "C", "B"});
  t.case_attrs.emplace("channel", std::string("web"));
  const auto agg_spec = build_spec(bucket_of({whole_trace(t)}), EncodingKind::aggregation, false);
  const auto idx_spec = build_spec(bucket_of({whole_trace(t)}), EncodingKind::index, false);

  const auto base_agg = encode(whole_trace(t), agg_spec, {});
  const auto base_idx = encode(whole_trace(t), idx_spec, {});

  std::mt19937_64 rng(5);
  for (int round = 0; round < 200; ++round) {
    Prefix shuffled = whole_trace(t);
    std::shuffle(shuffled.events.begin(), shuffled.events.end(), rng);
    CHECK(same(encode(shuffled, agg_spec, {}), base_agg));
    bool differs_in_activity = false;
    for (std::size_t i = 0; i < shuffled.events.size(); ++i) {
      differs_in_activity |= shuffled.events[i].activity != t.events[i].activity;
    }
    if (differs_in_activity) CHECK(!same(encode(shuffled, idx_spec, {}), base_idx));
  }
}

TEST_CASE("encode_bucket shape and determinism") {
  const auto log = random_log(10, 17);
  Bucket bucket;
  bucket.id = "single";
  for (const auto& trace : log.traces) {
    for (int l = 1; l <= static_cast<int>(trace.events.size()); ++l) {
      bucket.samples.push_back({prefix(trace, l), static_cast<double>(l)});
    }
  }
  const auto spec = build_spec(bucket, EncodingKind::aggregation, true);
  const auto ctx = LogContext::from_log(log);
  const auto matrix = encode_bucket(bucket, spec, ctx);
  CHECK(matrix.rows.rows() == static_cast<int>(bucket.samples.size()));
  CHECK(matrix.rows.cols() == spec.width());
  CHECK(matrix.row_meta.size() == bucket.samples.size());

  // permuting bucket rows permutes matrix rows identically
  Bucket reversed = bucket;
  std::reverse(reversed.samples.begin(), reversed.samples.end());
  const auto matrix2 = encode_bucket(reversed, spec, ctx);
  for (int i = 0; i < matrix.rows.rows(); ++i) {
    CHECK(same(matrix.rows.row(i), matrix2.rows.row(matrix.rows.rows() - 1 - i)));
  }

  // one-hot rows sums: every one-hot block row-sum is 0 or 1
  for (int i = 0; i < matrix.rows.rows(); ++i) {
    int col = 0;
    for (const auto& block : spec.static_blocks) {
      if (block.numeric) {
        ++col;
        continue;
      }
      const double sum = matrix.rows.row(i).segment(col, block.values.size()).sum();
      CHECK((sum == 0.0 || sum == 1.0));
      col += static_cast<int>(block.values.size());
    }
  }
}

TEST_CASE("index spec rejects over-long prefixes") {
  auto t2 = make_trace("c1", {"A", "B"});
  const auto spec = build_spec(bucket_of({whole_trace(t2)}), EncodingKind::index, false);
  auto t3 = make_trace("c2", {"A", "B", "A"});
  CHECK_THROWS_AS(encode(whole_trace(t3), spec, {}), Error);
}
