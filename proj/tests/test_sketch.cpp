#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "support.hpp"

using namespace hac;
using hac::testing::Gen;
using hac::testing::line;
using hac::testing::pt;

namespace {

const Metric kEuclid{MetricSpec::euclidean()};

HacConfig small_config(std::uint64_t seed = 1) {
  HacConfig cfg;
  cfg.f0 = 0.1;
  cfg.epsilon = 0.5;
  cfg.delta = 0.5;
  cfg.r0 = 0.5;
  cfg.gamma = 2.0;
  cfg.c = 2;
  cfg.seed = seed;
  return cfg;
}

Sketch<Metric> fed(const HacConfig& cfg, const Dataset& data) {
  Sketch<Metric> sk(cfg);
  for (const auto& tp : data) sk.process(tp.point, tp.t);
  return sk;
}

double decayed(const HacConfig& cfg, const SampleSlot& s, double at) {
  return std::isinf(cfg.tau) ? 1.0 : std::exp(-(at - s.last_decay_time) / cfg.tau);
}

}  // namespace

TEST(SlotCount, DefaultsGive461) {
  EXPECT_EQ(slot_count(HacConfig{}), 461u);
}

TEST(SlotCount, OtherFrequencies) {
  HacConfig cfg;
  cfg.f0 = 0.05;
  EXPECT_EQ(slot_count(cfg), 148u);
  cfg.f0 = 0.2;
  EXPECT_EQ(slot_count(cfg), 24u);
  cfg.f0 = 0.025;
  EXPECT_EQ(slot_count(cfg), 351u);
}

TEST(SlotCount, ExactIntegerDoesNotRoundUp) {
  HacConfig cfg;
  cfg.f0 = 1.0;
  cfg.epsilon = 1.0;
  cfg.delta = 1.0 / std::numbers::e;
  EXPECT_EQ(slot_count(cfg), 1u);
}

TEST(Config, RejectsBadParameters) {
  auto bad = [](auto mutate) {
    HacConfig cfg;
    mutate(cfg);
    return cfg;
  };
  EXPECT_THROW(validate(bad([](HacConfig& c) { c.f0 = 0; })), ContractError);
  EXPECT_THROW(validate(bad([](HacConfig& c) { c.f0 = 1.5; })), ContractError);
  EXPECT_THROW(validate(bad([](HacConfig& c) { c.epsilon = 0; })), ContractError);
  EXPECT_THROW(validate(bad([](HacConfig& c) { c.delta = 1; })), ContractError);
  EXPECT_THROW(validate(bad([](HacConfig& c) { c.r0 = -1; })), ContractError);
  EXPECT_THROW(validate(bad([](HacConfig& c) { c.gamma = 1; })), ContractError);
  EXPECT_THROW(validate(bad([](HacConfig& c) { c.c = -1; })), ContractError);
  EXPECT_THROW(validate(bad([](HacConfig& c) { c.tau = 0; })), ContractError);
  EXPECT_THROW(Sketch<Metric>(bad([](HacConfig& c) { c.f0 = 0; })), ContractError);
}

TEST(Buckets, RadiiAndIndex) {
  HacConfig cfg;
  cfg.r0 = 0.1;
  cfg.gamma = 2.0;
  cfg.c = 4;
  EXPECT_DOUBLE_EQ(max_radius(cfg), 1.6);
  EXPECT_EQ(Sketch<Metric>(cfg).bucket_count(), 5u);
  EXPECT_EQ(bucket_index(cfg, 0.0), 0);
  EXPECT_EQ(bucket_index(cfg, 0.1), 0);
  EXPECT_EQ(bucket_index(cfg, 0.35), 2);
  EXPECT_EQ(bucket_index(cfg, 0.4), 2);
  EXPECT_EQ(bucket_index(cfg, 1.6), 4);
  EXPECT_EQ(bucket_index(cfg, 2.0), -1);
}

TEST(BucketsProperty, IndexMatchesLinearScan) {
  Gen g(21);
  for (int i = 0; i < 20000; ++i) {
    HacConfig cfg;
    cfg.r0 = g.uniform(0.01, 2.0);
    cfg.gamma = g.uniform(1.05, 4.0);
    cfg.c = static_cast<int>(g.index(10));
    // half the probes sit exactly on a boundary
    const double d = g.index(2) == 0 ? bucket_radius(cfg, static_cast<int>(g.index(cfg.c + 1)))
                                     : g.uniform(0.0, 1.2 * max_radius(cfg));
    ASSERT_EQ(bucket_index(cfg, d), hac::testing::reference_bucket(cfg, d)) << "d=" << d;
  }
}

TEST(HopProbability, InfiniteTimescale) {
  Sketch<Metric> sk(small_config());
  EXPECT_EQ(sk.hop_probability(0.0), 1.0);
  for (int i = 0; i < 4; ++i) sk.process(pt({double(i)}), double(i));
  EXPECT_DOUBLE_EQ(sk.hop_probability(4.0), 1.0 / 5.0);
}

TEST(HopProbability, DecayingTimescale) {
  HacConfig cfg = small_config();
  cfg.tau = 1.0 / std::log(2.0);
  Sketch<Metric> sk(cfg);
  sk.process(pt({0}), 0.0);
  // one point halves in weight after one time unit: 1 / (0.5 + 1)
  EXPECT_NEAR(sk.hop_probability(1.0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(sk.total_weight_at(1.0), 0.5, 1e-12);
}

TEST(Process, FirstPointIsAdoptedByEverySlot) {
  Sketch<Metric> sk(small_config());
  sk.process(pt({3.0}), 7.0);
  for (const auto& s : sk.slots()) {
    ASSERT_TRUE(s.held);
    EXPECT_EQ(s.held->x, std::vector<double>{3.0});
    EXPECT_EQ(s.hop_time, 7.0);
    EXPECT_EQ(s.counters, (std::vector<double>{1, 0, 0}));
  }
}

TEST(Process, FarPointsAreNotCounted) {
  const auto cfg = small_config();
  auto sk = fed(cfg, line({0.0, 100.0, 200.0}));
  for (const auto& s : sk.slots()) {
    const double total = s.counters[0] + s.counters[1] + s.counters[2];
    EXPECT_EQ(total, 1.0);
  }
}

TEST(Process, TimeRegressionThrows) {
  Sketch<Metric> sk(small_config());
  sk.process(pt({0}), 5.0);
  sk.process(pt({0}), 5.0);
  EXPECT_THROW(sk.process(pt({0}), 4.9), ContractError);
  EXPECT_THROW(sk.query_dense(0.5, 4.0), ContractError);
}

TEST(Process, MatchesReferenceReplay) {
  for (double tau : {kInfiniteTimescale, 3.0}) {
    HacConfig cfg = small_config(99);
    cfg.tau = tau;
    Gen g(5);
    const auto data = g.stream(20, 2);
    const auto sk = fed(cfg, data);
    const double at = data.back().t + 1.0;
    const auto ref = hac::testing::reference_replay(cfg, data, at, kEuclid);
    ASSERT_EQ(ref.size(), sk.slots().size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const auto& s = sk.slots()[i];
      ASSERT_EQ(s.held.has_value(), ref[i].held.has_value());
      ASSERT_EQ(s.held->x, data[*ref[i].held].point.x) << "slot " << i;
      EXPECT_EQ(s.hop_time, data[*ref[i].held].t);
      for (std::size_t k = 0; k < s.counters.size(); ++k) {
        EXPECT_NEAR(s.counters[k] * decayed(cfg, s, at), ref[i].counters[k], 1e-9) << "slot " << i;
      }
    }
  }
}

TEST(QueryDense, ForgedCountersPickSmallestRadius) {
  HacConfig cfg;
  cfg.f0 = 0.1;
  cfg.c = 4;
  SketchState st;
  st.config = cfg;
  st.t_count = 100;
  st.total_weight = 100;
  st.last_arrival_time = 100;
  SampleSlot s;
  s.held = pt({0});
  s.hop_time = 3;
  s.counters = {2, 2, 1, 0, 0};
  s.last_decay_time = 100;
  st.slots.push_back(s);
  const auto sk = Sketch<Metric>::from_state(st);
  // threshold (1 - 0.5) * 0.1 * 100 = 5, reached at cumulative 2 + 2 + 1
  const auto out = sk.query_dense(0.1, 100).outputs;
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].radius_index, 2);
  EXPECT_DOUBLE_EQ(out[0].radius, 4.0);
  EXPECT_DOUBLE_EQ(out[0].freq_estimate, 0.05);
  // above what the slot can reach
  EXPECT_TRUE(sk.query_dense(0.2, 100).outputs.empty());
}

TEST(QueryDense, BelowF0Throws) {
  const auto sk = fed(small_config(), line({0, 0, 0}));
  EXPECT_THROW(sk.query_dense(0.05, 2.0), ContractError);
  EXPECT_THROW(sk.query_top_k_by_radius(0.05, 3, 2.0), ContractError);
}

TEST(QueryDense, TooFewPointsGivesNothing) {
  // 5 points at f = 0.1: not even one point's worth of mass
  const auto sk = fed(small_config(), line({0, 0, 0, 0, 0}));
  EXPECT_TRUE(sk.query_dense(0.1, 4.0).outputs.empty());
  EXPECT_TRUE(Sketch<Metric>(small_config()).query_dense(0.5, 0.0).outputs.empty());
}

TEST(QueryDense, SingleClusterReportsOnlyClusterPoints) {
  auto data = line({0, 0.1, 0.2, 0.1, 0.05, 0.15, 0, 0.2, 0.1, 0.05});
  data.push_back({pt({50}), 10});
  const auto sk = fed(small_config(), data);
  const auto out = sk.query_dense(0.5, 10).outputs;
  ASSERT_FALSE(out.empty());
  for (const auto& o : out) {
    EXPECT_LT(o.point.x[0], 1.0);
    EXPECT_EQ(o.radius_index, 0);
  }
}

namespace {

SketchState forged_state(std::vector<std::pair<double, double>> freq_hop) {
  HacConfig cfg;
  cfg.f0 = 0.1;
  cfg.c = 1;
  SketchState st;
  st.config = cfg;
  st.t_count = 10;
  st.total_weight = 10;
  st.last_arrival_time = 10;
  for (std::size_t i = 0; i < freq_hop.size(); ++i) {
    SampleSlot s;
    s.held = pt({10.0 * double(i)});
    s.counters = {freq_hop[i].first, 0};
    s.hop_time = freq_hop[i].second;
    s.last_decay_time = 10;
    st.slots.push_back(s);
  }
  return st;
}

std::vector<std::size_t> slot_ids(const QueryResult& r) {
  std::vector<std::size_t> ids;
  for (const auto& o : r.outputs) ids.push_back(o.slot_id);
  return ids;
}

}  // namespace

TEST(TopK, FrequencyTiesBreakOnHopTimeThenSlot) {
  const auto sk = Sketch<Metric>::from_state(forged_state({{3, 5}, {5, 9}, {3, 2}, {5, 9}, {1, 0}}));
  const auto r = sk.query_top_k_by_frequency(0, 4, 10);
  EXPECT_EQ(slot_ids(r), (std::vector<std::size_t>{1, 3, 2, 0}));
  EXPECT_EQ(r.order, QueryOrder::by_frequency);
  EXPECT_DOUBLE_EQ(r.outputs[0].freq_estimate, 0.5);
}

TEST(TopK, FrequencyArgumentChecks) {
  const auto sk = Sketch<Metric>::from_state(forged_state({{3, 5}}));
  EXPECT_THROW(sk.query_top_k_by_frequency(2, 1, 10), ContractError);
  EXPECT_THROW(sk.query_top_k_by_frequency(-1, 1, 10), ContractError);
  EXPECT_THROW(sk.query_top_k_by_frequency(0, 0, 10), ContractError);
}

TEST(TopK, RadiusOrderSmallestFirst) {
  HacConfig cfg;
  cfg.f0 = 0.1;
  cfg.c = 2;
  SketchState st;
  st.config = cfg;
  st.t_count = 20;
  st.total_weight = 20;
  st.last_arrival_time = 20;
  // threshold 1: slot 0 reaches at k=2, slot 1 at k=0 (freq 0.1), slot 2 at k=0 (freq 0.2)
  for (auto counters : std::vector<std::vector<double>>{{0, 0, 4}, {2, 0, 0}, {4, 0, 0}}) {
    SampleSlot s;
    s.held = pt({double(st.slots.size()) * 10});
    s.counters = counters;
    s.last_decay_time = 20;
    st.slots.push_back(s);
  }
  const auto sk = Sketch<Metric>::from_state(st);
  EXPECT_EQ(slot_ids(sk.query_top_k_by_radius(0.1, 3, 20)), (std::vector<std::size_t>{2, 1, 0}));
  EXPECT_EQ(slot_ids(sk.query_top_k_by_radius(0.1, 1, 20)), (std::vector<std::size_t>{2}));
}

TEST(TopK, DedupRunsBeforeTruncation) {
  // three copies of one region then a distinct weaker region: with k = 2 the
  // deduplicated answer must reach the second region
  auto st = forged_state({{5, 0}, {5, 1}, {5, 2}, {2, 3}});
  st.slots[1].held = pt({0.1});
  st.slots[2].held = pt({0.2});
  const auto sk = Sketch<Metric>::from_state(st);
  const auto r = sk.query_top_k_by_frequency(0, 2, 10, {DedupVariant::threshold, 1.0});
  EXPECT_EQ(slot_ids(r), (std::vector<std::size_t>{0, 3}));
}

TEST(Merge, IdentityAndEmpty) {
  const auto sk = Sketch<Metric>::from_state(forged_state({{3, 5}, {5, 9}}));
  const auto r = sk.query_top_k_by_frequency(0, 2, 10);
  EXPECT_EQ(merge_outputs(std::vector<QueryResult>{r}), r);
  EXPECT_TRUE(merge_outputs({}).outputs.empty());
}

TEST(Merge, MismatchedPartsThrow) {
  QueryResult a{1.0, QueryOrder::by_slot, kNoLimit, {}};
  QueryResult b{2.0, QueryOrder::by_slot, kNoLimit, {}};
  EXPECT_THROW(merge_outputs(std::vector<QueryResult>{a, b}), ContractError);
  b.query_time = 1.0;
  b.order = QueryOrder::by_radius;
  EXPECT_THROW(merge_outputs(std::vector<QueryResult>{a, b}), ContractError);
}

TEST(Partition, RangesCoverAllSlots) {
  for (std::size_t m : {1u, 7u, 461u}) {
    for (std::size_t parts = 1; parts <= 9; ++parts) {
      const auto r = partition_slots(m, parts);
      ASSERT_EQ(r.size(), parts);
      EXPECT_EQ(r.front().begin, 0u);
      EXPECT_EQ(r.back().end, m);
      for (std::size_t i = 1; i < parts; ++i) EXPECT_EQ(r[i].begin, r[i - 1].end);
    }
  }
  EXPECT_THROW(partition_slots(5, 0), ContractError);
}

TEST(Memory, CellsFixedByConfig) {
  HacConfig cfg = small_config();
  auto sk = Sketch<Metric>(cfg);
  const auto before = sk.memory_cells();
  EXPECT_EQ(before, slot_count(cfg) * 3);
  Gen g(3);
  for (const auto& tp : g.stream(3000, 2)) sk.process(tp.point, tp.t);
  EXPECT_EQ(sk.memory_cells(), before);
}

// ---- properties -------------------------------------------------------------

TEST(SketchProperty, DeterministicForSeed) {
  Gen g(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = g.stream(200, 3);
    HacConfig cfg = small_config(g.index(1000));
    cfg.tau = trial % 2 ? 5.0 : kInfiniteTimescale;
    EXPECT_EQ(fed(cfg, data).state(), fed(cfg, data).state());
  }
}

TEST(SketchProperty, CumulativeCountsMonotone) {
  Gen g(32);
  for (int trial = 0; trial < 20; ++trial) {
    HacConfig cfg = small_config(trial);
    cfg.c = 4;
    cfg.r0 = 0.1;
    const auto data = g.stream(300, 2);
    const auto sk = fed(cfg, data);
    const double qt = data.back().t;
    for (int k = 1; k <= cfg.c; ++k) {
      const auto lo = sk.query_top_k_by_frequency(k - 1, kNoLimit, qt);
      const auto hi = sk.query_top_k_by_frequency(k, kNoLimit, qt);
      std::map<std::size_t, double> prev;
      for (const auto& o : lo.outputs) prev[o.slot_id] = o.freq_estimate;
      for (const auto& o : hi.outputs) ASSERT_GE(o.freq_estimate, prev.at(o.slot_id));
    }
    for (const auto& o : sk.query_top_k_by_frequency(cfg.c, kNoLimit, qt).outputs) {
      ASSERT_LE(o.freq_estimate, 1.0 + 1e-12);
      ASSERT_GT(o.freq_estimate, 0.0);
    }
  }
}

TEST(SketchProperty, HugeTimescaleApproachesUnweighted) {
  Gen g(33);
  for (int trial = 0; trial < 10; ++trial) {
    const auto data = g.stream(300, 2, false);
    HacConfig inf = small_config(trial);
    HacConfig big = inf;
    big.tau = 1e12;
    const auto a = fed(inf, data).state();
    const auto b = fed(big, data).state();
    for (std::size_t i = 0; i < a.slots.size(); ++i) {
      ASSERT_EQ(a.slots[i].held, b.slots[i].held);
      for (std::size_t k = 0; k < a.slots[i].counters.size(); ++k) {
        ASSERT_NEAR(a.slots[i].counters[k], b.slots[i].counters[k], 1e-6);
      }
    }
    EXPECT_NEAR(a.total_weight, b.total_weight, 1e-6);
  }
}

TEST(SketchProperty, PartitionsReplayWholeSketch) {
  Gen g(34);
  for (int trial = 0; trial < 15; ++trial) {
    HacConfig cfg = small_config(g.index(1 << 20));
    cfg.tau = trial % 3 == 0 ? 4.0 : kInfiniteTimescale;
    const auto data = g.stream(250, 2);
    const auto whole = fed(cfg, data);
    const std::size_t parts = 2 + g.index(4);
    std::vector<QueryResult> dense, freq;
    std::size_t offset = 0;
    for (auto range : partition_slots(whole.total_slots(), parts)) {
      Sketch<Metric> part(cfg, range, kEuclid);
      for (const auto& tp : data) part.process(tp.point, tp.t);
      for (std::size_t i = 0; i < part.slots().size(); ++i) {
        ASSERT_EQ(part.slots()[i], whole.slots()[offset + i]);
      }
      offset += part.slots().size();
      dense.push_back(part.query_dense(0.2, data.back().t));
      freq.push_back(part.query_top_k_by_frequency(1, 10, data.back().t));
    }
    EXPECT_EQ(merge_outputs(dense), whole.query_dense(0.2, data.back().t));
    EXPECT_EQ(merge_outputs(freq), whole.query_top_k_by_frequency(1, 10, data.back().t));
  }
}

TEST(SketchProperty, StateRoundTripContinuesIdentically) {
  Gen g(35);
  const auto data = g.stream(400, 2);
  HacConfig cfg = small_config(4);
  cfg.tau = 10;
  auto whole = fed(cfg, data);
  Sketch<Metric> first(cfg);
  for (std::size_t i = 0; i < 200; ++i) first.process(data[i].point, data[i].t);
  auto resumed = Sketch<Metric>::from_state(first.state());
  for (std::size_t i = 200; i < data.size(); ++i) resumed.process(data[i].point, data[i].t);
  EXPECT_EQ(resumed.state(), whole.state());
}
