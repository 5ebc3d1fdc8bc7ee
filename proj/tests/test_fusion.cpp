#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "nicdiag/fusion.hpp"

using namespace nicdiag;

namespace {

NicPairFeatureVector vec(std::vector<int> symbols) {
  NicPairFeatureVector v;
  v.pair_id = 0;
  v.window_id = "w";
  for (int s : symbols) v.symbols.push_back(static_cast<Symbol>(s));
  return v;
}

}  // namespace

TEST_CASE("schema lays out compute, switch, then log slots") {
  const FeatureSchema schema =
      FeatureSchema::build({"m_b", "m_a"}, {"m_c"}, 2);
  // Metric lists are sorted; each metric holds a pattern and a level slot.
  REQUIRE(schema.dimension() == 2 * 2 + 1 * 2 + 2);
  CHECK(schema.slots()[0].kind == SlotKind::Pattern);
  CHECK(schema.slots()[0].metric == "m_a");
  CHECK(schema.slots()[1].kind == SlotKind::Level);
  CHECK(schema.slots()[4].side == EndpointSide::Switch);
  CHECK(schema.slots()[6].kind == SlotKind::LogCluster);
  CHECK(schema.slots()[7].cluster_id == 1);
}

TEST_CASE("feature flags drop whole slot families") {
  CHECK(FeatureSchema::build({"m"}, {"m"}, 3, {.patterns = false}).dimension() ==
        2 + 3);
  CHECK(FeatureSchema::build({"m"}, {"m"}, 3, {.levels = false}).dimension() ==
        2 + 3);
  CHECK(FeatureSchema::build({"m"}, {"m"}, 3, {.metrics = false}).dimension() ==
        3);
  CHECK(FeatureSchema::build({"m"}, {"m"}, 3, {.logs = false}).dimension() == 4);
}

TEST_CASE("similarity is the exact agreement fraction") {
  CHECK(similarity(vec({1, 2, 3, 4}), vec({1, 2, 3, 4})) == 1.0);
  CHECK(similarity(vec({1, 2, 3, 4}), vec({1, 9, 3, 9})) == 0.5);
  CHECK(similarity(vec({1, 2, 3, 4}), vec({5, 6, 7, 8})) == 0.0);
}

TEST_CASE("similarity rejects mismatched dimensions") {
  CHECK_THROWS_AS(similarity(vec({1, 2}), vec({1, 2, 3})), ConfigError);
}

TEST_CASE("similarity is symmetric and reflexive") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> a, b;
    for (int i = 0; i < 12; ++i) {
      a.push_back(static_cast<int>(uniform_index(rng, 4)));
      b.push_back(static_cast<int>(uniform_index(rng, 4)));
    }
    CHECK(similarity(vec(a), vec(b)) == similarity(vec(b), vec(a)));
    CHECK(similarity(vec(a), vec(a)) == 1.0);
  }
}

TEST_CASE("compression diffs against the most similar library sample") {
  NormalSampleLibrary lib;

  SUBCASE("empty library is an error") {
    CHECK_THROWS_AS(compress(vec({1, 2}), lib), ConfigError);
  }

  lib.append(vec({1, 2, 3, 4}));
  SUBCASE("a vector present in the library compresses to zero") {
    const auto bits = compress(vec({1, 2, 3, 4}), lib).bits;
    CHECK(bits == std::vector<std::uint8_t>{0, 0, 0, 0});
  }
  SUBCASE("positionwise differences become ones") {
    const auto bits = compress(vec({1, 9, 3, 4}), lib).bits;
    CHECK(bits == std::vector<std::uint8_t>{0, 1, 0, 0});
  }
  SUBCASE("the nearer sample wins") {
    // sim(v, s1) = 0.9 vs sim(v, s2) = 0.6 over 10 slots.
    NormalSampleLibrary two;
    two.append(vec({0, 0, 0, 0, 0, 0, 0, 0, 0, 9}));        // s1: differs in 1
    two.append(vec({0, 0, 0, 0, 0, 0, 7, 7, 7, 7}));        // s2: differs in 4
    const auto bits = compress(vec({0, 0, 0, 0, 0, 0, 0, 0, 0, 0}), two).bits;
    CHECK(bits ==
          std::vector<std::uint8_t>{0, 0, 0, 0, 0, 0, 0, 0, 0, 1});
  }
  SUBCASE("similarity ties keep the smallest library index") {
    NormalSampleLibrary two;
    two.append(vec({1, 0}));  // sim 0.5 against {1, 5}
    two.append(vec({0, 5}));  // sim 0.5 as well
    const auto bits = compress(vec({1, 5}), two).bits;
    CHECK(bits == std::vector<std::uint8_t>{0, 1});  // diff against index 0
  }
}

TEST_CASE("popcount equals dimension times one minus best similarity") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 8 + static_cast<int>(uniform_index(rng, 8));
    NormalSampleLibrary lib;
    for (int s = 0; s < 5; ++s) {
      std::vector<int> symbols;
      for (int i = 0; i < m; ++i) {
        symbols.push_back(static_cast<int>(uniform_index(rng, 3)));
      }
      lib.append(vec(symbols));
    }
    std::vector<int> symbols;
    for (int i = 0; i < m; ++i) {
      symbols.push_back(static_cast<int>(uniform_index(rng, 3)));
    }
    const auto v = vec(symbols);

    double best = -1.0;
    for (const auto& s : lib.samples) best = std::max(best, similarity(v, s));
    int popcount = 0;
    for (auto b : compress(v, lib).bits) popcount += b;
    CHECK(popcount == doctest::Approx(m * (1.0 - best)));
  }
}

TEST_CASE("compressing against a library containing itself gives zeros") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    NormalSampleLibrary lib;
    std::vector<int> symbols;
    for (int i = 0; i < 10; ++i) {
      symbols.push_back(static_cast<int>(uniform_index(rng, 5)));
    }
    lib.append(vec({9, 9, 9, 9, 9, 9, 9, 9, 9, 9}));
    lib.append(vec(symbols));
    for (auto b : compress(vec(symbols), lib).bits) CHECK(b == 0);
  }
}

TEST_CASE("library serialization round-trips") {
  NormalSampleLibrary lib;
  lib.append(vec({1, 2, 3}));
  lib.append(vec({0, static_cast<int>(kAbsentSymbol), 4}));
  std::ostringstream out;
  lib.save(out);
  std::istringstream in(out.str());
  const NormalSampleLibrary loaded = NormalSampleLibrary::load(in);
  REQUIRE(loaded.samples.size() == 2);
  CHECK(loaded.samples[1].symbols == lib.samples[1].symbols);
  std::ostringstream out2;
  loaded.save(out2);
  CHECK(out2.str() == out.str());
}

TEST_CASE("schema serialization round-trips") {
  const FeatureSchema schema =
      FeatureSchema::build({"x", "y"}, {"z"}, 4, {.levels = false});
  std::ostringstream out;
  schema.save(out);
  std::istringstream in(out.str());
  const FeatureSchema loaded = FeatureSchema::load(in);
  CHECK(loaded == schema);
  CHECK(loaded.dimension() == schema.dimension());
}

TEST_CASE("featurize fills absent slots and zero log slots for empty windows") {
  Window window;
  window.start = 0;
  window.length = 3600;
  window.pairs[0] = {};  // no metric slices, no logs

  DrainParser parser;
  parser.add("CRC Error on port 1");
  auto vectors = vectorize_templates(parser.templates());
  LogFeatureModel log_model{std::move(parser), cluster_templates(vectors, 0.5)};
  fit_normal_counts(log_model.clusters, {{0.0}, {0.0}});

  const FeatureSchema schema = FeatureSchema::build({"m"}, {"m"}, 1);
  // Pattern model may be null only when no pattern slots exist; here we
  // need one, so build a tiny trained model.
  const auto shapes = generate_shape_corpus(12, 3);
  std::vector<std::pair<std::vector<double>, PatternClass>> labeled;
  for (const auto& s : shapes) labeled.push_back({s.values, s.label});
  const PatternModel pattern = PatternModel::train(labeled, 3);

  const auto features =
      featurize_window(window, schema, &pattern, &log_model, "w0");
  const auto& v = features.at(0);
  REQUIRE(v.symbols.size() == 5);
  CHECK(v.symbols[0] == kAbsentSymbol);  // compute pattern
  CHECK(v.symbols[1] == kAbsentSymbol);  // compute level
  CHECK(v.symbols[2] == kAbsentSymbol);  // switch pattern
  CHECK(v.symbols[3] == kAbsentSymbol);  // switch level
  CHECK(v.symbols[4] == 0);              // log slot: zero count, not absent
}

TEST_CASE("featurize is deterministic") {
  Window window;
  window.start = 0;
  window.length = 3600;
  PairSlice ps;
  for (int i = 0; i < 20; ++i) {
    ps.compute["m"].diffs.push_back(i % 5);
    ps.switch_side["m"].diffs.push_back(3.0);
  }
  for (int p = 0; p < 4; ++p) window.pairs[p] = ps;

  const FeatureSchema schema =
      FeatureSchema::build({"m"}, {"m"}, 0, {.patterns = false, .logs = false});
  const auto a = featurize_window(window, schema, nullptr, nullptr, "w");
  const auto b = featurize_window(window, schema, nullptr, nullptr, "w");
  for (int p = 0; p < 4; ++p) CHECK(a.at(p).symbols == b.at(p).symbols);
}
