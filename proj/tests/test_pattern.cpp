#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nicdiag/pattern.hpp"

using namespace nicdiag;

namespace {

// Independent resample + z-score used as the oracle for normalize_slice.
std::vector<double> oracle_normalize(const std::vector<double>& in) {
  std::vector<double> out(64, 0.0);
  for (int i = 0; i < 64; ++i) {
    const double h = static_cast<double>(i) * (in.size() - 1) / 63.0;
    const std::size_t lo = static_cast<std::size_t>(h);
    out[i] = lo + 1 >= in.size()
                 ? in.back()
                 : in[lo] + (h - lo) * (in[lo + 1] - in[lo]);
  }
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= 64.0;
  double var = 0.0;
  for (double v : out) var += (v - mean) * (v - mean);
  var /= 64.0;
  for (double& v : out) v = (v - mean) / std::sqrt(var);
  return out;
}

}  // namespace

TEST_CASE("constant slices normalize to the zero vector") {
  const auto v = normalize_slice(std::vector<double>(40, 5.0));
  REQUIRE(v.size() == 64);
  for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("empty and singleton inputs normalize to the zero vector") {
  CHECK(normalize_slice({}) == std::vector<double>(64, 0.0));
  CHECK(normalize_slice({3.5}) == std::vector<double>(64, 0.0));
}

TEST_CASE("any input normalizes to length 64") {
  std::mt19937_64 rng(3);
  for (int n : {2, 5, 59, 64, 200}) {
    std::vector<double> in;
    for (int i = 0; i < n; ++i) in.push_back(uniform01(rng));
    CHECK(normalize_slice(in).size() == 64);
  }
}

TEST_CASE("ramp normalization matches the independent oracle") {
  std::vector<double> ramp;
  for (int i = 0; i < 60; ++i) ramp.push_back(i);
  const auto got = normalize_slice(ramp);
  const auto expected = oracle_normalize(ramp);
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < 64; ++i) {
    CHECK(got[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    if (i) CHECK(got[i] > got[i - 1]);  // strictly increasing
    mean += got[i];
  }
  mean /= 64.0;
  for (double v : got) var += (v - mean) * (v - mean);
  CHECK(mean == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(std::sqrt(var / 64.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("level symbols follow the boxplot fences") {
  SUBCASE("hand-computed quartiles on {1,2,3,4}") {
    // Q1 = 1.75, Q3 = 3.25, IQR = 1.5.
    const auto symbols =
        level_symbols({{"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}});
    CHECK(symbols.at("c") == LevelSymbol::M);
    CHECK(symbols.at("a") == LevelSymbol::L);   // -0.5 <= 1 < 1.75
    CHECK(symbols.at("d") == LevelSymbol::H);   // 3.25 < 4 <= 5.5
  }
  SUBCASE("all devices equal means all M") {
    const auto symbols =
        level_symbols({{"a", 7.0}, {"b", 7.0}, {"c", 7.0}, {"d", 7.0}});
    for (const auto& [dev, s] : symbols) CHECK(s == LevelSymbol::M);
  }
  SUBCASE("an outlier beyond the fence is VH") {
    // Q3 = 4 + 0.75*96... sorted {1,2,3,4,100}: Q1=2, Q3=4, fence=7 < 100.
    const auto symbols = level_symbols(
        {{"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}, {"e", 100.0}});
    CHECK(symbols.at("e") == LevelSymbol::VH);
  }
  SUBCASE("fewer than four devices all read M") {
    const auto symbols = level_symbols({{"a", 1.0}, {"b", 100.0}});
    CHECK(symbols.at("a") == LevelSymbol::M);
    CHECK(symbols.at("b") == LevelSymbol::M);
  }
}

TEST_CASE("level symbols are monotone in the mean") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, double> means;
    const int n = 4 + static_cast<int>(uniform_index(rng, 12));
    for (int i = 0; i < n; ++i) {
      means["d" + std::to_string(i)] = 100.0 * uniform01(rng);
    }
    const auto symbols = level_symbols(means);
    for (const auto& [d1, m1] : means) {
      for (const auto& [d2, m2] : means) {
        if (m1 <= m2) {
          CHECK(static_cast<int>(symbols.at(d1)) <=
                static_cast<int>(symbols.at(d2)));
        }
      }
    }
  }
}

TEST_CASE("training rejects degenerate corpora") {
  const auto shapes = generate_shape_corpus(12, 5);
  SUBCASE("single class") {
    std::vector<std::pair<std::vector<double>, PatternClass>> labeled;
    for (const auto& s : shapes) {
      if (s.label == PatternClass::Flat) labeled.push_back({s.values, s.label});
    }
    CHECK_THROWS_AS(PatternModel::train(labeled, 1), TrainingError);
  }
  SUBCASE("a class with fewer than 10 examples is named") {
    std::vector<std::pair<std::vector<double>, PatternClass>> labeled;
    int spikes = 0;
    for (const auto& s : shapes) {
      if (s.label == PatternClass::SingleSpike && ++spikes > 3) continue;
      labeled.push_back({s.values, s.label});
    }
    try {
      PatternModel::train(labeled, 1);
      FAIL("expected TrainingError");
    } catch (const TrainingError& e) {
      CHECK(std::string(e.what()).find("single-spike") != std::string::npos);
    }
  }
}

namespace {

const std::vector<ShapeSample>& shared_shapes() {
  static const std::vector<ShapeSample> shapes = generate_shape_corpus(200, 17);
  return shapes;
}

const PatternModel& shared_model() {
  static const PatternModel model = [] {
    std::vector<std::pair<std::vector<double>, PatternClass>> labeled;
    for (const auto& s : shared_shapes()) labeled.push_back({s.values, s.label});
    return PatternModel::train(labeled, 17);
  }();
  return model;
}

}  // namespace

TEST_CASE("trained model meets the held-out bar and the shape examples") {
  const auto& shapes = shared_shapes();
  const PatternModel& model = shared_model();

  CHECK(model.meta().holdout_accuracy >= 0.90);

  SUBCASE("constant slice classifies flat") {
    CHECK(model.classify(std::vector<double>(60, 4.0)) == PatternClass::Flat);
  }
  SUBCASE("monotone ramp classifies steady rise") {
    std::vector<double> ramp;
    for (int i = 0; i < 60; ++i) ramp.push_back(i);
    CHECK(model.classify(ramp) == PatternClass::SteadyRise);
  }
  SUBCASE("a single Gaussian bump classifies single spike") {
    std::vector<double> bump(60, 0.0);
    for (int i = 0; i < 60; ++i) {
      const double d = (i - 30.0) / 2.0;
      bump[i] = 10.0 * std::exp(-0.5 * d * d);
    }
    CHECK(model.classify(bump) == PatternClass::SingleSpike);
  }

  SUBCASE("classification is scale and shift invariant") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
      const auto& s = shapes[uniform_index(rng, shapes.size())];
      const double a = 0.01 + 99.0 * uniform01(rng);
      const double b = -500.0 + 1000.0 * uniform01(rng);
      std::vector<double> scaled;
      for (double v : s.values) scaled.push_back(a * v + b);
      CHECK(model.classify(scaled) == model.classify(s.values));
    }
  }

  SUBCASE("softmax scores sum to one") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
      const auto& s = shapes[uniform_index(rng, shapes.size())];
      const auto probs = model.scores(normalize_slice(s.values));
      double sum = 0.0;
      for (double p : probs) sum += p;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("training is reproducible and serialization round-trips") {
    std::vector<std::pair<std::vector<double>, PatternClass>> labeled;
    for (const auto& s : shapes) labeled.push_back({s.values, s.label});
    const PatternModel again = PatternModel::train(labeled, 17);
    std::ostringstream a, b;
    model.save(a);
    again.save(b);
    CHECK(a.str() == b.str());

    std::istringstream in(a.str());
    const PatternModel loaded = PatternModel::load(in);
    std::ostringstream c;
    loaded.save(c);
    CHECK(c.str() == a.str());
  }
}
