#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "nicdiag/forest.hpp"

using namespace nicdiag;

namespace {

// Disjoint-support bit patterns per class: trivially separable.
void separable_corpus(int per_class,
                      std::vector<std::vector<std::uint8_t>>& x,
                      std::vector<StateLabel>& y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int dim = 18;
  const std::vector<StateLabel> classes = {StateLabel::F1, StateLabel::F2,
                                           StateLabel::Victim,
                                           StateLabel::Normal};
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (int i = 0; i < per_class; ++i) {
      std::vector<std::uint8_t> row(dim, 0);
      if (classes[c] != StateLabel::Normal) {
        row[4 * c] = 1;
        row[4 * c + 1] = 1;
        if (uniform01(rng) < 0.5) row[4 * c + 2] = 1;
      }
      x.push_back(std::move(row));
      y.push_back(classes[c]);
    }
  }
}

}  // namespace

TEST_CASE("single-class training is rejected") {
  std::vector<std::vector<std::uint8_t>> x(10, {1, 0, 1});
  std::vector<StateLabel> y(10, StateLabel::Normal);
  CHECK_THROWS_AS(ForestModel::train(x, y, 1), TrainingError);
}

TEST_CASE("mixed dimensions are rejected") {
  std::vector<std::vector<std::uint8_t>> x = {{1, 0}, {1, 0, 1}};
  std::vector<StateLabel> y = {StateLabel::F1, StateLabel::Normal};
  CHECK_THROWS_AS(ForestModel::train(x, y, 1), TrainingError);
}

TEST_CASE("linearly separable patterns reach OOB accuracy 1.0") {
  std::vector<std::vector<std::uint8_t>> x;
  std::vector<StateLabel> y;
  separable_corpus(30, x, y, 3);
  const ForestModel model = ForestModel::train(x, y, 11);
  CHECK(model.oob_accuracy() == doctest::Approx(1.0));
}

TEST_CASE("duplicating every sample preserves predictions") {
  std::vector<std::vector<std::uint8_t>> x;
  std::vector<StateLabel> y;
  separable_corpus(20, x, y, 5);
  const ForestModel single = ForestModel::train(x, y, 7);

  std::vector<std::vector<std::uint8_t>> x2 = x;
  std::vector<StateLabel> y2 = y;
  x2.insert(x2.end(), x.begin(), x.end());
  y2.insert(y2.end(), y.begin(), y.end());
  const ForestModel doubled = ForestModel::train(x2, y2, 7);

  for (const auto& row : x) {
    const auto a = single.predict_row(row);
    const auto b = doubled.predict_row(row);
    int best_a = 0, best_b = 0;
    for (int c = 1; c < kStateCount; ++c) {
      if (a[c] > a[best_a]) best_a = c;
      if (b[c] > b[best_b]) best_b = c;
    }
    CHECK(best_a == best_b);
  }
}

TEST_CASE("training is deterministic under a fixed seed") {
  std::vector<std::vector<std::uint8_t>> x;
  std::vector<StateLabel> y;
  separable_corpus(15, x, y, 9);
  const ForestModel a = ForestModel::train(x, y, 21);
  const ForestModel b = ForestModel::train(x, y, 21);
  std::ostringstream sa, sb;
  a.save(sa);
  b.save(sb);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("prediction rows are probability rows") {
  std::vector<std::vector<std::uint8_t>> x;
  std::vector<StateLabel> y;
  separable_corpus(15, x, y, 13);
  const ForestModel model = ForestModel::train(x, y, 3);

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint8_t> row(18, 0);
    for (auto& b : row) b = uniform_index(rng, 2);
    const auto probs = model.predict_row(row);
    double sum = 0.0;
    for (double p : probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("a pure F1 indicator bit never decreases F1 probability") {
  // The F1 class of the separable corpus owns bits 0..2.
  std::vector<std::vector<std::uint8_t>> x;
  std::vector<StateLabel> y;
  separable_corpus(30, x, y, 19);
  const ForestModel model = ForestModel::train(x, y, 29);

  std::vector<std::uint8_t> off(18, 0);
  std::vector<std::uint8_t> on = off;
  on[0] = 1;
  on[1] = 1;
  const double p_off = model.predict_row(off)[static_cast<int>(StateLabel::F1)];
  const double p_on = model.predict_row(on)[static_cast<int>(StateLabel::F1)];
  CHECK(p_on >= p_off);
}

TEST_CASE("prediction rejects the wrong dimension") {
  std::vector<std::vector<std::uint8_t>> x;
  std::vector<StateLabel> y;
  separable_corpus(15, x, y, 23);
  const ForestModel model = ForestModel::train(x, y, 1);
  CHECK_THROWS_AS(model.predict_row({1, 0}), ConfigError);
}

TEST_CASE("predict_states orders rows by pair id") {
  std::vector<std::vector<std::uint8_t>> x;
  std::vector<StateLabel> y;
  separable_corpus(20, x, y, 27);
  const ForestModel model = ForestModel::train(x, y, 5);

  std::vector<AnomalyVector> vectors;
  AnomalyVector v1;
  v1.pair_id = 1;
  v1.bits.assign(18, 0);
  v1.bits[0] = v1.bits[1] = 1;  // F1 signature
  AnomalyVector v0;
  v0.pair_id = 0;
  v0.bits.assign(18, 0);
  vectors.push_back(v1);
  vectors.push_back(v0);

  const StateProbabilityMatrix s = predict_states(model, vectors);
  REQUIRE(s.rows.size() == 2);
  // Row 0 belongs to pair 0 (normal-looking), row 1 to pair 1 (F1 bits).
  int best0 = 0, best1 = 0;
  for (int c = 1; c < kStateCount; ++c) {
    if (s.rows[0][c] > s.rows[0][best0]) best0 = c;
    if (s.rows[1][c] > s.rows[1][best1]) best1 = c;
  }
  CHECK(best0 == static_cast<int>(StateLabel::Normal));
  CHECK(best1 == static_cast<int>(StateLabel::F1));
}

TEST_CASE("forest serialization round-trips and predicts identically") {
  std::vector<std::vector<std::uint8_t>> x;
  std::vector<StateLabel> y;
  separable_corpus(15, x, y, 31);
  const ForestModel model = ForestModel::train(x, y, 9);

  std::ostringstream out;
  model.save(out);
  std::istringstream in(out.str());
  const ForestModel loaded = ForestModel::load(in);
  CHECK(loaded.oob_accuracy() == model.oob_accuracy());
  CHECK(loaded.dimension() == model.dimension());

  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> row(18, 0);
    for (auto& b : row) b = uniform_index(rng, 2);
    CHECK(loaded.predict_row(row) == model.predict_row(row));
  }
}
