#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "nicdiag/logfeat.hpp"

using namespace nicdiag;

namespace {

std::vector<LogRecord> records_from(const std::vector<std::string>& messages) {
  std::vector<LogRecord> out;
  for (std::size_t i = 0; i < messages.size(); ++i) {
    out.push_back({static_cast<std::int64_t>(i), "server1", LogLevel::Info,
                   messages[i]});
  }
  return out;
}

// Canonical partition: sorted list of sorted member-id lists.
std::vector<std::vector<int>> partition_of(const LogClusterModel& m) {
  auto p = m.clusters;
  for (auto& c : p) std::sort(c.begin(), c.end());
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace

TEST_CASE("parameterized messages collapse into one wildcard template") {
  const auto [templates, assignment] = parse_templates(
      records_from({"CRC Error on port 3", "CRC Error on port 7"}));
  REQUIRE(templates.size() == 1);
  CHECK(templates[0].text() == "CRC Error on port <*>");
  CHECK(templates[0].example_count == 2);
  CHECK(assignment == std::vector<int>{0, 0});
}

TEST_CASE("a single record becomes its own template") {
  const auto [templates, assignment] =
      parse_templates(records_from({"link training complete"}));
  REQUIRE(templates.size() == 1);
  CHECK(templates[0].text() == "link training complete");
}

TEST_CASE("distinct message families yield distinct templates") {
  const auto [templates, assignment] = parse_templates(records_from(
      {"CRC Error on port 3", "Tx Timeout on port 3", "CRC Error on port 9"}));
  REQUIRE(templates.size() == 2);
  CHECK(assignment == std::vector<int>{0, 1, 0});
}

TEST_CASE("re-parsing the template set reproduces it") {
  const auto [templates, assignment] = parse_templates(records_from({
      "CRC Error on port 3",
      "CRC Error on port 7",
      "Tx Timeout on queue 2 reset issued",
      "job heartbeat step 4 completed in 12 ms",
      "job heartbeat step 5 completed in 19 ms",
      "link flap suppressed",
  }));
  std::vector<std::string> template_texts;
  for (const LogTemplate& t : templates) template_texts.push_back(t.text());

  const auto [again, assignment2] =
      parse_templates(records_from(template_texts));
  REQUIRE(again.size() == templates.size());
  std::set<std::string> a, b;
  for (const auto& t : templates) a.insert(t.text());
  for (const auto& t : again) b.insert(t.text());
  CHECK(a == b);
}

TEST_CASE("match-only lookup never creates groups") {
  DrainParser parser;
  parser.add("CRC Error on port 3");
  CHECK(parser.match("CRC Error on port 9") == 0);
  CHECK(parser.match("completely different message") == -1);
  CHECK(parser.templates().size() == 1);
}

TEST_CASE("TF-IDF weights match hand arithmetic for one template") {
  const auto [templates, assignment] =
      parse_templates(records_from({"alpha beta beta"}));
  const auto vectors = vectorize_templates(templates);
  REQUIRE(vectors.size() == 1);
  // IDF = ln(1/1) + 1 = 1 for every token; weight = TF.
  CHECK(vectors[0].weights.at("alpha") == doctest::Approx(1.0));
  CHECK(vectors[0].weights.at("beta") == doctest::Approx(2.0));
}

TEST_CASE("cosine similarity hits the orthogonal and identical extremes") {
  TemplateVector a{0, {{"x", 1.0}, {"y", 2.0}}};
  TemplateVector b{1, {{"z", 3.0}}};
  TemplateVector c{2, {{"x", 2.0}, {"y", 4.0}}};  // parallel to a
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.0));
  CHECK(cosine_similarity(a, c) == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0));
}

TEST_CASE("wildcard-only templates cannot be vectorized") {
  std::vector<LogTemplate> templates(1);
  templates[0].id = 0;
  templates[0].tokens = {kWildcard, kWildcard};
  CHECK_THROWS_AS(vectorize_templates(templates), ValidationError);
}

TEST_CASE("agglomeration handles the small hand cases") {
  SUBCASE("one vector, one cluster") {
    const auto model = cluster_templates({{0, {{"a", 1.0}}}}, 0.5);
    CHECK(model.clusters == std::vector<std::vector<int>>{{0}});
  }
  SUBCASE("identical vectors merge at distance zero") {
    const auto model = cluster_templates(
        {{0, {{"a", 1.0}}}, {1, {{"a", 1.0}}}}, 0.5);
    CHECK(model.clusters == std::vector<std::vector<int>>{{0, 1}});
    REQUIRE(model.linkage.size() == 1);
    CHECK(model.linkage[0].distance == doctest::Approx(0.0));
  }
  SUBCASE("close pair groups, orthogonal vector stays apart") {
    // v0 and v1 share tokens (cosine ~0.8); v2 is disjoint.
    const auto model = cluster_templates({{0, {{"a", 2.0}, {"b", 1.0}}},
                                          {1, {{"a", 1.0}, {"b", 1.0}}},
                                          {2, {{"z", 1.0}}}},
                                         0.5);
    const std::vector<std::vector<int>> expected{{0, 1}, {2}};
    CHECK(model.clusters == expected);
  }
  SUBCASE("empty input is an error") {
    CHECK_THROWS_AS(cluster_templates({}, 0.5), ValidationError);
  }
}

TEST_CASE("clustering is stable under input permutation") {
  std::mt19937_64 rng(41);
  std::vector<TemplateVector> vectors;
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < 12; ++i) {
    TemplateVector v;
    v.template_id = i;
    for (const auto& tok : vocab) {
      if (uniform01(rng) < 0.4) v.weights[tok] = 1.0 + uniform01(rng);
    }
    if (v.weights.empty()) v.weights["a"] = 1.0;
    vectors.push_back(std::move(v));
  }
  const auto base = partition_of(cluster_templates(vectors, 0.5));
  for (int trial = 0; trial < 10; ++trial) {
    auto shuffled = vectors;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[uniform_index(rng, i)]);
    }
    CHECK(partition_of(cluster_templates(shuffled, 0.5)) == base);
  }
}

TEST_CASE("normal count statistics use the population deviation") {
  auto model = cluster_templates({{0, {{"a", 1.0}}}, {1, {{"z", 1.0}}}}, 0.5);
  REQUIRE(model.cluster_count() == 2);

  SUBCASE("mu and sigma from two windows") {
    fit_normal_counts(model, {{4.0, 3.0}, {6.0, 3.0}});
    CHECK(model.mu[0] == doctest::Approx(5.0));
    CHECK(model.sigma[0] == doctest::Approx(1.0));  // population, not n-1
    CHECK(model.sigma[1] == doctest::Approx(0.0));
  }
  SUBCASE("a cluster absent from normal windows keeps mu = sigma = 0") {
    fit_normal_counts(model, {{0.0, 2.0}, {0.0, 4.0}});
    CHECK(model.mu[0] == 0.0);
    CHECK(model.sigma[0] == 0.0);
  }
  SUBCASE("fewer than two windows is an error") {
    CHECK_THROWS_AS(fit_normal_counts(model, {{1.0, 1.0}}), TrainingError);
  }
}

TEST_CASE("three-sigma quantization") {
  auto model = cluster_templates({{0, {{"a", 1.0}}}, {1, {{"z", 1.0}}}}, 0.5);
  fit_normal_counts(model, {{4.0, 0.0}, {6.0, 0.0}});
  // cluster 0: mu 5, sigma 1; cluster 1: mu 0, sigma 0.

  CHECK(quantize_counts(model, {9.0, 0.0}) == std::vector<int>{1, 0});
  CHECK(quantize_counts(model, {5.0, 0.0}) == std::vector<int>{0, 0});
  CHECK(quantize_counts(model, {0.0, 1.0}) == std::vector<int>{0, 1});

  SUBCASE("counts drawn from the fitted windows quantize to zero") {
    CHECK(quantize_counts(model, {4.0, 0.0}) == std::vector<int>{0, 0});
    CHECK(quantize_counts(model, {6.0, 0.0}) == std::vector<int>{0, 0});
  }
  SUBCASE("unfitted models refuse to quantize") {
    const auto unfitted =
        cluster_templates({{0, {{"a", 1.0}}}}, 0.5);
    CHECK_THROWS_AS(quantize_counts(unfitted, {1.0}), ConfigError);
  }
}

TEST_CASE("log feature model serialization round-trips") {
  DrainParser parser;
  parser.add("CRC Error on port 3");
  parser.add("CRC Error on port 7");
  parser.add("Tx Timeout on queue 2 reset issued");
  parser.add("job heartbeat step 4 completed in 12 ms");
  auto vectors = vectorize_templates(parser.templates());
  LogFeatureModel model{std::move(parser), cluster_templates(vectors, 0.5)};
  std::vector<std::vector<double>> windows(
      3, std::vector<double>(model.clusters.cluster_count(), 2.0));
  fit_normal_counts(model.clusters, windows);

  std::ostringstream out;
  model.save(out);
  std::istringstream in(out.str());
  const LogFeatureModel loaded = LogFeatureModel::load(in);
  std::ostringstream out2;
  loaded.save(out2);
  CHECK(out2.str() == out.str());

  // Matching behaves identically after the round trip.
  CHECK(loaded.parser.match("CRC Error on port 99") ==
        model.parser.match("CRC Error on port 99"));
  const std::vector<LogRecord> recs = {
      {0, "server1", LogLevel::Error, "CRC Error on port 5"}};
  CHECK(loaded.count_clusters(recs) == model.count_clusters(recs));
}
