#include "timeline/topic_model.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace timeline;
using Partitions = std::vector<std::vector<int>>;

namespace {

std::vector<int> planted_docs() {
  std::vector<int> p;
  for (int d = 0; d < 20; ++d) p.push_back(d < 10 ? 0 : 1);
  return p;
}

// Docs in two blocks, words {a,b} and {c,d} in two more, then the side tops.
Partitions planted_state() {
  auto l0 = planted_docs();
  for (int b : {2, 2, 3, 3}) l0.push_back(b);
  return {l0, {0, 0, 1, 1}};
}

Partitions merged_state() {
  std::vector<int> l0(20, 0);
  for (int i = 0; i < 4; ++i) l0.push_back(1);
  return {l0, {0, 1}};
}

std::vector<int> word_partition(const BlockState& s, std::size_t docs, std::size_t level = 0) {
  std::vector<int> out;
  for (std::size_t n = docs; n < s.partitions[0].size(); ++n) {
    int b = s.partitions[0][n];
    for (std::size_t l = 1; l <= level; ++l) b = s.partitions[l][static_cast<std::size_t>(b)];
    out.push_back(b);
  }
  return out;
}

void check_row_stochastic(const TopicModel& m) {
  for (const auto& row : m.word_given_topic) {
    double s = 0.0;
    for (double p : row) {
      CHECK(p >= 0.0);
      s += p;
    }
    CHECK(std::fabs(s - 1.0) < 1e-9);
  }
  for (const auto& row : m.topic_given_document) {
    double s = 0.0;
    for (double p : row) {
      CHECK(p >= 0.0);
      s += p;
    }
    CHECK(std::fabs(s - 1.0) < 1e-9);
  }
}

}  // namespace

TEST_CASE("build_graph") {
  BagOfWords one;
  one.counts = {{0, 3}};
  auto g = build_graph({one}, 1);
  CHECK(g.edges == 3);
  REQUIRE(g.adjacency[0].size() == 1);
  CHECK(g.adjacency[0][0] == std::pair<std::size_t, long>{1, 3});

  BagOfWords a, b, c;
  a.counts = {{0, 2}, {1, 1}};
  b.counts = {{2, 4}};
  c.counts = {{0, 1}, {2, 1}};
  g = build_graph({a, b, c}, 3);
  CHECK(g.degree == std::vector<long>{3, 4, 2, 3, 1, 5});
  CHECK(g.edges == 9);

  // Disjoint vocabularies: no document shares a neighbour.
  g = build_graph({a, b}, 3);
  CHECK(g.adjacency[0].back().first < g.word_node(2));
  CHECK(g.adjacency[1].front().first == g.word_node(2));
}

TEST_CASE("description length ordering on the planted graph") {
  const auto g = build_graph(oracle::planted_bags(), 4);
  const double planted = description_length(g, make_block_state(g, planted_state()));
  const double merged = description_length(g, make_block_state(g, merged_state()));
  CHECK(std::isfinite(planted));
  CHECK(planted < merged);
  CHECK(description_length(g, make_block_state(g, planted_state())) == planted);
}

TEST_CASE("merging identical-connectivity word blocks does not increase the description length") {
  const auto g = build_graph(oracle::planted_bags(), 4);
  auto split = planted_docs();
  for (int b : {2, 3, 4, 5}) split.push_back(b);
  auto joined = planted_docs();
  for (int b : {2, 2, 3, 4}) joined.push_back(b);
  const double before = description_length(g, make_block_state(g, {split, {0, 0, 1, 1, 1, 1}}));
  const double after = description_length(g, make_block_state(g, {joined, {0, 0, 1, 1, 1}}));
  CHECK(after <= before);
}

TEST_CASE("inconsistent states are rejected") {
  const auto g = build_graph(oracle::planted_bags(), 4);
  CHECK_THROWS_AS(make_block_state(g, {{0, 1}}), InconsistentState);
  auto mixed = merged_state();
  mixed[0][0] = 1;  // a document inside the word block
  CHECK_THROWS_AS(make_block_state(g, mixed), InconsistentState);
  auto two_tops = planted_state();
  two_tops.pop_back();
  CHECK_THROWS_AS(make_block_state(g, two_tops), InconsistentState);
}

TEST_CASE("infer recovers the planted partition") {
  const auto g = build_graph(oracle::planted_bags(), 4);
  const std::vector<int> truth{0, 0, 1, 1};
  InferenceOptions opt;
  opt.sweeps = 50;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    opt.seed = seed;
    const auto r = infer(g, opt);
    CHECK(oracle::nmi(word_partition(r.state, 20), truth) == doctest::Approx(1.0));
    for (std::size_t i = 1; i < r.best_trace.size(); ++i) CHECK(r.best_trace[i] <= r.best_trace[i - 1]);
    CHECK(r.state.description_length == doctest::Approx(description_length(g, r.state)).epsilon(1e-12));
    CHECK(r.best_trace.back() == r.state.description_length);

    // No block mixes the two node types at any level.
    for (std::size_t l = 0; l < r.state.levels(); ++l) {
      std::map<int, bool> side;
      for (std::size_t n = 0; n < g.nodes(); ++n) {
        int b = r.state.partitions[0][n];
        for (std::size_t k = 1; k <= l; ++k) b = r.state.partitions[k][static_cast<std::size_t>(b)];
        auto [it, fresh] = side.emplace(b, g.is_document(n));
        CHECK(it->second == g.is_document(n));
      }
    }
  }
}

TEST_CASE("infer on noisy planted corpora") {
  const std::vector<int> truth{0, 0, 1, 1};
  InferenceOptions opt;
  opt.sweeps = 50;
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = build_graph(oracle::noisy_planted_bags(seed), 4);
    opt.seed = seed;
    const auto r = infer(g, opt);
    if (oracle::nmi(word_partition(r.state, 20), truth) >= 0.95) ++recovered;
  }
  CHECK(recovered >= 4);
}

TEST_CASE("infer is deterministic per seed") {
  const auto g = build_graph(oracle::noisy_planted_bags(3), 4);
  InferenceOptions opt;
  opt.seed = 17;
  opt.sweeps = 40;
  const auto a = infer(g, opt);
  const auto b = infer(g, opt);
  CHECK(a.state == b.state);
  CHECK(a.best_trace == b.best_trace);
}

TEST_CASE("degenerate and empty graphs") {
  BagOfWords one;
  one.counts = {{0, 5}};
  const auto g = build_graph({one}, 1);
  const auto r = infer(g, InferenceOptions{0, 10, 10, 1.0});
  const auto [docs, words] = side_block_counts(r.state, 0, 1);
  CHECK(docs == 1);
  CHECK(words == 1);
  const auto m = extract_topics(g, r.state, 0);
  CHECK(m.topics == 1);
  CHECK(m.word_given_topic[0][0] == 1.0);
  CHECK(m.topic_given_document[0][0] == 1.0);

  CHECK_THROWS_AS(infer(build_graph({BagOfWords{}}, 1), InferenceOptions{}), EmptyGraph);
}

TEST_CASE("extract_topics on the planted state") {
  const auto g = build_graph(oracle::planted_bags(), 4);
  const auto state = make_block_state(g, planted_state());
  const auto m = extract_topics(g, state, 0);
  REQUIRE(m.topics == 2);
  CHECK(m.word_topic == std::vector<int>{0, 0, 1, 1});
  CHECK(m.word_given_topic[0] == std::vector<double>{0.5, 0.5, 0.0, 0.0});
  CHECK(m.topic_given_document[0] == std::vector<double>{1.0, 0.0});
  CHECK(m.topic_given_document[19] == std::vector<double>{0.0, 1.0});
  check_row_stochastic(m);
  CHECK_THROWS(extract_topics(g, state, 5));
}

TEST_CASE("topic marginals recover the unigram distribution") {
  const auto bags = oracle::noisy_planted_bags(9);
  const auto g = build_graph(bags, 4);
  const auto r = infer(g, InferenceOptions{1, 20, 10, 1.0});
  for (std::size_t level = 0; level < r.state.levels(); ++level) {
    const auto m = extract_topics(g, r.state, level);
    check_row_stochastic(m);
    std::vector<double> mass(m.topics, 0.0);
    for (std::size_t w = 0; w < 4; ++w)
      mass[static_cast<std::size_t>(m.word_topic[w])] += static_cast<double>(g.degree[g.word_node(w)]);
    for (std::size_t w = 0; w < 4; ++w) {
      double p = 0.0;
      for (std::size_t k = 0; k < m.topics; ++k) p += m.word_given_topic[k][w] * mass[k] / static_cast<double>(g.edges);
      CHECK(std::fabs(p - static_cast<double>(g.degree[g.word_node(w)]) / static_cast<double>(g.edges)) < 1e-9);
    }
  }
}

TEST_CASE("select_level picks the finest level inside the topic range") {
  const auto g = build_graph(oracle::planted_bags(), 4);
  const auto state = make_block_state(g, planted_state());
  CHECK(select_level(state, 20) == 0);
  const auto flat = make_block_state(g, merged_state());
  CHECK(select_level(flat, 20) == 0);
}
