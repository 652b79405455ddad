#include "timeline/correlation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace timeline;
using Matrix = std::vector<std::vector<double>>;

namespace {

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1]);
}

void check_centred(const MdsEmbedding& e) {
  double sx = 0.0, sy = 0.0;
  for (const auto& c : e.coords) {
    sx += c[0];
    sy += c[1];
  }
  CHECK(std::fabs(sx) < 1e-9);
  CHECK(std::fabs(sy) < 1e-9);
}

void check_monotone(const MdsEmbedding& e) {
  for (std::size_t i = 1; i < e.stress_history.size(); ++i) CHECK(e.stress_history[i] <= e.stress_history[i - 1]);
}

}  // namespace

TEST_CASE("equilateral triangle") {
  const Matrix d{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  const auto e = mds({"a", "b", "c"}, d);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) CHECK(std::fabs(dist(e.coords[i], e.coords[j]) - 1.0) < 1e-6);
  CHECK(e.stress < 1e-9);
  check_centred(e);
  check_monotone(e);
}

TEST_CASE("one and two points") {
  const auto one = mds({"a"}, {{0}});
  CHECK(one.coords[0] == std::array<double, 2>{0, 0});
  CHECK(one.stress == 0.0);

  const auto two = mds({"a", "b"}, {{0, 2}, {2, 0}});
  CHECK(std::fabs(dist(two.coords[0], two.coords[1]) - 2.0) < 1e-12);
  CHECK(two.stress < 1e-12);
}

TEST_CASE("embeddable 3x3 matrices are recovered") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::array<double, 2>> p(3);
    for (auto& q : p) q = {u(rng), u(rng)};
    Matrix d(3, std::vector<double>(3, 0.0));
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) d[i][j] = dist(p[i], p[j]);
    const auto e = mds({"x", "y", "z"}, d, 1);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) CHECK(std::fabs(dist(e.coords[i], e.coords[j]) - d[i][j]) < 1e-3);
    check_centred(e);
  }
}

TEST_CASE("stress never increases on non-Euclidean input") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 8;
    Matrix d(n, std::vector<double>(n, 0.0));
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back("l" + std::to_string(i));
      for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = u(rng);
    }
    const auto e = mds(labels, d, static_cast<std::uint64_t>(trial));
    check_monotone(e);
    check_centred(e);
    CHECK(e.stress >= 0.0);
    CHECK(e.stress == doctest::Approx(raw_stress(d, e.coords)).epsilon(1e-12));
    CHECK(e.iterations <= 1000);
    const auto again = mds(labels, d, static_cast<std::uint64_t>(trial));
    CHECK(again.coords == e.coords);
  }
}

TEST_CASE("identical points still embed") {
  const auto e = mds({"a", "b", "c"}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  CHECK(e.stress < 1e-12);
  for (const auto& c : e.coords) CHECK((std::isfinite(c[0]) && std::isfinite(c[1])));
}

TEST_CASE("invalid dissimilarities") {
  CHECK_THROWS_AS(mds({"a", "b"}, {{0, 1}, {2, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(mds({"a", "b"}, {{1, 1}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(mds({"a", "b"}, {{0, -1}, {-1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(mds({"a", "b"}, {{0, 1}}), std::invalid_argument);
}

TEST_CASE("nearest sentiment coloring") {
  MdsEmbedding e;
  e.labels = {"joy", "anger", "fear", "topic_0", "topic_1", "topic_2"};
  e.coords = {{{5, 5}}, {{-1, 0}}, {{1, 0}}, {{5, 5}}, {{0, 3}}, {{0.9, 0.2}}};
  const auto c = nearest_sentiment_coloring(e);
  CHECK(c.size() == 3);
  CHECK(c.at("topic_0") == "joy");
  CHECK(c.at("topic_1") == "anger");
  CHECK(c.at("topic_2") == "fear");
  CHECK(is_sentiment_label("trust"));
  CHECK_FALSE(is_sentiment_label("topic_3"));
}
