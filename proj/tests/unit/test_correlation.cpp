#include "timeline/correlation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

using namespace timeline;
using Series = std::vector<std::pair<std::string, std::vector<double>>>;

namespace {

constexpr double NA = std::numeric_limits<double>::quiet_NaN();

// a ~ b, c ~ d, the two pairs anti-correlated.
Series two_pairs() {
  const std::vector<double> up{0.1, 0.4, 0.2, 0.8, 0.5};
  std::vector<double> down;
  for (double v : up) down.push_back(1.0 - v);
  std::vector<double> up2;
  for (double v : up) up2.push_back(3.0 * v + 2.0);
  return {{"c", down}, {"a", up}, {"d", down}, {"b", up2}};
}

std::vector<std::string> names(const ClusterTree& t, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(t.labels[i]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("pearson worked values") {
  CHECK(std::fabs(pearson({1, 2, 3}, {2, 4, 6}) - 1.0) < 1e-12);
  CHECK(std::fabs(pearson({1, 2, 3}, {3, 2, 1}) + 1.0) < 1e-12);
  CHECK(std::fabs(pearson({1, 2, 3, 4}, {1, 3, 2, 4}) - 0.8) < 1e-12);
}

TEST_CASE("pearson undefined cases") {
  CHECK(std::isnan(pearson({1, 1, 1}, {1, 2, 3})));
  CHECK(std::isnan(pearson({1, NA, 3}, {1, 2, NA})));
  // Days missing in either series are dropped pairwise.
  CHECK(pearson({1, NA, 2, 3}, {2, 7, 4, 6}) == doctest::Approx(1.0));
}

TEST_CASE("pearson symmetry and affine invariance") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(12), y(12);
    for (auto& v : x) v = n(rng);
    for (auto& v : y) v = n(rng);
    const double r = pearson(x, y);
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    CHECK(pearson(y, x) == doctest::Approx(r).epsilon(1e-12));
    auto xs = x;
    for (auto& v : xs) v = 2.5 * v - 7.0;
    CHECK(pearson(xs, y) == doctest::Approx(r).epsilon(1e-9));
  }
}

TEST_CASE("to_dissimilarity") {
  CHECK(to_dissimilarity(1.0) == 0.0);
  CHECK(to_dissimilarity(0.0) == 1.0);
  CHECK(to_dissimilarity(-1.0) == 2.0);
  CHECK(to_dissimilarity(0.3) > to_dissimilarity(0.4));
  CHECK_THROWS_AS(to_dissimilarity(1.5), std::invalid_argument);
}

TEST_CASE("correlation matrix is symmetric with a unit diagonal") {
  const auto m = correlation_matrix(two_pairs());
  REQUIRE(m.size() == 4);
  CHECK(m.complete());
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(m.rho[i][i] == 1.0);
    for (std::size_t j = 0; j < 4; ++j) CHECK(m.rho[i][j] == m.rho[j][i]);
  }
  CHECK(m.dissimilarities()[0][1] == doctest::Approx(2.0));
}

TEST_CASE("undefined correlations are dropped") {
  Series s = two_pairs();
  s.push_back({"flat", {0.2, 0.2, 0.2, 0.2, 0.2}});
  std::vector<std::string> dropped;
  const auto kept = drop_undefined(correlation_matrix(s), dropped);
  CHECK(dropped == std::vector<std::string>{"flat"});
  CHECK(kept.complete());
  CHECK(kept.size() == 4);
}

TEST_CASE("two anti-correlated pairs split at the root") {
  const auto tree = cluster(correlation_matrix(two_pairs()));
  REQUIRE(tree.merges.size() == 3);
  const auto [left, right] = tree.top_split();
  CHECK(names(tree, left) == std::vector<std::string>{"a", "b"});
  CHECK(names(tree, right) == std::vector<std::string>{"c", "d"});
  CHECK(tree.merges[0].height == doctest::Approx(0.0));
  CHECK(tree.merges[1].height == doctest::Approx(0.0));
  CHECK(tree.merges[2].height == doctest::Approx(2.0));
  CHECK(names(tree, tree.leaf_order) == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("two labels merge once") {
  const auto tree = cluster_dissimilarities({"x", "y"}, {{0, 0.7}, {0.7, 0}}, Linkage::average);
  REQUIRE(tree.merges.size() == 1);
  CHECK(tree.merges[0].height == 0.7);
  CHECK(tree.merges[0].size == 2);
  CHECK_THROWS_AS(cluster_dissimilarities({"x"}, {{0}}, Linkage::average), std::invalid_argument);
}

TEST_CASE("merge heights are monotone and clustering is deterministic") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0, 1);
  for (auto linkage : {Linkage::average, Linkage::complete}) {
    for (int trial = 0; trial < 20; ++trial) {
      Series s;
      for (int k = 0; k < 9; ++k) {
        std::vector<double> v(14);
        for (auto& x : v) x = n(rng);
        s.push_back({"s" + std::to_string(k), v});
      }
      const auto m = correlation_matrix(s);
      const auto t = cluster(m, linkage);
      for (std::size_t i = 1; i < t.merges.size(); ++i) CHECK(t.merges[i].height >= t.merges[i - 1].height - 1e-12);
      auto order = t.leaf_order;
      std::sort(order.begin(), order.end());
      for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i] == i);
      CHECK(cluster(m, linkage).leaf_order == t.leaf_order);
    }
  }
}

TEST_CASE("linkage names") {
  CHECK(to_string(Linkage::complete) == "complete");
  CHECK(linkage_from_string("average") == Linkage::average);
  CHECK_THROWS(linkage_from_string("ward"));
}
