#pragma once

// Independent reference computations and fixtures shared by unit and acceptance tests.

#include "timeline/text_prep.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

/// Normalised mutual information with the arithmetic-mean normaliser.
/// Two single-cluster labellings count as identical (1).
inline double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  const double n = static_cast<double>(a.size());
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1.0 / n;
    pb[b[i]] += 1.0 / n;
    pab[{a[i], b[i]}] += 1.0 / n;
  }
  double ha = 0.0, hb = 0.0, mi = 0.0;
  for (const auto& [k, p] : pa) ha -= p * std::log(p);
  for (const auto& [k, p] : pb) hb -= p * std::log(p);
  for (const auto& [k, p] : pab) mi += p * std::log(p / (pa[k.first] * pb[k.second]));
  if (ha + hb == 0.0) return 1.0;
  return 2.0 * mi / (ha + hb);
}

/// 10 documents over words {0, 1} and 10 over {2, 3}, each word `per_word` times.
inline std::vector<timeline::BagOfWords> planted_bags(long per_word = 15) {
  std::vector<timeline::BagOfWords> bags;
  for (std::size_t d = 0; d < 20; ++d) {
    timeline::BagOfWords b;
    b.segment = d;
    if (d < 10) b.counts = {{0, per_word}, {1, per_word}};
    else b.counts = {{2, per_word}, {3, per_word}};
    bags.push_back(b);
  }
  return bags;
}

/// Same layout with 30 tokens per document split at random between the two topic words.
inline std::vector<timeline::BagOfWords> noisy_planted_bags(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<timeline::BagOfWords> bags;
  for (std::size_t d = 0; d < 20; ++d) {
    long first = 0;
    for (int t = 0; t < 30; ++t) first += coin(rng) ? 1 : 0;
    const std::size_t base = d < 10 ? 0 : 2;
    timeline::BagOfWords b;
    b.segment = d;
    if (first > 0) b.counts.emplace_back(base, first);
    if (first < 30) b.counts.emplace_back(base + 1, 30 - first);
    bags.push_back(b);
  }
  return bags;
}

/// Direct local regression at one point: q nearest points by plain sort,
/// tricube weights, normal equations in the raw monomial basis solved by
/// Gaussian elimination in long double.
inline double direct_wls(std::vector<std::pair<double, double>> pts, double x0, double span, int degree) {
  const std::size_t q = static_cast<std::size_t>(std::ceil(span * static_cast<double>(pts.size())));
  std::stable_sort(pts.begin(), pts.end(), [&](const auto& a, const auto& b) {
    return std::fabs(a.first - x0) < std::fabs(b.first - x0);
  });
  pts.resize(q);
  const long double h = std::fabs(pts.back().first - x0);
  const int m = degree + 1;
  std::vector<std::vector<long double>> A(m, std::vector<long double>(m + 1, 0.0L));
  for (const auto& [x, y] : pts) {
    long double u = h > 0 ? std::fabs(x - x0) / h : 0.0L;
    long double w = std::pow(1.0L - u * u * u, 3);
    if (u >= 1.0L) w = 0.0L;
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < m; ++c) A[r][c] += w * std::pow(static_cast<long double>(x), r + c);
      A[r][m] += w * std::pow(static_cast<long double>(x), r) * y;
    }
  }
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      const long double f = A[r][col] / A[col][col];
      for (int c = col; c <= m; ++c) A[r][c] -= f * A[col][c];
    }
  }
  long double value = 0.0L;
  for (int r = 0; r < m; ++r) value += A[r][m] / A[r][r] * std::pow(static_cast<long double>(x0), r);
  return static_cast<double>(value);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("timeline_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
