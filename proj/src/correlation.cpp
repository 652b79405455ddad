#include "timeline/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace timeline {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson needs series of equal length");
  std::vector<double> a, b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    a.push_back(x[i]);
    b.push_back(y[i]);
  }
  const std::size_t n = a.size();
  if (n < 2) return kNaN;
  // Constancy is checked on the values themselves: a centred constant can leave rounding residue.
  if (std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; })) return kNaN;
  if (std::all_of(b.begin(), b.end(), [&](double v) { return v == b[0]; })) return kNaN;

  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double to_dissimilarity(double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw std::invalid_argument("correlation outside [-1, 1]");
  return 1.0 - rho;
}

bool CorrelationMatrix::complete() const {
  for (const auto& row : rho)
    for (double v : row)
      if (std::isnan(v)) return false;
  return true;
}

std::vector<std::vector<double>> CorrelationMatrix::dissimilarities() const {
  std::vector<std::vector<double>> d(size(), std::vector<double>(size()));
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) d[i][j] = i == j ? 0.0 : to_dissimilarity(rho[i][j]);
  return d;
}

CorrelationMatrix correlation_matrix(const std::vector<std::pair<std::string, std::vector<double>>>& series) {
  CorrelationMatrix m;
  const std::size_t n = series.size();
  m.rho.assign(n, std::vector<double>(n, kNaN));
  for (std::size_t i = 0; i < n; ++i) {
    m.labels.push_back(series[i].first);
    for (std::size_t j = i + 1; j < n; ++j) m.rho[i][j] = m.rho[j][i] = pearson(series[i].second, series[j].second);
  }
  // A series with no defined correlation at all is treated as undefined on the diagonal too.
  for (std::size_t i = 0; i < n; ++i) {
    bool any = n == 1;
    for (std::size_t j = 0; j < n; ++j) any = any || (j != i && !std::isnan(m.rho[i][j]));
    if (any) m.rho[i][i] = 1.0;
  }
  return m;
}

CorrelationMatrix drop_undefined(const CorrelationMatrix& m, std::vector<std::string>& dropped) {
  std::vector<std::size_t> keep(m.size());
  for (std::size_t i = 0; i < keep.size(); ++i) keep[i] = i;
  for (;;) {
    std::size_t worst = 0, worst_count = 0;
    for (std::size_t a = 0; a < keep.size(); ++a) {
      std::size_t count = 0;
      for (std::size_t b = 0; b < keep.size(); ++b)
        if (std::isnan(m.rho[keep[a]][keep[b]])) ++count;
      if (count > 0 && count >= worst_count) {
        worst = a;
        worst_count = count;
      }
    }
    if (worst_count == 0) break;
    dropped.push_back(m.labels[keep[worst]]);
    keep.erase(keep.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  CorrelationMatrix out;
  for (std::size_t a : keep) {
    out.labels.push_back(m.labels[a]);
    std::vector<double> row;
    for (std::size_t b : keep) row.push_back(m.rho[a][b]);
    out.rho.push_back(std::move(row));
  }
  return out;
}

std::string to_string(Linkage l) { return l == Linkage::average ? "average" : "complete"; }

Linkage linkage_from_string(const std::string& s) {
  if (s == "average") return Linkage::average;
  if (s == "complete") return Linkage::complete;
  throw std::invalid_argument("unknown linkage '" + s + "'");
}

std::vector<std::size_t> ClusterTree::leaves(std::size_t c) const {
  const std::size_t n = labels.size();
  if (c < n) return {c};
  const Merge& m = merges.at(c - n);
  auto out = leaves(m.left);
  auto right = leaves(m.right);
  out.insert(out.end(), right.begin(), right.end());
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> ClusterTree::top_split() const {
  if (merges.empty()) throw std::logic_error("tree has no merges");
  return {leaves(merges.back().left), leaves(merges.back().right)};
}

ClusterTree cluster(const CorrelationMatrix& matrix, Linkage linkage) {
  if (!matrix.complete()) throw std::invalid_argument("correlation matrix has undefined entries");
  return cluster_dissimilarities(matrix.labels, matrix.dissimilarities(), linkage);
}

ClusterTree cluster_dissimilarities(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& d,
                                    Linkage linkage) {
  const std::size_t n = labels.size();
  if (n < 2) throw std::invalid_argument("clustering needs at least two labels");
  if (d.size() != n) throw std::invalid_argument("dissimilarity matrix does not match labels");
  for (const auto& row : d) {
    if (row.size() != n) throw std::invalid_argument("dissimilarity matrix is not square");
    for (double v : row)
      if (std::isnan(v)) throw std::invalid_argument("dissimilarity matrix has undefined entries");
  }

  ClusterTree tree;
  tree.labels = labels;

  struct Node {
    std::size_t id;
    std::size_t size;
    std::string key;  // smallest member label
    double height;
  };
  std::vector<Node> active;
  std::vector<Node> all;
  for (std::size_t i = 0; i < n; ++i) {
    active.push_back({i, 1, labels[i], 0.0});
    all.push_back(active.back());
  }
  std::vector<std::vector<double>> dist = d;  // indexed by position in `active`

  while (active.size() > 1) {
    std::size_t bi = 0, bj = 1;
    auto keys = [&](std::size_t i, std::size_t j) {
      const auto& a = active[i].key;
      const auto& b = active[j].key;
      return a < b ? std::pair<const std::string&, const std::string&>(a, b)
                   : std::pair<const std::string&, const std::string&>(b, a);
    };
    for (std::size_t i = 0; i < active.size(); ++i) {
      for (std::size_t j = i + 1; j < active.size(); ++j) {
        if (dist[i][j] < dist[bi][bj] || (dist[i][j] == dist[bi][bj] && keys(i, j) < keys(bi, bj))) {
          bi = i;
          bj = j;
        }
      }
    }
    if (active[bj].key < active[bi].key) std::swap(bi, bj);
    const Node& a = active[bi];
    const Node& b = active[bj];
    const double h = dist[bi][bj];
    Merge m{a.id, b.id, h, a.size + b.size};
    tree.merges.push_back(m);
    Node merged{n + tree.merges.size() - 1, m.size, std::min(a.key, b.key), h};
    all.push_back(merged);

    std::vector<double> row(active.size());
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (k == bi || k == bj) continue;
      row[k] = linkage == Linkage::average
                   ? (static_cast<double>(a.size) * dist[bi][k] + static_cast<double>(b.size) * dist[bj][k]) /
                         static_cast<double>(a.size + b.size)
                   : std::max(dist[bi][k], dist[bj][k]);
    }
    // Replace bi with the merged cluster and drop bj.
    active[bi] = merged;
    for (std::size_t k = 0; k < active.size(); ++k) {
      if (k == bi || k == bj) continue;
      dist[bi][k] = dist[k][bi] = row[k];
    }
    dist[bi][bi] = 0.0;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(bj));
    dist.erase(dist.begin() + static_cast<std::ptrdiff_t>(bj));
    for (auto& r : dist) r.erase(r.begin() + static_cast<std::ptrdiff_t>(bj));
  }

  std::vector<std::size_t> stack{all.back().id};
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    if (c < n) {
      tree.leaf_order.push_back(c);
      continue;
    }
    const Merge& m = tree.merges[c - n];
    const Node& l = all[m.left];
    const Node& r = all[m.right];
    const bool left_first = l.height < r.height || (l.height == r.height && l.key < r.key);
    stack.push_back(left_first ? m.right : m.left);
    stack.push_back(left_first ? m.left : m.right);
  }
  return tree;
}

}  // namespace timeline
