#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace timeline {

/// Product-moment correlation over the positions where both series are
/// non-NaN. NaN when fewer than two pairs remain or either side is constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

/// 1 - rho. Throws std::invalid_argument outside [-1, 1].
double to_dissimilarity(double rho);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rho;  // NaN where undefined

  std::size_t size() const { return labels.size(); }
  bool complete() const;
  /// 1 - rho entrywise.
  std::vector<std::vector<double>> dissimilarities() const;
};

CorrelationMatrix correlation_matrix(const std::vector<std::pair<std::string, std::vector<double>>>& series);

/// Removes labels until every pair is defined, dropping at each step the label
/// with the most undefined entries (later label on ties). Dropped labels are
/// appended to `dropped` in removal order.
CorrelationMatrix drop_undefined(const CorrelationMatrix& m, std::vector<std::string>& dropped);

enum class Linkage { average, complete };
std::string to_string(Linkage l);
Linkage linkage_from_string(const std::string& s);

/// Merge `i` creates cluster id labels.size() + i, as in the usual linkage-matrix layout.
struct Merge {
  std::size_t left = 0;
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct ClusterTree {
  std::vector<std::string> labels;
  std::vector<Merge> merges;
  std::vector<std::size_t> leaf_order;  // indices into labels

  /// Leaves under the two children of the root.
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> top_split() const;
  std::vector<std::size_t> leaves(std::size_t cluster) const;
};

/// Agglomerative clustering over d = 1 - rho. Ties between equally close pairs
/// go to the pair whose lexicographically smallest member labels sort first.
/// Leaf order visits the tighter child first (leaves count as height 0),
/// breaking ties by smallest member label. Throws std::invalid_argument with
/// fewer than two labels or undefined entries.
ClusterTree cluster(const CorrelationMatrix& matrix, Linkage linkage = Linkage::average);

/// Same as cluster() but over an explicit dissimilarity matrix.
ClusterTree cluster_dissimilarities(const std::vector<std::string>& labels,
                                    const std::vector<std::vector<double>>& d, Linkage linkage);

struct MdsEmbedding {
  std::vector<std::string> labels;
  std::vector<std::array<double, 2>> coords;
  double stress = 0.0;
  std::size_t iterations = 0;
  std::vector<double> stress_history;  // initial configuration first
};

/// Metric stress majorisation in two dimensions from a classical-scaling start.
/// Stops when the relative stress decrease drops below `tolerance` or after
/// `max_iterations`. The result is centred, aligned with its principal axes
/// and reflected so the first label with a non-zero coordinate on each axis is
/// positive. `seed` only matters when the classical start is degenerate.
/// Throws std::invalid_argument for non-square, asymmetric, negative or
/// non-zero-diagonal input.
MdsEmbedding mds(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& d,
                 std::uint64_t seed = 0, std::size_t max_iterations = 1000, double tolerance = 1e-9);

double raw_stress(const std::vector<std::vector<double>>& d, const std::vector<std::array<double, 2>>& x);

/// For every non-sentiment label, the sentiment label nearest in the plane
/// (lexicographically smallest on exact ties). Sentiment labels are the ten
/// emotion names.
std::map<std::string, std::string> nearest_sentiment_coloring(const MdsEmbedding& embedding);

bool is_sentiment_label(const std::string& label);

}  // namespace timeline
