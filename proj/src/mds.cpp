#include "timeline/correlation.hpp"

#include "timeline/sentiment.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace timeline {

namespace {

using Config = Eigen::Matrix<double, Eigen::Dynamic, 2>;

void validate(const std::vector<std::vector<double>>& d, std::size_t n) {
  if (d.size() != n) throw std::invalid_argument("dissimilarity matrix does not match labels");
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i].size() != n) throw std::invalid_argument("dissimilarity matrix is not square");
    if (d[i][i] != 0.0) throw std::invalid_argument("dissimilarity diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(d[i][j]) || d[i][j] < 0.0) throw std::invalid_argument("dissimilarities must be finite and non-negative");
      if (std::abs(d[i][j] - d[j][i]) > 1e-12 * std::max(1.0, std::abs(d[i][j])))
        throw std::invalid_argument("dissimilarity matrix is not symmetric");
    }
  }
}

double stress_of(const std::vector<std::vector<double>>& d, const Config& x) {
  double s = 0.0;
  const auto n = x.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double r = d[i][j] - (x.row(i) - x.row(j)).norm();
      s += r * r;
    }
  return s;
}

Config classical_start(const std::vector<std::vector<double>>& d) {
  const auto n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd d2(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d2(i, j) = d[i][j] * d[i][j];
  const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd B = -0.5 * J * d2 * J;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
  Config x = Config::Zero(n, 2);
  for (int k = 0; k < 2 && k < n; ++k) {
    const Eigen::Index col = n - 1 - k;  // eigenvalues ascend
    const double lambda = es.eigenvalues()(col);
    if (lambda > 0.0) x.col(k) = es.eigenvectors().col(col) * std::sqrt(lambda);
  }
  return x;
}

// Centre, rotate onto principal axes, then fix each axis sign by the first
// label with a clearly non-zero coordinate.
void canonicalise(Config& x) {
  const auto n = x.rows();
  const Eigen::RowVector2d mean = x.colwise().mean();
  x.rowwise() -= mean;
  if (n < 2) {
    x.setZero();
    return;
  }
  const Eigen::Matrix2d cov = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  Eigen::Matrix2d axes;
  axes.col(0) = es.eigenvectors().col(1);
  axes.col(1) = es.eigenvectors().col(0);
  x = x * axes;
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  for (int k = 0; k < 2; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(x(i, k)) > 1e-9 * scale) {
        if (x(i, k) < 0.0) x.col(k) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

double raw_stress(const std::vector<std::vector<double>>& d, const std::vector<std::array<double, 2>>& x) {
  Config c(static_cast<Eigen::Index>(x.size()), 2);
  for (std::size_t i = 0; i < x.size(); ++i) c.row(static_cast<Eigen::Index>(i)) << x[i][0], x[i][1];
  return stress_of(d, c);
}

MdsEmbedding mds(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& d, std::uint64_t seed,
                 std::size_t max_iterations, double tolerance) {
  const std::size_t n = labels.size();
  validate(d, n);
  MdsEmbedding out;
  out.labels = labels;
  if (n == 0) return out;

  Config x = classical_start(d);
  const auto rows = static_cast<Eigen::Index>(n);
  bool any_positive = false;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) any_positive = any_positive || d[i][j] > 0.0;
  if (any_positive && x.isZero(0.0)) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1e-3);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (int k = 0; k < 2; ++k) x(i, k) = normal(rng);
  }

  double stress = stress_of(d, x);
  out.stress_history.push_back(stress);
  while (out.iterations < max_iterations && stress > 0.0) {
    // Guttman transform with unit weights: X <- B(X) X / n.
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < rows; ++j) {
        if (i == j) continue;
        const double dist = (x.row(i) - x.row(j)).norm();
        if (dist > 0.0) B(i, j) = -d[i][j] / dist;
      }
      B(i, i) = -B.row(i).sum();
    }
    Config next = B * x / static_cast<double>(n);
    const double next_stress = stress_of(d, next);
    ++out.iterations;
    const double decrease = (stress - next_stress) / stress;
    if (next_stress > stress) break;  // rounding noise at a fixed point; keep the better configuration
    x = std::move(next);
    stress = next_stress;
    out.stress_history.push_back(stress);
    if (decrease < tolerance) break;
  }

  canonicalise(x);
  out.coords.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.coords[i] = {x(static_cast<Eigen::Index>(i), 0), x(static_cast<Eigen::Index>(i), 1)};
  out.stress = stress_of(d, x);
  return out;
}

bool is_sentiment_label(const std::string& label) { return emotion_from_string(label).has_value(); }

std::map<std::string, std::string> nearest_sentiment_coloring(const MdsEmbedding& embedding) {
  std::map<std::string, std::string> out;
  for (std::size_t t = 0; t < embedding.labels.size(); ++t) {
    if (is_sentiment_label(embedding.labels[t])) continue;
    const std::string* best = nullptr;
    double best_d = 0.0;
    for (std::size_t s = 0; s < embedding.labels.size(); ++s) {
      if (!is_sentiment_label(embedding.labels[s])) continue;
      const double dx = embedding.coords[t][0] - embedding.coords[s][0];
      const double dy = embedding.coords[t][1] - embedding.coords[s][1];
      const double dist = std::hypot(dx, dy);
      if (!best || dist < best_d || (dist == best_d && embedding.labels[s] < *best)) {
        best = &embedding.labels[s];
        best_d = dist;
      }
    }
    if (best) out[embedding.labels[t]] = *best;
  }
  return out;
}

}  // namespace timeline
