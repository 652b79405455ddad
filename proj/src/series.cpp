#include "timeline/series.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace timeline {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string topic_label(std::size_t k) { return "topic_" + std::to_string(k); }

std::vector<std::pair<std::string, std::vector<double>>> DailySeries::columns() const {
  std::vector<std::pair<std::string, std::vector<double>>> out;
  for (std::size_t k = 0; k < topic_labels.size(); ++k) {
    std::vector<double> col(static_cast<std::size_t>(t_max));
    for (int t = 0; t < t_max; ++t) col[t] = topic[t][k];
    out.emplace_back(topic_labels[k], std::move(col));
  }
  for (std::size_t c = 0; c < kEmotionCount; ++c) {
    std::vector<double> col(static_cast<std::size_t>(t_max));
    for (int t = 0; t < t_max; ++t) col[t] = sentiment[t][c];
    out.emplace_back(std::string(emotion_names()[c]), std::move(col));
  }
  return out;
}

std::vector<std::optional<int>> document_days(const std::vector<BagOfWords>& bags, const std::vector<DaySegment>& segments) {
  std::vector<std::optional<int>> days;
  days.reserve(bags.size());
  for (const auto& bag : bags) days.push_back(segments.at(bag.segment).day);
  return days;
}

DailySeries build_series(const TopicModel& model, const std::vector<std::optional<int>>& doc_days,
                         const std::vector<EmotionCounts>& emotion_counts, int t_max, DocumentWeighting weighting,
                         const std::vector<long>& doc_lengths, Denominator denominator) {
  if (t_max < 1) throw std::invalid_argument("t_max must be at least 1");
  if (doc_days.size() != model.topic_given_document.size())
    throw std::invalid_argument("document day list does not match the topic model");
  if (weighting == DocumentWeighting::by_length && doc_lengths.size() != doc_days.size())
    throw std::invalid_argument("length weighting needs one length per document");

  const std::size_t days = static_cast<std::size_t>(t_max);
  DailySeries s;
  s.t_max = t_max;
  for (std::size_t k = 0; k < model.topics; ++k) s.topic_labels.push_back(topic_label(k));
  s.topic.assign(days, std::vector<double>(model.topics, 0.0));
  s.sentiment.assign(days, std::vector<double>(kEmotionCount, kNaN));
  s.documents_per_day.assign(days, 0);
  s.emotion_words_per_day.assign(days, 0);

  std::vector<double> weight_sum(days, 0.0);
  for (std::size_t d = 0; d < doc_days.size(); ++d) {
    if (!doc_days[d] || *doc_days[d] < 1 || *doc_days[d] > t_max) continue;
    const std::size_t row = static_cast<std::size_t>(*doc_days[d] - 1);
    const double w = weighting == DocumentWeighting::by_length ? static_cast<double>(doc_lengths[d]) : 1.0;
    for (std::size_t k = 0; k < model.topics; ++k) s.topic[row][k] += w * model.topic_given_document[d][k];
    weight_sum[row] += w;
    ++s.documents_per_day[row];
  }
  for (std::size_t t = 0; t < days; ++t) {
    for (auto& v : s.topic[t]) v = s.documents_per_day[t] ? v / weight_sum[t] : kNaN;
  }

  for (const auto& ec : emotion_counts) {
    if (ec.day < 1 || ec.day > t_max) continue;
    const std::size_t row = static_cast<std::size_t>(ec.day - 1);
    s.emotion_words_per_day[row] = ec.emotion_carrying_total;
    if (!ec.defined()) continue;
    const auto p = ec.proportions(denominator);
    std::copy(p.begin(), p.end(), s.sentiment[row].begin());
  }
  return s;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < n; ++i)
    g[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

SmoothedCurve loess(const std::vector<std::pair<double, double>>& points, double span, int degree,
                    const std::vector<double>& grid) {
  if (!(span > 0.0 && span <= 1.0)) throw std::invalid_argument("loess span must lie in (0, 1]");
  if (degree < 0) throw std::invalid_argument("loess degree must be non-negative");
  const std::size_t n = points.size();
  if (n < static_cast<std::size_t>(degree) + 1) throw std::invalid_argument("loess needs at least degree + 1 points");

  SmoothedCurve curve;
  curve.span = span;
  curve.degree = degree;
  curve.grid = grid;
  curve.fitted.resize(grid.size());
  curve.fallback.assign(grid.size(), false);

  const auto [min_it, max_it] =
      std::minmax_element(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const double xmin = min_it->first, xmax = max_it->first;
  const std::size_t q = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span * static_cast<double>(n) - 1e-12)));

  struct Near {
    double dist, x, y;
  };
  std::vector<Near> near(n);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double x0 = std::clamp(grid[g], xmin, xmax);
    for (std::size_t i = 0; i < n; ++i) near[i] = {std::abs(points[i].first - x0), points[i].first, points[i].second};
    std::sort(near.begin(), near.end(), [](const Near& a, const Near& b) {
      if (a.dist != b.dist) return a.dist < b.dist;
      if (a.x != b.x) return a.x < b.x;
      return a.y < b.y;
    });
    const double h = near[q - 1].dist;

    std::vector<double> w(q);
    for (std::size_t i = 0; i < q; ++i) {
      if (h <= 0.0) {
        w[i] = 1.0;
      } else {
        const double u = std::min(1.0, near[i].dist / h);
        const double c = 1.0 - u * u * u;
        w[i] = c * c * c;
      }
    }

    // Weighted least squares in the centred, scaled basis ((x - x0) / h)^j.
    const double scale = h > 0.0 ? h : 1.0;
    const int cols = degree + 1;
    Eigen::MatrixXd A(static_cast<Eigen::Index>(q), cols);
    Eigen::VectorXd b(static_cast<Eigen::Index>(q));
    for (std::size_t i = 0; i < q; ++i) {
      const double sw = std::sqrt(w[i]);
      const double z = (near[i].x - x0) / scale;
      double p = 1.0;
      for (int j = 0; j < cols; ++j) {
        A(static_cast<Eigen::Index>(i), j) = sw * p;
        p *= z;
      }
      b(static_cast<Eigen::Index>(i)) = sw * near[i].y;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() == cols) {
      curve.fitted[g] = qr.solve(b)(0);
    } else {
      double sw = 0.0, swy = 0.0;
      for (std::size_t i = 0; i < q; ++i) {
        sw += w[i];
        swy += w[i] * near[i].y;
      }
      if (sw <= 0.0) {  // every weight vanished; fall back to the nearest point's value
        sw = 1.0;
        swy = near[0].y;
      }
      curve.fitted[g] = swy / sw;
      curve.fallback[g] = true;
    }
  }
  return curve;
}

}  // namespace timeline
