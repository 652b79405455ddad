#pragma once

#include "timeline/sentiment.hpp"
#include "timeline/text_prep.hpp"
#include "timeline/topic_model.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace timeline {

enum class DocumentWeighting { unweighted, by_length };

/// Per-day means over the collective timeline, days 1..t_max. Row t-1 holds
/// day t; a day without documents (or without emotion-carrying words) is NaN.
struct DailySeries {
  int t_max = 0;
  std::vector<std::string> topic_labels;                 // "topic_<k>"
  std::vector<std::vector<double>> topic;                // t_max x K
  std::vector<std::vector<double>> sentiment;            // t_max x 10
  std::vector<std::size_t> documents_per_day;            // t_max
  std::vector<long> emotion_words_per_day;               // t_max

  bool topic_missing(int day) const { return documents_per_day.at(static_cast<std::size_t>(day - 1)) == 0; }
  bool sentiment_missing(int day) const { return emotion_words_per_day.at(static_cast<std::size_t>(day - 1)) == 0; }

  /// Every series by label (topics then emotions) as (day, value) pairs, NaN for missing days.
  std::vector<std::pair<std::string, std::vector<double>>> columns() const;
};

std::string topic_label(std::size_t k);

/// Day of each modelled document: bags[i].segment indexes `segments`.
std::vector<std::optional<int>> document_days(const std::vector<BagOfWords>& bags, const std::vector<DaySegment>& segments);

/// Topic row t = mean of p(topic|document) over documents on day t (NA documents
/// and days beyond t_max ignored). Sentiment rows come from `emotion_counts`.
DailySeries build_series(const TopicModel& model, const std::vector<std::optional<int>>& doc_days,
                         const std::vector<EmotionCounts>& emotion_counts, int t_max,
                         DocumentWeighting weighting = DocumentWeighting::unweighted,
                         const std::vector<long>& doc_lengths = {}, Denominator denominator = Denominator::memberships);

struct SmoothedCurve {
  std::vector<double> grid;
  std::vector<double> fitted;
  std::vector<bool> fallback;  // local fit was singular; weighted mean used instead
  double span = 0.75;
  int degree = 2;
};

/// Local polynomial regression with tricube weights over the ceil(span * n)
/// nearest points. Grid values outside [min x, max x] are clamped into it.
/// Throws std::invalid_argument when there are fewer than degree + 1 points
/// or span is outside (0, 1].
SmoothedCurve loess(const std::vector<std::pair<double, double>>& points, double span, int degree,
                    const std::vector<double>& grid);

/// `n` evenly spaced points over [lo, hi].
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

}  // namespace timeline
