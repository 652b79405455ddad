#pragma once

#include "timeline/correlation.hpp"
#include "timeline/day_annotator.hpp"
#include "timeline/sentiment.hpp"
#include "timeline/series.hpp"
#include "timeline/text_prep.hpp"
#include "timeline/topic_model.hpp"

#include <string>
#include <string_view>
#include <vector>

// Serialisation of every file the pipeline exchanges between stages. Writers
// return the file content; readers throw ParseError on schema violations.
namespace timeline {

std::string segments_to_jsonl(const std::vector<DaySegment>& segments);
std::vector<DaySegment> segments_from_jsonl(std::string_view content);

std::string report_to_json(const AnnotationReport& report);

/// day,mention_count,fraction_of_posts_mentioning; the fraction divides the
/// number of distinct posts mentioning the day by the annotated post count.
std::string emit_day_histogram(const AnnotationReport& report);

std::string corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(std::string_view content);

struct TopicsArtifact {
  TopicModel model;
  std::vector<std::size_t> document_segments;  // segment index of each modelled document
  std::vector<long> document_lengths;          // tokens per modelled document
  std::vector<std::string> vocabulary;
};

std::string topics_to_json(const TopicModel& model, const InferenceResult& inference, const BipartiteGraph& graph,
                           const Corpus& corpus);
TopicsArtifact topics_from_json(std::string_view content);

/// Top `n` words per topic by p(word|topic), ties by token.
std::string wordclouds_to_json(const TopicModel& model, const std::vector<std::string>& vocabulary, std::size_t n = 30);

/// day,category,count,proportion,emotion_words. Ten rows per scored day.
std::string sentiment_to_csv(const std::vector<EmotionCounts>& counts, Denominator denominator);
std::vector<EmotionCounts> sentiment_from_csv(std::string_view content);

/// Long format: day,series,kind,value,n_documents for every day and series.
std::string series_to_csv(const DailySeries& series);

struct SeriesTable {
  std::vector<std::string> labels;  // order of first appearance
  std::vector<std::string> kinds;   // "topic" or "sentiment"
  std::vector<std::vector<double>> values;  // per label, per day
};
SeriesTable series_from_csv(std::string_view content);

struct NamedCurve {
  std::string label;
  std::string kind;
  SmoothedCurve curve;
};
std::string curves_to_csv(const std::vector<NamedCurve>& curves);

/// Correlation matrix with rows and columns in leaf order.
std::string heatmap_to_csv(const CorrelationMatrix& matrix, const ClusterTree& tree);
std::string tree_to_json(const ClusterTree& tree, Linkage linkage, const std::vector<std::string>& dropped,
                         const MdsEmbedding& embedding);
std::string mds_to_csv(const MdsEmbedding& embedding);

}  // namespace timeline
