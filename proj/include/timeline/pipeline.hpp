#pragma once

#include "timeline/artifacts.hpp"
#include "timeline/correlation.hpp"
#include "timeline/corpus_ingest.hpp"
#include "timeline/day_annotator.hpp"
#include "timeline/sentiment.hpp"
#include "timeline/series.hpp"
#include "timeline/text_prep.hpp"
#include "timeline/topic_model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace timeline {

inline constexpr const char* kVersion = "0.1.0";

enum class Stage { fetch, annotate, prep, model, sentiment, series, correlate };

std::string to_string(Stage s);
/// Process exit code for a failure in `s` (10 + stage index).
int exit_code(Stage s);
inline constexpr int kConfigExitCode = 2;

class StageError : public std::runtime_error {
public:
  StageError(Stage stage, const std::string& what)
      : std::runtime_error(to_string(stage) + ": " + what), stage_(stage) {}
  Stage stage() const noexcept { return stage_; }

private:
  Stage stage_;
};

struct PipelineConfig {
  std::filesystem::path snapshot;  // local JSONL snapshot
  std::string source_url;          // used instead of `snapshot` when set
  std::filesystem::path stopwords = "data/stopwords_en.txt";
  std::filesystem::path lexicon;
  std::filesystem::path output_dir = "out";
  std::string subreddit = "COVID19positive";
  std::vector<std::string> flair_whitelist{"Tested Positive - Me", "Tested Positive"};
  std::int64_t window_start = 0;
  std::int64_t window_end = INT64_MAX;
  int t_max = 14;
  std::uint64_t seed = 0;
  int sweeps = 1000;
  int merge_passes = 10;
  std::optional<std::size_t> level;  // empty = auto
  double loess_span = 0.75;
  int loess_degree = 2;
  std::size_t grid_points = 200;
  Linkage linkage = Linkage::average;
  std::vector<std::string> exclusions{"feeling", "positive", "negative"};
  DocumentWeighting weighting = DocumentWeighting::unweighted;
  Denominator denominator = Denominator::memberships;

  /// Sets one key from its text form. Throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  /// Every key with its current value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
  /// Throws ConfigError when an input path is missing or a parameter is out of range.
  void validate() const;
};

/// "key = value" lines; '#' starts a comment line.
PipelineConfig parse_config(std::string_view content);
PipelineConfig load_config(const std::filesystem::path& path);

struct RunManifest {
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> input_hashes;  // name -> sha256
  std::vector<std::pair<std::string, double>> counts;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<std::string> outputs;  // written by this run
  std::vector<std::string> stale;    // left over from an earlier run, not rewritten
  std::vector<std::string> warnings;
  std::string status = "ok";
  std::string failed_stage;
  std::string error;

  double count(const std::string& name) const;
  /// Timing is omitted when `with_timing` is false so manifests can be compared across runs.
  std::string to_json(bool with_timing = true) const;
};

// In-memory stage bodies shared by run_pipeline and the CLI subcommands.

std::vector<EmotionCounts> score_days(const Corpus& corpus, const std::vector<DaySegment>& segments,
                                      const SentimentLexicon& lexicon);

struct ModelOutput {
  BipartiteGraph graph;
  InferenceResult inference;
  TopicModel topics;
};
ModelOutput run_model(const Corpus& corpus, const InferenceOptions& options, std::optional<std::size_t> level);

/// LOESS per series over its non-missing days; series with too few points are
/// skipped and reported through `warnings`.
std::vector<NamedCurve> smooth_series(const std::vector<std::pair<std::string, std::vector<double>>>& columns,
                                      const std::vector<std::string>& kinds, int t_max, double span, int degree,
                                      std::size_t grid_points, std::vector<std::string>& warnings);

struct CorrelationOutput {
  CorrelationMatrix full;
  CorrelationMatrix used;  // labels with undefined correlations removed
  std::vector<std::string> dropped;
  ClusterTree tree;
  MdsEmbedding embedding;
};
CorrelationOutput run_correlation(const std::vector<std::pair<std::string, std::vector<double>>>& columns,
                                  Linkage linkage, std::uint64_t seed);

/// Writes `content` through a temporary file and rename, so readers never see a half-written file.
void write_artifact(const std::filesystem::path& path, std::string_view content);

/// Runs every stage and writes all artifacts plus manifest.json into the
/// output directory. On a stage failure the manifest records the stage and the
/// stale leftovers, then StageError is thrown. Throws ConfigError before any
/// work when the configuration is invalid.
RunManifest run_pipeline(const PipelineConfig& config, std::ostream* log = nullptr);

}  // namespace timeline
