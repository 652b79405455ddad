#include "timeline/pipeline.hpp"

#include "timeline/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <set>

namespace timeline {

namespace fs = std::filesystem;

std::string to_string(Stage s) {
  switch (s) {
    case Stage::fetch: return "fetch";
    case Stage::annotate: return "annotate";
    case Stage::prep: return "prep";
    case Stage::model: return "model";
    case Stage::sentiment: return "sentiment";
    case Stage::series: return "series";
    case Stage::correlate: return "correlate";
  }
  return "unknown";
}

int exit_code(Stage s) { return 10 + static_cast<int>(s); }

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  return out;
}

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& raw) {
  const std::string value(trim(raw));
  if (key == "snapshot") snapshot = value;
  else if (key == "source_url") source_url = value;
  else if (key == "stopwords") stopwords = value;
  else if (key == "lexicon") lexicon = value;
  else if (key == "output_dir") output_dir = value;
  else if (key == "subreddit") subreddit = value;
  else if (key == "flair") flair_whitelist = split_list(value, '|');
  else if (key == "window_start") window_start = parse_number<std::int64_t>(key, value);
  else if (key == "window_end") window_end = parse_number<std::int64_t>(key, value);
  else if (key == "t_max") t_max = parse_number<int>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "sweeps") sweeps = parse_number<int>(key, value);
  else if (key == "merge_passes") merge_passes = parse_number<int>(key, value);
  else if (key == "level") level = value == "auto" ? std::nullopt : std::optional<std::size_t>(parse_number<std::size_t>(key, value));
  else if (key == "loess_span") loess_span = parse_number<double>(key, value);
  else if (key == "loess_degree") loess_degree = parse_number<int>(key, value);
  else if (key == "grid_points") grid_points = parse_number<std::size_t>(key, value);
  else if (key == "linkage") {
    try {
      linkage = linkage_from_string(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "exclude") exclusions = split_list(value);
  else if (key == "weighting") {
    if (value == "unweighted") weighting = DocumentWeighting::unweighted;
    else if (value == "length") weighting = DocumentWeighting::by_length;
    else throw ConfigError("weighting must be unweighted or length");
  } else if (key == "denominator") {
    if (value == "memberships") denominator = Denominator::memberships;
    else if (value == "occurrences") denominator = Denominator::occurrences;
    else throw ConfigError("denominator must be memberships or occurrences");
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::entries() const {
  return {{"snapshot", snapshot.generic_string()},
          {"source_url", source_url},
          {"stopwords", stopwords.generic_string()},
          {"lexicon", lexicon.generic_string()},
          {"output_dir", output_dir.generic_string()},
          {"subreddit", subreddit},
          {"flair", join(flair_whitelist, "|")},
          {"window_start", std::to_string(window_start)},
          {"window_end", std::to_string(window_end)},
          {"t_max", std::to_string(t_max)},
          {"seed", std::to_string(seed)},
          {"sweeps", std::to_string(sweeps)},
          {"merge_passes", std::to_string(merge_passes)},
          {"level", level ? std::to_string(*level) : "auto"},
          {"loess_span", format_double(loess_span)},
          {"loess_degree", std::to_string(loess_degree)},
          {"grid_points", std::to_string(grid_points)},
          {"linkage", to_string(linkage)},
          {"exclude", join(exclusions)},
          {"weighting", weighting == DocumentWeighting::unweighted ? "unweighted" : "length"},
          {"denominator", denominator == Denominator::memberships ? "memberships" : "occurrences"}};
}

void PipelineConfig::validate() const {
  if (source_url.empty()) {
    if (snapshot.empty()) throw ConfigError("snapshot or source_url is required");
    if (!fs::is_regular_file(snapshot)) throw ConfigError("snapshot not found: " + snapshot.string());
  }
  if (!fs::is_regular_file(stopwords)) throw ConfigError("stopword list not found: " + stopwords.string());
  if (lexicon.empty() || !fs::is_regular_file(lexicon)) throw ConfigError("lexicon not found: " + lexicon.string());
  if (output_dir.empty()) throw ConfigError("output_dir is required");
  if (window_start > window_end) throw ConfigError("window_start is after window_end");
  if (t_max < 1) throw ConfigError("t_max must be at least 1");
  if (sweeps < 0) throw ConfigError("sweeps must be non-negative");
  if (merge_passes < 0) throw ConfigError("merge_passes must be non-negative");
  if (!(loess_span > 0.0 && loess_span <= 1.0)) throw ConfigError("loess_span must lie in (0, 1]");
  if (loess_degree < 0) throw ConfigError("loess_degree must be non-negative");
  if (grid_points < 2) throw ConfigError("grid_points must be at least 2");
}

PipelineConfig parse_config(std::string_view content) {
  PipelineConfig cfg;
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(i + 1) + ": expected key = value");
    cfg.set(std::string(trim(line.substr(0, eq))), std::string(line.substr(eq + 1)));
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw ConfigError("config not found: " + path.string());
  return parse_config(read_file(path));
}

double RunManifest::count(const std::string& name) const {
  for (const auto& [k, v] : counts)
    if (k == name) return v;
  throw std::out_of_range("no count named " + name);
}

std::string RunManifest::to_json(bool with_timing) const {
  using json = nlohmann::ordered_json;
  json cfg = json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  json hashes = json::object();
  for (const auto& [k, v] : input_hashes) hashes[k] = v;
  json cnt = json::object();
  for (const auto& [k, v] : counts) {
    if (v == std::floor(v) && std::abs(v) < 9e15) cnt[k] = static_cast<long long>(v);
    else cnt[k] = v;
  }
  json obj = {{"version", kVersion}, {"status", status}};
  if (!failed_stage.empty()) {
    obj["failed_stage"] = failed_stage;
    obj["error"] = error;
  }
  obj["config"] = cfg;
  obj["input_sha256"] = hashes;
  obj["counts"] = cnt;
  obj["outputs"] = outputs;
  obj["stale"] = stale;
  obj["warnings"] = warnings;
  if (with_timing) {
    json t = json::object();
    for (const auto& [k, v] : stage_seconds) t[k] = v;
    obj["stage_seconds"] = t;
  }
  return obj.dump(1, ' ', false, json::error_handler_t::replace) + "\n";
}

std::vector<EmotionCounts> score_days(const Corpus& corpus, const std::vector<DaySegment>& segments,
                                      const SentimentLexicon& lexicon) {
  std::map<int, std::vector<std::string>> tokens_by_day;
  for (const auto& bag : corpus.bags) {
    const auto& day = segments.at(bag.segment).day;
    if (!day) continue;
    auto& tokens = tokens_by_day[*day];
    for (const auto& [id, count] : bag.counts) tokens.insert(tokens.end(), static_cast<std::size_t>(count), corpus.vocabulary.token(id));
  }
  std::vector<EmotionCounts> out;
  for (const auto& [day, tokens] : tokens_by_day) out.push_back(score_day(day, tokens, lexicon));
  return out;
}

ModelOutput run_model(const Corpus& corpus, const InferenceOptions& options, std::optional<std::size_t> level) {
  ModelOutput out;
  out.graph = build_graph(corpus.bags, corpus.vocabulary.size());
  out.inference = infer(out.graph, options);
  const std::size_t chosen = level ? *level : select_level(out.inference.state, out.graph.documents);
  if (chosen >= out.inference.state.levels())
    throw std::invalid_argument("level " + std::to_string(chosen) + " does not exist; the hierarchy has " +
                                std::to_string(out.inference.state.levels()) + " levels");
  out.topics = extract_topics(out.graph, out.inference.state, chosen);
  return out;
}

std::vector<NamedCurve> smooth_series(const std::vector<std::pair<std::string, std::vector<double>>>& columns,
                                      const std::vector<std::string>& kinds, int t_max, double span, int degree,
                                      std::size_t grid_points, std::vector<std::string>& warnings) {
  const auto grid = linear_grid(1.0, static_cast<double>(t_max), grid_points);
  std::vector<NamedCurve> curves;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t t = 0; t < columns[i].second.size(); ++t)
      if (!std::isnan(columns[i].second[t])) points.emplace_back(static_cast<double>(t + 1), columns[i].second[t]);
    if (points.size() < static_cast<std::size_t>(degree) + 1) {
      warnings.push_back("series " + columns[i].first + " has " + std::to_string(points.size()) +
                         " observed days; no curve fitted");
      continue;
    }
    curves.push_back({columns[i].first, kinds.at(i), loess(points, span, degree, grid)});
  }
  return curves;
}

CorrelationOutput run_correlation(const std::vector<std::pair<std::string, std::vector<double>>>& columns,
                                  Linkage linkage, std::uint64_t seed) {
  CorrelationOutput out;
  out.full = correlation_matrix(columns);
  out.used = drop_undefined(out.full, out.dropped);
  out.tree = cluster(out.used, linkage);
  out.embedding = mds(out.used.labels, out.used.dissimilarities(), seed);
  return out;
}

void write_artifact(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, content);
  fs::rename(tmp, path);
}

namespace {

const std::vector<std::pair<Stage, std::vector<std::string>>>& stage_outputs() {
  static const std::vector<std::pair<Stage, std::vector<std::string>>> outputs{
      {Stage::fetch, {}},
      {Stage::annotate, {"segments.jsonl", "report.json", "day_histogram.csv"}},
      {Stage::prep, {"corpus.json"}},
      {Stage::model, {"topics.json", "wordclouds.json"}},
      {Stage::sentiment, {"sentiment.csv"}},
      {Stage::series, {"series.csv", "curves.csv"}},
      {Stage::correlate, {"heatmap.csv", "tree.json", "mds.csv"}}};
  return outputs;
}

class Runner {
public:
  Runner(const PipelineConfig& cfg, std::ostream* log) : cfg_(cfg), log_(log) {}

  template <typename F>
  void stage(Stage s, F&& body) {
    current_ = s;
    if (log_) *log_ << "[" << to_string(s) << "] start\n";
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.stage_seconds.emplace_back(to_string(s), secs);
    if (log_) *log_ << "[" << to_string(s) << "] done\n";
  }

  void emit(const std::string& name, std::string_view content) {
    write_artifact(cfg_.output_dir / name, content);
    manifest.outputs.push_back(name);
  }

  void count(const std::string& name, double v) { manifest.counts.emplace_back(name, v); }

  [[noreturn]] void fail(const std::string& what) {
    manifest.status = "failed";
    manifest.failed_stage = to_string(current_);
    manifest.error = what;
    bool reached = false;
    for (const auto& [s, files] : stage_outputs()) {
      reached = reached || s == current_;
      if (!reached) continue;
      for (const auto& f : files)
        if (fs::exists(cfg_.output_dir / f) &&
            std::find(manifest.outputs.begin(), manifest.outputs.end(), f) == manifest.outputs.end())
          manifest.stale.push_back(f);
    }
    write_artifact(cfg_.output_dir / "manifest.json", manifest.to_json());
    throw StageError(current_, what);
  }

  Stage current() const { return current_; }

  RunManifest manifest;

private:
  const PipelineConfig& cfg_;
  std::ostream* log_;
  Stage current_ = Stage::fetch;
};

}  // namespace

RunManifest run_pipeline(const PipelineConfig& cfg, std::ostream* log) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);

  Runner run(cfg, log);
  run.manifest.config = cfg.entries();
  if (cfg.source_url.empty()) run.manifest.input_hashes.emplace_back("snapshot", sha256_file(cfg.snapshot));
  run.manifest.input_hashes.emplace_back("stopwords", sha256_file(cfg.stopwords));
  run.manifest.input_hashes.emplace_back("lexicon", sha256_file(cfg.lexicon));

  std::vector<RawPost> posts;
  std::vector<DaySegment> segments;
  Corpus corpus;
  ModelOutput model;
  std::vector<EmotionCounts> emotions;
  DailySeries series;

  try {
    run.stage(Stage::fetch, [&] {
      IngestConfig ic;
      if (cfg.source_url.empty()) ic.source = LocalSource{cfg.snapshot};
      else ic.source = RemoteSource{cfg.source_url};
      ic.subreddit = cfg.subreddit;
      ic.flair_whitelist = cfg.flair_whitelist;
      ic.window = {cfg.window_start, cfg.window_end};
      const auto fetched = fetch_posts(ic);
      posts = filter_flair(fetched.posts, cfg.flair_whitelist);
      run.count("posts_fetched", static_cast<double>(fetched.posts.size()));
      run.count("records_malformed", static_cast<double>(fetched.skipped.malformed));
      run.count("posts_kept", static_cast<double>(posts.size()));
      for (const auto& reason : fetched.skipped.reasons) run.manifest.warnings.push_back("skipped record: " + reason);
    });

    run.stage(Stage::annotate, [&] {
      auto [segs, report] = annotate_corpus(posts);
      segments = std::move(segs);
      run.emit("segments.jsonl", segments_to_jsonl(segments));
      run.emit("report.json", report_to_json(report));
      run.emit("day_histogram.csv", emit_day_histogram(report));
      run.count("posts_daily_journal", static_cast<double>(report.daily_journal));
      run.count("posts_absolute_date", static_cast<double>(report.absolute_date));
      run.count("posts_none", static_cast<double>(report.none));
      run.count("segments", static_cast<double>(segments.size()));
      run.count("day_mentions", static_cast<double>(report.day_mentions));
      if (segments.empty()) run.fail("no documents: no post could be annotated");
    });

    run.stage(Stage::prep, [&] {
      corpus = build_corpus(segments, load_stoplist(cfg.stopwords));
      run.emit("corpus.json", corpus_to_json(corpus));
      run.count("documents_modelled", static_cast<double>(corpus.bags.size()));
      run.count("segments_dropped_empty", static_cast<double>(corpus.dropped_segments));
      run.count("vocabulary", static_cast<double>(corpus.vocabulary.size()));
      std::set<int> days;
      for (const auto& bag : corpus.bags) {
        const auto& d = segments[bag.segment].day;
        if (d && *d >= 1 && *d <= cfg.t_max) days.insert(*d);
      }
      run.count("days_covered", static_cast<double>(days.size()));
      if (corpus.bags.empty()) run.fail("no documents: every segment is empty after stopword removal");
    });

    run.stage(Stage::model, [&] {
      model = run_model(corpus, {cfg.seed, cfg.sweeps, cfg.merge_passes, 1.0}, cfg.level);
      run.emit("topics.json", topics_to_json(model.topics, model.inference, model.graph, corpus));
      run.emit("wordclouds.json", wordclouds_to_json(model.topics, corpus.vocabulary.tokens()));
      run.count("hierarchy_levels", static_cast<double>(model.inference.state.levels()));
      run.count("topic_level", static_cast<double>(model.topics.level));
      run.count("topics", static_cast<double>(model.topics.topics));
      run.count("description_length", model.inference.state.description_length);
    });

    run.stage(Stage::sentiment, [&] {
      const std::unordered_set<std::string> excl(cfg.exclusions.begin(), cfg.exclusions.end());
      emotions = score_days(corpus, segments, load_lexicon(cfg.lexicon, excl));
      run.emit("sentiment.csv", sentiment_to_csv(emotions, cfg.denominator));
      run.count("sentiment_days", static_cast<double>(emotions.size()));
    });

    run.stage(Stage::series, [&] {
      std::vector<long> lengths;
      for (const auto& bag : corpus.bags) lengths.push_back(bag.total());
      series = build_series(model.topics, document_days(corpus.bags, segments), emotions, cfg.t_max, cfg.weighting,
                            lengths, cfg.denominator);
      run.emit("series.csv", series_to_csv(series));
      std::vector<std::string> kinds(series.topic_labels.size(), "topic");
      kinds.resize(kinds.size() + kEmotionCount, "sentiment");
      const auto curves = smooth_series(series.columns(), kinds, cfg.t_max, cfg.loess_span, cfg.loess_degree,
                                        cfg.grid_points, run.manifest.warnings);
      run.emit("curves.csv", curves_to_csv(curves));
      run.count("curves", static_cast<double>(curves.size()));
    });

    run.stage(Stage::correlate, [&] {
      const auto corr = run_correlation(series.columns(), cfg.linkage, cfg.seed);
      for (const auto& label : corr.dropped)
        run.manifest.warnings.push_back("series " + label + " has undefined correlations; excluded from clustering and MDS");
      run.emit("heatmap.csv", heatmap_to_csv(corr.used, corr.tree));
      run.emit("tree.json", tree_to_json(corr.tree, cfg.linkage, corr.dropped, corr.embedding));
      run.emit("mds.csv", mds_to_csv(corr.embedding));
      run.count("correlated_series", static_cast<double>(corr.used.size()));
    });
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    run.fail(e.what());
  }

  write_artifact(cfg.output_dir / "manifest.json", run.manifest.to_json());
  return run.manifest;
}

}  // namespace timeline
