#include "timeline/io.hpp"
#include "timeline/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace timeline;

namespace {

int fail(Stage stage, const std::exception& e) {
  std::cerr << "error: " << to_string(stage) << ": " << e.what() << "\n";
  return exit_code(stage);
}

// Runs one subcommand body, mapping configuration problems to the config exit
// code and everything else to the stage's code.
template <typename F>
int guarded(Stage stage, F&& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: configuration: " << e.what() << "\n";
    return kConfigExitCode;
  } catch (const std::exception& e) {
    return fail(stage, e);
  }
}

Denominator denominator_from(const std::string& s) {
  if (s == "memberships") return Denominator::memberships;
  if (s == "occurrences") return Denominator::occurrences;
  throw ConfigError("denominator must be memberships or occurrences");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collective illness timeline: annotation, topic model, sentiment and correlation pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  int status = 0;

  // fetch
  std::string source, subreddit = "COVID19positive", fetch_out;
  std::vector<std::string> flairs;
  std::int64_t after = 0, before = INT64_MAX;
  int page_size = 100, delay_ms = 0, attempts = 3;
  auto* fetch = app.add_subcommand("fetch", "Load posts from an API or snapshot and keep whitelisted flairs");
  fetch->add_option("--source", source, "API base URL or local JSONL snapshot")->required();
  fetch->add_option("--flair", flairs, "Flair to keep (repeatable)")->required();
  fetch->add_option("--after", after, "Window start, Unix seconds (inclusive)");
  fetch->add_option("--before", before, "Window end, Unix seconds (inclusive)");
  fetch->add_option("--subreddit", subreddit);
  fetch->add_option("--page-size", page_size);
  fetch->add_option("--delay-ms", delay_ms, "Pause between API requests");
  fetch->add_option("--attempts", attempts, "Attempts per API request");
  fetch->add_option("--out", fetch_out, "Snapshot to write")->required();
  fetch->callback([&] {
    status = guarded(Stage::fetch, [&] {
      IngestConfig ic;
      if (source.rfind("http://", 0) == 0 || source.rfind("https://", 0) == 0) ic.source = RemoteSource{source};
      else ic.source = LocalSource{source};
      ic.subreddit = subreddit;
      ic.flair_whitelist = flairs;
      ic.window = {after, before};
      ic.page_size = page_size;
      ic.politeness_delay = std::chrono::milliseconds(delay_ms);
      ic.max_attempts = attempts;
      const auto fetched = fetch_posts(ic);
      const auto kept = filter_flair(fetched.posts, flairs);
      write_artifact(fetch_out, to_snapshot_jsonl(kept));
      std::cerr << "fetched " << fetched.posts.size() << ", kept " << kept.size() << ", malformed "
                << fetched.skipped.malformed << "\n";
    });
  });

  // annotate
  std::string annotate_in, annotate_out, report_out, histogram_out;
  auto* annotate_cmd = app.add_subcommand("annotate", "Split posts into day-annotated segments");
  annotate_cmd->add_option("--in", annotate_in, "Snapshot JSONL")->required();
  annotate_cmd->add_option("--out", annotate_out, "segments.jsonl")->required();
  annotate_cmd->add_option("--report", report_out, "report.json")->required();
  annotate_cmd->add_option("--histogram", histogram_out, "day_histogram.csv");
  annotate_cmd->callback([&] {
    status = guarded(Stage::annotate, [&] {
      const auto fetched = fetch_posts(IngestConfig{LocalSource{annotate_in}});
      const auto [segments, report] = annotate_corpus(fetched.posts);
      write_artifact(annotate_out, segments_to_jsonl(segments));
      write_artifact(report_out, report_to_json(report));
      if (!histogram_out.empty()) write_artifact(histogram_out, emit_day_histogram(report));
      if (segments.empty()) throw std::runtime_error("no documents: no post could be annotated");
    });
  });

  // prep
  std::string prep_segments, stopwords, prep_out;
  auto* prep = app.add_subcommand("prep", "Tokenise segments into a vocabulary and bags of words");
  prep->add_option("--segments", prep_segments)->required();
  prep->add_option("--stopwords", stopwords)->required();
  prep->add_option("--out", prep_out, "corpus.json")->required();
  prep->callback([&] {
    status = guarded(Stage::prep, [&] {
      const auto stoplist = load_stoplist(stopwords);
      const auto segments = segments_from_jsonl(read_file(prep_segments));
      const auto corpus = build_corpus(segments, stoplist);
      write_artifact(prep_out, corpus_to_json(corpus));
      if (corpus.bags.empty()) throw std::runtime_error("no documents: every segment is empty after stopword removal");
    });
  });

  // model
  std::string model_corpus, model_out, wordclouds_out, level_text = "auto";
  std::uint64_t seed = 0;
  int sweeps = 1000, merge_passes = 10;
  auto* model = app.add_subcommand("model", "Fit the nested blockmodel and extract topics");
  model->add_option("--corpus", model_corpus)->required();
  model->add_option("--seed", seed);
  model->add_option("--sweeps", sweeps);
  model->add_option("--merge-passes", merge_passes);
  model->add_option("--level", level_text, "Hierarchy level for topics, or auto");
  model->add_option("--out", model_out, "topics.json")->required();
  model->add_option("--wordclouds", wordclouds_out, "wordclouds.json");
  model->callback([&] {
    status = guarded(Stage::model, [&] {
      PipelineConfig probe;
      probe.set("level", level_text);
      if (sweeps < 0 || merge_passes < 0) throw ConfigError("sweeps and merge passes must be non-negative");
      const auto corpus = corpus_from_json(read_file(model_corpus));
      const auto out = run_model(corpus, {seed, sweeps, merge_passes, 1.0}, probe.level);
      write_artifact(model_out, topics_to_json(out.topics, out.inference, out.graph, corpus));
      if (!wordclouds_out.empty())
        write_artifact(wordclouds_out, wordclouds_to_json(out.topics, corpus.vocabulary.tokens()));
    });
  });

  // sentiment
  std::string sent_corpus, sent_segments, lexicon, exclude = "feeling,positive,negative", sent_out,
                                                       denominator = "memberships";
  auto* sentiment = app.add_subcommand("sentiment", "Score each day against the emotion lexicon");
  sentiment->add_option("--corpus", sent_corpus)->required();
  sentiment->add_option("--segments", sent_segments)->required();
  sentiment->add_option("--lexicon", lexicon)->required();
  sentiment->add_option("--exclude", exclude, "Comma-separated terms to ignore");
  sentiment->add_option("--denominator", denominator, "memberships or occurrences");
  sentiment->add_option("--out", sent_out, "sentiment.csv")->required();
  sentiment->callback([&] {
    status = guarded(Stage::sentiment, [&] {
      const auto denom = denominator_from(denominator);
      const auto terms = split_list(exclude);
      const auto lex = load_lexicon(lexicon, {terms.begin(), terms.end()});
      const auto corpus = corpus_from_json(read_file(sent_corpus));
      const auto segments = segments_from_jsonl(read_file(sent_segments));
      write_artifact(sent_out, sentiment_to_csv(score_days(corpus, segments, lex), denom));
    });
  });

  // series
  std::string series_topics, series_sentiment, series_segments, series_out, curves_out, weighting = "unweighted",
                                                                                series_denominator = "memberships";
  int t_max = 14, degree = 2;
  double span = 0.75;
  std::size_t grid_points = 200;
  auto* series_cmd = app.add_subcommand("series", "Build per-day series and LOESS curves");
  series_cmd->add_option("--topics", series_topics)->required();
  series_cmd->add_option("--sentiment", series_sentiment)->required();
  series_cmd->add_option("--segments", series_segments)->required();
  series_cmd->add_option("--tmax", t_max);
  series_cmd->add_option("--span", span);
  series_cmd->add_option("--degree", degree);
  series_cmd->add_option("--grid-points", grid_points);
  series_cmd->add_option("--weighting", weighting, "unweighted or length");
  series_cmd->add_option("--denominator", series_denominator, "memberships or occurrences");
  series_cmd->add_option("--out", series_out, "series.csv")->required();
  series_cmd->add_option("--curves", curves_out, "curves.csv")->required();
  series_cmd->callback([&] {
    status = guarded(Stage::series, [&] {
      PipelineConfig probe;
      probe.set("weighting", weighting);
      probe.t_max = t_max;
      probe.loess_span = span;
      probe.loess_degree = degree;
      probe.grid_points = grid_points;
      if (t_max < 1 || !(span > 0 && span <= 1) || degree < 0 || grid_points < 2)
        throw ConfigError("need tmax >= 1, span in (0, 1], degree >= 0, grid points >= 2");
      const auto denom = denominator_from(series_denominator);
      const auto topics = topics_from_json(read_file(series_topics));
      const auto segments = segments_from_jsonl(read_file(series_segments));
      const auto emotions = sentiment_from_csv(read_file(series_sentiment));
      std::vector<std::optional<int>> days;
      for (std::size_t s : topics.document_segments) days.push_back(segments.at(s).day);
      const auto series = build_series(topics.model, days, emotions, t_max, probe.weighting, topics.document_lengths, denom);
      write_artifact(series_out, series_to_csv(series));
      std::vector<std::string> kinds(series.topic_labels.size(), "topic");
      kinds.resize(kinds.size() + kEmotionCount, "sentiment");
      std::vector<std::string> warnings;
      const auto curves = smooth_series(series.columns(), kinds, t_max, span, degree, grid_points, warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      write_artifact(curves_out, curves_to_csv(curves));
    });
  });

  // correlate
  std::string corr_series, linkage = "average", heatmap_out, tree_out, mds_out;
  std::uint64_t mds_seed = 0;
  auto* correlate = app.add_subcommand("correlate", "Correlate series, cluster them and embed with MDS");
  correlate->add_option("--series", corr_series)->required();
  correlate->add_option("--linkage", linkage, "average or complete");
  correlate->add_option("--seed", mds_seed);
  correlate->add_option("--out-heatmap", heatmap_out)->required();
  correlate->add_option("--out-tree", tree_out)->required();
  correlate->add_option("--out-mds", mds_out)->required();
  correlate->callback([&] {
    status = guarded(Stage::correlate, [&] {
      PipelineConfig probe;
      probe.set("linkage", linkage);
      const auto table = series_from_csv(read_file(corr_series));
      std::vector<std::pair<std::string, std::vector<double>>> columns;
      for (std::size_t i = 0; i < table.labels.size(); ++i) columns.emplace_back(table.labels[i], table.values[i]);
      const auto corr = run_correlation(columns, probe.linkage, mds_seed);
      for (const auto& label : corr.dropped)
        std::cerr << "warning: series " << label << " has undefined correlations; excluded\n";
      write_artifact(heatmap_out, heatmap_to_csv(corr.used, corr.tree));
      write_artifact(tree_out, tree_to_json(corr.tree, probe.linkage, corr.dropped, corr.embedding));
      write_artifact(mds_out, mds_to_csv(corr.embedding));
    });
  });

  // run
  std::string config_path;
  std::vector<std::string> overrides;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run every stage from a configuration file");
  run->add_option("--config", config_path, "key = value configuration file")->required();
  run->add_option("--set", overrides, "Override one key: key=value (repeatable)");
  run->add_flag("--quiet", quiet, "Suppress stage progress");
  run->callback([&] {
    try {
      auto cfg = load_config(config_path);
      for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + o + "'");
        cfg.set(std::string(trim(o.substr(0, eq))), o.substr(eq + 1));
      }
      const auto manifest = run_pipeline(cfg, quiet ? nullptr : &std::cerr);
      for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
      status = 0;
    } catch (const ConfigError& e) {
      std::cerr << "error: configuration: " << e.what() << "\n";
      status = kConfigExitCode;
    } catch (const StageError& e) {
      std::cerr << "error: " << e.what() << "\n";
      status = exit_code(e.stage());
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExitCode;
  }
  return status;
}
