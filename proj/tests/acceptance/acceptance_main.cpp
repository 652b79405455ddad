// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "timeline/artifacts.hpp"
#include "timeline/io.hpp"
#include "timeline/pipeline.hpp"

#include "support/oracles.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

using namespace timeline;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << ":" << o.detail.str() << std::endl;
}

bool row_stochastic(const std::vector<std::vector<double>>& rows) {
  for (const auto& r : rows) {
    double s = 0.0;
    for (double v : r) {
      if (v < 0.0) return false;
      s += v;
    }
    if (std::fabs(s - 1.0) > 1e-9) return false;
  }
  return true;
}

void annotation_suite(Outcome& o) {
  const auto t0 = Clock::now();
  std::vector<RawPost> posts;
  for (const auto& line : split_lines(read_file("tests/fixtures/annotation_15.jsonl"))) posts.push_back(parse_post_json(line));
  const auto expected = segments_from_jsonl(read_file("tests/fixtures/annotation_15_expected.jsonl"));
  const auto [segments, report] = annotate_corpus(posts);
  o.require(posts.size() == 15, "15 posts");
  o.require(segments == expected, "segment list equals hand trace");
  o.require(report.daily_journal == 10 && report.absolute_date == 3 && report.none == 2, "format counts 10/3/2");

  std::size_t lossless = 0, annotatable = 0;
  for (const auto& p : posts) {
    if (classify_format(p) == PostFormat::none) continue;
    ++annotatable;
    const auto a = annotate_detailed(p);
    std::string rebuilt;
    for (const auto& piece : a.pieces) rebuilt += p.body.substr(piece.begin, piece.end - piece.begin);
    if (rebuilt == p.body) ++lossless;
  }
  o.require(lossless == annotatable, "lossless split on every post");
  const double secs = seconds_since(t0);
  o.require(secs < 1.0, "runtime < 1 s");
  o.detail << " segments " << segments.size() << "/" << expected.size() << ", formats " << report.daily_journal << "/"
           << report.absolute_date << "/" << report.none << ", lossless " << lossless << "/" << annotatable << ", "
           << secs << " s";
}

void planted_recovery(Outcome& o) {
  const auto t0 = Clock::now();
  const auto g = build_graph(oracle::planted_bags(15), 4);
  const std::vector<int> truth{0, 0, 1, 1};
  int recovered = 0;
  bool monotone = true, stochastic = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    InferenceOptions opt;
    opt.seed = seed;
    const auto r = infer(g, opt);
    std::vector<int> words(r.state.partitions[0].begin() + 20, r.state.partitions[0].end());
    if (oracle::nmi(words, truth) >= 0.95) ++recovered;
    for (std::size_t i = 1; i < r.best_trace.size(); ++i) monotone = monotone && r.best_trace[i] <= r.best_trace[i - 1];
    for (std::size_t level = 0; level < r.state.levels(); ++level) {
      const auto m = extract_topics(g, r.state, level);
      stochastic = stochastic && row_stochastic(m.word_given_topic) && row_stochastic(m.topic_given_document);
    }
  }
  const double secs = seconds_since(t0);
  o.require(recovered >= 9, "NMI >= 0.95 in >= 9/10 seeds");
  o.require(monotone, "best trace non-increasing");
  o.require(stochastic, "row-stochastic within 1e-9");
  o.require(secs < 30.0, "runtime < 30 s");
  o.detail << " recovered " << recovered << "/10, monotone " << monotone << ", row-stochastic " << stochastic << ", "
           << secs << " s";
}

void dl_ordering(Outcome& o) {
  const auto g = build_graph(oracle::planted_bags(15), 4);
  std::vector<int> planted, merged;
  for (int d = 0; d < 20; ++d) {
    planted.push_back(d < 10 ? 0 : 1);
    merged.push_back(0);
  }
  for (int b : {2, 2, 3, 3}) planted.push_back(b);
  for (int i = 0; i < 4; ++i) merged.push_back(1);
  const double sp = description_length(g, make_block_state(g, {planted, {0, 0, 1, 1}}));
  const double sm = description_length(g, make_block_state(g, {merged, {0, 1}}));
  o.require(sp < sm, "planted < merged");
  o.detail << " planted " << sp << " nats, merged " << sm << " nats";
}

void sentiment_suite(Outcome& o) {
  const auto lex = load_lexicon("data/toy_emolex.txt");
  // Four days of mixed tokens; every excluded term appears ten times in total.
  std::vector<std::vector<std::string>> days{
      {"fever", "feeling", "scared", "positive", "pain", "negative", "hope", "feeling", "walk"},
      {"better", "feeling", "positive", "negative", "good", "grateful", "feeling", "positive"},
      {"coffee", "walk", "feeling", "negative", "positive", "negative", "feeling"},
      {"death", "sad", "worried"}};
  for (int i = 0; i < 4; ++i) days[3].push_back("feeling");
  for (int i = 0; i < 6; ++i) {
    days[3].push_back("positive");
    days[3].push_back("negative");
  }
  std::map<std::string, int> occurrences;
  for (const auto& d : days)
    for (const auto& t : d) ++occurrences[t];
  o.require(occurrences["feeling"] == 10 && occurrences["positive"] == 10 && occurrences["negative"] == 10,
            "fixture holds each excluded term 10 times");

  double worst = 0.0;
  long excluded_contribution = 0;
  std::size_t non_empty = 0;
  for (std::size_t i = 0; i < days.size(); ++i) {
    const auto c = score_day(static_cast<int>(i + 1), days[i], lex);
    std::vector<std::string> without;
    for (const auto& t : days[i])
      if (t != "feeling" && t != "positive" && t != "negative") without.push_back(t);
    const auto ref = score_day(static_cast<int>(i + 1), without, lex);
    excluded_contribution += c.membership_total - ref.membership_total;
    excluded_contribution += c.emotion_carrying_total - ref.emotion_carrying_total;
    if (c.counts != ref.counts) ++excluded_contribution;
    if (!c.defined()) continue;
    ++non_empty;
    const auto p = c.proportions();
    worst = std::max(worst, std::fabs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
  }
  o.require(non_empty >= 3, "at least three non-empty days");
  o.require(worst <= 1e-9, "proportions sum to 1 +- 1e-9");
  o.require(excluded_contribution == 0, "excluded terms contribute zero");
  o.detail << " non-empty days " << non_empty << ", max |sum-1| " << worst << ", excluded contribution "
           << excluded_contribution;
}

void numerical_oracles(Outcome& o) {
  const double r1 = pearson({1, 2, 3}, {2, 4, 6});
  const double r2 = pearson({1, 2, 3}, {3, 2, 1});
  const double r3 = pearson({1, 2, 3, 4}, {1, 3, 2, 4});
  o.require(std::fabs(r1 - 1.0) <= 1e-12 && std::fabs(r2 + 1.0) <= 1e-12 && std::fabs(r3 - 0.8) <= 1e-12,
            "pearson 1 / -1 / 0.8 within 1e-12");
  o.require(to_dissimilarity(1.0) == 0.0 && to_dissimilarity(0.0) == 1.0 && to_dissimilarity(-1.0) == 2.0,
            "dissimilarity (1,0,-1) -> (0,1,2)");

  std::vector<std::pair<double, double>> line;
  for (int x = 1; x <= 14; ++x) line.emplace_back(x, 2.0 * x + 1.0);
  const auto grid = linear_grid(1, 14, 200);
  const auto curve = loess(line, 0.75, 2, grid);
  double loess_err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) loess_err = std::max(loess_err, std::fabs(curve.fitted[i] - (2 * grid[i] + 1)));
  o.require(loess_err <= 1e-9, "LOESS reproduces 2x+1 within 1e-9");

  const auto e = mds({"a", "b", "c"}, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  double side_err = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j)
      side_err = std::max(side_err, std::fabs(std::hypot(e.coords[i][0] - e.coords[j][0], e.coords[i][1] - e.coords[j][1]) - 1.0));
  bool non_increasing = true;
  for (std::size_t i = 1; i < e.stress_history.size(); ++i)
    non_increasing = non_increasing && e.stress_history[i] <= e.stress_history[i - 1];
  o.require(side_err <= 1e-6, "triangle sides within 1e-6");
  o.require(e.stress < 1e-9, "stress < 1e-9");
  o.require(non_increasing, "stress non-increasing");
  o.detail << " rho " << r1 << "/" << r2 << "/" << r3 << ", loess max err " << loess_err << ", mds side err " << side_err
           << ", stress " << e.stress;
}

void clustering(Outcome& o) {
  const std::vector<double> up{0.1, 0.4, 0.2, 0.8, 0.5};
  std::vector<double> down, up2;
  for (double v : up) {
    down.push_back(1.0 - v);
    up2.push_back(2.0 * v + 1.0);
  }
  const auto m = correlation_matrix({{"a", up}, {"b", up2}, {"c", down}, {"d", down}});
  const auto tree = cluster(m, Linkage::average);
  auto [left, right] = tree.top_split();
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  const bool separated = (left == std::vector<std::size_t>{0, 1} && right == std::vector<std::size_t>{2, 3}) ||
                         (left == std::vector<std::size_t>{2, 3} && right == std::vector<std::size_t>{0, 1});
  bool monotone = true;
  for (std::size_t i = 1; i < tree.merges.size(); ++i) monotone = monotone && tree.merges[i].height >= tree.merges[i - 1].height;
  o.require(separated, "top split separates the pairs");
  o.require(monotone, "merge heights monotone");
  o.detail << " heights";
  for (const auto& mg : tree.merges) o.detail << " " << mg.height;
}

std::map<std::string, std::string> read_outputs(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) files[entry.path().filename().string()] = read_file(entry.path());
  return files;
}

// Manifest without timing and without the output directory, which differs by construction.
std::string comparable_manifest(const std::string& text) {
  auto j = nlohmann::ordered_json::parse(text);
  j.erase("stage_seconds");
  j["config"].erase("output_dir");
  return j.dump();
}

void golden_run(Outcome& o) {
  const auto t0 = Clock::now();
  const auto base = fs::temp_directory_path() / "timeline_acceptance";
  fs::remove_all(base);
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"run1", "run2"}) {
    auto cfg = load_config("data/pipeline.conf");
    cfg.output_dir = base / name;
    run_pipeline(cfg);
    runs.push_back(read_outputs(base / name));
  }
  const double secs = seconds_since(t0);
  std::size_t identical = 0;
  bool same_names = runs[0].size() == runs[1].size();
  for (const auto& [name, content] : runs[0]) {
    auto other = runs[1].find(name);
    if (other == runs[1].end()) {
      same_names = false;
      continue;
    }
    const bool eq = name == "manifest.json" ? comparable_manifest(content) == comparable_manifest(other->second)
                                            : content == other->second;
    if (eq) ++identical;
    else o.detail << " differs: " << name;
  }
  o.require(same_names && runs[0].size() >= 13, "full artifact set");
  o.require(identical == runs[0].size(), "byte-identical outputs");
  o.require(secs < 60.0, "runtime < 60 s");
  o.detail << " " << identical << "/" << runs[0].size() << " files identical, " << secs << " s for two runs";
}

}  // namespace

int main() {
  criterion("annotation grammar suite", annotation_suite);
  criterion("hSBM planted recovery", planted_recovery);
  criterion("description-length ordering", dl_ordering);
  criterion("sentiment suite", sentiment_suite);
  criterion("numerical oracles", numerical_oracles);
  criterion("clustering", clustering);
  criterion("end-to-end golden run", golden_run);
  return failures == 0 ? 0 : 1;
}
