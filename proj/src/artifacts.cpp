#include "timeline/artifacts.hpp"

#include "timeline/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace timeline {

namespace {

using json = nlohmann::ordered_json;

std::string dump(const json& j) { return j.dump(1, ' ', false, json::error_handler_t::replace) + "\n"; }

json parse_json(std::string_view content, const char* what) {
  try {
    return json::parse(content);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

template <typename T>
T field(const json& obj, const char* key, std::size_t line = 0) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("missing key '") + key + "'", line);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("wrong type for key '") + key + "'", line);
  }
}

// CSV header check: the first line must start with the expected columns.
std::vector<std::vector<std::string>> csv_rows(std::string_view content, const std::vector<std::string>& header) {
  const auto lines = split_lines(content);
  if (lines.empty()) throw ParseError("empty CSV file");
  const auto head = csv_split(lines[0]);
  if (head.size() < header.size() || !std::equal(header.begin(), header.end(), head.begin()))
    throw ParseError("unexpected CSV header", 1);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto row = csv_split(lines[i]);
    if (row.size() != head.size()) throw ParseError("wrong number of CSV fields", i + 1);
    rows.push_back(std::move(row));
  }
  return rows;
}

long parse_long(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    long v = std::stol(s, &used);
    if (used != s.size()) throw ParseError("bad integer '" + s + "'", line);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad integer '" + s + "'", line);
  }
}

}  // namespace

std::string segments_to_jsonl(const std::vector<DaySegment>& segments) {
  std::string out;
  for (const auto& s : segments) {
    json obj = {{"post_id", s.post_id},
                {"author", s.author},
                {"day", s.day ? json(*s.day) : json(nullptr)},
                {"text", s.text},
                {"format", std::string(to_string(s.format))}};
    out += obj.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<DaySegment> segments_from_jsonl(std::string_view content) {
  std::vector<DaySegment> out;
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    json obj;
    try {
      obj = json::parse(lines[i]);
    } catch (const json::parse_error&) {
      throw ParseError("segment is not valid JSON", i + 1);
    }
    DaySegment s;
    s.post_id = field<std::string>(obj, "post_id", i + 1);
    s.author = field<std::string>(obj, "author", i + 1);
    const auto day = obj.find("day");
    if (day == obj.end()) throw ParseError("missing key 'day'", i + 1);
    if (!day->is_null()) {
      if (!day->is_number_integer()) throw ParseError("wrong type for key 'day'", i + 1);
      s.day = day->get<int>();
    }
    s.text = field<std::string>(obj, "text", i + 1);
    try {
      s.format = post_format_from_string(field<std::string>(obj, "format", i + 1));
    } catch (const ParseError& e) {
      if (e.line()) throw;
      throw ParseError(e.what(), i + 1);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string report_to_json(const AnnotationReport& report) {
  json hist = json::array();
  for (const auto& [day, count] : report.mention_histogram)
    hist.push_back({{"day", day}, {"mentions", count}, {"posts", report.posts_per_day.count(day) ? report.posts_per_day.at(day) : 0}});
  json obj = {{"formats", {{"daily_journal", report.daily_journal}, {"absolute_date", report.absolute_date}, {"none", report.none}}},
              {"total_posts", report.total_posts()},
              {"annotated_posts", report.annotated_posts()},
              {"segments", report.segments},
              {"day_mentions", report.day_mentions},
              {"distinct_days", report.distinct_days()},
              {"day_zero_markers", report.day_zero_markers},
              {"dropped_before_reference", report.dropped_before_reference},
              {"histogram", hist}};
  return dump(obj);
}

std::string emit_day_histogram(const AnnotationReport& report) {
  std::string out = "day,mention_count,fraction_of_posts_mentioning\n";
  const double posts = static_cast<double>(report.annotated_posts());
  for (const auto& [day, count] : report.mention_histogram) {
    const auto it = report.posts_per_day.find(day);
    const double distinct = it == report.posts_per_day.end() ? 0.0 : static_cast<double>(it->second);
    out += std::to_string(day) + "," + std::to_string(count) + "," +
           format_double(posts > 0 ? distinct / posts : std::nan("")) + "\n";
  }
  return out;
}

std::string corpus_to_json(const Corpus& corpus) {
  json vocab = json::array();
  for (std::size_t i = 0; i < corpus.vocabulary.size(); ++i)
    vocab.push_back({{"token", corpus.vocabulary.token(i)}, {"df", corpus.vocabulary.doc_freq(i)}});
  json docs = json::array();
  for (const auto& bag : corpus.bags) {
    json counts = json::array();
    for (const auto& [id, c] : bag.counts) counts.push_back({id, c});
    docs.push_back({{"segment", bag.segment}, {"tokens", counts}});
  }
  return dump({{"vocabulary", vocab}, {"documents", docs}, {"dropped_segments", corpus.dropped_segments}});
}

Corpus corpus_from_json(std::string_view content) {
  const json obj = parse_json(content, "corpus");
  Corpus corpus;
  std::vector<std::string> tokens;
  std::vector<std::size_t> df;
  for (const auto& v : field<json>(obj, "vocabulary")) {
    tokens.push_back(field<std::string>(v, "token"));
    df.push_back(field<std::size_t>(v, "df"));
  }
  if (!std::is_sorted(tokens.begin(), tokens.end()) || std::adjacent_find(tokens.begin(), tokens.end()) != tokens.end())
    throw ParseError("corpus vocabulary must be sorted and unique");
  corpus.vocabulary = Vocabulary(std::move(tokens), std::move(df));
  for (const auto& d : field<json>(obj, "documents")) {
    BagOfWords bag;
    bag.segment = field<std::size_t>(d, "segment");
    for (const auto& pair : field<json>(d, "tokens")) {
      if (!pair.is_array() || pair.size() != 2) throw ParseError("token entry must be [id, count]");
      const auto id = pair[0].get<std::size_t>();
      if (id >= corpus.vocabulary.size()) throw ParseError("token id outside the vocabulary");
      bag.counts.emplace_back(id, pair[1].get<long>());
    }
    corpus.bags.push_back(std::move(bag));
  }
  corpus.dropped_segments = field<std::size_t>(obj, "dropped_segments");
  return corpus;
}

std::string topics_to_json(const TopicModel& model, const InferenceResult& inference, const BipartiteGraph& graph,
                           const Corpus& corpus) {
  const BlockState& state = inference.state;
  json levels = json::array();
  for (std::size_t l = 0; l < state.levels(); ++l) {
    const auto [docs, words] = side_block_counts(state, l, graph.documents);
    levels.push_back({{"level", l}, {"document_blocks", docs}, {"word_blocks", words}});
  }
  json wgt = json::array();
  for (const auto& row : model.word_given_topic) {
    json sparse = json::array();
    for (std::size_t w = 0; w < row.size(); ++w)
      if (row[w] > 0.0) sparse.push_back({w, row[w]});
    wgt.push_back(sparse);
  }
  std::vector<std::size_t> segs;
  std::vector<long> lengths;
  for (const auto& bag : corpus.bags) {
    segs.push_back(bag.segment);
    lengths.push_back(bag.total());
  }
  json obj = {{"level", model.level},
              {"topics", model.topics},
              {"description_length", state.description_length},
              {"levels", levels},
              {"best_trace", inference.best_trace},
              {"partitions", state.partitions},
              {"vocabulary", corpus.vocabulary.tokens()},
              {"document_segments", segs},
              {"document_lengths", lengths},
              {"word_topic", model.word_topic},
              {"word_given_topic", wgt},
              {"topic_given_document", model.topic_given_document}};
  return dump(obj);
}

TopicsArtifact topics_from_json(std::string_view content) {
  const json obj = parse_json(content, "topics");
  TopicsArtifact a;
  a.model.level = field<std::size_t>(obj, "level");
  a.model.topics = field<std::size_t>(obj, "topics");
  a.vocabulary = field<std::vector<std::string>>(obj, "vocabulary");
  a.document_segments = field<std::vector<std::size_t>>(obj, "document_segments");
  a.document_lengths = field<std::vector<long>>(obj, "document_lengths");
  a.model.word_topic = field<std::vector<int>>(obj, "word_topic");
  a.model.topic_given_document = field<std::vector<std::vector<double>>>(obj, "topic_given_document");
  const auto wgt = field<json>(obj, "word_given_topic");
  if (wgt.size() != a.model.topics) throw ParseError("word_given_topic must have one row per topic");
  for (const auto& row : wgt) {
    std::vector<double> dense(a.vocabulary.size(), 0.0);
    for (const auto& pair : row) {
      const auto w = pair.at(0).get<std::size_t>();
      if (w >= dense.size()) throw ParseError("word id outside the vocabulary");
      dense[w] = pair.at(1).get<double>();
    }
    a.model.word_given_topic.push_back(std::move(dense));
  }
  if (a.document_segments.size() != a.model.topic_given_document.size() ||
      a.document_lengths.size() != a.document_segments.size())
    throw ParseError("document_segments and topic_given_document differ in length");
  for (const auto& row : a.model.topic_given_document)
    if (row.size() != a.model.topics) throw ParseError("topic_given_document row has the wrong width");
  return a;
}

std::string wordclouds_to_json(const TopicModel& model, const std::vector<std::string>& vocabulary, std::size_t n) {
  json topics = json::array();
  for (std::size_t k = 0; k < model.topics; ++k) {
    const auto& row = model.word_given_topic[k];
    std::vector<std::size_t> ids;
    for (std::size_t w = 0; w < row.size(); ++w)
      if (row[w] > 0.0) ids.push_back(w);
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
      if (row[a] != row[b]) return row[a] > row[b];
      return vocabulary[a] < vocabulary[b];
    });
    if (ids.size() > n) ids.resize(n);
    json words = json::array();
    for (std::size_t w : ids) words.push_back({{"word", vocabulary[w]}, {"p", row[w]}});
    topics.push_back({{"topic", topic_label(k)}, {"words", words}});
  }
  return dump({{"topics", topics}});
}

std::string sentiment_to_csv(const std::vector<EmotionCounts>& counts, Denominator denominator) {
  std::string out = "day,category,count,proportion,emotion_words\n";
  for (const auto& ec : counts) {
    const auto p = ec.proportions(denominator);
    for (std::size_t c = 0; c < kEmotionCount; ++c) {
      out += std::to_string(ec.day) + "," + std::string(emotion_names()[c]) + "," + std::to_string(ec.counts[c]) + "," +
             format_double(ec.defined() ? p[c] : std::nan("")) + "," + std::to_string(ec.emotion_carrying_total) + "\n";
    }
  }
  return out;
}

std::vector<EmotionCounts> sentiment_from_csv(std::string_view content) {
  const auto rows = csv_rows(content, {"day", "category", "count", "proportion", "emotion_words"});
  std::map<int, EmotionCounts> by_day;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const int day = static_cast<int>(parse_long(r[0], i + 2));
    const auto emotion = emotion_from_string(r[1]);
    if (!emotion) throw ParseError("unknown category '" + r[1] + "'", i + 2);
    auto& ec = by_day[day];
    ec.day = day;
    const long count = parse_long(r[2], i + 2);
    ec.counts[static_cast<std::size_t>(*emotion)] = count;
    ec.membership_total += count;
    ec.emotion_carrying_total = parse_long(r[4], i + 2);
  }
  std::vector<EmotionCounts> out;
  for (auto& [day, ec] : by_day) out.push_back(ec);
  return out;
}

std::string series_to_csv(const DailySeries& series) {
  std::string out = "day,series,kind,value,n_documents\n";
  for (int t = 1; t <= series.t_max; ++t) {
    const std::size_t row = static_cast<std::size_t>(t - 1);
    const std::string docs = std::to_string(series.documents_per_day[row]);
    for (std::size_t k = 0; k < series.topic_labels.size(); ++k)
      out += std::to_string(t) + "," + series.topic_labels[k] + ",topic," + format_double(series.topic[row][k]) + "," + docs + "\n";
    for (std::size_t c = 0; c < kEmotionCount; ++c)
      out += std::to_string(t) + "," + std::string(emotion_names()[c]) + ",sentiment," +
             format_double(series.sentiment[row][c]) + "," + docs + "\n";
  }
  return out;
}

SeriesTable series_from_csv(std::string_view content) {
  const auto rows = csv_rows(content, {"day", "series", "kind", "value", "n_documents"});
  SeriesTable table;
  std::map<std::string, std::size_t> index;
  std::vector<std::map<int, double>> values;
  int max_day = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const int day = static_cast<int>(parse_long(r[0], i + 2));
    if (day < 1) throw ParseError("day must be at least 1", i + 2);
    if (r[2] != "topic" && r[2] != "sentiment") throw ParseError("kind must be topic or sentiment", i + 2);
    auto [it, fresh] = index.emplace(r[1], table.labels.size());
    if (fresh) {
      table.labels.push_back(r[1]);
      table.kinds.push_back(r[2]);
      values.emplace_back();
    }
    double v;
    try {
      v = parse_double(r[3]);
    } catch (const std::exception&) {
      throw ParseError("bad value '" + r[3] + "'", i + 2);
    }
    values[it->second][day] = v;
    max_day = std::max(max_day, day);
  }
  for (const auto& m : values) {
    std::vector<double> col(static_cast<std::size_t>(max_day), std::nan(""));
    for (const auto& [day, v] : m) col[static_cast<std::size_t>(day - 1)] = v;
    table.values.push_back(std::move(col));
  }
  return table;
}

std::string curves_to_csv(const std::vector<NamedCurve>& curves) {
  std::string out = "series,kind,x,fitted,fallback\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.curve.grid.size(); ++i)
      out += c.label + "," + c.kind + "," + format_double(c.curve.grid[i]) + "," + format_double(c.curve.fitted[i]) + "," +
             (c.curve.fallback[i] ? "1" : "0") + "\n";
  return out;
}

std::string heatmap_to_csv(const CorrelationMatrix& matrix, const ClusterTree& tree) {
  std::string out = "label";
  for (std::size_t i : tree.leaf_order) out += "," + csv_escape(matrix.labels[i]);
  out += "\n";
  for (std::size_t i : tree.leaf_order) {
    out += csv_escape(matrix.labels[i]);
    for (std::size_t j : tree.leaf_order) out += "," + format_double(matrix.rho[i][j]);
    out += "\n";
  }
  return out;
}

std::string tree_to_json(const ClusterTree& tree, Linkage linkage, const std::vector<std::string>& dropped,
                         const MdsEmbedding& embedding) {
  json merges = json::array();
  for (const auto& m : tree.merges)
    merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}, {"size", m.size}});
  std::vector<std::string> leaf_labels;
  for (std::size_t i : tree.leaf_order) leaf_labels.push_back(tree.labels[i]);
  json obj = {{"labels", tree.labels},
              {"linkage", to_string(linkage)},
              {"merges", merges},
              {"leaf_order", tree.leaf_order},
              {"leaf_labels", leaf_labels},
              {"dropped_undefined", dropped},
              {"mds", {{"stress", embedding.stress}, {"iterations", embedding.iterations}, {"stress_history", embedding.stress_history}}}};
  return dump(obj);
}

std::string mds_to_csv(const MdsEmbedding& embedding) {
  const auto colours = nearest_sentiment_coloring(embedding);
  std::string out = "label,kind,x,y,nearest_sentiment\n";
  for (std::size_t i = 0; i < embedding.labels.size(); ++i) {
    const auto& label = embedding.labels[i];
    const bool sentiment = is_sentiment_label(label);
    const auto it = colours.find(label);
    out += csv_escape(label) + "," + (sentiment ? "sentiment" : "topic") + "," + format_double(embedding.coords[i][0]) + "," +
           format_double(embedding.coords[i][1]) + "," + (sentiment ? label : (it == colours.end() ? "" : it->second)) + "\n";
  }
  return out;
}

}  // namespace timeline
