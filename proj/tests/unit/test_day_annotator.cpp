#include "timeline/artifacts.hpp"
#include "timeline/day_annotator.hpp"
#include "timeline/io.hpp"

#include <doctest.h>

#include <random>

using namespace timeline;

namespace {

RawPost post(const std::string& id, const std::string& title, const std::string& body) {
  return RawPost{id, "author_" + id, "Tested Positive", title, body, 1};
}

std::string rebuild(const RawPost& p, const AnnotatedPost& a) {
  std::string out;
  for (const auto& piece : a.pieces) out += p.body.substr(piece.begin, piece.end - piece.begin);
  return out;
}

}  // namespace

TEST_CASE("classify_format") {
  CHECK(classify_format(post("1", "x", "Day 1: fever. Day 2: cough.")) == PostFormat::daily_journal);
  CHECK(classify_format(post("2", "x", "March 3 I felt off. March 5 got worse.")) == PostFormat::absolute_date);
  CHECK(classify_format(post("3", "x", "I tested positive, feeling scared.")) == PostFormat::none);
  // Day-x wins when both kinds of marker appear.
  CHECK(classify_format(post("4", "x", "March 3 it began. Day 2 was worse.")) == PostFormat::daily_journal);
  CHECK(classify_format(post("5", "Day 4", "No markers here.")) == PostFormat::daily_journal);
}

TEST_CASE("annotate: day markers") {
  const auto s = annotate(post("1", "Symptoms", "Day 1: fever started. Day 2: cough worse."));
  REQUIRE(s.size() == 2);
  CHECK(s[0].day == 1);
  CHECK(s[0].text == "fever started.");
  CHECK(s[1].day == 2);
  CHECK(s[1].text == "cough worse.");
  CHECK(s[0].format == PostFormat::daily_journal);
}

TEST_CASE("annotate: title names the day") {
  const auto s = annotate(post("2", "Day 7 update", "Still tired, no fever."));
  REQUIRE(s.size() == 1);
  CHECK(s[0].day == 7);
  CHECK(s[0].text == "Still tired, no fever.");
}

TEST_CASE("annotate: range midpoint rounds half up") {
  auto s = annotate(post("3", "x", "Days 3-5 I mostly slept."));
  REQUIRE(s.size() == 1);
  CHECK(s[0].day == 4);
  CHECK(s[0].text == "I mostly slept.");
  s = annotate(post("3b", "x", "Day 3-4 rough."));
  REQUIRE(s.size() == 1);
  CHECK(s[0].day == 4);
}

TEST_CASE("annotate: absolute dates count from the first date") {
  const auto s = annotate(post("4", "x", "March 3 chills. March 5 worse."));
  REQUIRE(s.size() == 2);
  CHECK(s[0].day == 1);
  CHECK(s[0].text == "chills.");
  CHECK(s[1].day == 3);
  CHECK(s[1].text == "worse.");
  CHECK(s[0].format == PostFormat::absolute_date);
}

TEST_CASE("annotate: prefix before the first marker") {
  auto s = annotate(post("5", "Timeline", "Some background first. Day 2: cough."));
  REQUIRE(s.size() == 2);
  CHECK_FALSE(s[0].day.has_value());
  CHECK(s[0].text == "Some background first.");
  s = annotate(post("6", "Day 1 of this", "Some background first. Day 2: cough."));
  REQUIRE(s.size() == 2);
  CHECK(s[0].day == 1);
}

TEST_CASE("annotate: day 0 maps to day 1") {
  const auto a = annotate_detailed(post("7", "x", "Day 0: exposure. Day 1: sore throat."));
  REQUIRE(a.segments.size() == 2);
  CHECK(a.segments[0].day == 1);
  CHECK(a.day_zero_markers == 1);
}

TEST_CASE("annotate: format none is discarded") {
  CHECK_THROWS_AS(annotate(post("8", "Question", "I tested positive, feeling scared.")), NotAnnotatable);
}

TEST_CASE("lossless split over generated bodies") {
  const std::vector<std::string> parts{"Day 1:", "day 2 -", "Days 3-5", "March 3", "4/2", " fever ", "cough. ",
                                       "\n\n", "Day", " 12", "ok—", "é ", "  "};
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1), len(1, 12);
  for (int trial = 0; trial < 300; ++trial) {
    std::string body;
    for (std::size_t i = len(rng); i > 0; --i) body += parts[pick(rng)];
    const auto p = post("g" + std::to_string(trial), trial % 5 == 0 ? "Day 3 notes" : "notes", body);
    if (classify_format(p) == PostFormat::none) continue;
    const auto a = annotate_detailed(p);
    CHECK(rebuild(p, a) == body);
    for (const auto& seg : a.segments) {
      CHECK(!std::string(trim(seg.text)).empty());
      if (seg.day) CHECK(*seg.day >= 1);
    }
    // Day 1 is present whenever the first date actually opens some text.
    const auto dates = find_date_markers(body);
    if (a.format == PostFormat::absolute_date && !dates.empty()) {
      const std::size_t stop = dates.size() > 1 ? dates[1].begin : body.size();
      if (trim(std::string_view(body).substr(dates[0].end, stop - dates[0].end)).empty()) continue;
      bool has_day1 = false;
      for (const auto& seg : a.segments) has_day1 = has_day1 || seg.day == 1;
      CHECK(has_day1);
    }
  }
}

TEST_CASE("annotate_corpus: small corpus") {
  const std::vector<RawPost> posts{post("j", "Journal", "Day 1: fever. Day 2: cough."),
                                   post("d", "Diary", "Rough start. March 3 chills."),
                                   post("n", "Question", "Is this normal?")};
  const auto [segments, report] = annotate_corpus(posts);
  CHECK(segments.size() == 4);
  CHECK(report.daily_journal == 1);
  CHECK(report.absolute_date == 1);
  CHECK(report.none == 1);
  CHECK(report.total_posts() == posts.size());
  CHECK(report.segments == 4);
}

TEST_CASE("annotate_corpus: edge cases") {
  const auto [none_segments, empty] = annotate_corpus({});
  CHECK(none_segments.empty());
  CHECK(empty.total_posts() == 0);
  CHECK(empty.mention_histogram.empty());

  const auto [segments, report] = annotate_corpus({post("x", "t", "Day 1")});
  CHECK(report.mention_histogram == std::map<int, std::size_t>{{1, 1}});
  CHECK(report.daily_journal == 1);
}

TEST_CASE("15-post fixture matches the hand-traced segments") {
  std::vector<RawPost> posts;
  for (const auto& line : split_lines(read_file(TIMELINE_SOURCE_DIR "/tests/fixtures/annotation_15.jsonl")))
    posts.push_back(parse_post_json(line));
  const auto expected = segments_from_jsonl(read_file(TIMELINE_SOURCE_DIR "/tests/fixtures/annotation_15_expected.jsonl"));
  const auto [segments, report] = annotate_corpus(posts);
  REQUIRE(segments.size() == expected.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    CAPTURE(i);
    CHECK(segments[i] == expected[i]);
  }
  CHECK(report.daily_journal == 10);
  CHECK(report.absolute_date == 3);
  CHECK(report.none == 2);
}
