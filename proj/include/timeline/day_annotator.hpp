#pragma once

#include "timeline/corpus_ingest.hpp"

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace timeline {

enum class PostFormat { daily_journal, absolute_date, none };

std::string_view to_string(PostFormat f);
PostFormat post_format_from_string(std::string_view s);

/// A span of one post's text annotated with a single day. `day` is empty for
/// the text that precedes the first marker (the "NA" prefix).
struct DaySegment {
  std::string post_id;
  std::string author;
  std::optional<int> day;
  std::string text;
  PostFormat format = PostFormat::none;

  bool operator==(const DaySegment&) const = default;
};

/// A "Day x" / "Days a-b" marker. `day` already has the range midpoint and the
/// day-0 remap applied.
struct DayMarker {
  std::size_t begin = 0;  // byte offsets into the scanned text, marker = [begin, end)
  std::size_t end = 0;
  int first = 0;
  std::optional<int> last;  // set for ranges
  int day = 0;
  bool zero_remapped = false;
};

struct DateMarker {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::chrono::year_month_day date;
};

/// Finds non-overlapping "Day x" markers, leftmost first. `end` also covers a
/// trailing punctuation run such as ":" or " -".
std::vector<DayMarker> find_day_markers(std::string_view text);

/// Finds calendar dates ("March 3", "3 March", "3/5", "3/5/2020"). Year defaults to 2020.
std::vector<DateMarker> find_date_markers(std::string_view text);

PostFormat classify_format(const RawPost& post);

/// Day named by the title, if any (first marker wins).
std::optional<int> title_day(const RawPost& post);

/// The body cut into alternating text and marker pieces; concatenating every
/// piece's bytes in order reproduces the body exactly.
struct BodyPiece {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool marker = false;
};

struct AnnotatedPost {
  PostFormat format = PostFormat::none;
  std::vector<DaySegment> segments;
  std::vector<BodyPiece> pieces;
  std::vector<int> mentioned_days;  // one entry per marker (title included) that yielded a valid day
  std::size_t day_zero_markers = 0;
  std::size_t dropped_before_reference = 0;  // absolute-date spans dated before the first date
};

/// The post cannot be placed on the timeline and is discarded.
class NotAnnotatable : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Full annotation with bookkeeping. Throws NotAnnotatable for format `none`.
AnnotatedPost annotate_detailed(const RawPost& post);

std::vector<DaySegment> annotate(const RawPost& post);

struct AnnotationReport {
  std::size_t daily_journal = 0;
  std::size_t absolute_date = 0;
  std::size_t none = 0;
  std::size_t segments = 0;
  std::size_t day_mentions = 0;                 // total mentions of specific days
  std::map<int, std::size_t> mention_histogram;  // day -> mentions
  std::map<int, std::size_t> posts_per_day;      // day -> distinct posts mentioning it
  std::size_t day_zero_markers = 0;
  std::size_t dropped_before_reference = 0;

  std::size_t annotated_posts() const { return daily_journal + absolute_date; }
  std::size_t distinct_days() const { return mention_histogram.size(); }
  std::size_t total_posts() const { return daily_journal + absolute_date + none; }
};

std::pair<std::vector<DaySegment>, AnnotationReport> annotate_corpus(const std::vector<RawPost>& posts);

}  // namespace timeline
