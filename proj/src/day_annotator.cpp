#include "timeline/day_annotator.hpp"

#include "timeline/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

namespace timeline {

std::string_view to_string(PostFormat f) {
  switch (f) {
    case PostFormat::daily_journal: return "daily_journal";
    case PostFormat::absolute_date: return "absolute_date";
    case PostFormat::none: return "none";
  }
  return "none";
}

PostFormat post_format_from_string(std::string_view s) {
  if (s == "daily_journal") return PostFormat::daily_journal;
  if (s == "absolute_date") return PostFormat::absolute_date;
  if (s == "none") return PostFormat::none;
  throw ParseError("unknown post format '" + std::string(s) + "'");
}

namespace {

constexpr int kDefaultYear = 2020;
constexpr std::size_t kMaxDayDigits = 4;

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_inline_blank(char c) { return c == ' ' || c == '\t'; }

bool boundary_before(std::string_view t, std::size_t i) {
  return i == 0 || !is_word_byte(static_cast<unsigned char>(t[i - 1]));
}
bool boundary_after(std::string_view t, std::size_t i) {
  return i >= t.size() || !is_word_byte(static_cast<unsigned char>(t[i]));
}

bool match_ci(std::string_view t, std::size_t i, std::string_view word) {
  if (i + word.size() > t.size()) return false;
  for (std::size_t k = 0; k < word.size(); ++k)
    if (std::tolower(static_cast<unsigned char>(t[i + k])) != word[k]) return false;
  return true;
}

std::size_t skip_blanks(std::string_view t, std::size_t i) {
  while (i < t.size() && is_blank(t[i])) ++i;
  return i;
}

// Reads 1..max_digits digits at i. Returns the position after them, or npos.
std::size_t read_number(std::string_view t, std::size_t i, std::size_t max_digits, int& value) {
  std::size_t j = i;
  value = 0;
  while (j < t.size() && is_digit(t[j])) {
    if (j - i >= max_digits) return std::string_view::npos;
    value = value * 10 + (t[j] - '0');
    ++j;
  }
  return j == i ? std::string_view::npos : j;
}

// Length of a dash/"to" range separator at i (0 if none).
std::size_t range_separator(std::string_view t, std::size_t i) {
  std::size_t j = i;
  while (j < t.size()) {
    if (t[j] == '-') {
      ++j;
    } else if (t.substr(j, 3) == "\xE2\x80\x93" || t.substr(j, 3) == "\xE2\x80\x94") {
      j += 3;
    } else if (match_ci(t, j, "to")) {
      j += 2;
    } else {
      break;
    }
  }
  return j - i;
}

// Extends a marker over trailing punctuation like ":" or " - " so it does not
// leak into the segment text.
std::size_t absorb_trailing_punct(std::string_view t, std::size_t i) {
  std::size_t j = i;
  while (j < t.size() && is_inline_blank(t[j])) ++j;
  std::size_t k = j;
  while (k < t.size()) {
    char c = t[k];
    if (c == ':' || c == '.' || c == ',' || c == ')' || c == ']' || c == '-' || c == ';') {
      ++k;
    } else if (t.substr(k, 3) == "\xE2\x80\x93" || t.substr(k, 3) == "\xE2\x80\x94") {
      k += 3;
    } else {
      break;
    }
  }
  return k == j ? i : k;
}

std::optional<DayMarker> match_day_marker(std::string_view t, std::size_t i) {
  if (!boundary_before(t, i) || !match_ci(t, i, "day")) return std::nullopt;
  std::size_t j = i + 3;
  if (j < t.size() && (t[j] == 's' || t[j] == 'S')) ++j;
  j = skip_blanks(t, j);
  if (j < t.size() && t[j] == '#') j = skip_blanks(t, j + 1);

  DayMarker m;
  m.begin = i;
  std::size_t after_first = read_number(t, j, kMaxDayDigits, m.first);
  if (after_first == std::string_view::npos) return std::nullopt;

  std::size_t grammar_end = std::string_view::npos;
  std::size_t k = skip_blanks(t, after_first);
  if (std::size_t sep = range_separator(t, k); sep > 0) {
    int second = 0;
    std::size_t after_second = read_number(t, skip_blanks(t, k + sep), kMaxDayDigits, second);
    if (after_second != std::string_view::npos && boundary_after(t, after_second)) {
      m.last = second;
      grammar_end = after_second;
    }
  }
  if (grammar_end == std::string_view::npos) {
    if (!boundary_after(t, after_first)) return std::nullopt;
    grammar_end = after_first;
  }

  // Ranges resolve to their midpoint, rounding half up.
  m.day = m.last ? (m.first + *m.last + 1) / 2 : m.first;
  if (m.day <= 0) {
    m.day = 1;
    m.zero_remapped = true;
  }
  m.end = absorb_trailing_punct(t, grammar_end);
  return m;
}

struct MonthName {
  std::string_view name;
  unsigned month;
};

constexpr std::array<MonthName, 24> kMonths{{
    {"january", 1}, {"february", 2}, {"march", 3}, {"april", 4}, {"may", 5}, {"june", 6},
    {"july", 7}, {"august", 8}, {"september", 9}, {"october", 10}, {"november", 11}, {"december", 12},
    {"sept", 9}, {"jan", 1}, {"feb", 2}, {"mar", 3}, {"apr", 4}, {"jun", 6},
    {"jul", 7}, {"aug", 8}, {"sep", 9}, {"oct", 10}, {"nov", 11}, {"dec", 12},
}};

// Month name starting at i followed by a word boundary (an abbreviation may carry a dot).
std::optional<std::pair<unsigned, std::size_t>> match_month(std::string_view t, std::size_t i) {
  if (!boundary_before(t, i)) return std::nullopt;
  for (const auto& m : kMonths) {  // full names precede abbreviations
    if (!match_ci(t, i, m.name)) continue;
    std::size_t j = i + m.name.size();
    if (!boundary_after(t, j)) continue;
    if (m.name.size() <= 4 && j < t.size() && t[j] == '.') ++j;
    return std::make_pair(m.month, j);
  }
  return std::nullopt;
}

std::size_t skip_ordinal(std::string_view t, std::size_t i) {
  for (std::string_view suf : {"st", "nd", "rd", "th"})
    if (match_ci(t, i, suf)) return i + 2;
  return i;
}

// Optional ", 2020" after a date. Returns the new end and sets year when present.
std::size_t optional_year(std::string_view t, std::size_t i, int& year) {
  std::size_t j = i;
  if (j < t.size() && t[j] == ',') ++j;
  while (j < t.size() && is_inline_blank(t[j])) ++j;
  int y = 0;
  std::size_t e = read_number(t, j, 4, y);
  if (e == std::string_view::npos || e - j != 4 || !boundary_after(t, e)) return i;
  year = y;
  return e;
}

std::optional<std::chrono::year_month_day> make_date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::optional<DateMarker> match_date(std::string_view t, std::size_t i) {
  // "March 3", "Mar. 3rd, 2020"
  if (auto month = match_month(t, i)) {
    std::size_t j = month->second;
    if (j < t.size() && is_inline_blank(t[j])) {
      while (j < t.size() && is_inline_blank(t[j])) ++j;
      int d = 0;
      std::size_t e = read_number(t, j, 2, d);
      if (e != std::string_view::npos) {
        e = skip_ordinal(t, e);
        if (boundary_after(t, e)) {
          int year = kDefaultYear;
          e = optional_year(t, e, year);
          if (auto date = make_date(year, month->first, static_cast<unsigned>(d)))
            return DateMarker{i, e, *date};
        }
      }
    }
  }
  if (!is_digit(t[i]) || !boundary_before(t, i) || (i > 0 && t[i - 1] == '/')) return std::nullopt;

  int first = 0;
  std::size_t e = read_number(t, i, 2, first);
  if (e == std::string_view::npos) return std::nullopt;

  // "3/5" or "3/5/2020"
  if (e < t.size() && t[e] == '/') {
    int second = 0;
    std::size_t e2 = read_number(t, e + 1, 2, second);
    if (e2 == std::string_view::npos) return std::nullopt;
    int year = kDefaultYear;
    if (e2 < t.size() && t[e2] == '/') {
      int y = 0;
      std::size_t e3 = read_number(t, e2 + 1, 4, y);
      if (e3 == std::string_view::npos || (e3 - e2 - 1 != 4 && e3 - e2 - 1 != 2)) return std::nullopt;
      year = (e3 - e2 - 1 == 2) ? 2000 + y : y;
      e2 = e3;
    }
    if (!boundary_after(t, e2) || (e2 < t.size() && t[e2] == '/')) return std::nullopt;
    if (auto date = make_date(year, static_cast<unsigned>(first), static_cast<unsigned>(second)))
      return DateMarker{i, e2, *date};
    return std::nullopt;
  }

  // "3 March", "3rd of March"
  std::size_t j = skip_ordinal(t, e);
  if (!boundary_after(t, j) || j >= t.size() || !is_inline_blank(t[j])) return std::nullopt;
  while (j < t.size() && is_inline_blank(t[j])) ++j;
  if (match_ci(t, j, "of") && j + 2 < t.size() && is_inline_blank(t[j + 2])) {
    j += 2;
    while (j < t.size() && is_inline_blank(t[j])) ++j;
  }
  auto month = match_month(t, j);
  if (!month) return std::nullopt;
  int year = kDefaultYear;
  std::size_t end = optional_year(t, month->second, year);
  if (auto date = make_date(year, month->first, static_cast<unsigned>(first))) return DateMarker{i, end, *date};
  return std::nullopt;
}

}  // namespace

std::vector<DayMarker> find_day_markers(std::string_view text) {
  std::vector<DayMarker> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (auto m = match_day_marker(text, i)) {
      i = m->end;
      out.push_back(*m);
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<DateMarker> find_date_markers(std::string_view text) {
  std::vector<DateMarker> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (auto m = match_date(text, i)) {
      DateMarker marker = *m;
      marker.end = absorb_trailing_punct(text, marker.end);
      i = marker.end;
      out.push_back(marker);
    } else {
      ++i;
    }
  }
  return out;
}

PostFormat classify_format(const RawPost& post) {
  if (!find_day_markers(post.body).empty() || !find_day_markers(post.title).empty()) return PostFormat::daily_journal;
  if (!find_date_markers(post.body).empty()) return PostFormat::absolute_date;
  return PostFormat::none;
}

std::optional<int> title_day(const RawPost& post) {
  auto markers = find_day_markers(post.title);
  if (markers.empty()) return std::nullopt;
  return markers.front().day;
}

namespace {

struct Cut {
  std::size_t begin;
  std::size_t end;
  std::optional<int> day;  // nullopt: marker dated before the reference date
};

}  // namespace

AnnotatedPost annotate_detailed(const RawPost& post) {
  AnnotatedPost out;
  out.format = classify_format(post);
  if (out.format == PostFormat::none) throw NotAnnotatable("post " + post.id + " has no day or date markers");

  const std::string_view body = post.body;
  std::vector<Cut> cuts;
  if (out.format == PostFormat::daily_journal) {
    for (const auto& m : find_day_markers(body)) {
      cuts.push_back({m.begin, m.end, m.day});
      if (m.zero_remapped) ++out.day_zero_markers;
    }
  } else {
    auto dates = find_date_markers(body);
    const auto reference = std::chrono::sys_days{dates.front().date};
    for (const auto& m : dates) {
      auto offset = (std::chrono::sys_days{m.date} - reference).count();
      if (offset < 0) {
        cuts.push_back({m.begin, m.end, std::nullopt});
        ++out.dropped_before_reference;
      } else {
        cuts.push_back({m.begin, m.end, static_cast<int>(offset + 1)});
      }
    }
  }

  const std::optional<int> from_title = title_day(post);
  if (from_title) {
    out.mentioned_days.push_back(*from_title);
    if (find_day_markers(post.title).front().zero_remapped) ++out.day_zero_markers;
  }

  auto emit = [&](std::size_t begin, std::size_t end, std::optional<int> day) {
    if (begin < end) out.pieces.push_back({begin, end, false});
    auto text = trim(body.substr(begin, end - begin));
    if (!text.empty()) out.segments.push_back({post.id, post.author, day, std::string(text), out.format});
  };

  std::size_t cursor = 0;
  std::optional<int> current = from_title;  // the NA prefix unless the title names a day
  bool current_valid = true;
  for (const auto& cut : cuts) {
    if (current_valid) {
      emit(cursor, cut.begin, current);
    } else if (cursor < cut.begin) {
      out.pieces.push_back({cursor, cut.begin, false});
    }
    out.pieces.push_back({cut.begin, cut.end, true});
    cursor = cut.end;
    current = cut.day;
    current_valid = cut.day.has_value();
    if (cut.day) out.mentioned_days.push_back(*cut.day);
  }
  if (current_valid) {
    emit(cursor, body.size(), current);
  } else if (cursor < body.size()) {
    out.pieces.push_back({cursor, body.size(), false});
  }
  return out;
}

std::vector<DaySegment> annotate(const RawPost& post) { return annotate_detailed(post).segments; }

std::pair<std::vector<DaySegment>, AnnotationReport> annotate_corpus(const std::vector<RawPost>& posts) {
  std::vector<DaySegment> segments;
  AnnotationReport report;
  for (const auto& post : posts) {
    AnnotatedPost annotated;
    try {
      annotated = annotate_detailed(post);
    } catch (const NotAnnotatable&) {
      ++report.none;
      continue;
    }
    if (annotated.format == PostFormat::daily_journal)
      ++report.daily_journal;
    else
      ++report.absolute_date;

    report.day_zero_markers += annotated.day_zero_markers;
    report.dropped_before_reference += annotated.dropped_before_reference;
    std::set<int> days_in_post;
    for (int day : annotated.mentioned_days) {
      ++report.mention_histogram[day];
      ++report.day_mentions;
      days_in_post.insert(day);
    }
    for (int day : days_in_post) ++report.posts_per_day[day];

    report.segments += annotated.segments.size();
    for (auto& seg : annotated.segments) segments.push_back(std::move(seg));
  }
  return {std::move(segments), report};
}

}  // namespace timeline
