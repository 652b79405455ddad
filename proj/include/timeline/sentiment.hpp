#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace timeline {

enum class Emotion { anger, anticipation, disgust, fear, joy, negative, positive, sadness, surprise, trust };

inline constexpr std::size_t kEmotionCount = 10;

/// Category names in enum order.
const std::array<std::string_view, kEmotionCount>& emotion_names();
std::string_view to_string(Emotion e);
std::optional<Emotion> emotion_from_string(std::string_view name);

using EmotionSet = std::bitset<kEmotionCount>;

/// Terms removed before scoring: they appear in every category or mark a test result.
std::unordered_set<std::string> default_exclusions();

class SentimentLexicon {
public:
  SentimentLexicon() = default;
  explicit SentimentLexicon(std::unordered_set<std::string> exclusions) : exclusions_(std::move(exclusions)) {}

  /// Adds an association; ignored for excluded terms.
  void associate(const std::string& term, Emotion e);

  /// Empty set for unknown or excluded terms.
  EmotionSet categories(std::string_view term) const;
  bool excluded(std::string_view term) const { return exclusions_.contains(std::string(term)); }
  std::size_t size() const { return terms_.size(); }

private:
  std::unordered_map<std::string, EmotionSet> terms_;
  std::unordered_set<std::string> exclusions_;
};

/// NRC EmoLex word-level format: "term<TAB>category<TAB>0|1" per line. Only
/// rows flagged 1 create associations. Throws ParseError (with line number)
/// on malformed rows or unknown categories, ConfigError if unreadable.
SentimentLexicon load_lexicon(const std::filesystem::path& path,
                              const std::unordered_set<std::string>& exclusions = default_exclusions());
SentimentLexicon parse_lexicon(std::string_view content,
                               const std::unordered_set<std::string>& exclusions = default_exclusions());

/// How proportions are normalised.
enum class Denominator {
  memberships,  // sum of category counts, so the ten proportions form a distribution
  occurrences,  // emotion-carrying token occurrences
};

struct EmotionCounts {
  int day = 0;
  std::array<long, kEmotionCount> counts{};
  long emotion_carrying_total = 0;  // token occurrences with at least one category
  long membership_total = 0;        // sum of counts

  bool defined() const { return emotion_carrying_total > 0; }
  /// All zeros when undefined.
  std::array<double, kEmotionCount> proportions(Denominator d = Denominator::memberships) const;
};

/// Scores the tokens of every segment posted about one day.
EmotionCounts score_day(int day, const std::vector<std::string>& tokens, const SentimentLexicon& lexicon);

}  // namespace timeline
