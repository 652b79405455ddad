#include "timeline/sentiment.hpp"

#include "timeline/io.hpp"

namespace timeline {

const std::array<std::string_view, kEmotionCount>& emotion_names() {
  static constexpr std::array<std::string_view, kEmotionCount> names{
      "anger", "anticipation", "disgust", "fear", "joy", "negative", "positive", "sadness", "surprise", "trust"};
  return names;
}

std::string_view to_string(Emotion e) { return emotion_names()[static_cast<std::size_t>(e)]; }

std::optional<Emotion> emotion_from_string(std::string_view name) {
  const auto& names = emotion_names();
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<Emotion>(i);
  return std::nullopt;
}

std::unordered_set<std::string> default_exclusions() { return {"feeling", "positive", "negative"}; }

void SentimentLexicon::associate(const std::string& term, Emotion e) {
  if (exclusions_.contains(term)) return;
  terms_[term].set(static_cast<std::size_t>(e));
}

EmotionSet SentimentLexicon::categories(std::string_view term) const {
  auto it = terms_.find(std::string(term));
  return it == terms_.end() ? EmotionSet{} : it->second;
}

SentimentLexicon parse_lexicon(std::string_view content, const std::unordered_set<std::string>& exclusions) {
  SentimentLexicon lexicon(exclusions);
  const auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (trim(line).empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string_view::npos || line.find('\t', tab2 + 1) != std::string_view::npos)
      throw ParseError("expected term<TAB>category<TAB>flag", i + 1);
    const auto term = trim(line.substr(0, tab1));
    const auto category = trim(line.substr(tab1 + 1, tab2 - tab1 - 1));
    const auto flag = trim(line.substr(tab2 + 1));
    if (term.empty()) throw ParseError("empty term", i + 1);
    auto emotion = emotion_from_string(category);
    if (!emotion) throw ParseError("unknown category '" + std::string(category) + "'", i + 1);
    if (flag == "1")
      lexicon.associate(std::string(term), *emotion);
    else if (flag != "0")
      throw ParseError("association flag must be 0 or 1", i + 1);
  }
  return lexicon;
}

SentimentLexicon load_lexicon(const std::filesystem::path& path, const std::unordered_set<std::string>& exclusions) {
  if (!std::filesystem::exists(path)) throw ConfigError("lexicon not found: " + path.string());
  return parse_lexicon(read_file(path), exclusions);
}

std::array<double, kEmotionCount> EmotionCounts::proportions(Denominator d) const {
  std::array<double, kEmotionCount> p{};
  const long denom = d == Denominator::memberships ? membership_total : emotion_carrying_total;
  if (!defined() || denom == 0) return p;
  for (std::size_t c = 0; c < kEmotionCount; ++c) p[c] = static_cast<double>(counts[c]) / static_cast<double>(denom);
  return p;
}

EmotionCounts score_day(int day, const std::vector<std::string>& tokens, const SentimentLexicon& lexicon) {
  EmotionCounts out;
  out.day = day;
  for (const auto& tok : tokens) {
    const EmotionSet cats = lexicon.categories(tok);
    if (cats.none()) continue;
    ++out.emotion_carrying_total;
    for (std::size_t c = 0; c < kEmotionCount; ++c) {
      if (cats.test(c)) {
        ++out.counts[c];
        ++out.membership_total;
      }
    }
  }
  return out;
}

}  // namespace timeline
