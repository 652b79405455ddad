#include "timeline/text_prep.hpp"

#include "timeline/io.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <map>
#include <numeric>

namespace timeline {

namespace {

icu::UnicodeString nfc(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  if (U_FAILURE(status)) return in;
  icu::UnicodeString out = normalizer->normalize(in, status);
  return U_FAILURE(status) ? in : out;
}

void flush(icu::UnicodeString& token, int32_t code_points, bool all_digits, std::vector<std::string>& out) {
  if (code_points == 0) return;
  if (code_points > 1 || all_digits) {
    std::string utf8;
    token.toLower(icu::Locale::getRoot()).toUTF8String(utf8);
    out.push_back(std::move(utf8));
  }
  token.remove();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const icu::UnicodeString normalized = nfc(text);
  icu::UnicodeString current;
  int32_t code_points = 0;
  bool all_digits = true;
  for (int32_t i = 0; i < normalized.length();) {
    UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    if (u_isalnum(c)) {
      current.append(c);
      ++code_points;
      all_digits = all_digits && u_isdigit(c);
    } else {
      flush(current, code_points, all_digits, tokens);
      code_points = 0;
      all_digits = true;
    }
  }
  flush(current, code_points, all_digits, tokens);
  return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const Stoplist& stoplist) {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  std::copy_if(tokens.begin(), tokens.end(), std::back_inserter(kept),
               [&](const std::string& t) { return !stoplist.contains(t); });
  return kept;
}

Stoplist load_stoplist(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("stoplist not found: " + path.string());
  Stoplist words;
  for (const auto& line : split_lines(read_file(path))) {
    auto word = trim(line);
    if (word.empty() || word.front() == '#') continue;
    std::string lowered(word);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(), [](unsigned char c) { return std::tolower(c); });
    words.insert(std::move(lowered));
    for (const auto& t : tokenize(word)) words.insert(t);
  }
  return words;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> doc_freq)
    : tokens_(std::move(tokens)), doc_freq_(std::move(doc_freq)) {
  if (tokens_.size() != doc_freq_.size()) throw std::invalid_argument("vocabulary: token/frequency size mismatch");
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (i > 0 && !(tokens_[i - 1] < tokens_[i])) throw std::invalid_argument("vocabulary tokens must be sorted and unique");
    index_.emplace(tokens_[i], i);
  }
}

long Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : static_cast<long>(it->second);
}

long BagOfWords::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0L, [](long s, const auto& kv) { return s + kv.second; });
}

Corpus build_corpus(const std::vector<DaySegment>& segments, const Stoplist& stoplist) {
  std::vector<std::map<std::string, long>> per_segment(segments.size());
  std::map<std::string, std::size_t> doc_freq;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    for (auto& tok : remove_stopwords(tokenize(segments[i].text), stoplist)) ++per_segment[i][std::move(tok)];
    for (const auto& [tok, n] : per_segment[i]) ++doc_freq[tok];
  }

  std::vector<std::string> tokens;
  std::vector<std::size_t> freqs;
  tokens.reserve(doc_freq.size());
  for (const auto& [tok, df] : doc_freq) {
    tokens.push_back(tok);
    freqs.push_back(df);
  }

  Corpus corpus;
  corpus.vocabulary = Vocabulary(std::move(tokens), std::move(freqs));
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (per_segment[i].empty()) {
      ++corpus.dropped_segments;
      continue;
    }
    BagOfWords bag;
    bag.segment = i;
    for (const auto& [tok, n] : per_segment[i])
      bag.counts.emplace_back(static_cast<std::size_t>(corpus.vocabulary.id(tok)), n);
    corpus.bags.push_back(std::move(bag));
  }
  return corpus;
}

}  // namespace timeline
