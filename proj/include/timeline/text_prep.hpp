#pragma once

#include "timeline/day_annotator.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace timeline {

using Stoplist = std::unordered_set<std::string>;

/// NFC-normalise, lowercase, split on anything that is not a letter or digit.
/// Single-character tokens survive only when they are digits.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens, const Stoplist& stoplist);

/// One token per line; blank lines and lines starting with '#' are ignored.
/// Throws ConfigError if the file cannot be read.
Stoplist load_stoplist(const std::filesystem::path& path);

/// Token <-> id, ids dense and assigned in lexicographic token order.
class Vocabulary {
public:
  Vocabulary() = default;
  /// `tokens` must be sorted and unique; `doc_freq` parallel to it.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::size_t> doc_freq);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  std::size_t doc_freq(std::size_t id) const { return doc_freq_.at(id); }
  /// -1 when absent.
  long id(std::string_view token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::size_t>& doc_freqs() const { return doc_freq_; }

private:
  std::vector<std::string> tokens_;
  std::vector<std::size_t> doc_freq_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Sparse token counts for one segment, sorted by token id.
struct BagOfWords {
  std::size_t segment = 0;  // index into the segment list the corpus was built from
  std::vector<std::pair<std::size_t, long>> counts;

  long total() const;
};

struct Corpus {
  Vocabulary vocabulary;
  std::vector<BagOfWords> bags;
  std::size_t dropped_segments = 0;  // segments left with no tokens after stopword removal
};

Corpus build_corpus(const std::vector<DaySegment>& segments, const Stoplist& stoplist);

}  // namespace timeline
