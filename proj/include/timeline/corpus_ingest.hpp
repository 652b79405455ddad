#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace timeline {

/// One forum submission.
struct RawPost {
  std::string id;
  std::string author;
  std::string flair;
  std::string title;
  std::string body;
  std::int64_t created_utc = 0;

  bool operator==(const RawPost&) const = default;
};

struct RemoteSource {
  std::string base_url;  // e.g. "http://host:port/reddit/search/submission"
};

struct LocalSource {
  std::filesystem::path path;
};

/// Inclusive time window in Unix seconds.
struct TimeWindow {
  std::int64_t start = 0;
  std::int64_t end = INT64_MAX;
};

struct IngestConfig {
  std::variant<LocalSource, RemoteSource> source;
  std::string subreddit = "COVID19positive";
  std::vector<std::string> flair_whitelist;
  TimeWindow window;
  int page_size = 100;
  std::chrono::milliseconds politeness_delay{0};
  int max_attempts = 3;

  /// Throws ConfigError when the window is inverted or page size < 1.
  void validate() const;
};

/// Records that could not be turned into a RawPost.
struct SkipReport {
  std::size_t malformed = 0;
  std::vector<std::string> reasons;  // one entry per skipped record
};

struct FetchResult {
  std::vector<RawPost> posts;
  SkipReport skipped;
};

/// Network or file failure after exhausting retries.
class IngestError : public std::runtime_error {
public:
  IngestError(const std::string& what, int attempts)
      : std::runtime_error(what + " (after " + std::to_string(attempts) + " attempt(s))"), attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

private:
  int attempts_;
};

/// Loads every post inside `config.window`, sorted by (created_utc, id).
/// A duplicated id keeps the record retrieved last. Malformed records are
/// skipped and counted rather than aborting the fetch.
FetchResult fetch_posts(const IngestConfig& config);

/// Keeps posts whose trimmed flair is exactly one of `whitelist` and whose body
/// still has text once whitespace and "[deleted]"/"[removed]" markers are discounted.
std::vector<RawPost> filter_flair(const std::vector<RawPost>& posts, const std::vector<std::string>& whitelist);

/// Parses one snapshot/API record. Throws ParseError on missing or mistyped fields.
RawPost parse_post_json(const std::string& json_text);

/// Serialises posts as a JSONL snapshot (keys id, author, link_flair_text, title, selftext, created_utc).
std::string to_snapshot_jsonl(const std::vector<RawPost>& posts);

}  // namespace timeline
