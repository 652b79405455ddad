#include "timeline/corpus_ingest.hpp"

#include "timeline/io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <thread>
#include <unordered_map>

namespace timeline {

using nlohmann::json;

void IngestConfig::validate() const {
  if (window.start > window.end) throw ConfigError("ingest window start is after its end");
  if (page_size < 1) throw ConfigError("page size must be at least 1");
  if (max_attempts < 1) throw ConfigError("max attempts must be at least 1");
}

namespace {

std::string string_field(const json& obj, const char* key, bool required) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    if (required) throw ParseError(std::string("missing field '") + key + "'");
    return {};
  }
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  throw ParseError(std::string("field '") + key + "' has the wrong type");
}

bool is_removed_marker(std::string_view body) {
  auto t = trim(body);
  return t == "[deleted]" || t == "[removed]";
}

RawPost post_from_json(const json& obj) {
  if (!obj.is_object()) throw ParseError("record is not a JSON object");
  RawPost post;
  post.id = string_field(obj, "id", true);
  if (post.id.empty()) throw ParseError("empty id");
  post.author = string_field(obj, "author", false);
  post.flair = string_field(obj, "link_flair_text", false);
  post.title = string_field(obj, "title", false);
  post.body = string_field(obj, "selftext", false);
  if (is_removed_marker(post.body)) post.body.clear();

  auto ts = obj.find("created_utc");
  if (ts == obj.end() || !ts->is_number()) throw ParseError("missing or non-numeric created_utc");
  if (ts->is_number_float()) {
    double v = ts->get<double>();
    if (!std::isfinite(v)) throw ParseError("non-finite created_utc");
    post.created_utc = static_cast<std::int64_t>(std::floor(v));
  } else {
    post.created_utc = ts->get<std::int64_t>();
  }
  if (post.created_utc < 0) throw ParseError("negative created_utc");
  return post;
}

bool in_window(const RawPost& p, const TimeWindow& w) { return p.created_utc >= w.start && p.created_utc <= w.end; }

// A later record with an existing id replaces the earlier one in place.
struct Collector {
  std::vector<RawPost> posts;
  std::unordered_map<std::string, std::size_t> index;

  void add(RawPost post) {
    auto [it, inserted] = index.try_emplace(post.id, posts.size());
    if (inserted)
      posts.push_back(std::move(post));
    else
      posts[it->second] = std::move(post);
  }

  std::vector<RawPost> finish() && {
    std::sort(posts.begin(), posts.end(), [](const RawPost& a, const RawPost& b) {
      return a.created_utc != b.created_utc ? a.created_utc < b.created_utc : a.id < b.id;
    });
    return std::move(posts);
  }
};

FetchResult fetch_local(const LocalSource& src, const IngestConfig& config) {
  std::ifstream in(src.path, std::ios::binary);
  if (!in) throw IngestError("cannot read snapshot " + src.path.string(), 1);

  FetchResult result;
  Collector collector;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      RawPost post = post_from_json(json::parse(line));
      if (in_window(post, config.window)) collector.add(std::move(post));
    } catch (const std::exception& e) {
      ++result.skipped.malformed;
      result.skipped.reasons.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  result.posts = std::move(collector).finish();
  return result;
}

struct ParsedUrl {
  std::string scheme_host_port;
  std::string path;
};

ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("remote source must be an http(s) URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

FetchResult fetch_remote(const RemoteSource& src, const IngestConfig& config) {
  const auto url = split_url(src.base_url);
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);

  FetchResult result;
  Collector collector;
  // Pushshift treats after/before as exclusive bounds.
  std::int64_t after = config.window.start - 1;
  const std::int64_t before = config.window.end == INT64_MAX ? INT64_MAX : config.window.end + 1;
  bool first_request = true;

  while (true) {
    httplib::Params params{{"subreddit", config.subreddit},
                           {"after", std::to_string(after)},
                           {"size", std::to_string(config.page_size)},
                           {"sort", "asc"},
                           {"sort_type", "created_utc"}};
    if (before != INT64_MAX) params.emplace("before", std::to_string(before));

    httplib::Result response;
    int attempts = 0;
    while (true) {
      if (!first_request && config.politeness_delay.count() > 0) std::this_thread::sleep_for(config.politeness_delay);
      first_request = false;
      ++attempts;
      response = client.Get(url.path, params, httplib::Headers{});
      if (response && response->status == 200) break;
      if (attempts >= config.max_attempts) {
        std::string why = response ? "HTTP " + std::to_string(response->status) : httplib::to_string(response.error());
        throw IngestError("request to " + src.base_url + " failed: " + why, attempts);
      }
    }

    json page;
    try {
      page = json::parse(response->body);
    } catch (const json::exception& e) {
      throw IngestError(std::string("unparseable API response: ") + e.what(), attempts);
    }
    auto data = page.find("data");
    if (data == page.end() || !data->is_array()) throw IngestError("API response lacks a 'data' array", attempts);
    if (data->empty()) break;

    std::int64_t newest = after;
    for (const auto& record : *data) {
      try {
        RawPost post = post_from_json(record);
        newest = std::max(newest, post.created_utc);
        if (in_window(post, config.window)) collector.add(std::move(post));
      } catch (const std::exception& e) {
        ++result.skipped.malformed;
        result.skipped.reasons.push_back(std::string("api record: ") + e.what());
      }
    }
    if (static_cast<int>(data->size()) < config.page_size || newest <= after) break;
    after = newest;
  }
  result.posts = std::move(collector).finish();
  return result;
}

}  // namespace

RawPost parse_post_json(const std::string& json_text) {
  try {
    return post_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

FetchResult fetch_posts(const IngestConfig& config) {
  config.validate();
  return std::visit(
      [&](const auto& src) -> FetchResult {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, LocalSource>)
          return fetch_local(src, config);
        else
          return fetch_remote(src, config);
      },
      config.source);
}

std::vector<RawPost> filter_flair(const std::vector<RawPost>& posts, const std::vector<std::string>& whitelist) {
  std::vector<RawPost> kept;
  for (const auto& post : posts) {
    const auto flair = trim(post.flair);
    bool listed = std::any_of(whitelist.begin(), whitelist.end(), [&](const std::string& w) { return trim(w) == flair; });
    if (!listed) continue;
    if (trim(post.body).empty() || is_removed_marker(post.body)) continue;
    kept.push_back(post);
  }
  return kept;
}

std::string to_snapshot_jsonl(const std::vector<RawPost>& posts) {
  std::string out;
  for (const auto& p : posts) {
    json obj = {{"id", p.id},
                {"author", p.author},
                {"link_flair_text", p.flair},
                {"title", p.title},
                {"selftext", p.body},
                {"created_utc", p.created_utc}};
    out += obj.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

}  // namespace timeline
