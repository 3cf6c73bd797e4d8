#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "threatcrawl/url.h"

namespace threatcrawl {

// Pages linking to a URL, from an external link index.
class BacklinkClient {
 public:
  virtual ~BacklinkClient() = default;
  // At most cap URL strings. Throws ClientError.
  virtual std::vector<std::string> backlinks(const CanonicalUrl& url, std::size_t cap) = 0;
};

// Web search.
class SearchClient {
 public:
  virtual ~SearchClient() = default;
  // At most cap URL strings. Throws ClientError.
  virtual std::vector<std::string> search(const std::string& query, std::size_t cap) = 0;
};

// Fixture-backed clients reading
// {"backlinks": {url: [url, ...]}, "search": {query: [url, ...]}}.
// Backlink keys are matched after URL normalization, queries verbatim;
// unknown keys yield no results.
class FixtureClients final : public BacklinkClient, public SearchClient {
 public:
  static FixtureClients parse(std::string_view json_text);
  static FixtureClients load(const std::string& path);

  std::vector<std::string> backlinks(const CanonicalUrl& url, std::size_t cap) override;
  std::vector<std::string> search(const std::string& query, std::size_t cap) override;

 private:
  std::map<std::string, std::vector<std::string>> backlinks_;
  std::map<std::string, std::vector<std::string>> search_;
};

// HTTP adapters: GET {endpoint}?{param}=<value> answering a JSON array of
// URL strings. If the named environment variable is set, its value is sent
// as a bearer token.
struct HttpClientOptions {
  std::string endpoint;  // absolute URL, e.g. https://api.example.com/v1/search
  std::string param = "q";
  std::string token_env;
  int timeout_ms = 15000;
};

class HttpSearchClient final : public SearchClient {
 public:
  explicit HttpSearchClient(HttpClientOptions options);
  std::vector<std::string> search(const std::string& query, std::size_t cap) override;

 private:
  HttpClientOptions options_;
};

class HttpBacklinkClient final : public BacklinkClient {
 public:
  explicit HttpBacklinkClient(HttpClientOptions options);
  std::vector<std::string> backlinks(const CanonicalUrl& url, std::size_t cap) override;

 private:
  HttpClientOptions options_;
};

}  // namespace threatcrawl
