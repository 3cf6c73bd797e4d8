#include "threatcrawl/clients.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "threatcrawl/errors.h"

namespace threatcrawl {

using nlohmann::json;

namespace {

std::map<std::string, std::vector<std::string>> read_map(const json& doc, const char* key, bool normalize_keys) {
  std::map<std::string, std::vector<std::string>> out;
  if (!doc.contains(key)) return out;
  const auto& section = doc.at(key);
  if (!section.is_object()) throw ClientError(std::string("fixture section '") + key + "' must be an object");
  for (const auto& [k, v] : section.items()) {
    if (!v.is_array()) throw ClientError("fixture entry '" + k + "' must be an array of URLs");
    std::vector<std::string> urls;
    for (const auto& u : v) {
      if (!u.is_string()) throw ClientError("fixture entry '" + k + "' must be an array of URLs");
      urls.push_back(u.get<std::string>());
    }
    std::string name = k;
    if (normalize_keys) {
      try {
        name = normalize_url(k).str();
      } catch (const Error& e) {
        throw ClientError("fixture backlink key '" + k + "': " + e.what());
      }
    }
    out[name] = std::move(urls);
  }
  return out;
}

std::vector<std::string> capped(const std::vector<std::string>& v, std::size_t cap) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(cap, v.size()))};
}

}  // namespace

FixtureClients FixtureClients::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ClientError(std::string("fixture is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ClientError("fixture must be a JSON object");
  FixtureClients c;
  c.backlinks_ = read_map(doc, "backlinks", true);
  c.search_ = read_map(doc, "search", false);
  return c;
}

FixtureClients FixtureClients::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ClientError("cannot read fixture '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<std::string> FixtureClients::backlinks(const CanonicalUrl& url, std::size_t cap) {
  const auto it = backlinks_.find(url.str());
  return it == backlinks_.end() ? std::vector<std::string>{} : capped(it->second, cap);
}

std::vector<std::string> FixtureClients::search(const std::string& query, std::size_t cap) {
  const auto it = search_.find(query);
  return it == search_.end() ? std::vector<std::string>{} : capped(it->second, cap);
}

HttpSearchClient::HttpSearchClient(HttpClientOptions options) : options_(std::move(options)) {}
HttpBacklinkClient::HttpBacklinkClient(HttpClientOptions options) : options_(std::move(options)) {}

}  // namespace threatcrawl
