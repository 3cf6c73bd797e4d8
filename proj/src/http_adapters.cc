// Network adapters built on cpp-httplib: the live page transport, the
// remote embedding service client and the search/backlink API clients.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <cstdlib>

#include "json.hpp"
#include "threatcrawl/clients.h"
#include "threatcrawl/errors.h"
#include "threatcrawl/fetcher.h"
#include "threatcrawl/relevance.h"

namespace threatcrawl {

using nlohmann::json;

namespace {

httplib::Client make_client(const CanonicalUrl& url, int timeout_ms) {
  httplib::Client cli(url.origin());
  const auto sec = timeout_ms / 1000;
  const auto usec = (timeout_ms % 1000) * 1000;
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
  cli.set_follow_location(false);
  return cli;
}

std::string describe(httplib::Error err) { return httplib::to_string(err); }

CanonicalUrl parse_endpoint(const std::string& endpoint) {
  try {
    return normalize_url(endpoint);
  } catch (const Error& e) {
    throw ClientError("bad endpoint '" + endpoint + "': " + e.what());
  }
}

std::vector<std::string> get_url_list(const HttpClientOptions& options, const std::string& value, std::size_t cap) {
  const CanonicalUrl endpoint = parse_endpoint(options.endpoint);
  auto cli = make_client(endpoint, options.timeout_ms);
  std::string target = endpoint.target();
  target += endpoint.query().empty() ? '?' : '&';
  target += options.param + "=" + httplib::detail::encode_query_param(value);

  httplib::Headers headers;
  if (!options.token_env.empty()) {
    if (const char* token = std::getenv(options.token_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  auto res = cli.Get(target, headers);
  if (!res) throw ClientError(options.endpoint + ": " + describe(res.error()));
  if (res->status != 200) throw ClientError(options.endpoint + ": HTTP " + std::to_string(res->status));
  json doc;
  try {
    doc = json::parse(res->body);
  } catch (const json::parse_error& e) {
    throw ClientError(options.endpoint + ": response is not JSON: " + e.what());
  }
  if (!doc.is_array()) throw ClientError(options.endpoint + ": expected a JSON array of URLs");
  std::vector<std::string> out;
  for (const auto& item : doc) {
    if (out.size() >= cap) break;
    if (item.is_string()) out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

HttpResponse HttpTransport::get(const CanonicalUrl& url, const RequestOptions& options) {
  auto cli = make_client(url, options.timeout_ms);
  httplib::Headers headers{{"User-Agent", options.user_agent}};

  HttpResponse out;
  bool over_limit = false;
  auto res = cli.Get(
      url.target(), headers,
      [&](const httplib::Response& r) {
        out.status = r.status;
        out.content_type = r.get_header_value("Content-Type");
        if (r.has_header("Location")) out.location = r.get_header_value("Location");
        return true;
      },
      [&](const char* data, std::size_t len) {
        const std::size_t room = options.max_body_bytes + 1 - std::min(out.body.size(), options.max_body_bytes + 1);
        out.body.append(data, std::min(len, room));
        if (out.body.size() > options.max_body_bytes) {
          over_limit = true;
          return false;
        }
        return true;
      });
  if (!res) {
    if (over_limit && res.error() == httplib::Error::Canceled) return out;
    if (res.error() == httplib::Error::ConnectionTimeout) throw Timeout(url.str() + ": connection timeout");
    throw TransportError(url.str() + ": " + describe(res.error()));
  }
  return out;
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(std::string endpoint, std::size_t dimension, int max_retries,
                                                 int timeout_ms, std::string model_id)
    : endpoint_(std::move(endpoint)),
      dimension_(dimension),
      max_retries_(std::clamp(max_retries, 0, 3)),
      timeout_ms_(timeout_ms),
      model_id_(std::move(model_id)) {}

std::vector<Embedding> RemoteEmbeddingProvider::embed(std::span<const std::string> texts) const {
  CanonicalUrl base = [&] {
    try {
      return normalize_url(endpoint_);
    } catch (const Error& e) {
      throw ProviderUnavailable("bad embedding endpoint '" + endpoint_ + "': " + e.what());
    }
  }();
  std::string path = base.path();
  if (path.ends_with('/')) path.pop_back();
  path += "/embed";

  json body = {{"texts", json::array()}};
  for (const auto& t : texts) body["texts"].push_back(t);
  const std::string payload = body.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= max_retries_; ++attempt) {
    auto cli = make_client(base, timeout_ms_);
    auto res = cli.Post(path, payload, "application/json");
    if (!res) {
      last_error = describe(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      const auto doc = json::parse(res->body);
      const auto dim = doc.at("dimension").get<std::size_t>();
      if (dim != dimension_) {
        throw DimensionMismatch("service dimension " + std::to_string(dim) + " != expected " +
                                std::to_string(dimension_));
      }
      const auto& vectors = doc.at("vectors");
      if (!vectors.is_array() || vectors.size() != texts.size()) {
        throw ProviderUnavailable("service returned a wrong number of vectors");
      }
      std::vector<Embedding> out;
      out.reserve(vectors.size());
      for (const auto& v : vectors) {
        auto values = v.get<std::vector<double>>();
        if (values.size() != dimension_) throw DimensionMismatch("vector of wrong dimension");
        out.emplace_back(std::move(values));
      }
      return out;
    } catch (const json::exception& e) {
      throw ProviderUnavailable(std::string("malformed embedding response: ") + e.what());
    }
  }
  throw ProviderUnavailable(endpoint_ + ": " + last_error);
}

std::vector<std::string> HttpSearchClient::search(const std::string& query, std::size_t cap) {
  return get_url_list(options_, query, cap);
}

std::vector<std::string> HttpBacklinkClient::backlinks(const CanonicalUrl& url, std::size_t cap) {
  return get_url_list(options_, url.str(), cap);
}

}  // namespace threatcrawl
