#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "threatcrawl/errors.h"
#include "threatcrawl/fetcher.h"

namespace threatcrawl::fakes {

// Scripted transport: answers from a table and logs (url, time) pairs.
class FakeTransport : public Transport {
 public:
  explicit FakeTransport(Clock& clock) : clock_(clock) {}

  HttpResponse get(const CanonicalUrl& url, const RequestOptions&) override {
    log.emplace_back(url.str(), clock_.now_ms());
    if (auto f = failures.find(url.str()); f != failures.end() && f->second > 0) {
      --f->second;
      throw TransportError("connection reset");
    }
    if (auto it = pages.find(url.str()); it != pages.end()) return it->second;
    return HttpResponse{.status = 404};
  }

  int count(const std::string& url) const {
    return static_cast<int>(std::count_if(log.begin(), log.end(), [&](const auto& e) { return e.first == url; }));
  }

  std::map<std::string, HttpResponse> pages;
  std::map<std::string, int> failures;
  std::vector<std::pair<std::string, std::int64_t>> log;

 private:
  Clock& clock_;
};

inline HttpResponse ok(std::string body, std::string type = "text/html") {
  return {.status = 200, .body = std::move(body), .content_type = std::move(type)};
}
inline HttpResponse moved(std::string to) { return {.status = 301, .location = std::move(to)}; }

// A page whose main content is the given text.
inline std::string article(const std::string& text) {
  return "<html><body><div class=\"content\"><p>" + text + "</p></div></body></html>";
}

}  // namespace threatcrawl::fakes
