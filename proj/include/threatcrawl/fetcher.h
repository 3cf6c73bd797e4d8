#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "threatcrawl/config.h"
#include "threatcrawl/url.h"

namespace threatcrawl {

// --- robots.txt ----------------------------------------------------------------

// Parsed robots exclusion rules. Group selection is by product token: the
// groups naming the agent win over "*" groups. Within the selected rules the
// longest matching pattern decides and Allow beats Disallow on equal length.
// Patterns support '*' and a trailing '$'. Unparseable lines are ignored.
class RobotsRules {
 public:
  static RobotsRules parse(std::string_view robots_txt);
  static RobotsRules allow_all() { return RobotsRules{}; }

  bool allowed(const CanonicalUrl& url, std::string_view user_agent) const;
  const std::string& source() const noexcept { return source_; }

 private:
  struct Rule {
    bool allow = false;
    std::string pattern;
  };
  struct Group {
    std::vector<std::string> agents;  // lowercase
    std::vector<Rule> rules;
  };
  std::vector<Group> groups_;
  std::string source_;
};

// Lowercased product token of a User-Agent string ("ThreatCrawl/1.0 (+x)" -> "threatcrawl").
std::string product_token(std::string_view user_agent);

bool allowed_by_robots(std::string_view robots_txt, const CanonicalUrl& url, std::string_view agent);

// --- blacklist ----------------------------------------------------------------

struct Blacklist {
  std::set<std::string> domains;     // lowercase; subdomains are covered too
  std::set<std::string> extensions;  // lowercase suffixes such as ".pdf"
  std::set<Scheme> schemes{Scheme::kHttp, Scheme::kHttps};  // allowed schemes

  static Blacklist from_config(const CrawlConfig& cfg);
  bool blocks(const CanonicalUrl& url) const;
};

// Blacklist file: one domain per line, '#' starts a comment.
std::set<std::string> parse_blacklist_file(std::string_view text);
std::set<std::string> load_blacklist_file(const std::string& path);

// URLs not blocked by bl, in their original order.
std::vector<CanonicalUrl> filter_blacklist(std::span<const CanonicalUrl> urls, const Blacklist& bl);

// --- transport and clock ----------------------------------------------------------

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;
  std::optional<std::string> location;
};

struct RequestOptions {
  std::string user_agent;
  int timeout_ms = 10000;
  std::size_t max_body_bytes = 2u << 20;
};

// One HTTP GET without redirect handling. Throws Timeout or TransportError.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const CanonicalUrl& url, const RequestOptions& options) = 0;
};

// cpp-httplib backed transport for live crawls.
class HttpTransport final : public Transport {
 public:
  HttpResponse get(const CanonicalUrl& url, const RequestOptions& options) override;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  virtual void sleep_until(std::int64_t ms) = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() override;
  void sleep_until(std::int64_t ms) override;
};

// Virtual time: sleeping advances the clock instantly.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
  std::int64_t now_ms() override;
  void sleep_until(std::int64_t ms) override;
  void advance(std::int64_t ms);
  void set(std::int64_t ms);

 private:
  std::mutex mu_;
  std::int64_t now_;
};

// --- fetcher ----------------------------------------------------------------------

struct FetchPolicy {
  std::string user_agent = "threatcrawl/0.1";
  std::int64_t politeness_delay_ms = 1000;
  int timeout_ms = 10000;
  int max_retries = 2;  // at most 3
  std::size_t max_body_bytes = 2u << 20;
  int max_redirects = 5;

  static FetchPolicy from_config(const CrawlConfig& cfg);
};

struct FetchResult {
  CanonicalUrl url;  // after redirects
  int status = 0;
  std::string body;
  std::string content_type;
  std::int64_t elapsed_ms = 0;
  bool truncated = false;
};

// Polite fetching: blacklist and robots checks before every request
// (redirect targets included), per-domain request spacing, bounded retries
// on transport failures. Safe for concurrent use.
class Fetcher {
 public:
  Fetcher(Transport& transport, Clock& clock, FetchPolicy policy, Blacklist blacklist,
          const PublicSuffixList* psl = nullptr);

  // Throws Blacklisted, RobotsDenied, Timeout, TooManyRedirects or
  // TransportError; each concerns only this URL.
  FetchResult fetch(const CanonicalUrl& url);

  // Robots check without fetching the page (robots.txt is fetched and cached
  // on first use of an origin).
  bool allowed(const CanonicalUrl& url);

  const FetchPolicy& policy() const noexcept { return policy_; }
  const Blacklist& blacklist() const noexcept { return blacklist_; }

  // Checkpoint support: cached robots.txt bodies per origin and the last
  // request time per domain.
  struct State {
    std::map<std::string, std::string> robots;
    std::map<std::string, std::int64_t> last_request_ms;
  };
  State state() const;
  void restore(const State& state);

 private:
  const RobotsRules& robots_for(const CanonicalUrl& url);
  HttpResponse request(const CanonicalUrl& url);
  void wait_turn(const CanonicalUrl& url);

  Transport& transport_;
  Clock& clock_;
  FetchPolicy policy_;
  Blacklist blacklist_;
  const PublicSuffixList* psl_;

  mutable std::mutex mu_;
  std::unordered_map<std::string, std::unique_ptr<RobotsRules>> robots_;
  std::unordered_map<std::string, std::int64_t> last_request_ms_;
};

}  // namespace threatcrawl
