#include "threatcrawl/fetcher.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "threatcrawl/errors.h"

namespace threatcrawl {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Matches a robots pattern against the start of target. '*' matches any
// run of characters, a final '$' anchors at the end of target.
bool pattern_matches(std::string_view pattern, std::string_view target) {
  const bool anchored = pattern.ends_with('$');
  if (anchored) pattern.remove_suffix(1);
  // Iterative wildcard match with backtracking to the last '*'.
  std::size_t p = 0;
  std::size_t t = 0;
  std::size_t star = std::string_view::npos;
  std::size_t star_t = 0;
  while (true) {
    if (p == pattern.size()) {
      if (!anchored || t == target.size()) return true;
    } else if (pattern[p] == '*') {
      star = p++;
      star_t = t;
      continue;
    } else if (t < target.size() && pattern[p] == target[t]) {
      ++p;
      ++t;
      continue;
    }
    if (star == std::string_view::npos || star_t >= target.size()) return false;
    p = star + 1;
    t = ++star_t;
  }
}

}  // namespace

// --- robots.txt ----------------------------------------------------------------

std::string product_token(std::string_view user_agent) {
  user_agent = trim(user_agent);
  const auto end = user_agent.find_first_of("/ \t(");
  return lower(user_agent.substr(0, end));
}

RobotsRules RobotsRules::parse(std::string_view robots_txt) {
  RobotsRules out;
  out.source_ = std::string(robots_txt);
  std::istringstream in(out.source_);
  std::string raw;
  bool last_was_agent = false;
  while (std::getline(in, raw)) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    const std::string key = lower(trim(line.substr(0, colon)));
    const std::string_view value = trim(line.substr(colon + 1));
    if (key == "user-agent") {
      if (!last_was_agent || out.groups_.empty()) out.groups_.emplace_back();
      out.groups_.back().agents.push_back(product_token(value));
      last_was_agent = true;
    } else if (key == "allow" || key == "disallow") {
      last_was_agent = false;
      // Rules outside any group are ignored; an empty value matches nothing.
      if (out.groups_.empty() || value.empty()) continue;
      out.groups_.back().rules.push_back(Rule{key == "allow", std::string(value)});
    } else {
      // sitemap, crawl-delay and unknown keys do not end a group header
      // but do not start one either.
    }
  }
  return out;
}

bool RobotsRules::allowed(const CanonicalUrl& url, std::string_view user_agent) const {
  const std::string target = url.target();
  if (url.path() == "/robots.txt") return true;
  const std::string token = product_token(user_agent);

  std::vector<const Group*> selected;
  for (const auto& g : groups_) {
    if (std::find(g.agents.begin(), g.agents.end(), token) != g.agents.end()) selected.push_back(&g);
  }
  if (selected.empty()) {
    for (const auto& g : groups_) {
      if (std::find(g.agents.begin(), g.agents.end(), "*") != g.agents.end()) selected.push_back(&g);
    }
  }

  std::size_t best_len = 0;
  bool best_allow = true;
  bool matched = false;
  for (const Group* g : selected) {
    for (const auto& rule : g->rules) {
      if (!pattern_matches(rule.pattern, target)) continue;
      const std::size_t len = rule.pattern.size();
      if (!matched || len > best_len || (len == best_len && rule.allow && !best_allow)) {
        best_len = len;
        best_allow = rule.allow;
        matched = true;
      }
    }
  }
  return !matched || best_allow;
}

bool allowed_by_robots(std::string_view robots_txt, const CanonicalUrl& url, std::string_view agent) {
  return RobotsRules::parse(robots_txt).allowed(url, agent);
}

// --- blacklist ----------------------------------------------------------------

Blacklist Blacklist::from_config(const CrawlConfig& cfg) {
  Blacklist bl;
  bl.domains = cfg.blacklist_domains;
  bl.extensions = cfg.blacklist_extensions;
  if (cfg.blacklist_file) {
    const auto extra = load_blacklist_file(*cfg.blacklist_file);
    bl.domains.insert(extra.begin(), extra.end());
  }
  return bl;
}

bool Blacklist::blocks(const CanonicalUrl& url) const {
  if (!schemes.contains(url.scheme())) return true;
  const std::string& host = url.host();
  for (const auto& d : domains) {
    if (host == d || (host.size() > d.size() && host.ends_with(d) && host[host.size() - d.size() - 1] == '.')) {
      return true;
    }
  }
  const std::string path = lower(url.path());
  return std::any_of(extensions.begin(), extensions.end(),
                     [&](const std::string& ext) { return path.ends_with(ext); });
}

std::set<std::string> parse_blacklist_file(std::string_view text) {
  std::set<std::string> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) out.insert(lower(line));
  }
  return out;
}

std::set<std::string> load_blacklist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read blacklist file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_blacklist_file(buf.str());
}

std::vector<CanonicalUrl> filter_blacklist(std::span<const CanonicalUrl> urls, const Blacklist& bl) {
  std::vector<CanonicalUrl> out;
  for (const auto& u : urls) {
    if (!bl.blocks(u)) out.push_back(u);
  }
  return out;
}

// --- clocks -------------------------------------------------------------------

std::int64_t SystemClock::now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_until(std::int64_t ms) {
  const auto now = now_ms();
  if (ms > now) std::this_thread::sleep_for(std::chrono::milliseconds(ms - now));
}

std::int64_t ManualClock::now_ms() {
  std::lock_guard lock(mu_);
  return now_;
}

void ManualClock::sleep_until(std::int64_t ms) {
  std::lock_guard lock(mu_);
  now_ = std::max(now_, ms);
}

void ManualClock::advance(std::int64_t ms) {
  std::lock_guard lock(mu_);
  now_ += ms;
}

void ManualClock::set(std::int64_t ms) {
  std::lock_guard lock(mu_);
  now_ = ms;
}

// --- fetcher ------------------------------------------------------------------

FetchPolicy FetchPolicy::from_config(const CrawlConfig& cfg) {
  FetchPolicy p;
  p.user_agent = cfg.user_agent;
  p.politeness_delay_ms = cfg.politeness_delay_ms;
  return p;
}

Fetcher::Fetcher(Transport& transport, Clock& clock, FetchPolicy policy, Blacklist blacklist,
                 const PublicSuffixList* psl)
    : transport_(transport), clock_(clock), policy_(std::move(policy)), blacklist_(std::move(blacklist)), psl_(psl) {
  policy_.max_retries = std::clamp(policy_.max_retries, 0, 3);
  policy_.politeness_delay_ms = std::max<std::int64_t>(0, policy_.politeness_delay_ms);
}

void Fetcher::wait_turn(const CanonicalUrl& url) {
  const std::string domain = domain_of(url, psl_).name;
  std::int64_t slot = 0;
  {
    std::lock_guard lock(mu_);
    slot = clock_.now_ms();
    if (const auto it = last_request_ms_.find(domain); it != last_request_ms_.end()) {
      slot = std::max(slot, it->second + policy_.politeness_delay_ms);
    }
    last_request_ms_[domain] = slot;
  }
  clock_.sleep_until(slot);
}

HttpResponse Fetcher::request(const CanonicalUrl& url) {
  const RequestOptions options{policy_.user_agent, policy_.timeout_ms, policy_.max_body_bytes};
  std::string last_error;
  bool timed_out = false;
  for (int attempt = 0; attempt <= policy_.max_retries; ++attempt) {
    wait_turn(url);
    try {
      return transport_.get(url, options);
    } catch (const Timeout& e) {
      last_error = e.what();
      timed_out = true;
    } catch (const TransportError& e) {
      last_error = e.what();
      timed_out = false;
    }
  }
  if (timed_out) throw Timeout(url.str() + ": " + last_error);
  throw TransportError(url.str() + ": " + last_error);
}

const RobotsRules& Fetcher::robots_for(const CanonicalUrl& url) {
  const std::string origin = url.origin();
  {
    std::lock_guard lock(mu_);
    if (const auto it = robots_.find(origin); it != robots_.end()) return *it->second;
  }
  // Missing, unreachable or redirected robots.txt means no restrictions.
  auto rules = std::make_unique<RobotsRules>(RobotsRules::allow_all());
  try {
    const auto response = request(url.with_path("/robots.txt"));
    if (response.status == 200) *rules = RobotsRules::parse(response.body);
  } catch (const FetchError&) {
  }
  std::lock_guard lock(mu_);
  auto [it, inserted] = robots_.try_emplace(origin, std::move(rules));
  return *it->second;
}

bool Fetcher::allowed(const CanonicalUrl& url) {
  return !blacklist_.blocks(url) && robots_for(url).allowed(url, policy_.user_agent);
}

FetchResult Fetcher::fetch(const CanonicalUrl& url) {
  const std::int64_t start = clock_.now_ms();
  CanonicalUrl current = url;
  for (int redirects = 0;; ++redirects) {
    if (blacklist_.blocks(current)) throw Blacklisted(current.str() + " is blacklisted");
    if (!robots_for(current).allowed(current, policy_.user_agent)) {
      throw RobotsDenied(current.str() + " is disallowed by robots.txt");
    }
    HttpResponse response = request(current);
    const int s = response.status;
    const bool redirect = s == 301 || s == 302 || s == 303 || s == 307 || s == 308;
    if (redirect && response.location) {
      if (redirects >= policy_.max_redirects) throw TooManyRedirects(url.str() + ": too many redirects");
      try {
        current = normalize_url(*response.location, current);
      } catch (const Error& e) {
        throw TransportError(current.str() + ": bad redirect target: " + e.what());
      }
      continue;
    }
    FetchResult result{current, s, std::move(response.body), std::move(response.content_type), 0, false};
    if (result.body.size() > policy_.max_body_bytes) {
      result.body.resize(policy_.max_body_bytes);
      result.truncated = true;
    }
    result.elapsed_ms = clock_.now_ms() - start;
    return result;
  }
}

Fetcher::State Fetcher::state() const {
  std::lock_guard lock(mu_);
  State s;
  for (const auto& [origin, rules] : robots_) s.robots[origin] = rules->source();
  for (const auto& [domain, ms] : last_request_ms_) s.last_request_ms[domain] = ms;
  return s;
}

void Fetcher::restore(const State& state) {
  std::lock_guard lock(mu_);
  robots_.clear();
  for (const auto& [origin, source] : state.robots) {
    robots_[origin] = std::make_unique<RobotsRules>(RobotsRules::parse(source));
  }
  last_request_ms_ = {state.last_request_ms.begin(), state.last_request_ms.end()};
}

}  // namespace threatcrawl
