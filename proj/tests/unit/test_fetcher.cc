#include <gtest/gtest.h>

#include <map>
#include <random>

#include "threatcrawl/config.h"
#include "threatcrawl/errors.h"
#include "threatcrawl/fetcher.h"
#include "fakes.h"

using namespace threatcrawl;

using namespace threatcrawl::fakes;

namespace {
int count_requests(const FakeTransport& t, const std::string& url) { return t.count(url); }
}  // namespace

TEST(Robots, LongestMatchDecides) {
  const auto rules = RobotsRules::parse("User-agent: *\nDisallow: /private\nDisallow: /a/\nAllow: /a/b/\n");
  EXPECT_FALSE(rules.allowed(normalize_url("http://x.org/private/p.html"), "bot"));
  EXPECT_FALSE(rules.allowed(normalize_url("http://x.org/privateer"), "bot"));
  EXPECT_TRUE(rules.allowed(normalize_url("http://x.org/public"), "bot"));
  EXPECT_FALSE(rules.allowed(normalize_url("http://x.org/a/x"), "bot"));
  EXPECT_TRUE(rules.allowed(normalize_url("http://x.org/a/b/c"), "bot"));
}

TEST(Robots, EmptyFileAllowsEverything) {
  EXPECT_TRUE(allowed_by_robots("", normalize_url("http://x.org/anything"), "bot"));
  EXPECT_TRUE(allowed_by_robots("garbage line\n:::\n", normalize_url("http://x.org/a"), "bot"));
}

TEST(Robots, AllowWinsTieAndWildcards) {
  const auto rules = RobotsRules::parse("User-agent: *\nDisallow: /p\nAllow: /p\nDisallow: /*.cgi$\n");
  EXPECT_TRUE(rules.allowed(normalize_url("http://x.org/p"), "bot"));
  EXPECT_FALSE(rules.allowed(normalize_url("http://x.org/bin/run.cgi"), "bot"));
  EXPECT_TRUE(rules.allowed(normalize_url("http://x.org/bin/run.cgi?x=1"), "bot"));
}

TEST(Robots, AgentGroupBeatsWildcardGroup) {
  const auto rules = RobotsRules::parse(
      "User-agent: *\nDisallow: /\n\nUser-agent: threatcrawl\nDisallow: /secret\n");
  EXPECT_TRUE(rules.allowed(normalize_url("http://x.org/page"), "ThreatCrawl/0.1 (+https://x)"));
  EXPECT_FALSE(rules.allowed(normalize_url("http://x.org/secret"), "threatcrawl/0.1"));
  EXPECT_FALSE(rules.allowed(normalize_url("http://x.org/page"), "otherbot"));
  EXPECT_EQ(product_token("ThreatCrawl/1.0 (+x)"), "threatcrawl");
}

TEST(Blacklist, DefaultsExample) {
  const auto bl = Blacklist::from_config(CrawlConfig{});
  std::vector<CanonicalUrl> in;
  for (const char* u : {"https://www.facebook.com/page", "http://example.com/report.pdf", "http://example.com/post",
                        "https://notfacebook.com/x", "http://example.com/IMG.PNG"}) {
    in.push_back(normalize_url(u));
  }
  const auto out = filter_blacklist(in, bl);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].str(), "http://example.com/post");
  EXPECT_EQ(out[1].str(), "https://notfacebook.com/x");
}

TEST(Blacklist, MatchesBruteForceOracle) {
  Blacklist bl;
  bl.domains = {"bad.org", "evil.net"};
  bl.extensions = {".zip", ".exe"};
  const std::string hosts[] = {"bad.org", "www.bad.org", "notbad.org", "evil.net", "a.b.evil.net", "good.com"};
  const std::string paths[] = {"/", "/x.zip", "/x.ZIP", "/zip", "/y.exe/", "/doc.html", "/a.exe"};
  std::mt19937_64 rng(21);
  std::vector<CanonicalUrl> urls;
  for (int i = 0; i < 100; ++i) {
    urls.push_back(normalize_url(std::string(rng() % 2 ? "http://" : "https://") + hosts[rng() % std::size(hosts)] +
                                 paths[rng() % std::size(paths)]));
  }
  std::vector<CanonicalUrl> want;
  for (const auto& u : urls) {
    const std::string h = u.host();
    const std::string p = u.path();
    const bool bad_host = h == "bad.org" || h == "www.bad.org" || h == "evil.net" || h == "a.b.evil.net";
    const bool bad_ext = p == "/x.zip" || p == "/x.ZIP" || p == "/a.exe";
    if (!bad_host && !bad_ext) want.push_back(u);
  }
  EXPECT_EQ(filter_blacklist(urls, bl), want);
}

TEST(BlacklistFile, CommentsAndCase) {
  EXPECT_EQ(parse_blacklist_file("# header\nBad.org  # trailing\n\n  evil.net\n"),
            (std::set<std::string>{"bad.org", "evil.net"}));
}

TEST(Fetcher, PolitenessSpacingPerDomain) {
  ManualClock clock(10'000);
  FakeTransport t(clock);
  for (int i = 0; i < 5; ++i) t.pages["http://www.a.org/p" + std::to_string(i)] = ok("x");
  t.pages["http://b.org/q"] = ok("y");
  Fetcher f(t, clock, FetchPolicy{}, Blacklist{});
  for (int i = 0; i < 5; ++i) f.fetch(normalize_url("http://www.a.org/p" + std::to_string(i)));
  f.fetch(normalize_url("http://b.org/q"));
  std::map<std::string, std::vector<std::int64_t>> by_domain;
  for (const auto& [url, ms] : t.log) by_domain[domain_of(normalize_url(url)).name].push_back(ms);
  for (const auto& [domain, times] : by_domain) {
    for (std::size_t i = 1; i < times.size(); ++i) EXPECT_GE(times[i] - times[i - 1], 1000) << domain;
  }
  EXPECT_EQ(by_domain["a.org"].size(), 6u);  // robots.txt plus five pages
}

TEST(Fetcher, FollowsRedirectToHttps) {
  ManualClock clock;
  FakeTransport t(clock);
  t.pages["http://x.org/old"] = moved("https://x.org/new");
  t.pages["https://x.org/new"] = ok("<p>hi</p>");
  Fetcher f(t, clock, FetchPolicy{}, Blacklist{});
  const auto r = f.fetch(normalize_url("http://x.org/old"));
  EXPECT_EQ(r.url.str(), "https://x.org/new");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body, "<p>hi</p>");
}

TEST(Fetcher, RedirectLimit) {
  ManualClock clock;
  FakeTransport t(clock);
  for (int i = 0; i < 10; ++i) t.pages["http://x.org/" + std::to_string(i)] = moved("/" + std::to_string(i + 1));
  t.pages["http://x.org/10"] = ok("end");
  Fetcher f(t, clock, FetchPolicy{}, Blacklist{});
  EXPECT_THROW(f.fetch(normalize_url("http://x.org/0")), TooManyRedirects);
  EXPECT_EQ(f.fetch(normalize_url("http://x.org/5")).body, "end");
}

TEST(Fetcher, RobotsDeniedMakesNoPageRequest) {
  ManualClock clock;
  FakeTransport t(clock);
  t.pages["http://x.org/robots.txt"] = ok("User-agent: *\nDisallow: /private/\n");
  t.pages["http://x.org/private/a"] = ok("secret");
  Fetcher f(t, clock, FetchPolicy{}, Blacklist{});
  EXPECT_THROW(f.fetch(normalize_url("http://x.org/private/a")), RobotsDenied);
  EXPECT_EQ(count_requests(t, "http://x.org/private/a"), 0);
  EXPECT_FALSE(f.allowed(normalize_url("http://x.org/private/b")));
  EXPECT_EQ(count_requests(t, "http://x.org/robots.txt"), 1);
}

TEST(Fetcher, RedirectIntoDisallowedPathIsDenied) {
  ManualClock clock;
  FakeTransport t(clock);
  t.pages["http://y.org/robots.txt"] = ok("User-agent: *\nDisallow: /\n");
  t.pages["http://x.org/go"] = moved("http://y.org/target");
  Fetcher f(t, clock, FetchPolicy{}, Blacklist{});
  EXPECT_THROW(f.fetch(normalize_url("http://x.org/go")), RobotsDenied);
  EXPECT_EQ(count_requests(t, "http://y.org/target"), 0);
}

TEST(Fetcher, BlacklistedMakesNoRequest) {
  ManualClock clock;
  FakeTransport t(clock);
  Fetcher f(t, clock, FetchPolicy{}, Blacklist::from_config(CrawlConfig{}));
  EXPECT_THROW(f.fetch(normalize_url("https://facebook.com/x")), Blacklisted);
  EXPECT_TRUE(t.log.empty());
}

TEST(Fetcher, RetriesAreBounded) {
  ManualClock clock;
  FakeTransport t(clock);
  t.pages["http://x.org/flaky"] = ok("eventually");
  t.failures["http://x.org/flaky"] = 2;
  t.failures["http://x.org/down"] = 100;
  FetchPolicy policy;
  policy.max_retries = 2;
  Fetcher f(t, clock, policy, Blacklist{});
  EXPECT_EQ(f.fetch(normalize_url("http://x.org/flaky")).body, "eventually");
  EXPECT_THROW(f.fetch(normalize_url("http://x.org/down")), TransportError);
  EXPECT_EQ(count_requests(t, "http://x.org/down"), 3);
}

TEST(Fetcher, TruncatesLargeBodies) {
  ManualClock clock;
  FakeTransport t(clock);
  t.pages["http://x.org/big"] = ok(std::string(5000, 'z'));
  FetchPolicy policy;
  policy.max_body_bytes = 1000;
  Fetcher f(t, clock, policy, Blacklist{});
  const auto r = f.fetch(normalize_url("http://x.org/big"));
  EXPECT_TRUE(r.truncated);
  EXPECT_EQ(r.body.size(), 1000u);
}

TEST(Fetcher, StateRoundTrip) {
  ManualClock clock;
  FakeTransport t(clock);
  t.pages["http://x.org/robots.txt"] = ok("User-agent: *\nDisallow: /no\n");
  Fetcher f(t, clock, FetchPolicy{}, Blacklist{});
  EXPECT_FALSE(f.allowed(normalize_url("http://x.org/no")));
  FakeTransport t2(clock);
  Fetcher g(t2, clock, FetchPolicy{}, Blacklist{});
  g.restore(f.state());
  EXPECT_FALSE(g.allowed(normalize_url("http://x.org/no")));
  EXPECT_TRUE(t2.log.empty());
}
