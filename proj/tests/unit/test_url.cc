#include <gtest/gtest.h>

#include <random>

#include "threatcrawl/errors.h"
#include "threatcrawl/url.h"

using namespace threatcrawl;

TEST(NormalizeUrl, CanonicalizationIdentities) {
  EXPECT_EQ(normalize_url("HTTP://Example.COM:80/a/../b#frag").str(), "http://example.com/b");
  EXPECT_EQ(normalize_url("https://example.com:443").str(), "https://example.com/");
  EXPECT_EQ(normalize_url("http://example.com:8080/x").str(), "http://example.com:8080/x");
  EXPECT_EQ(normalize_url("http://user:pw@example.com/x").str(), "http://example.com/x");
}

TEST(NormalizeUrl, RelativeReferenceDropsTrackingKeys) {
  const auto base = normalize_url("http://example.com/dir/");
  EXPECT_EQ(normalize_url("/post?utm_source=x&id=2", base).str(), "http://example.com/post?id=2");
  EXPECT_EQ(normalize_url("?UTM_Medium=y", base).str(), "http://example.com/dir/");
}

// Examples from the reference resolution algorithm, worked by hand against
// base http://a/b/c/d;p?q.
TEST(NormalizeUrl, ReferenceResolution) {
  const auto base = normalize_url("http://a/b/c/d;p?q");
  const std::pair<const char*, const char*> cases[] = {
      {"g", "http://a/b/c/g"},          {"./g", "http://a/b/c/g"},       {"g/", "http://a/b/c/g/"},
      {"/g", "http://a/g"},             {"//g", "http://g/"},            {"?y", "http://a/b/c/d;p?y"},
      {"g?y", "http://a/b/c/g?y"},      {"#s", "http://a/b/c/d;p?q"},    {"g#s", "http://a/b/c/g"},
      {";x", "http://a/b/c/;x"},        {"", "http://a/b/c/d;p?q"},      {".", "http://a/b/c/"},
      {"./", "http://a/b/c/"},          {"..", "http://a/b/"},           {"../", "http://a/b/"},
      {"../g", "http://a/b/g"},         {"../..", "http://a/"},          {"../../g", "http://a/g"},
      {"../../../g", "http://a/g"},     {"/./g", "http://a/g"},          {"/../g", "http://a/g"},
      {"g.", "http://a/b/c/g."},        {".g", "http://a/b/c/.g"},       {"g..", "http://a/b/c/g.."},
      {"./../g", "http://a/b/g"},       {"./g/.", "http://a/b/c/g/"},    {"g/./h", "http://a/b/c/g/h"},
      {"g/../h", "http://a/b/c/h"},     {"g;x=1/./y", "http://a/b/c/g;x=1/y"},
      {"g;x=1/../y", "http://a/b/c/y"},
  };
  for (const auto& [ref, expected] : cases) {
    EXPECT_EQ(normalize_url(ref, base).str(), expected) << "reference '" << ref << "'";
  }
}

TEST(NormalizeUrl, PercentEncoding) {
  EXPECT_EQ(normalize_url("http://example.com/%7euser/%2f").str(), "http://example.com/~user/%2F");
  EXPECT_EQ(normalize_url("http://example.com/a b").str(), "http://example.com/a%20b");
}

TEST(NormalizeUrl, UnsupportedSchemes) {
  for (const char* raw : {"mailto:a@b.c", "ftp://x.org/f", "javascript:void(0)", "data:text/plain,hi"}) {
    EXPECT_THROW(normalize_url(raw), UnsupportedScheme) << raw;
  }
}

TEST(NormalizeUrl, Malformed) {
  EXPECT_THROW(normalize_url(""), MalformedUrl);
  EXPECT_THROW(normalize_url("relative/only"), MalformedUrl);
  EXPECT_THROW(normalize_url("http://"), MalformedUrl);
  EXPECT_THROW(normalize_url("http://exa mple.com/"), MalformedUrl);
  EXPECT_THROW(normalize_url("http://example.com:99999/"), MalformedUrl);
}

TEST(NormalizeUrl, IdempotentOnRandomInputs) {
  std::mt19937_64 rng(7);
  const std::string hosts[] = {"Example.com", "a.b.C.org", "127.0.0.1", "x-y.net:8080", "EXAMPLE.com:80"};
  const std::string pieces[] = {"a", "B", "..", ".", "%7e", "%41", "x y", "%2F", "q=1", "~", "é"};
  for (int i = 0; i < 2000; ++i) {
    std::string raw = (rng() % 2 ? "http://" : "HTTPS://") + hosts[rng() % std::size(hosts)];
    const int segs = static_cast<int>(rng() % 5);
    for (int s = 0; s < segs; ++s) raw += "/" + pieces[rng() % std::size(pieces)];
    if (rng() % 2) raw += "?k=" + pieces[rng() % std::size(pieces)] + "&utm_x=1";
    if (rng() % 3 == 0) raw += "#frag";
    const auto once = normalize_url(raw);
    const auto twice = normalize_url(once.str());
    ASSERT_EQ(once, twice) << raw;
    ASSERT_EQ(once.str(), twice.str());
  }
}

TEST(CanonicalUrl, EqualityFollowsSerialization) {
  const auto a = normalize_url("http://EXAMPLE.com/x");
  const auto b = normalize_url("http://example.com:80/x#y");
  const auto c = normalize_url("http://example.com/x/");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_NE(a, c);
  EXPECT_EQ(std::hash<CanonicalUrl>{}(a), std::hash<CanonicalUrl>{}(b));
}

TEST(DomainOf, LastTwoLabelsFallback) {
  EXPECT_EQ(domain_of(normalize_url("http://blog.example.com/x")).name, "example.com");
  EXPECT_EQ(domain_of(normalize_url("http://example.com/")).name, "example.com");
  EXPECT_EQ(domain_of(normalize_url("http://a.b.co.uk/")).name, "co.uk");
  EXPECT_EQ(domain_of(normalize_url("http://10.0.0.7:8080/")).name, "10.0.0.7");
}

TEST(DomainOf, PublicSuffixList) {
  const auto& psl = PublicSuffixList::builtin();
  EXPECT_EQ(domain_of(normalize_url("http://a.b.co.uk/"), &psl).name, "b.co.uk");
  EXPECT_EQ(domain_of(normalize_url("http://blog.example.com/"), &psl).name, "example.com");

  const auto custom = PublicSuffixList::parse("// comment\ncom\n*.ck\n!www.ck\n");
  EXPECT_EQ(domain_of_host("a.b.foo.ck", &custom).name, "b.foo.ck");
  EXPECT_EQ(domain_of_host("x.www.ck", &custom).name, "www.ck");
  EXPECT_EQ(domain_of_host("sub.example.com", &custom).name, "example.com");
}
