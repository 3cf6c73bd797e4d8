#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace threatcrawl {

enum class Scheme : std::uint8_t { kHttp, kHttps };

std::string_view scheme_name(Scheme s);

struct QueryParam {
  std::string key;
  std::optional<std::string> value;  // absent for "?flag" style parameters

  bool operator==(const QueryParam&) const = default;
};

// Normalized identity of a web page. Only http/https, no userinfo, no
// fragment, lowercase host, default ports elided, dot segments removed and
// percent-escapes normalized. Two values are equal iff str() is equal.
class CanonicalUrl {
 public:
  CanonicalUrl(Scheme scheme, std::string host, std::optional<std::uint16_t> port,
               std::string path, std::vector<QueryParam> query);

  // Shorthand for normalize_url(raw) with no base.
  static CanonicalUrl parse(std::string_view raw);

  Scheme scheme() const noexcept { return scheme_; }
  const std::string& host() const noexcept { return host_; }
  std::optional<std::uint16_t> port() const noexcept { return port_; }
  const std::string& path() const noexcept { return path_; }
  const std::vector<QueryParam>& query() const noexcept { return query_; }

  const std::string& str() const noexcept { return serialized_; }
  // scheme://host[:port]
  std::string origin() const;
  // path[?query], the request target sent on the wire.
  std::string target() const;

  CanonicalUrl with_path(std::string path) const;
  CanonicalUrl with_scheme(Scheme scheme) const;

  bool operator==(const CanonicalUrl& o) const noexcept { return serialized_ == o.serialized_; }
  std::strong_ordering operator<=>(const CanonicalUrl& o) const noexcept {
    return serialized_ <=> o.serialized_;
  }

 private:
  Scheme scheme_;
  std::string host_;
  std::optional<std::uint16_t> port_;
  std::string path_;
  std::vector<QueryParam> query_;
  std::string serialized_;
};

// Resolves raw against base (RFC 3986 reference resolution) and returns the
// canonical form. Query keys starting with "utm_" are dropped.
// Throws UnsupportedScheme for non-http(s) schemes and MalformedUrl otherwise.
CanonicalUrl normalize_url(std::string_view raw,
                           const std::optional<CanonicalUrl>& base = std::nullopt);

// Registrable domain: the unit used for domain counting and politeness.
struct Domain {
  std::string name;

  bool operator==(const Domain&) const = default;
  auto operator<=>(const Domain&) const = default;
};

// Public-suffix rules in the publicsuffix.org list format ("//" comments,
// "*." wildcards, "!" exceptions).
class PublicSuffixList {
 public:
  static PublicSuffixList parse(std::string_view list_text);
  static PublicSuffixList load_file(const std::string& path);
  // Small snapshot of common multi-label suffixes shipped with the library.
  static const PublicSuffixList& builtin();

  // Number of labels of the public suffix of host (at least 1).
  std::size_t suffix_labels(const std::vector<std::string_view>& labels) const;
  std::size_t rule_count() const { return rules_.size() + wildcards_.size() + exceptions_.size(); }

 private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;   // stored without the "*." prefix
  std::unordered_set<std::string> exceptions_;  // stored without the "!" prefix
};

// Registrable domain of url.host(). Without a suffix list, the last two
// host labels. IP literals are returned verbatim.
Domain domain_of(const CanonicalUrl& url, const PublicSuffixList* psl = nullptr);
Domain domain_of_host(std::string_view host, const PublicSuffixList* psl = nullptr);

bool is_ip_literal(std::string_view host);

}  // namespace threatcrawl

template <>
struct std::hash<threatcrawl::CanonicalUrl> {
  std::size_t operator()(const threatcrawl::CanonicalUrl& u) const noexcept {
    return std::hash<std::string>{}(u.str());
  }
};

template <>
struct std::hash<threatcrawl::Domain> {
  std::size_t operator()(const threatcrawl::Domain& d) const noexcept {
    return std::hash<std::string>{}(d.name);
  }
};
