#include "threatcrawl/url.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "threatcrawl/errors.h"

namespace threatcrawl {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_hex(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}
int hex_value(char c) {
  if (is_digit(c)) return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return c - 'A' + 10;
}
char to_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), to_lower);
  return out;
}

bool is_unreserved(char c) {
  return is_alpha(c) || is_digit(c) || c == '-' || c == '.' || c == '_' || c == '~';
}
bool is_sub_delim(char c) {
  switch (c) {
    case '!': case '$': case '&': case '\'': case '(': case ')':
    case '*': case '+': case ',': case ';': case '=':
      return true;
    default:
      return false;
  }
}

enum class Component { kPath, kQueryPart };

bool allowed_raw(char c, Component where) {
  if (is_unreserved(c) || c == ':' || c == '@') return true;
  if (where == Component::kPath) return is_sub_delim(c) || c == '/';
  // Inside a query key or value: '&' separates parameters and is always escaped.
  return (is_sub_delim(c) && c != '&') || c == '/' || c == '?';
}

// Decodes escapes of unreserved characters, upper-cases the remaining
// escapes and escapes every byte outside the component's character set.
std::string normalize_percent(std::string_view in, Component where) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(in.size());
  auto escape = [&](unsigned char b) {
    out.push_back('%');
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  };
  for (std::size_t i = 0; i < in.size(); ++i) {
    const char c = in[i];
    if (c == '%') {
      if (i + 2 < in.size() && is_hex(in[i + 1]) && is_hex(in[i + 2])) {
        const auto b = static_cast<unsigned char>(hex_value(in[i + 1]) * 16 + hex_value(in[i + 2]));
        if (is_unreserved(static_cast<char>(b))) {
          out.push_back(static_cast<char>(b));
        } else {
          escape(b);
        }
        i += 2;
      } else {
        escape('%');
      }
    } else if (allowed_raw(c, where)) {
      out.push_back(c);
    } else {
      escape(static_cast<unsigned char>(c));
    }
  }
  return out;
}

// RFC 3986 section 5.2.4.
std::string remove_dot_segments(std::string_view path) {
  std::string input(path);
  std::string output;
  while (!input.empty()) {
    if (input.starts_with("../")) {
      input.erase(0, 3);
    } else if (input.starts_with("./")) {
      input.erase(0, 2);
    } else if (input.starts_with("/./")) {
      input.erase(0, 2);
    } else if (input == "/.") {
      input = "/";
    } else if (input.starts_with("/../")) {
      input.erase(0, 3);
      const auto pos = output.rfind('/');
      output.erase(pos == std::string::npos ? 0 : pos);
    } else if (input == "/..") {
      input = "/";
      const auto pos = output.rfind('/');
      output.erase(pos == std::string::npos ? 0 : pos);
    } else if (input == "." || input == "..") {
      input.clear();
    } else {
      const std::size_t start = input[0] == '/' ? 1 : 0;
      const auto next = input.find('/', start);
      const std::size_t len = next == std::string::npos ? input.size() : next;
      output.append(input, 0, len);
      input.erase(0, len);
    }
  }
  return output;
}

struct Reference {
  std::optional<std::string> scheme;
  std::optional<std::string> authority;
  std::string path;
  std::optional<std::string> query;
};

Reference split_reference(std::string_view s) {
  Reference ref;
  // scheme
  std::size_t i = 0;
  if (!s.empty() && is_alpha(s[0])) {
    std::size_t j = 1;
    while (j < s.size() &&
           (is_alpha(s[j]) || is_digit(s[j]) || s[j] == '+' || s[j] == '-' || s[j] == '.')) {
      ++j;
    }
    if (j < s.size() && s[j] == ':') {
      ref.scheme = lowercase(s.substr(0, j));
      i = j + 1;
    }
  }
  const auto hash = s.find('#', i);
  if (hash != std::string_view::npos) s = s.substr(0, hash);
  if (s.substr(i).starts_with("//")) {
    i += 2;
    const auto end = s.find_first_of("/?", i);
    ref.authority = std::string(s.substr(i, end == std::string_view::npos ? s.size() - i : end - i));
    i = end == std::string_view::npos ? s.size() : end;
  }
  const auto q = s.find('?', i);
  if (q == std::string_view::npos) {
    ref.path = std::string(s.substr(i));
  } else {
    ref.path = std::string(s.substr(i, q - i));
    ref.query = std::string(s.substr(q + 1));
  }
  return ref;
}

struct Authority {
  std::string host;
  std::optional<std::uint16_t> port;
};

Authority parse_authority(std::string_view auth, Scheme scheme) {
  const auto at = auth.rfind('@');
  if (at != std::string_view::npos) auth = auth.substr(at + 1);
  std::string_view host_part = auth;
  std::string_view port_part;
  if (auth.starts_with('[')) {
    const auto close = auth.find(']');
    if (close == std::string_view::npos) throw MalformedUrl("unterminated IPv6 literal");
    host_part = auth.substr(0, close + 1);
    const auto rest = auth.substr(close + 1);
    if (!rest.empty()) {
      if (rest[0] != ':') throw MalformedUrl("garbage after IPv6 literal");
      port_part = rest.substr(1);
    }
  } else {
    const auto colon = auth.rfind(':');
    if (colon != std::string_view::npos) {
      host_part = auth.substr(0, colon);
      port_part = auth.substr(colon + 1);
    }
  }
  Authority out;
  out.host = lowercase(host_part);
  while (!out.host.empty() && out.host.back() == '.') out.host.pop_back();
  if (out.host.empty()) throw MalformedUrl("empty host");
  if (!out.host.starts_with('[')) {
    std::size_t label_len = 0;
    for (const char c : out.host) {
      const auto u = static_cast<unsigned char>(c);
      if (c == '.') {
        if (label_len == 0) throw MalformedUrl("empty host label in '" + out.host + "'");
        label_len = 0;
        continue;
      }
      if (!(is_alpha(c) || is_digit(c) || c == '-' || c == '_' || u >= 0x80)) {
        throw MalformedUrl("invalid host character in '" + out.host + "'");
      }
      ++label_len;
    }
  }
  if (!port_part.empty()) {
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(port_part.data(), port_part.data() + port_part.size(), value);
    if (ec != std::errc{} || ptr != port_part.data() + port_part.size() || value > 65535) {
      throw MalformedUrl("invalid port '" + std::string(port_part) + "'");
    }
    const unsigned default_port = scheme == Scheme::kHttp ? 80 : 443;
    if (value != default_port) out.port = static_cast<std::uint16_t>(value);
  }
  return out;
}

std::vector<QueryParam> parse_query(std::string_view q) {
  std::vector<QueryParam> params;
  std::size_t start = 0;
  while (start <= q.size()) {
    auto end = q.find('&', start);
    if (end == std::string_view::npos) end = q.size();
    const auto part = q.substr(start, end - start);
    if (!part.empty()) {
      QueryParam p;
      const auto eq = part.find('=');
      p.key = normalize_percent(part.substr(0, eq), Component::kQueryPart);
      if (eq != std::string_view::npos) {
        p.value = normalize_percent(part.substr(eq + 1), Component::kQueryPart);
      }
      if (!lowercase(p.key).starts_with("utm_")) params.push_back(std::move(p));
    }
    start = end + 1;
  }
  return params;
}

std::string serialize_query(const std::vector<QueryParam>& query) {
  std::string out;
  for (const auto& p : query) {
    if (!out.empty()) out.push_back('&');
    out += p.key;
    if (p.value) {
      out.push_back('=');
      out += *p.value;
    }
  }
  return out;
}

std::string strip_controls(std::string_view raw) {
  std::size_t b = 0;
  std::size_t e = raw.size();
  while (b < e && static_cast<unsigned char>(raw[b]) <= 0x20) ++b;
  while (e > b && static_cast<unsigned char>(raw[e - 1]) <= 0x20) --e;
  std::string out;
  out.reserve(e - b);
  for (std::size_t i = b; i < e; ++i) {
    if (raw[i] != '\t' && raw[i] != '\n' && raw[i] != '\r') out.push_back(raw[i]);
  }
  return out;
}

}  // namespace

std::string_view scheme_name(Scheme s) { return s == Scheme::kHttp ? "http" : "https"; }

CanonicalUrl::CanonicalUrl(Scheme scheme, std::string host, std::optional<std::uint16_t> port,
                           std::string path, std::vector<QueryParam> query)
    : scheme_(scheme),
      host_(std::move(host)),
      port_(port),
      path_(std::move(path)),
      query_(std::move(query)) {
  if (path_.empty()) path_ = "/";
  serialized_ = origin() + target();
}

CanonicalUrl CanonicalUrl::parse(std::string_view raw) { return normalize_url(raw); }

std::string CanonicalUrl::origin() const {
  std::string out(scheme_name(scheme_));
  out += "://";
  out += host_;
  if (port_) {
    out.push_back(':');
    out += std::to_string(*port_);
  }
  return out;
}

std::string CanonicalUrl::target() const {
  std::string out = path_;
  if (!query_.empty()) {
    out.push_back('?');
    out += serialize_query(query_);
  }
  return out;
}

CanonicalUrl CanonicalUrl::with_path(std::string path) const {
  return CanonicalUrl(scheme_, host_, port_, std::move(path), {});
}

CanonicalUrl CanonicalUrl::with_scheme(Scheme scheme) const {
  return CanonicalUrl(scheme, host_, port_, path_, query_);
}

CanonicalUrl normalize_url(std::string_view raw_in, const std::optional<CanonicalUrl>& base) {
  const std::string raw = strip_controls(raw_in);
  if (raw.empty() && !base) throw MalformedUrl("empty URL");
  Reference ref = split_reference(raw);

  Scheme scheme{};
  Authority authority;
  std::string path;
  std::optional<std::string> query;
  std::vector<QueryParam> inherited_query;

  auto scheme_from = [](const std::string& name) {
    if (name == "http") return Scheme::kHttp;
    if (name == "https") return Scheme::kHttps;
    throw UnsupportedScheme("unsupported scheme '" + name + "'");
  };

  if (ref.scheme) {
    scheme = scheme_from(*ref.scheme);
    if (!ref.authority) throw MalformedUrl("missing authority in '" + raw + "'");
    authority = parse_authority(*ref.authority, scheme);
    path = ref.path;
    query = ref.query;
  } else {
    if (!base) throw MalformedUrl("relative reference '" + raw + "' without base");
    scheme = base->scheme();
    if (ref.authority) {
      authority = parse_authority(*ref.authority, scheme);
      path = ref.path;
      query = ref.query;
    } else {
      authority.host = base->host();
      authority.port = base->port();
      if (ref.path.empty()) {
        path = base->path();
        query = ref.query;
        if (!query) inherited_query = base->query();
      } else if (ref.path.starts_with('/')) {
        path = ref.path;
        query = ref.query;
      } else {
        const auto& bp = base->path();
        const auto slash = bp.rfind('/');
        path = (slash == std::string::npos ? std::string("/") : bp.substr(0, slash + 1)) + ref.path;
        query = ref.query;
      }
    }
  }

  path = remove_dot_segments(normalize_percent(path, Component::kPath));
  if (path.empty() || path[0] != '/') path.insert(path.begin(), '/');
  return CanonicalUrl(scheme, std::move(authority.host), authority.port, std::move(path),
                      query ? parse_query(*query) : std::move(inherited_query));
}

// --- public suffixes --------------------------------------------------------

namespace {

// Snapshot of frequently seen multi-label suffixes from publicsuffix.org.
constexpr std::string_view kBuiltinSuffixes = R"(// generic
com
net
org
edu
gov
mil
int
info
biz
io
co
me
tv
// uk
uk
co.uk
org.uk
ac.uk
gov.uk
me.uk
net.uk
ltd.uk
plc.uk
sch.uk
nhs.uk
police.uk
// au
au
com.au
net.au
org.au
edu.au
gov.au
id.au
// jp
jp
co.jp
ne.jp
or.jp
ac.jp
go.jp
// nz
nz
co.nz
org.nz
net.nz
govt.nz
// za
za
co.za
org.za
gov.za
// br
br
com.br
net.br
org.br
gov.br
// cn
cn
com.cn
net.cn
org.cn
gov.cn
edu.cn
// in
in
co.in
net.in
org.in
gov.in
// others
mx
com.mx
tr
com.tr
kr
co.kr
tw
com.tw
hk
com.hk
sg
com.sg
il
co.il
ar
com.ar
de
fr
nl
ru
com.ru
eu
ch
at
it
es
pl
se
*.ck
!www.ck
// private registries
github.io
blogspot.com
herokuapp.com
appspot.com
azurewebsites.net
cloudfront.net
pages.dev
netlify.app
vercel.app
)";

std::vector<std::string_view> split_labels(std::string_view host) {
  std::vector<std::string_view> labels;
  std::size_t start = 0;
  while (start <= host.size()) {
    auto dot = host.find('.', start);
    if (dot == std::string_view::npos) dot = host.size();
    labels.push_back(host.substr(start, dot - start));
    start = dot + 1;
  }
  return labels;
}

std::string join_from(const std::vector<std::string_view>& labels, std::size_t i) {
  std::string out;
  for (std::size_t k = i; k < labels.size(); ++k) {
    if (k > i) out.push_back('.');
    out += labels[k];
  }
  return out;
}

}  // namespace

PublicSuffixList PublicSuffixList::parse(std::string_view text) {
  PublicSuffixList psl;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    // Rules end at the first whitespace.
    const auto ws = line.find_first_of(" \t\r");
    if (ws != std::string::npos) line.erase(ws);
    if (line.empty() || line.starts_with("//")) continue;
    line = lowercase(line);
    if (line.starts_with("!")) {
      psl.exceptions_.insert(line.substr(1));
    } else if (line.starts_with("*.")) {
      psl.wildcards_.insert(line.substr(2));
    } else {
      psl.rules_.insert(line);
    }
  }
  return psl;
}

PublicSuffixList PublicSuffixList::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read public suffix list '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const PublicSuffixList& PublicSuffixList::builtin() {
  static const PublicSuffixList list = parse(kBuiltinSuffixes);
  return list;
}

std::size_t PublicSuffixList::suffix_labels(const std::vector<std::string_view>& labels) const {
  const std::size_t n = labels.size();
  std::size_t best = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string candidate = join_from(labels, i);
    if (exceptions_.contains(candidate)) return n - i - 1;
    if (rules_.contains(candidate)) best = std::max(best, n - i);
    if (i + 1 < n && wildcards_.contains(join_from(labels, i + 1))) best = std::max(best, n - i);
  }
  return best;
}

bool is_ip_literal(std::string_view host) {
  if (host.starts_with('[')) return true;
  int dots = 0;
  for (const char c : host) {
    if (c == '.') {
      ++dots;
    } else if (!is_digit(c)) {
      return false;
    }
  }
  return dots == 3;
}

Domain domain_of_host(std::string_view host, const PublicSuffixList* psl) {
  if (is_ip_literal(host)) return Domain{std::string(host)};
  const auto labels = split_labels(host);
  const std::size_t keep = psl ? psl->suffix_labels(labels) + 1 : 2;
  if (labels.size() <= keep) return Domain{std::string(host)};
  return Domain{join_from(labels, labels.size() - keep)};
}

Domain domain_of(const CanonicalUrl& url, const PublicSuffixList* psl) {
  return domain_of_host(url.host(), psl);
}

}  // namespace threatcrawl
