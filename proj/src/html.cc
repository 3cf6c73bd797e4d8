#include "threatcrawl/html.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "threatcrawl/errors.h"
#include "threatcrawl/text.h"

namespace threatcrawl {

namespace html {

namespace {

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '_' || c == ':';
}

const std::unordered_set<std::string_view> kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta", "param", "source",
    "track", "wbr"};

const std::unordered_set<std::string_view> kRawTextElements = {"script", "style", "textarea", "title",
                                                               "noscript", "template"};

// Opening one of these closes an open <p>.
const std::unordered_set<std::string_view> kClosesParagraph = {
    "address", "article", "aside", "blockquote", "div", "dl", "fieldset", "footer", "form", "h1",
    "h2", "h3", "h4", "h5", "h6", "header", "hr", "main", "nav", "ol", "p", "pre", "section",
    "table", "ul"};

void append_utf8(std::string& out, unsigned cp) {
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view doc) : doc_(doc) {}

  std::unique_ptr<Node> run() {
    auto root = std::make_unique<Node>();
    root->tag = "#document";
    stack_.push_back(root.get());
    while (pos_ < doc_.size()) {
      if (doc_[pos_] == '<') {
        markup();
      } else {
        const auto next = doc_.find('<', pos_);
        const auto end = next == std::string_view::npos ? doc_.size() : next;
        add_text(decode_entities(doc_.substr(pos_, end - pos_)));
        pos_ = end;
      }
    }
    return root;
  }

 private:
  Node* current() { return stack_.back(); }

  void add_text(std::string text) {
    if (text.empty()) return;
    auto& kids = current()->children;
    if (!kids.empty() && kids.back()->is_text()) {
      kids.back()->text += text;
      return;
    }
    auto node = std::make_unique<Node>();
    node->text = std::move(text);
    kids.push_back(std::move(node));
  }

  // Position of the case-insensitive "</tag", or the end of the document.
  std::size_t find_end_tag(std::string_view tag) const {
    for (std::size_t i = pos_; i + 2 + tag.size() <= doc_.size(); ++i) {
      if (doc_[i] != '<' || doc_[i + 1] != '/') continue;
      bool match = true;
      for (std::size_t k = 0; k < tag.size() && match; ++k) match = lower(doc_[i + 2 + k]) == tag[k];
      if (match) return i;
    }
    return doc_.size();
  }

  void skip_past(std::string_view terminator) {
    const auto end = doc_.find(terminator, pos_);
    pos_ = end == std::string_view::npos ? doc_.size() : end + terminator.size();
  }

  void markup() {
    const auto rest = doc_.substr(pos_);
    if (rest.starts_with("<!--")) {
      pos_ += 4;
      skip_past("-->");
    } else if (rest.starts_with("<!") || rest.starts_with("<?")) {
      skip_past(">");
    } else if (rest.starts_with("</")) {
      end_tag();
    } else if (rest.size() > 1 && is_name_char(rest[1])) {
      start_tag();
    } else {
      add_text("<");
      ++pos_;
    }
  }

  std::string read_name() {
    std::string name;
    while (pos_ < doc_.size() && is_name_char(doc_[pos_])) name.push_back(lower(doc_[pos_++]));
    return name;
  }

  void skip_space() {
    while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
  }

  void end_tag() {
    pos_ += 2;
    const std::string name = read_name();
    skip_past(">");
    if (name.empty()) return;
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->tag == name) {
        stack_.resize(i);
        return;
      }
    }
  }

  void close_open(std::string_view name, std::initializer_list<std::string_view> scope_limits) {
    for (std::size_t i = stack_.size(); i-- > 1;) {
      const auto& tag = stack_[i]->tag;
      if (tag == name) {
        stack_.resize(i);
        return;
      }
      if (std::find(scope_limits.begin(), scope_limits.end(), tag) != scope_limits.end()) return;
    }
  }

  void start_tag() {
    ++pos_;
    auto node = std::make_unique<Node>();
    node->tag = read_name();
    bool self_closing = false;
    while (pos_ < doc_.size()) {
      skip_space();
      if (pos_ >= doc_.size()) break;
      const char c = doc_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '/') {
        self_closing = true;
        ++pos_;
        continue;
      }
      std::string attr;
      while (pos_ < doc_.size() && !is_space(doc_[pos_]) && doc_[pos_] != '=' && doc_[pos_] != '>' &&
             doc_[pos_] != '/') {
        attr.push_back(lower(doc_[pos_++]));
      }
      if (attr.empty()) {
        ++pos_;
        continue;
      }
      skip_space();
      std::string value;
      if (pos_ < doc_.size() && doc_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ < doc_.size() && (doc_[pos_] == '"' || doc_[pos_] == '\'')) {
          const char quote = doc_[pos_++];
          const auto end = doc_.find(quote, pos_);
          const auto stop = end == std::string_view::npos ? doc_.size() : end;
          value = decode_entities(doc_.substr(pos_, stop - pos_));
          pos_ = std::min(doc_.size(), stop + 1);
        } else {
          const auto b = pos_;
          while (pos_ < doc_.size() && !is_space(doc_[pos_]) && doc_[pos_] != '>') ++pos_;
          value = decode_entities(doc_.substr(b, pos_ - b));
        }
      }
      self_closing = false;
      node->attributes.emplace_back(std::move(attr), std::move(value));
    }

    const std::string tag = node->tag;
    if (kClosesParagraph.contains(tag)) close_open("p", {"button", "table", "td", "th", "li"});
    if (tag == "li") close_open("li", {"ul", "ol"});
    if (tag == "dt" || tag == "dd") {
      close_open("dt", {"dl"});
      close_open("dd", {"dl"});
    }
    if (tag == "tr") close_open("tr", {"table"});
    if (tag == "td" || tag == "th") {
      close_open("td", {"tr", "table"});
      close_open("th", {"tr", "table"});
    }

    Node* raw = node.get();
    current()->children.push_back(std::move(node));
    if (kRawTextElements.contains(tag)) {
      // Everything up to the matching end tag is literal text.
      const auto stop = find_end_tag(tag) - pos_;
      auto text = std::make_unique<Node>();
      text->text = tag == "title" || tag == "textarea" ? decode_entities(doc_.substr(pos_, stop))
                                                        : std::string(doc_.substr(pos_, stop));
      raw->children.push_back(std::move(text));
      pos_ += stop;
      if (pos_ < doc_.size()) skip_past(">");
      return;
    }
    if (!self_closing && !kVoidElements.contains(tag)) stack_.push_back(raw);
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
  std::vector<Node*> stack_;
};

}  // namespace

const std::string* Node::attribute(std::string_view name) const {
  for (const auto& [k, v] : attributes) {
    if (k == name) return &v;
  }
  return nullptr;
}

std::unique_ptr<Node> parse(std::string_view document) { return Parser(document).run(); }

std::string decode_entities(std::string_view text) {
  static const std::unordered_map<std::string_view, unsigned> kNamed = {
      {"amp", '&'},      {"lt", '<'},       {"gt", '>'},        {"quot", '"'},    {"apos", '\''},
      {"nbsp", ' '},     {"copy", 0xA9},    {"reg", 0xAE},      {"mdash", 0x2014}, {"ndash", 0x2013},
      {"hellip", 0x2026}, {"rsquo", 0x2019}, {"lsquo", 0x2018}, {"ldquo", 0x201C}, {"rdquo", 0x201D},
      {"laquo", 0xAB},   {"raquo", 0xBB},   {"middot", 0xB7},   {"trade", 0x2122}, {"euro", 0x20AC},
  };
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '&') {
      out.push_back(text[i]);
      continue;
    }
    const auto semi = text.find(';', i + 1);
    if (semi == std::string_view::npos || semi - i > 12) {
      out.push_back('&');
      continue;
    }
    const auto name = text.substr(i + 1, semi - i - 1);
    if (name.size() > 1 && name[0] == '#') {
      unsigned cp = 0;
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const auto digits = name.substr(hex ? 2 : 1);
      const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && !digits.empty()) {
        append_utf8(out, cp);
        i = semi;
        continue;
      }
    } else if (const auto it = kNamed.find(name); it != kNamed.end()) {
      append_utf8(out, it->second);
      i = semi;
      continue;
    }
    out.push_back('&');
  }
  return out;
}

}  // namespace html

namespace {

using html::Node;

const std::unordered_set<std::string_view> kBoilerplateTags = {
    "script", "style", "noscript", "nav", "header", "footer", "aside", "form", "iframe",
    "svg", "head", "template", "button", "select", "menu", "title", "textarea"};

const std::unordered_set<std::string_view> kContainerTags = {"#document", "body", "main", "article",
                                                             "section", "div", "td", "blockquote"};

const std::unordered_set<std::string_view> kBlockTags = {
    "p", "div", "article", "section", "main", "body", "h1", "h2", "h3", "h4", "h5", "h6", "li",
    "ul", "ol", "dl", "dt", "dd", "pre", "blockquote", "table", "tr", "td", "th", "br", "hr",
    "figure", "figcaption", "address", "#document"};

bool marked_as_boilerplate(const Node& n) {
  static constexpr std::string_view kMarkers[] = {"nav", "menu", "footer", "sidebar", "breadcrumb",
                                                  "cookie"};
  for (const char* attr : {"class", "id", "role"}) {
    const auto* v = n.attribute(attr);
    if (!v) continue;
    std::string lowered(*v);
    for (auto& c : lowered) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const auto marker : kMarkers) {
      if (lowered.find(marker) != std::string::npos) return true;
    }
  }
  return false;
}

bool skipped(const Node& n) {
  return !n.is_text() && (kBoilerplateTags.contains(n.tag) || marked_as_boilerplate(n));
}

struct Stats {
  std::size_t text_chars = 0;
  std::size_t tags = 0;
};

struct Candidate {
  const Node* node = nullptr;
  Stats stats;
};

Stats measure(const Node& n, std::vector<Candidate>& candidates) {
  Stats s;
  if (n.is_text()) {
    s.text_chars = collapse_whitespace(n.text).size();
    return s;
  }
  s.tags = 1;
  const std::size_t slot = candidates.size();
  const bool container = kContainerTags.contains(n.tag);
  if (container) candidates.push_back(Candidate{&n, {}});
  for (const auto& child : n.children) {
    if (skipped(*child)) continue;
    const Stats c = measure(*child, candidates);
    s.text_chars += c.text_chars;
    s.tags += c.tags;
  }
  if (container) candidates[slot].stats = s;
  return s;
}

void collect_lines(const Node& n, std::string& line, std::vector<std::string>& lines) {
  auto flush = [&] {
    auto collapsed = collapse_whitespace(line);
    if (!collapsed.empty()) lines.push_back(std::move(collapsed));
    line.clear();
  };
  if (n.is_text()) {
    line += n.text;
    return;
  }
  const bool block = kBlockTags.contains(n.tag);
  if (block) flush();
  for (const auto& child : n.children) {
    if (skipped(*child)) continue;
    collect_lines(*child, line, lines);
  }
  if (block) flush();
}

}  // namespace

std::string DensityExtractor::extract(std::string_view document) const {
  const auto root = html::parse(document);
  std::vector<Candidate> candidates;
  measure(*root, candidates);

  const Candidate* best = nullptr;
  double best_density = -1.0;
  for (const auto& c : candidates) {
    if (c.stats.text_chars <= kMinBlockChars) continue;
    const double density = static_cast<double>(c.stats.text_chars) / static_cast<double>(c.stats.tags);
    if (density > best_density) {
      best = &c;
      best_density = density;
    }
  }
  if (!best) throw NoContent("no text block longer than " + std::to_string(kMinBlockChars) + " characters");

  std::string line;
  std::vector<std::string> lines;
  collect_lines(*best->node, line, lines);
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out.push_back('\n');
    out += l;
  }
  return out;
}

std::string extract_main_content(std::string_view document) { return DensityExtractor{}.extract(document); }

namespace {

void collect_anchors(const Node& n, std::vector<std::string>& hrefs) {
  if (n.is_text()) return;
  if (n.tag == "a") {
    if (const auto* href = n.attribute("href")) hrefs.push_back(*href);
  }
  for (const auto& child : n.children) collect_anchors(*child, hrefs);
}

}  // namespace

std::vector<CanonicalUrl> forward_links(std::string_view document, const CanonicalUrl& base) {
  const auto root = html::parse(document);
  std::vector<std::string> hrefs;
  collect_anchors(*root, hrefs);
  std::vector<CanonicalUrl> out;
  std::unordered_set<CanonicalUrl> seen;
  for (const auto& href : hrefs) {
    try {
      auto url = normalize_url(href, base);
      if (seen.insert(url).second) out.push_back(std::move(url));
    } catch (const Error&) {
      // Unsupported scheme or unparseable target.
    }
  }
  return out;
}

}  // namespace threatcrawl
