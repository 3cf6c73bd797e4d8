#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "threatcrawl/url.h"

namespace threatcrawl {

namespace html {

// Minimal DOM produced by a forgiving parser: unknown markup is kept as
// text, unclosed elements are closed at the end of the document and stray
// end tags are ignored.
struct Node {
  std::string tag;  // lowercase element name; empty for text nodes
  std::string text;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<Node>> children;

  bool is_text() const noexcept { return tag.empty(); }
  const std::string* attribute(std::string_view name) const;
};

// Root is a synthetic "#document" element.
std::unique_ptr<Node> parse(std::string_view document);

std::string decode_entities(std::string_view text);

}  // namespace html

// Pluggable main-content extraction.
class ContentExtractor {
 public:
  virtual ~ContentExtractor() = default;
  // Throws NoContent when the page has no usable main text.
  virtual std::string extract(std::string_view html) const = 0;
};

// Drops scripts, styles and navigation boilerplate, then picks the
// container subtree with the highest text length per element and returns
// its text blocks joined by newlines.
class DensityExtractor final : public ContentExtractor {
 public:
  // Blocks of at most this many characters are not considered main content.
  static constexpr std::size_t kMinBlockChars = 100;

  std::string extract(std::string_view html) const override;
};

std::string extract_main_content(std::string_view html);

// Every anchor target in the document (navigation included), resolved
// against base and normalized; invalid and non-http(s) targets are skipped.
// Duplicates are removed keeping the first occurrence.
std::vector<CanonicalUrl> forward_links(std::string_view html, const CanonicalUrl& base);

}  // namespace threatcrawl
