#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "threatcrawl/config.h"
#include "threatcrawl/embedding.h"
#include "threatcrawl/url.h"

namespace threatcrawl {

enum class Label : std::uint8_t { kIrrelevant, kRelevant, kSeedCandidate };

// How a page entered the crawl.
enum class Origin : std::uint8_t { kSeed, kForward, kBacklink, kKeyword };

std::string_view label_name(Label l);
Label label_from_name(std::string_view name);
std::string_view origin_name(Origin o);
Origin origin_from_action(Action a);

inline bool is_relevant(Label l) { return l != Label::kIrrelevant; }

struct PageRecord {
  CanonicalUrl url;
  std::string text;
  std::optional<Embedding> embedding;
  std::optional<double> similarity;
  Label label = Label::kIrrelevant;
  Origin discovered_by = Origin::kSeed;
  std::uint64_t step = 0;
  // Forward links found on the page; kept so the page can later be the
  // subject of a forward search without refetching it.
  std::vector<CanonicalUrl> out_links;
};

}  // namespace threatcrawl
