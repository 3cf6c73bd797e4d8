#pragma once

#include <functional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "threatcrawl/bandit.h"
#include "threatcrawl/clients.h"
#include "threatcrawl/config.h"
#include "threatcrawl/fetcher.h"
#include "threatcrawl/html.h"
#include "threatcrawl/page.h"
#include "threatcrawl/relevance.h"

namespace threatcrawl {

// Everything an action needs besides its subject page.
struct ActionContext {
  Fetcher& fetcher;
  BacklinkClient* backlinks = nullptr;  // required for B
  SearchClient* search = nullptr;       // required for K
  const EmbeddingProvider& provider;
  const ContentExtractor& extractor;
  const SeedSet& seeds;
  const CrawlConfig& cfg;
  const PublicSuffixList* psl = nullptr;
  // True for URLs the run has already classified or queued; they are not
  // fetched again.
  std::function<bool(const CanonicalUrl&)> known_url;
  // True for domains already in the run's domain registry.
  std::function<bool(const Domain&)> known_domain;
};

// Fetches url and classifies it. Returns nothing if the fetch fails, the
// response is not a successful HTML/text response, or it redirects to a
// URL that is already known.
std::optional<PageRecord> fetch_and_classify(const CanonicalUrl& url, Origin origin, std::uint64_t step,
                                             ActionContext& ctx);

// Forward (all links of the page), backlink (pages linking to it) or keyword
// (top-k keywords OR-combined into a search query). Candidates are
// normalized, deduplicated, blacklist-filtered and skipped if already known
// before anything is fetched. Client failures produce a failed, empty result.
PullResult execute_action(Action action, const PageRecord& page, ActionContext& ctx, std::uint64_t step);

}  // namespace threatcrawl
