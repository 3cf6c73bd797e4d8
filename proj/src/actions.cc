#include "threatcrawl/actions.h"

#include <unordered_set>

#include "threatcrawl/errors.h"
#include "threatcrawl/keywords.h"

namespace threatcrawl {

namespace {

bool textual(const std::string& content_type) {
  if (content_type.empty()) return true;
  std::string ct;
  for (const char c : content_type) ct.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return ct.starts_with("text/html") || ct.starts_with("application/xhtml") || ct.starts_with("text/plain");
}

std::vector<CanonicalUrl> normalize_all(const std::vector<std::string>& raw) {
  std::vector<CanonicalUrl> out;
  for (const auto& r : raw) {
    try {
      out.push_back(normalize_url(r));
    } catch (const Error&) {
    }
  }
  return out;
}

}  // namespace

std::optional<PageRecord> fetch_and_classify(const CanonicalUrl& url, Origin origin, std::uint64_t step,
                                             ActionContext& ctx) {
  std::optional<FetchResult> fetched;
  try {
    fetched = ctx.fetcher.fetch(url);
  } catch (const FetchError&) {
    return std::nullopt;
  }
  if (fetched->status < 200 || fetched->status >= 300 || !textual(fetched->content_type)) return std::nullopt;
  if (fetched->url != url && ctx.known_url && ctx.known_url(fetched->url)) return std::nullopt;

  PageRecord page{.url = fetched->url, .discovered_by = origin, .step = step};
  try {
    page.text = ctx.extractor.extract(fetched->body);
  } catch (const NoContent&) {
  }
  auto c = classify(page.text, ctx.seeds, ctx.cfg, ctx.provider);
  page.embedding = std::move(c.embedding);
  page.similarity = c.similarity;
  page.label = c.label;
  // Only pages that may become pull subjects need their links.
  if (is_relevant(page.label)) page.out_links = forward_links(fetched->body, fetched->url);
  return page;
}

PullResult execute_action(Action action, const PageRecord& page, ActionContext& ctx, std::uint64_t step) {
  PullResult result{.source_page = page.url, .action = action};
  std::vector<CanonicalUrl> candidates;
  try {
    switch (action) {
      case Action::kForward:
        candidates = page.out_links;
        break;
      case Action::kBacklink: {
        if (!ctx.backlinks) throw ClientError("no backlink client configured");
        const auto cap = static_cast<std::size_t>(ctx.cfg.backlink_result_cap);
        auto raw = ctx.backlinks->backlinks(page.url, cap);
        if (raw.size() > cap) raw.resize(cap);
        candidates = normalize_all(raw);
        break;
      }
      case Action::kKeyword: {
        if (!ctx.search) throw ClientError("no search client configured");
        const auto keywords = extract_keywords(page.text, ctx.cfg.keyword_count, ctx.provider);
        const auto cap = static_cast<std::size_t>(ctx.cfg.search_result_cap);
        auto raw = ctx.search->search(keyword_query(keywords), cap);
        if (raw.size() > cap) raw.resize(cap);
        candidates = normalize_all(raw);
        break;
      }
    }
  } catch (const ClientError& e) {
    result.failed = true;
    result.error = e.what();
    return result;
  } catch (const EmptyDocument& e) {
    result.failed = true;
    result.error = std::string("no keywords: ") + e.what();
    return result;
  }

  std::unordered_set<CanonicalUrl> in_pull{page.url};
  for (const auto& url : filter_blacklist(candidates, ctx.fetcher.blacklist())) {
    if (!in_pull.insert(url).second) continue;
    if (ctx.known_url && ctx.known_url(url)) continue;
    auto record = fetch_and_classify(url, origin_from_action(action), step, ctx);
    if (!record) continue;
    if (record->url != url && !in_pull.insert(record->url).second) continue;
    Domain d = domain_of(record->url, ctx.psl);
    if (!(ctx.known_domain && ctx.known_domain(d))) result.new_domains.insert(std::move(d));
    result.retrieved.push_back(std::move(*record));
  }
  return result;
}

}  // namespace threatcrawl
