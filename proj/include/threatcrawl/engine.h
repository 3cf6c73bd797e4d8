#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "threatcrawl/actions.h"
#include "threatcrawl/bandit.h"
#include "threatcrawl/clients.h"
#include "threatcrawl/config.h"
#include "threatcrawl/fetcher.h"
#include "threatcrawl/frontier.h"
#include "threatcrawl/html.h"
#include "threatcrawl/metrics.h"
#include "threatcrawl/relevance.h"

namespace threatcrawl {

// External collaborators of a crawl. All must outlive the Crawler.
struct Services {
  Transport& transport;
  Clock& clock;
  const EmbeddingProvider& provider;
  const ContentExtractor& extractor;
  BacklinkClient* backlinks = nullptr;
  SearchClient* search = nullptr;
  const PublicSuffixList* psl = nullptr;
};

struct EngineOptions {
  PolicyKind policy = PolicyKind::kUcb1;
  double epsilon = 0.1;
};

// Receives every event right after it is produced.
using EventSink = std::function<void(const CrawlEvent&)>;

// The crawl loop: seeds are fetched and embedded, every arm is pulled once
// (discovery), then each step pops the best frontier page, selects an arm,
// executes it on that page, rewards and updates the bandit and enqueues the
// relevant pages found.
class Crawler {
 public:
  Crawler(CrawlConfig cfg, Services services, EngineOptions options = {}, EventSink sink = {});

  // Fetches the seeds and runs discovery. Throws EngineError when no seed
  // page can be fetched and embedded.
  void init();
  bool initialized() const noexcept { return initialized_; }

  // One crawl step. Returns false without doing anything once the budget is
  // spent or the frontier is empty.
  bool step();
  bool finished() const;

  // Steps until finished or until *interrupt becomes true (checked between
  // steps). Returns true if the run finished.
  bool run(const std::atomic<bool>* interrupt = nullptr);

  RunReport report() const;
  ConfigEcho echo() const;

  const CrawlConfig& config() const noexcept { return cfg_; }
  const std::vector<CrawlEvent>& events() const noexcept { return events_; }
  const BanditState& bandit() const { return *bandit_; }
  const Frontier& frontier() const noexcept { return frontier_; }
  const SeedSet& seeds() const noexcept { return seeds_; }
  std::int64_t steps_taken() const noexcept { return steps_taken_; }
  // Seeds that could not be fetched or embedded, with the reason.
  const std::vector<std::string>& skipped_seeds() const noexcept { return skipped_seeds_; }
  void set_sink(EventSink sink) { sink_ = std::move(sink); }

  // Checkpoint between steps. extra is stored verbatim and handed back by
  // read_checkpoint_extra, e.g. simulation parameters.
  std::string checkpoint(const nlohmann::json& extra = nullptr) const;
  static std::unique_ptr<Crawler> restore(const std::string& document, Services services,
                                          EventSink sink = {});

 private:
  struct Pending {
    std::string text;
    std::optional<double> similarity;
    Label label = Label::kIrrelevant;
    Origin origin = Origin::kSeed;
    std::uint64_t step = 0;
    std::vector<CanonicalUrl> out_links;
  };

  ActionContext context();
  PullResult pull(Action action, const PageRecord& subject, std::uint64_t step);
  void record(const std::string& phase, const PageRecord& subject, const PullResult& result, double raw,
              double norm, std::uint64_t step);
  PageRecord take_subject(const CanonicalUrl& url);
  void emit(CrawlEvent e);

  CrawlConfig cfg_;
  Services services_;
  EngineOptions options_;
  EventSink sink_;
  Fetcher fetcher_;

  bool initialized_ = false;
  Frontier frontier_;
  SeedSet seeds_;
  std::optional<BanditState> bandit_;
  std::unordered_map<CanonicalUrl, Pending> pending_;
  std::unordered_set<CanonicalUrl> known_urls_;
  std::set<Domain> domains_;
  std::vector<CrawlEvent> events_;
  std::vector<std::string> skipped_seeds_;
  std::uint64_t next_step_ = 1;
  std::int64_t steps_taken_ = 0;
};

// The extra document stored in a checkpoint. Throws CorruptCheckpoint.
nlohmann::json read_checkpoint_extra(const std::string& document);

}  // namespace threatcrawl
