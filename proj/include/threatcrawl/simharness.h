#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "threatcrawl/bandit.h"
#include "threatcrawl/clients.h"
#include "threatcrawl/config.h"
#include "threatcrawl/embedding.h"
#include "threatcrawl/engine.h"
#include "threatcrawl/fetcher.h"
#include "threatcrawl/html.h"
#include "threatcrawl/metrics.h"
#include "threatcrawl/relevance.h"

namespace threatcrawl {

// Shape of a generated web. Clusters 0 .. relevant_clusters-1 are the
// relevant ones.
struct WebParams {
  int n_clusters = 4;
  int relevant_clusters = 2;
  int pages_per_cluster = 100;
  double intra_link_prob = 0.05;
  double inter_link_prob = 0.005;
  int vocab_per_cluster = 30;
  int noise_vocab = 200;       // words shared by every cluster
  int words_per_page = 120;
  double topic_share = 0.85;   // probability that a word comes from the page's cluster
  int pages_per_domain = 5;
  int words_per_sentence = 12;

  bool operator==(const WebParams&) const = default;
};

nlohmann::json params_to_json(const WebParams& p);
// Missing keys keep their defaults; unknown keys throw InvalidParams.
WebParams params_from_json(const nlohmann::json& j);
void validate(const WebParams& p);

struct SynthPage {
  CanonicalUrl url;
  int cluster_id = 0;
  std::string text;
  std::vector<CanonicalUrl> out_links;
  bool relevant = false;

  bool operator==(const SynthPage&) const = default;
};

class SyntheticWeb {
 public:
  const WebParams& params() const noexcept { return params_; }
  std::uint64_t rng_seed() const noexcept { return seed_; }
  const std::vector<SynthPage>& pages() const noexcept { return pages_; }
  const std::vector<std::vector<std::string>>& cluster_vocab() const noexcept { return cluster_vocab_; }
  const std::vector<std::string>& noise_vocab() const noexcept { return noise_vocab_; }
  // Hash embedding of each cluster's vocabulary, unit length.
  const std::vector<Embedding>& topic_vectors() const noexcept { return topic_vectors_; }

  const SynthPage* find(const CanonicalUrl& url) const;
  std::size_t index_of(const CanonicalUrl& url) const;  // pages().size() if absent
  // Minimal HTML document: the text as paragraphs plus a navigation list
  // holding every out-link.
  std::string html(const SynthPage& page) const;
  // Pages linking to page i, ascending.
  const std::vector<std::size_t>& in_links(std::size_t i) const { return in_links_.at(i); }

  bool operator==(const SyntheticWeb& o) const {
    return params_ == o.params_ && seed_ == o.seed_ && pages_ == o.pages_;
  }

 private:
  friend SyntheticWeb generate_web(const WebParams& params, std::uint64_t seed);

  WebParams params_;
  std::uint64_t seed_ = 0;
  std::vector<SynthPage> pages_;
  std::unordered_map<CanonicalUrl, std::size_t> index_;
  std::vector<std::vector<std::size_t>> in_links_;
  std::vector<std::vector<std::string>> cluster_vocab_;
  std::vector<std::string> noise_vocab_;
  std::vector<Embedding> topic_vectors_;
};

// Deterministic for fixed (params, seed). Throws InvalidParams.
SyntheticWeb generate_web(const WebParams& params, std::uint64_t seed);

// Serves the web's pages. /robots.txt answers 404 unless rules were set for
// the host; unknown URLs raise TransportError. Counts every request.
class SimTransport final : public Transport {
 public:
  explicit SimTransport(const SyntheticWeb& web) : web_(web) {}

  HttpResponse get(const CanonicalUrl& url, const RequestOptions& options) override;
  void set_robots(const std::string& host, std::string robots_txt);
  // Every requested URL in request order.
  std::vector<std::string> requests() const;

 private:
  const SyntheticWeb& web_;
  std::map<std::string, std::string> robots_;
  mutable std::mutex mu_;
  std::vector<std::string> requests_;
};

// Exact reverse-edge index.
class SimBacklinkClient final : public BacklinkClient {
 public:
  explicit SimBacklinkClient(const SyntheticWeb& web) : web_(web) {}
  std::vector<std::string> backlinks(const CanonicalUrl& url, std::size_t cap) override;

 private:
  const SyntheticWeb& web_;
};

// Matches the OR-terms of a query (double-quoted phrases allowed) against
// page token sets; results ranked by the number of matching terms, then by
// the summed frequency of the matched terms, then page order.
class SimSearchClient final : public SearchClient {
 public:
  explicit SimSearchClient(const SyntheticWeb& web);
  std::vector<std::string> search(const std::string& query, std::size_t cap) override;

 private:
  const SyntheticWeb& web_;
  std::vector<std::map<std::string, int>> counts_;  // token frequencies per page
};

// Everything a crawl against the synthetic web needs, with virtual time.
class SimEnvironment {
 public:
  explicit SimEnvironment(const SyntheticWeb& web, std::size_t embedding_dimension = 512);

  Services services();
  SimTransport& transport() noexcept { return transport_; }
  ManualClock& clock() noexcept { return clock_; }
  const HashEmbeddingProvider& provider() const noexcept { return provider_; }

 private:
  SimTransport transport_;
  ManualClock clock_;
  HashEmbeddingProvider provider_;
  DensityExtractor extractor_;
  SimBacklinkClient backlinks_;
  SimSearchClient search_;
};

// The standard fixture: 4 clusters of 100 pages, 2 relevant, link
// probabilities 0.05 / 0.005.
WebParams standard_params();
inline constexpr std::uint64_t kStandardWebSeed = 42;
// 17 seeds taken alternately from the relevant clusters, 500 steps.
CrawlConfig standard_config(const SyntheticWeb& web);
// Seeds taken alternately from the relevant clusters.
std::vector<CanonicalUrl> pick_seeds(const SyntheticWeb& web, std::size_t count);

struct SimResult {
  RunReport report;
  // Fraction of relevant-labeled pages that are relevant in the ground truth
  // (1 when nothing was labeled relevant).
  double precision = 1.0;
  std::vector<CrawlEvent> events;
};

// Ground-truth precision of the relevant labels in an event log.
double label_precision(const std::vector<CrawlEvent>& events, const SyntheticWeb& web);

SimResult run_simulation(const CrawlConfig& cfg, const SyntheticWeb& web, PolicyKind policy);

}  // namespace threatcrawl
