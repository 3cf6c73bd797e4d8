#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "threatcrawl/config.h"
#include "threatcrawl/embedding.h"
#include "threatcrawl/page.h"
#include "threatcrawl/url.h"

namespace threatcrawl {

enum class ProviderMode : std::uint8_t { kRemoteService, kDeterministicHash };

// Maps text to vectors. Implementations must be deterministic for a fixed
// instance and safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() const = 0;
  virtual ProviderMode mode() const = 0;
  // Model identity recorded in run reports.
  virtual std::string model_id() const = 0;
  // Inputs longer than this many whitespace tokens are truncated.
  virtual std::size_t token_budget() const { return 512; }

  // One vector per input, in input order.
  virtual std::vector<Embedding> embed(std::span<const std::string> texts) const = 0;
};

// Bag-of-words feature hashing: each token adds +-1 to one of `dimension`
// buckets chosen by a seeded 64-bit hash; the sum is L2-normalized.
class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashEmbeddingProvider(std::size_t dimension = 512, std::uint64_t seed = 0);

  std::size_t dimension() const override { return dimension_; }
  ProviderMode mode() const override { return ProviderMode::kDeterministicHash; }
  std::string model_id() const override;
  std::vector<Embedding> embed(std::span<const std::string> texts) const override;

  // Unnormalized bucket counts for one text; zero vector if it has no tokens.
  std::vector<double> bucket_counts(std::string_view text) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

// Client for an embedding service: POST {base}/embed with
// {"texts": [...]}, answered by {"dimension": d, "vectors": [[...], ...]}.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(std::string endpoint, std::size_t dimension, int max_retries = 2,
                          int timeout_ms = 30000, std::string model_id = "remote");

  std::size_t dimension() const override { return dimension_; }
  ProviderMode mode() const override { return ProviderMode::kRemoteService; }
  std::string model_id() const override { return model_id_; }
  // Throws ProviderUnavailable after the retries are exhausted.
  std::vector<Embedding> embed(std::span<const std::string> texts) const override;

 private:
  std::string endpoint_;
  std::size_t dimension_;
  int max_retries_;
  int timeout_ms_;
  std::string model_id_;
};

// Mean of the sentence embeddings, L2-normalized. Sentences are truncated
// to the provider's token budget. Throws EmptyDocument.
Embedding embed_document(std::string_view text, const EmbeddingProvider& provider);

// The seed pages S. Grows monotonically during a run.
class SeedSet {
 public:
  void add(CanonicalUrl url, Embedding embedding);

  std::size_t size() const noexcept { return urls_.size(); }
  bool empty() const noexcept { return urls_.empty(); }
  const std::vector<CanonicalUrl>& urls() const noexcept { return urls_; }
  const std::vector<Embedding>& embeddings() const noexcept { return embeddings_; }

 private:
  std::vector<CanonicalUrl> urls_;
  std::vector<Embedding> embeddings_;
};

// Maximum cosine similarity of e to any seed embedding. Throws
// std::invalid_argument for an empty set.
double similarity_to_set(const Embedding& e, const SeedSet& seeds);

// Inclusive thresholds: >= seed_threshold is a seed candidate,
// >= relevance_threshold is relevant.
Label label_for(double similarity, double relevance_threshold, double seed_threshold);

struct Classification {
  std::optional<Embedding> embedding;
  std::optional<double> similarity;
  Label label = Label::kIrrelevant;
};

// Empty or unembeddable text is labeled Irrelevant with no similarity.
// ProviderUnavailable propagates.
Classification classify(std::string_view page_text, const SeedSet& seeds, const CrawlConfig& cfg,
                        const EmbeddingProvider& provider);

}  // namespace threatcrawl
