#include "threatcrawl/relevance.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "threatcrawl/errors.h"
#include "threatcrawl/text.h"

namespace threatcrawl {

// --- Embedding ---------------------------------------------------------------

Embedding::Embedding(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DimensionMismatch("embedding must have positive dimension");
  for (const double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("embedding entries must be finite");
  }
}

double Embedding::norm() const noexcept {
  double sum = 0.0;
  for (const double v : values_) sum += v * v;
  return std::sqrt(sum);
}

Embedding Embedding::normalized() const {
  const double n = norm();
  if (n == 0.0) throw ZeroVector("cannot normalize the zero vector");
  return scaled(1.0 / n);
}

Embedding Embedding::scaled(double factor) const {
  std::vector<double> out(values_);
  for (auto& v : out) v *= factor;
  return Embedding(std::move(out));
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionMismatch("cosine of vectors with dimensions " + std::to_string(a.dimension()) +
                            " and " + std::to_string(b.dimension()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw ZeroVector("cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

// --- providers ---------------------------------------------------------------

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw std::invalid_argument("dimension must be positive");
}

std::string HashEmbeddingProvider::model_id() const {
  return "hash-bow-d" + std::to_string(dimension_) + "-s" + std::to_string(seed_);
}

std::vector<double> HashEmbeddingProvider::bucket_counts(std::string_view text) const {
  std::vector<double> v(dimension_, 0.0);
  for (const auto& token : tokenize(text)) {
    const std::uint64_t h = splitmix64(fnv1a64(token) ^ seed_);
    const double sign = (h >> 63) ? -1.0 : 1.0;
    v[static_cast<std::size_t>(h % dimension_)] += sign;
  }
  return v;
}

std::vector<Embedding> HashEmbeddingProvider::embed(std::span<const std::string> texts) const {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    auto counts = bucket_counts(text);
    double norm = 0.0;
    for (const double c : counts) norm += c * c;
    norm = std::sqrt(norm);
    // A text without tokens stays the zero vector; callers skip it.
    if (norm > 0.0) {
      for (auto& c : counts) c /= norm;
    }
    out.emplace_back(std::move(counts));
  }
  return out;
}

// --- documents ---------------------------------------------------------------

Embedding embed_document(std::string_view text, const EmbeddingProvider& provider) {
  std::vector<std::string> sentences;
  for (auto& s : split_sentences(text)) {
    auto truncated = truncate_tokens(s, provider.token_budget());
    if (!truncated.empty()) sentences.push_back(std::move(truncated));
  }
  if (sentences.empty()) throw EmptyDocument("document has no text");

  const auto vectors = provider.embed(sentences);
  if (vectors.size() != sentences.size()) {
    throw ProviderUnavailable("provider returned " + std::to_string(vectors.size()) +
                              " vectors for " + std::to_string(sentences.size()) + " inputs");
  }
  std::vector<double> mean(provider.dimension(), 0.0);
  std::size_t used = 0;
  for (const auto& v : vectors) {
    if (v.dimension() != mean.size()) throw DimensionMismatch("provider dimension changed");
    if (v.norm() == 0.0) continue;
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
    ++used;
  }
  if (used == 0) throw EmptyDocument("document has no embeddable sentence");
  for (auto& m : mean) m /= static_cast<double>(used);
  Embedding doc(std::move(mean));
  if (doc.norm() == 0.0) throw EmptyDocument("sentence embeddings cancel out");
  return doc.normalized();
}

void SeedSet::add(CanonicalUrl url, Embedding embedding) {
  urls_.push_back(std::move(url));
  embeddings_.push_back(std::move(embedding));
}

double similarity_to_set(const Embedding& e, const SeedSet& seeds) {
  if (seeds.empty()) throw std::invalid_argument("similarity to an empty seed set");
  double best = -1.0;
  for (const auto& s : seeds.embeddings()) best = std::max(best, cosine_similarity(e, s));
  return best;
}

Label label_for(double similarity, double relevance_threshold, double seed_threshold) {
  if (similarity >= seed_threshold) return Label::kSeedCandidate;
  if (similarity >= relevance_threshold) return Label::kRelevant;
  return Label::kIrrelevant;
}

Classification classify(std::string_view page_text, const SeedSet& seeds, const CrawlConfig& cfg,
                        const EmbeddingProvider& provider) {
  Classification c;
  try {
    c.embedding = embed_document(page_text, provider);
  } catch (const EmptyDocument&) {
    return c;
  }
  c.similarity = similarity_to_set(*c.embedding, seeds);
  c.label = label_for(*c.similarity, cfg.relevance_threshold, cfg.seed_threshold);
  return c;
}

}  // namespace threatcrawl
