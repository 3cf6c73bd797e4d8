#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "threatcrawl/config.h"
#include "threatcrawl/errors.h"
#include "threatcrawl/relevance.h"

using namespace threatcrawl;

namespace {

Embedding vec(std::vector<double> v) { return Embedding(std::move(v)); }

Embedding random_vec(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = n(rng);
  return Embedding(std::move(v));
}

}  // namespace

TEST(Embedding, RejectsBadInput) {
  EXPECT_THROW(vec({}), DimensionMismatch);
  EXPECT_THROW(vec({1.0, NAN}), std::invalid_argument);
  EXPECT_THROW(vec({0.0, 0.0}).normalized(), ZeroVector);
}

TEST(Cosine, WorkedExample) {
  // 32 / (sqrt(14) * sqrt(77))
  EXPECT_NEAR(cosine_similarity(vec({1, 2, 3}), vec({4, 5, 6})), 32.0 / std::sqrt(14.0 * 77.0), 1e-12);
  EXPECT_NEAR(cosine_similarity(vec({1, 2, 3}), vec({4, 5, 6})), 0.974631846, 1e-9);
  EXPECT_DOUBLE_EQ(cosine_similarity(vec({1, 0}), vec({-3, 0})), -1.0);
  EXPECT_THROW(cosine_similarity(vec({1, 0}), vec({1, 0, 0})), DimensionMismatch);
  EXPECT_THROW(cosine_similarity(vec({1, 0}), vec({0, 0})), ZeroVector);
}

TEST(Cosine, SymmetricScaleInvariantAndBounded) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int i = 0; i < 2000; ++i) {
    const auto a = random_vec(rng, 8);
    const auto b = random_vec(rng, 8);
    const double c = cosine_similarity(a, b);
    ASSERT_GE(c, -1.0);
    ASSERT_LE(c, 1.0);
    ASSERT_EQ(c, cosine_similarity(b, a));
    ASSERT_NEAR(c, cosine_similarity(a.scaled(scale(rng)), b.scaled(scale(rng))), 1e-12);
    ASSERT_NEAR(cosine_similarity(a, a), 1.0, 1e-12);
  }
}

TEST(SimilarityToSet, WorkedExample) {
  SeedSet seeds;
  seeds.add(normalize_url("http://s1.org/"), vec({1, 0}));
  seeds.add(normalize_url("http://s2.org/"), vec({0, -1}));
  EXPECT_NEAR(similarity_to_set(vec({1, 1}).normalized(), seeds), 0.707106781, 1e-9);
  EXPECT_THROW(similarity_to_set(vec({1, 1}), SeedSet{}), std::invalid_argument);
}

TEST(SimilarityToSet, IsMaxOverSeeds) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    SeedSet seeds;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int s = 0; s < n; ++s) seeds.add(normalize_url("http://s" + std::to_string(s) + ".org/"), random_vec(rng, 6));
    const auto e = random_vec(rng, 6);
    double want = -2.0;
    for (const auto& s : seeds.embeddings()) want = std::max(want, cosine_similarity(e, s));
    ASSERT_EQ(similarity_to_set(e, seeds), want);
    // Adding a seed never lowers the similarity.
    const double before = similarity_to_set(e, seeds);
    seeds.add(normalize_url("http://extra.org/"), random_vec(rng, 6));
    ASSERT_GE(similarity_to_set(e, seeds), before);
  }
}

TEST(LabelFor, InclusiveThresholds) {
  EXPECT_EQ(label_for(0.85, 0.6, 0.8), Label::kSeedCandidate);
  EXPECT_EQ(label_for(0.80, 0.6, 0.8), Label::kSeedCandidate);
  EXPECT_EQ(label_for(0.60, 0.6, 0.8), Label::kRelevant);
  EXPECT_EQ(label_for(0.59, 0.6, 0.8), Label::kIrrelevant);
  EXPECT_EQ(label_for(-1.0, 0.6, 0.8), Label::kIrrelevant);
}

TEST(HashEmbedding, SingleTokenIsOneSignedBucket) {
  const HashEmbeddingProvider p(64, 9);
  const auto counts = p.bucket_counts("malware");
  int nonzero = 0;
  for (double c : counts) {
    if (c != 0.0) {
      ++nonzero;
      EXPECT_EQ(std::abs(c), 1.0);
    }
  }
  EXPECT_EQ(nonzero, 1);
  const auto twice = p.bucket_counts("Malware malware");
  for (std::size_t i = 0; i < counts.size(); ++i) EXPECT_EQ(twice[i], 2 * counts[i]);
}

TEST(HashEmbedding, DeterministicAndNormalized) {
  const HashEmbeddingProvider a(128, 1), b(128, 1);
  const std::vector<std::string> texts{"phishing kit sold on forum", "weather report"};
  const auto ea = a.embed(texts);
  const auto eb = b.embed(texts);
  ASSERT_EQ(ea.size(), 2u);
  EXPECT_EQ(ea, eb);
  EXPECT_NEAR(ea[0].norm(), 1.0, 1e-12);
  EXPECT_EQ(ea[0].dimension(), 128u);
  // A token-free text maps to the zero vector rather than throwing.
  const std::vector<std::string> empty{"!!!"};
  EXPECT_EQ(a.embed(empty)[0].norm(), 0.0);
}

TEST(EmbedDocument, MeanOfSentenceVectors) {
  const HashEmbeddingProvider p(256, 4);
  const std::string text = "Ransomware hits hospital. Phishing kit sold online.";
  std::vector<double> sum(256, 0.0);
  for (const std::string s : {"Ransomware hits hospital.", "Phishing kit sold online."}) {
    const std::vector<std::string> one{s};
    const auto e = p.embed(one)[0];
    for (std::size_t i = 0; i < 256; ++i) sum[i] += e[i];
  }
  const auto want = Embedding(sum).normalized();
  const auto got = embed_document(text, p);
  for (std::size_t i = 0; i < 256; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  EXPECT_THROW(embed_document("  ... ", p), EmptyDocument);
}

TEST(Classify, LabelsAgainstSeeds) {
  const HashEmbeddingProvider p(256, 0);
  CrawlConfig cfg;
  SeedSet seeds;
  seeds.add(normalize_url("http://s.org/"), embed_document("ransomware gang leaks hospital data", p));
  const auto same = classify("ransomware gang leaks hospital data", seeds, cfg, p);
  EXPECT_EQ(same.label, Label::kSeedCandidate);
  ASSERT_TRUE(same.similarity);
  EXPECT_NEAR(*same.similarity, 1.0, 1e-12);
  const auto empty = classify("", seeds, cfg, p);
  EXPECT_EQ(empty.label, Label::kIrrelevant);
  EXPECT_FALSE(empty.similarity);
}
