#include <gtest/gtest.h>

#include "threatcrawl/errors.h"
#include "threatcrawl/keywords.h"
#include "threatcrawl/text.h"

using namespace threatcrawl;

TEST(KeywordCandidates, UnigramsAndBigramsWithoutStopwords) {
  const std::vector<std::string> want{"fresh", "fresh ransomware", "ransomware", "ransomware strain", "strain",
                                      "strain hits", "hits", "hospitals"};
  EXPECT_EQ(keyword_candidates("The fresh ransomware strain hits the hospitals. Ransomware"), want);
}

TEST(KeywordCandidates, BigramsStopAtSentenceBoundaries) {
  const auto c = keyword_candidates("Botnet grows. Phishing rises.");
  EXPECT_EQ(std::count(c.begin(), c.end(), "grows phishing"), 0);
}

TEST(ExtractKeywords, RepeatedPhraseRanksFirst) {
  const HashEmbeddingProvider p(512, 0);
  const std::string text =
      "Ransomware campaign targets hospitals. The ransomware campaign spreads quickly. "
      "Ransomware campaign operators demand payment.";
  const auto kw = extract_keywords(text, 3, p);
  ASSERT_EQ(kw.keywords.size(), 3u);
  EXPECT_EQ(kw.keywords[0], "ransomware campaign");
  EXPECT_EQ(extract_keywords(text, 1, p).keywords, std::vector<std::string>{"ransomware campaign"});
}

TEST(ExtractKeywords, SetProperties) {
  const HashEmbeddingProvider p(512, 0);
  const std::string text = "Emotet loader drops Cobalt Strike. Analysts track Emotet infrastructure daily.";
  for (int k = 1; k <= 8; ++k) {
    const auto kw = extract_keywords(text, k, p);
    ASSERT_LE(static_cast<int>(kw.keywords.size()), k);
    std::set<std::string> uniq(kw.keywords.begin(), kw.keywords.end());
    ASSERT_EQ(uniq.size(), kw.keywords.size());
    for (const auto& w : kw.keywords) {
      for (const auto& t : tokenize(w)) ASSERT_FALSE(is_stopword(t)) << w;
      ASSERT_EQ(tokenize(w).size(), std::count(w.begin(), w.end(), ' ') + 1u) << w;
    }
  }
}

TEST(ExtractKeywords, Errors) {
  const HashEmbeddingProvider p(64, 0);
  EXPECT_THROW(extract_keywords("the and of a to", 3, p), EmptyDocument);
  EXPECT_THROW(extract_keywords("", 3, p), EmptyDocument);
  EXPECT_THROW(extract_keywords("malware", 0, p), ConstraintError);
}

TEST(KeywordQuery, OrJoinedAndQuoted) {
  EXPECT_EQ(keyword_query({{"emotet", "phishing", "cve"}}), "emotet OR phishing OR cve");
  EXPECT_EQ(keyword_query({{"supply chain", "emotet"}}), "\"supply chain\" OR emotet");
  EXPECT_EQ(keyword_query({}), "");
}
