#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "threatcrawl/relevance.h"

namespace threatcrawl {

// Lowercase, duplicate-free, stopword-free keywords ordered by score.
struct KeywordSet {
  std::vector<std::string> keywords;
  bool operator==(const KeywordSet&) const = default;
};

struct ScoredCandidate {
  std::string phrase;
  double score = 0.0;
  std::size_t first_position = 0;  // token index of the first occurrence
};

// Unigrams and bigrams of adjacent non-stopword tokens, in order of first
// occurrence, without duplicates.
std::vector<std::string> keyword_candidates(std::string_view text);

// Every candidate scored by cosine similarity to the document embedding,
// sorted by score (desc), first occurrence (asc), then unigrams first.
std::vector<ScoredCandidate> score_keywords(std::string_view text, const EmbeddingProvider& provider);

// Top-k of score_keywords. Throws EmptyDocument when no candidate exists.
KeywordSet extract_keywords(std::string_view text, int k, const EmbeddingProvider& provider);

// Keywords joined with " OR "; multi-word keywords are double-quoted.
std::string keyword_query(const KeywordSet& keywords);

}  // namespace threatcrawl
