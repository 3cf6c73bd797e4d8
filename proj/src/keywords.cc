#include "threatcrawl/keywords.h"

#include <algorithm>
#include <unordered_map>

#include "threatcrawl/errors.h"
#include "threatcrawl/text.h"

namespace threatcrawl {

namespace {

struct Candidate {
  std::string phrase;
  std::size_t first_position;
  bool bigram;
};

std::vector<Candidate> collect(std::string_view text) {
  std::vector<Candidate> out;
  std::unordered_map<std::string, std::size_t> index;
  auto add = [&](std::string phrase, std::size_t pos, bool bigram) {
    if (index.try_emplace(phrase, out.size()).second) out.push_back({std::move(phrase), pos, bigram});
  };
  // Bigrams never span a sentence boundary.
  std::size_t offset = 0;
  for (const auto& sentence : split_sentences(text)) {
    const auto tokens = tokenize(sentence);
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (is_stopword(tokens[i])) continue;
      add(tokens[i], offset + i, false);
      if (i + 1 < tokens.size() && !is_stopword(tokens[i + 1])) {
        add(tokens[i] + " " + tokens[i + 1], offset + i, true);
      }
    }
    offset += tokens.size();
  }
  return out;
}

}  // namespace

std::vector<std::string> keyword_candidates(std::string_view text) {
  std::vector<std::string> out;
  for (auto& c : collect(text)) out.push_back(std::move(c.phrase));
  return out;
}

std::vector<ScoredCandidate> score_keywords(std::string_view text, const EmbeddingProvider& provider) {
  const auto candidates = collect(text);
  if (candidates.empty()) throw EmptyDocument("no keyword candidates");
  const Embedding doc = embed_document(text, provider);

  std::vector<std::string> phrases;
  phrases.reserve(candidates.size());
  for (const auto& c : candidates) phrases.push_back(c.phrase);
  const auto vectors = provider.embed(phrases);

  std::vector<std::pair<ScoredCandidate, bool>> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double score = vectors[i].norm() == 0.0 ? -1.0 : cosine_similarity(vectors[i], doc);
    scored.push_back({ScoredCandidate{candidates[i].phrase, score, candidates[i].first_position},
                      candidates[i].bigram});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first.score != b.first.score) return a.first.score > b.first.score;
    if (a.first.first_position != b.first.first_position) return a.first.first_position < b.first.first_position;
    return !a.second && b.second;
  });
  std::vector<ScoredCandidate> out;
  out.reserve(scored.size());
  for (auto& s : scored) out.push_back(std::move(s.first));
  return out;
}

KeywordSet extract_keywords(std::string_view text, int k, const EmbeddingProvider& provider) {
  if (k < 1) throw ConstraintError("keyword count must be positive");
  const auto scored = score_keywords(text, provider);
  KeywordSet set;
  for (const auto& c : scored) {
    if (static_cast<int>(set.keywords.size()) == k) break;
    set.keywords.push_back(c.phrase);
  }
  return set;
}

std::string keyword_query(const KeywordSet& keywords) {
  std::string q;
  for (const auto& kw : keywords.keywords) {
    if (!q.empty()) q += " OR ";
    if (kw.find(' ') != std::string::npos) {
      q += '"' + kw + '"';
    } else {
      q += kw;
    }
  }
  return q;
}

}  // namespace threatcrawl
