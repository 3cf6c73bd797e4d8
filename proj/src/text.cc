#include "threatcrawl/text.h"

#include <algorithm>
#include <array>
#include <unordered_set>

namespace threatcrawl {

namespace {

bool is_token_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && i + 1 < text.size() &&
        is_space(static_cast<unsigned char>(text[i + 1]))) {
      const auto s = trim(text.substr(start, i + 1 - start));
      if (!s.empty()) sentences.emplace_back(s);
      start = i + 1;
    }
  }
  const auto tail = trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) sentences.emplace_back(tail);
  return sentences;
}

std::string truncate_tokens(std::string_view text, std::size_t max_tokens) {
  std::string out;
  std::size_t count = 0;
  std::size_t i = 0;
  while (i < text.size() && count < max_tokens) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    const std::size_t b = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    if (!out.empty()) out.push_back(' ');
    out.append(text.substr(b, i - b));
    ++count;
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (const char c : text) {
    if (is_space(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

bool is_stopword(std::string_view word) {
  static const std::unordered_set<std::string_view> kStopwords = {
      "a",        "about",   "above",   "after",   "again",   "against", "all",     "also",
      "am",       "an",      "and",     "any",     "are",     "as",      "at",      "be",
      "because",  "been",    "before",  "being",   "below",   "between", "both",    "but",
      "by",       "can",     "could",   "did",     "do",      "does",    "doing",   "down",
      "during",   "each",    "few",     "for",     "from",    "further", "had",     "has",
      "have",     "having",  "he",      "her",     "here",    "hers",    "herself", "him",
      "himself",  "his",     "how",     "i",       "if",      "in",      "into",    "is",
      "it",       "its",     "itself",  "just",    "may",     "me",      "might",   "more",
      "most",     "must",    "my",      "myself",  "new",     "no",      "nor",     "not",
      "now",      "of",      "off",     "on",      "once",    "one",     "only",    "or",
      "other",    "our",     "ours",    "ourselves", "out",   "over",    "own",     "s",
      "same",     "shall",   "she",     "should",  "so",      "some",    "such",    "t",
      "than",     "that",    "the",     "their",   "theirs",  "them",    "themselves", "then",
      "there",    "these",   "they",    "this",    "those",   "through", "to",      "too",
      "under",    "until",   "up",      "us",      "use",     "used",    "using",   "very",
      "was",      "we",      "were",    "what",    "when",    "where",   "which",   "while",
      "who",      "whom",    "why",     "will",    "with",    "would",   "you",     "your",
      "yours",    "yourself", "yourselves", "via",   "within",  "without", "yet",     "however",
  };
  return kStopwords.contains(word);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace threatcrawl
