#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace threatcrawl {

// Lowercased tokens split on ASCII non-alphanumerics. Bytes >= 0x80 are kept
// inside tokens so UTF-8 words survive intact.
std::vector<std::string> tokenize(std::string_view text);

// Sentences end at '.', '!' or '?' followed by whitespace. Returned
// sentences are trimmed; empty ones are dropped.
std::vector<std::string> split_sentences(std::string_view text);

// First max_tokens whitespace-separated tokens of text, joined by single spaces.
std::string truncate_tokens(std::string_view text, std::size_t max_tokens);

std::string collapse_whitespace(std::string_view text);

bool is_stopword(std::string_view lowercase_word);

// Stable across platforms and runs (unlike std::hash).
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace threatcrawl
