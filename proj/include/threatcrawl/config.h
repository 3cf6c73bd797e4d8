#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "threatcrawl/url.h"

namespace threatcrawl {

// The three search actions (bandit arms). Declaration order is the fixed
// tie-break order F, B, K.
enum class Action : std::uint8_t { kForward = 0, kBacklink = 1, kKeyword = 2 };

inline constexpr Action kAllActions[] = {Action::kForward, Action::kBacklink, Action::kKeyword};

char action_code(Action a);
Action action_from_code(char c);
// Parses an action-combination flag such as "BFK" or "K" into the set of
// actions, sorted in F, B, K order. Throws ConstraintError on bad input.
std::vector<Action> parse_actions(std::string_view codes);
std::string actions_code(const std::vector<Action>& actions);

// Starter blacklist: major social, video and aggregator platforms.
const std::set<std::string>& default_blacklist_domains();
// Images, documents, archives/binaries and media.
const std::set<std::string>& default_blacklist_extensions();

struct CrawlConfig {
  std::vector<CanonicalUrl> seeds;
  double relevance_threshold = 0.6;
  double seed_threshold = 0.8;
  std::int64_t max_steps = 2000;
  double domain_weight = 1.0;
  std::vector<Action> actions_enabled{Action::kForward, Action::kBacklink, Action::kKeyword};
  std::set<std::string> blacklist_domains = default_blacklist_domains();
  std::set<std::string> blacklist_extensions = default_blacklist_extensions();
  std::int64_t politeness_delay_ms = 1000;
  std::string user_agent = "threatcrawl/0.1";
  std::uint64_t rng_seed = 0;
  int keyword_count = 3;
  int search_result_cap = 10;
  int backlink_result_cap = 25;

  // Deployment adapters for live crawls.
  std::optional<std::string> search_endpoint;
  std::optional<std::string> backlink_endpoint;
  std::optional<std::string> embedding_endpoint;
  std::optional<std::string> clients_fixture;
  std::optional<std::string> blacklist_file;
  int embedding_dimension = 512;

  bool operator==(const CrawlConfig&) const = default;
};

// Throws ConstraintError when an invariant does not hold.
void validate(const CrawlConfig& cfg);

// Parses the JSON config document. Unknown keys and wrongly typed values
// raise SchemaError naming the key; violated invariants raise ConstraintError.
CrawlConfig parse_config(std::string_view json_text);
CrawlConfig load_config(const std::string& path);
std::string serialize_config(const CrawlConfig& cfg);

}  // namespace threatcrawl
