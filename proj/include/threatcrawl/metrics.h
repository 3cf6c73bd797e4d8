#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "threatcrawl/config.h"
#include "threatcrawl/page.h"

namespace threatcrawl {

// 100 * relevant / total, 0 for an empty crawl. Throws CountInconsistent
// unless 0 <= relevant <= total.
double harvest_rate(std::int64_t relevant, std::int64_t total);

// One page classified during a pull.
struct RetrievedPage {
  std::string url;
  std::string domain;
  std::optional<double> similarity;
  Label label = Label::kIrrelevant;

  bool operator==(const RetrievedPage&) const = default;
};

// One bandit pull. The url, similarity and label describe the subject page;
// the pages the pull classified are listed in retrieved.
struct CrawlEvent {
  std::uint64_t step = 0;
  std::string phase;  // "discovery" or "crawl"
  Action action = Action::kForward;
  std::string url;
  Origin origin = Origin::kSeed;
  std::optional<double> similarity;
  Label label = Label::kIrrelevant;
  double reward_raw = 0.0;
  double reward_normalized = 0.0;
  std::vector<std::string> new_domains;
  std::int64_t timestamp = 0;  // clock milliseconds at the end of the pull
  bool failed = false;
  std::string error;
  std::vector<RetrievedPage> retrieved;

  bool operator==(const CrawlEvent&) const = default;
};

nlohmann::json event_to_json(const CrawlEvent& e);
CrawlEvent event_from_json(const nlohmann::json& j);
// Single line, no trailing newline.
std::string event_line(const CrawlEvent& e);

// Reads newline-delimited events. Throws std::runtime_error naming the line
// on malformed input; blank lines are skipped.
std::vector<CrawlEvent> read_event_log(std::istream& in);
std::vector<CrawlEvent> load_event_log(const std::string& path);

// Summary of the settings a run was made with, carried into its report.
struct ConfigEcho {
  std::size_t seeds = 0;
  std::string actions;
  std::string policy;
  std::string provider;
  double relevance_threshold = 0.0;
  double seed_threshold = 0.0;
  std::int64_t max_steps = 0;
  double domain_weight = 0.0;
  std::uint64_t rng_seed = 0;

  bool operator==(const ConfigEcho&) const = default;
};

ConfigEcho make_echo(const CrawlConfig& cfg, std::string_view policy, std::string_view provider);
nlohmann::json echo_to_json(const ConfigEcho& e);
ConfigEcho echo_from_json(const nlohmann::json& j);

struct RunReport {
  std::int64_t steps = 0;  // crawl steps after discovery
  std::int64_t pages_total = 0;
  std::int64_t pages_relevant = 0;
  std::int64_t new_seeds = 0;
  double harvest_rate = 0.0;
  std::optional<double> max_similarity;
  std::int64_t domains_total = 0;
  std::int64_t domains_relevant = 0;
  std::optional<Action> top_method;
  double top_method_avg_similarity = 0.0;
  ConfigEcho config_echo;

  bool operator==(const RunReport&) const = default;
};

// Aggregates the event log. Pages are those classified by pulls (seeds are
// not counted); a relevant domain has at least one relevant page; the top
// method is the pulled action with the highest mean similarity of the pages
// it retrieved, ties in F, B, K order.
RunReport build_report(const std::vector<CrawlEvent>& events, const ConfigEcho& echo);

nlohmann::json report_to_json(const RunReport& r);
// Aligned plain-text table.
std::string format_report(const RunReport& r);

}  // namespace threatcrawl
