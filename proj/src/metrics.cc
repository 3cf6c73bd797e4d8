#include "threatcrawl/metrics.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "threatcrawl/errors.h"

namespace threatcrawl {

using nlohmann::json;

double harvest_rate(std::int64_t relevant, std::int64_t total) {
  if (relevant < 0 || total < 0 || relevant > total) {
    throw CountInconsistent(std::to_string(relevant) + " relevant of " + std::to_string(total) + " pages");
  }
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(relevant) / static_cast<double>(total);
}

namespace {

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Origin origin_from_name(std::string_view s) {
  if (s == "seed") return Origin::kSeed;
  if (s.size() == 1) return origin_from_action(action_from_code(s[0]));
  throw std::runtime_error("unknown origin '" + std::string(s) + "'");
}

}  // namespace

json event_to_json(const CrawlEvent& e) {
  json retrieved = json::array();
  for (const auto& r : e.retrieved) {
    retrieved.push_back({{"url", r.url},
                         {"domain", r.domain},
                         {"similarity", opt_number(r.similarity)},
                         {"label", label_name(r.label)}});
  }
  json j = {{"step", e.step},
            {"phase", e.phase},
            {"action", std::string(1, action_code(e.action))},
            {"url", e.url},
            {"origin", origin_name(e.origin)},
            {"similarity", opt_number(e.similarity)},
            {"label", label_name(e.label)},
            {"reward_raw", e.reward_raw},
            {"reward_normalized", e.reward_normalized},
            {"new_domains", e.new_domains},
            {"timestamp", e.timestamp},
            {"failed", e.failed}};
  if (!e.error.empty()) j["error"] = e.error;
  j["retrieved"] = std::move(retrieved);
  return j;
}

CrawlEvent event_from_json(const json& j) {
  CrawlEvent e;
  e.step = j.at("step").get<std::uint64_t>();
  e.phase = j.at("phase").get<std::string>();
  const auto code = j.at("action").get<std::string>();
  if (code.size() != 1) throw std::runtime_error("bad action '" + code + "'");
  e.action = action_from_code(code[0]);
  e.url = j.at("url").get<std::string>();
  e.origin = origin_from_name(j.at("origin").get<std::string>());
  e.similarity = read_opt(j, "similarity");
  e.label = label_from_name(j.at("label").get<std::string>());
  e.reward_raw = j.at("reward_raw").get<double>();
  e.reward_normalized = j.at("reward_normalized").get<double>();
  e.new_domains = j.at("new_domains").get<std::vector<std::string>>();
  e.timestamp = j.at("timestamp").get<std::int64_t>();
  e.failed = j.at("failed").get<bool>();
  if (j.contains("error")) e.error = j.at("error").get<std::string>();
  for (const auto& r : j.at("retrieved")) {
    e.retrieved.push_back(RetrievedPage{.url = r.at("url").get<std::string>(),
                                        .domain = r.at("domain").get<std::string>(),
                                        .similarity = read_opt(r, "similarity"),
                                        .label = label_from_name(r.at("label").get<std::string>())});
  }
  return e;
}

std::string event_line(const CrawlEvent& e) { return event_to_json(e).dump(); }

std::vector<CrawlEvent> read_event_log(std::istream& in) {
  std::vector<CrawlEvent> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(event_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw std::runtime_error("event log line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::vector<CrawlEvent> load_event_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read event log '" + path + "'");
  return read_event_log(in);
}

ConfigEcho make_echo(const CrawlConfig& cfg, std::string_view policy, std::string_view provider) {
  return ConfigEcho{.seeds = cfg.seeds.size(),
                    .actions = actions_code(cfg.actions_enabled),
                    .policy = std::string(policy),
                    .provider = std::string(provider),
                    .relevance_threshold = cfg.relevance_threshold,
                    .seed_threshold = cfg.seed_threshold,
                    .max_steps = cfg.max_steps,
                    .domain_weight = cfg.domain_weight,
                    .rng_seed = cfg.rng_seed};
}

json echo_to_json(const ConfigEcho& e) {
  return {{"seeds", e.seeds},
          {"actions", e.actions},
          {"policy", e.policy},
          {"provider", e.provider},
          {"relevance_threshold", e.relevance_threshold},
          {"seed_threshold", e.seed_threshold},
          {"max_steps", e.max_steps},
          {"domain_weight", e.domain_weight},
          {"rng_seed", e.rng_seed}};
}

ConfigEcho echo_from_json(const json& j) {
  return ConfigEcho{.seeds = j.at("seeds").get<std::size_t>(),
                    .actions = j.at("actions").get<std::string>(),
                    .policy = j.at("policy").get<std::string>(),
                    .provider = j.at("provider").get<std::string>(),
                    .relevance_threshold = j.at("relevance_threshold").get<double>(),
                    .seed_threshold = j.at("seed_threshold").get<double>(),
                    .max_steps = j.at("max_steps").get<std::int64_t>(),
                    .domain_weight = j.at("domain_weight").get<double>(),
                    .rng_seed = j.at("rng_seed").get<std::uint64_t>()};
}

RunReport build_report(const std::vector<CrawlEvent>& events, const ConfigEcho& echo) {
  RunReport r;
  r.config_echo = echo;
  std::set<std::string> domains, relevant_domains;
  struct Acc {
    double sum = 0.0;
    std::int64_t n = 0;
    bool pulled = false;
  };
  std::map<Action, Acc> per_action;

  for (const auto& e : events) {
    if (e.phase == "crawl") ++r.steps;
    per_action[e.action].pulled = true;
    for (const auto& p : e.retrieved) {
      ++r.pages_total;
      domains.insert(p.domain);
      if (is_relevant(p.label)) {
        ++r.pages_relevant;
        relevant_domains.insert(p.domain);
      }
      if (p.label == Label::kSeedCandidate) ++r.new_seeds;
      if (p.similarity) {
        r.max_similarity = std::max(r.max_similarity.value_or(*p.similarity), *p.similarity);
        per_action[e.action].sum += *p.similarity;
        per_action[e.action].n += 1;
      }
    }
  }
  r.harvest_rate = harvest_rate(r.pages_relevant, r.pages_total);
  r.domains_total = static_cast<std::int64_t>(domains.size());
  r.domains_relevant = static_cast<std::int64_t>(relevant_domains.size());

  for (const Action a : kAllActions) {
    const auto it = per_action.find(a);
    if (it == per_action.end() || !it->second.pulled) continue;
    const double avg = it->second.n == 0 ? 0.0 : it->second.sum / static_cast<double>(it->second.n);
    if (!r.top_method || avg > r.top_method_avg_similarity) {
      r.top_method = a;
      r.top_method_avg_similarity = avg;
    }
  }
  return r;
}

json report_to_json(const RunReport& r) {
  return {{"steps", r.steps},
          {"pages_total", r.pages_total},
          {"pages_relevant", r.pages_relevant},
          {"new_seeds", r.new_seeds},
          {"harvest_rate", r.harvest_rate},
          {"max_similarity", opt_number(r.max_similarity)},
          {"domains_total", r.domains_total},
          {"domains_relevant", r.domains_relevant},
          {"top_method", r.top_method ? json(std::string(1, action_code(*r.top_method))) : json(nullptr)},
          {"top_method_avg_similarity", r.top_method_avg_similarity},
          {"config_echo", echo_to_json(r.config_echo)}};
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string format_report(const RunReport& r) {
  const std::vector<std::string> head{"Run", "S", "|P|", "|P+|", "|Seed|", "HR", "max~", "|Dom|", "|Dom+|", "TM"};
  const std::vector<std::string> row{
      "TC_" + r.config_echo.actions,
      std::to_string(r.steps),
      std::to_string(r.pages_total),
      std::to_string(r.pages_relevant),
      std::to_string(r.new_seeds),
      fixed(r.harvest_rate, 2),
      r.max_similarity ? fixed(*r.max_similarity, 4) : "-",
      std::to_string(r.domains_total),
      std::to_string(r.domains_relevant),
      r.top_method ? std::string(1, action_code(*r.top_method)) : "-"};

  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const std::size_t w = std::max(head[i].size(), row[i].size());
      if (i > 0) out << "  ";
      if (i == 0) {
        out << cells[i] << std::string(w - cells[i].size(), ' ');
      } else {
        out << std::string(w - cells[i].size(), ' ') << cells[i];
      }
    }
    out << '\n';
  };
  line(head);
  line(row);
  const auto& c = r.config_echo;
  out << '\n'
      << "top method avg similarity: " << fixed(r.top_method_avg_similarity, 4) << '\n'
      << "policy " << c.policy << ", provider " << c.provider << ", seeds " << c.seeds << ", budget " << c.max_steps
      << ", theta " << fixed(c.relevance_threshold, 2) << ", seed theta " << fixed(c.seed_threshold, 2)
      << ", delta " << fixed(c.domain_weight, 2) << ", rng seed " << c.rng_seed << '\n';
  return out.str();
}

}  // namespace threatcrawl
