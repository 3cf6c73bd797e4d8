#include "threatcrawl/config.h"

#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "threatcrawl/errors.h"

namespace threatcrawl {

using nlohmann::json;

char action_code(Action a) {
  switch (a) {
    case Action::kForward: return 'F';
    case Action::kBacklink: return 'B';
    case Action::kKeyword: return 'K';
  }
  return '?';
}

Action action_from_code(char c) {
  switch (c) {
    case 'F': case 'f': return Action::kForward;
    case 'B': case 'b': return Action::kBacklink;
    case 'K': case 'k': return Action::kKeyword;
    default: throw ConstraintError(std::string("unknown action code '") + c + "'");
  }
}

std::vector<Action> parse_actions(std::string_view codes) {
  bool present[3] = {false, false, false};
  for (const char c : codes) {
    const auto a = static_cast<int>(action_from_code(c));
    if (present[a]) throw ConstraintError(std::string("duplicate action code '") + c + "'");
    present[a] = true;
  }
  std::vector<Action> out;
  for (const Action a : kAllActions) {
    if (present[static_cast<int>(a)]) out.push_back(a);
  }
  if (out.empty()) throw ConstraintError("no actions enabled");
  return out;
}

std::string actions_code(const std::vector<Action>& actions) {
  std::string s;
  for (const Action a : actions) s.push_back(action_code(a));
  return s;
}

const std::set<std::string>& default_blacklist_domains() {
  static const std::set<std::string> domains = {
      "facebook.com", "fb.com",        "instagram.com", "twitter.com", "x.com",
      "t.co",         "youtube.com",   "youtu.be",      "tiktok.com",  "linkedin.com",
      "pinterest.com", "reddit.com",   "tumblr.com",    "vk.com",      "snapchat.com",
      "whatsapp.com", "telegram.org",  "discord.com",   "twitch.tv",   "vimeo.com",
      "quora.com",    "news.ycombinator.com", "flickr.com",
  };
  return domains;
}

const std::set<std::string>& default_blacklist_extensions() {
  static const std::set<std::string> exts = {
      ".png", ".jpg", ".jpeg", ".gif", ".svg", ".pdf", ".doc", ".docx", ".ppt",
      ".pptx", ".zip", ".gz", ".exe", ".dmg", ".mp4", ".mp3",
  };
  return exts;
}

void validate(const CrawlConfig& cfg) {
  if (cfg.seeds.empty()) throw ConstraintError("seeds must be nonempty");
  if (cfg.actions_enabled.empty()) throw ConstraintError("actions_enabled must be nonempty");
  auto unit = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConstraintError(std::string(name) + " must lie in [0, 1]");
  };
  unit(cfg.relevance_threshold, "relevance_threshold");
  unit(cfg.seed_threshold, "seed_threshold");
  if (cfg.seed_threshold < cfg.relevance_threshold) {
    throw ConstraintError("seed_threshold must be >= relevance_threshold");
  }
  if (cfg.max_steps < 0) throw ConstraintError("max_steps must be nonnegative");
  if (!(cfg.domain_weight >= 0.0)) throw ConstraintError("domain_weight must be nonnegative");
  if (cfg.politeness_delay_ms < 0) throw ConstraintError("politeness_delay_ms must be nonnegative");
  if (cfg.keyword_count < 1) throw ConstraintError("keyword_count must be positive");
  if (cfg.search_result_cap < 1) throw ConstraintError("search_result_cap must be positive");
  if (cfg.backlink_result_cap < 1) throw ConstraintError("backlink_result_cap must be positive");
  if (cfg.embedding_dimension < 1) throw ConstraintError("embedding_dimension must be positive");
}

namespace {

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw SchemaError(key, e.what());
  }
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw SchemaError(key, "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw SchemaError(key, "expected an integer");
  return v.get<std::int64_t>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw SchemaError(key, "expected a string");
  return v.get<std::string>();
}

std::set<std::string> get_string_set(const json& v, const std::string& key, bool lower) {
  if (!v.is_array()) throw SchemaError(key, "expected an array of strings");
  std::set<std::string> out;
  for (const auto& item : v) {
    std::string s = get_string(item, key);
    if (lower) {
      for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    out.insert(std::move(s));
  }
  return out;
}

}  // namespace

CrawlConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("<document>", e.what());
  }
  if (!doc.is_object()) throw SchemaError("<document>", "expected a JSON object");

  CrawlConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "seeds") {
      if (!value.is_array()) throw SchemaError(key, "expected an array of URL strings");
      cfg.seeds.clear();
      for (const auto& s : value) {
        try {
          cfg.seeds.push_back(normalize_url(get_string(s, key)));
        } catch (const SchemaError&) {
          throw;
        } catch (const Error& e) {
          throw SchemaError(key, e.what());
        }
      }
    } else if (key == "relevance_threshold") {
      cfg.relevance_threshold = get_number(value, key);
    } else if (key == "seed_threshold") {
      cfg.seed_threshold = get_number(value, key);
    } else if (key == "max_steps") {
      cfg.max_steps = get_integer(value, key);
    } else if (key == "domain_weight") {
      cfg.domain_weight = get_number(value, key);
    } else if (key == "actions_enabled") {
      std::string codes;
      if (value.is_string()) {
        codes = value.get<std::string>();
      } else if (value.is_array()) {
        for (const auto& a : value) {
          const auto s = get_string(a, key);
          if (s.size() != 1) throw SchemaError(key, "expected single-letter action codes");
          codes += s;
        }
      } else {
        throw SchemaError(key, "expected an action string like \"BFK\" or an array of codes");
      }
      try {
        cfg.actions_enabled = parse_actions(codes);
      } catch (const ConstraintError& e) {
        throw SchemaError(key, e.what());
      }
    } else if (key == "blacklist_domains") {
      cfg.blacklist_domains = get_string_set(value, key, true);
    } else if (key == "blacklist_extensions") {
      cfg.blacklist_extensions = get_string_set(value, key, true);
    } else if (key == "politeness_delay_ms") {
      cfg.politeness_delay_ms = get_integer(value, key);
    } else if (key == "user_agent") {
      cfg.user_agent = get_string(value, key);
    } else if (key == "rng_seed") {
      if (!value.is_number_unsigned()) throw SchemaError(key, "expected an unsigned integer");
      cfg.rng_seed = get_as<std::uint64_t>(value, key);
    } else if (key == "keyword_count") {
      cfg.keyword_count = static_cast<int>(get_integer(value, key));
    } else if (key == "search_result_cap") {
      cfg.search_result_cap = static_cast<int>(get_integer(value, key));
    } else if (key == "backlink_result_cap") {
      cfg.backlink_result_cap = static_cast<int>(get_integer(value, key));
    } else if (key == "search_endpoint") {
      cfg.search_endpoint = get_string(value, key);
    } else if (key == "backlink_endpoint") {
      cfg.backlink_endpoint = get_string(value, key);
    } else if (key == "embedding_endpoint") {
      cfg.embedding_endpoint = get_string(value, key);
    } else if (key == "clients_fixture") {
      cfg.clients_fixture = get_string(value, key);
    } else if (key == "blacklist_file") {
      cfg.blacklist_file = get_string(value, key);
    } else if (key == "embedding_dimension") {
      cfg.embedding_dimension = static_cast<int>(get_integer(value, key));
    } else {
      throw SchemaError(key, "unknown key");
    }
  }
  if (!doc.contains("seeds")) throw SchemaError("seeds", "required key missing");
  validate(cfg);
  return cfg;
}

CrawlConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("<document>", "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const CrawlConfig& cfg) {
  json doc = json::object();
  json seeds = json::array();
  for (const auto& s : cfg.seeds) seeds.push_back(s.str());
  doc["seeds"] = std::move(seeds);
  doc["relevance_threshold"] = cfg.relevance_threshold;
  doc["seed_threshold"] = cfg.seed_threshold;
  doc["max_steps"] = cfg.max_steps;
  doc["domain_weight"] = cfg.domain_weight;
  doc["actions_enabled"] = actions_code(cfg.actions_enabled);
  doc["blacklist_domains"] = cfg.blacklist_domains;
  doc["blacklist_extensions"] = cfg.blacklist_extensions;
  doc["politeness_delay_ms"] = cfg.politeness_delay_ms;
  doc["user_agent"] = cfg.user_agent;
  doc["rng_seed"] = cfg.rng_seed;
  doc["keyword_count"] = cfg.keyword_count;
  doc["search_result_cap"] = cfg.search_result_cap;
  doc["backlink_result_cap"] = cfg.backlink_result_cap;
  if (cfg.search_endpoint) doc["search_endpoint"] = *cfg.search_endpoint;
  if (cfg.backlink_endpoint) doc["backlink_endpoint"] = *cfg.backlink_endpoint;
  if (cfg.embedding_endpoint) doc["embedding_endpoint"] = *cfg.embedding_endpoint;
  if (cfg.clients_fixture) doc["clients_fixture"] = *cfg.clients_fixture;
  if (cfg.blacklist_file) doc["blacklist_file"] = *cfg.blacklist_file;
  doc["embedding_dimension"] = cfg.embedding_dimension;
  return doc.dump(2);
}

}  // namespace threatcrawl
