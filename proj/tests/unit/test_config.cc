#include <gtest/gtest.h>

#include <random>

#include "threatcrawl/config.h"
#include "threatcrawl/errors.h"

using namespace threatcrawl;

TEST(ParseConfig, SeedsOnlyTakesDefaults) {
  const auto cfg = parse_config(R"({"seeds": ["https://example.com/a"]})");
  EXPECT_EQ(cfg.relevance_threshold, 0.6);
  EXPECT_EQ(cfg.seed_threshold, 0.8);
  EXPECT_EQ(cfg.max_steps, 2000);
  EXPECT_EQ(cfg.domain_weight, 1.0);
  EXPECT_EQ(cfg.keyword_count, 3);
  EXPECT_EQ(cfg.search_result_cap, 10);
  EXPECT_EQ(cfg.backlink_result_cap, 25);
  EXPECT_EQ(actions_code(cfg.actions_enabled), "FBK");
  ASSERT_EQ(cfg.seeds.size(), 1u);
  EXPECT_EQ(cfg.seeds[0].str(), "https://example.com/a");
  EXPECT_TRUE(cfg.blacklist_domains.contains("facebook.com"));
  EXPECT_TRUE(cfg.blacklist_extensions.contains(".pdf"));
}

TEST(ParseConfig, StepBudgets) {
  EXPECT_EQ(parse_config(R"({"seeds": ["http://a.org/"], "max_steps": 500})").max_steps, 500);
  EXPECT_EQ(parse_config(R"({"seeds": ["http://a.org/"], "max_steps": 2000})").max_steps, 2000);
}

TEST(ParseConfig, SeedThresholdBelowRelevanceThreshold) {
  EXPECT_THROW(parse_config(R"({"seeds": ["http://a.org/"], "seed_threshold": 0.5, "relevance_threshold": 0.6})"),
               ConstraintError);
}

TEST(ParseConfig, SchemaErrorsNameTheKey) {
  auto key_of = [](const char* text) -> std::string {
    try {
      parse_config(text);
    } catch (const SchemaError& e) {
      return e.key();
    }
    return "<no error>";
  };
  EXPECT_EQ(key_of(R"({"seeds": ["http://a.org/"], "max_stepz": 5})"), "max_stepz");
  EXPECT_EQ(key_of(R"({"seeds": ["http://a.org/"], "max_steps": "many"})"), "max_steps");
  EXPECT_EQ(key_of(R"({"seeds": ["http://a.org/"], "relevance_threshold": "high"})"), "relevance_threshold");
  EXPECT_EQ(key_of(R"({"seeds": "http://a.org/"})"), "seeds");
  EXPECT_EQ(key_of(R"({"seeds": ["ftp://a.org/"]})"), "seeds");
  EXPECT_EQ(key_of(R"({"seeds": ["http://a.org/"], "actions_enabled": "FXK"})"), "actions_enabled");
  EXPECT_EQ(key_of(R"({"max_steps": 5})"), "seeds");
  EXPECT_EQ(key_of("not json"), "<document>");
}

TEST(ParseConfig, Constraints) {
  EXPECT_THROW(parse_config(R"({"seeds": []})"), ConstraintError);
  EXPECT_THROW(parse_config(R"({"seeds": ["http://a.org/"], "domain_weight": -1})"), ConstraintError);
  EXPECT_THROW(parse_config(R"({"seeds": ["http://a.org/"], "keyword_count": 0})"), ConstraintError);
  EXPECT_THROW(parse_config(R"({"seeds": ["http://a.org/"], "relevance_threshold": 1.5})"), ConstraintError);
}

TEST(Actions, ParseCombinationFlags) {
  EXPECT_EQ(actions_code(parse_actions("BFK")), "FBK");
  EXPECT_EQ(actions_code(parse_actions("KB")), "BK");
  EXPECT_EQ(actions_code(parse_actions("f")), "F");
  EXPECT_THROW(parse_actions(""), ConstraintError);
  EXPECT_THROW(parse_actions("FF"), ConstraintError);
  EXPECT_THROW(parse_actions("X"), ConstraintError);
}

TEST(SerializeConfig, RoundTripIsIdentity) {
  std::mt19937_64 rng(11);
  const char* combos[] = {"F", "B", "K", "BF", "FK", "BK", "BFK"};
  for (int i = 0; i < 200; ++i) {
    CrawlConfig cfg;
    const int n = 1 + static_cast<int>(rng() % 4);
    for (int s = 0; s < n; ++s) cfg.seeds.push_back(normalize_url("https://s" + std::to_string(rng() % 100) + ".org/p"));
    cfg.relevance_threshold = static_cast<double>(rng() % 1000) / 1000.0;
    cfg.seed_threshold = cfg.relevance_threshold + (1.0 - cfg.relevance_threshold) * static_cast<double>(rng() % 100) / 100.0;
    cfg.max_steps = static_cast<std::int64_t>(rng() % 5000);
    cfg.domain_weight = static_cast<double>(rng() % 300) / 100.0;
    cfg.actions_enabled = parse_actions(combos[rng() % std::size(combos)]);
    cfg.blacklist_domains = {"x" + std::to_string(rng() % 9) + ".com"};
    cfg.politeness_delay_ms = static_cast<std::int64_t>(rng() % 5000);
    cfg.user_agent = "agent/" + std::to_string(rng() % 10);
    cfg.rng_seed = rng();
    cfg.keyword_count = 1 + static_cast<int>(rng() % 5);
    if (rng() % 2) cfg.search_endpoint = "https://search.example/api";
    if (rng() % 2) cfg.clients_fixture = "fixture.json";
    const auto back = parse_config(serialize_config(cfg));
    ASSERT_EQ(back, cfg) << serialize_config(cfg);
  }
}
