// Runs every acceptance criterion and prints one PASS/FAIL line for each.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "threatcrawl/bandit.h"
#include "threatcrawl/engine.h"
#include "threatcrawl/errors.h"
#include "threatcrawl/frontier.h"
#include "threatcrawl/metrics.h"
#include "threatcrawl/relevance.h"
#include "threatcrawl/simharness.h"

using namespace threatcrawl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_ms;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string joined_log(const std::vector<CrawlEvent>& events) {
  std::string out;
  for (const auto& e : events) out += event_line(e) + "\n";
  return out;
}

const SyntheticWeb& standard_web() {
  static const SyntheticWeb web = generate_web(standard_params(), kStandardWebSeed);
  return web;
}

Outcome harvest_formula() {
  const double a = harvest_rate(387, 6199);
  const double b = harvest_rate(2055, 8175);
  return {std::abs(a - 6.24) <= 0.01 && std::abs(b - 25.14) <= 0.01,
          "TC_BFK(500) " + fmt("%.4f", a) + "%, TC_BK(2000) " + fmt("%.4f", b) + "%"};
}

Outcome ucb_bernoulli() {
  const Action arms[] = {Action::kForward, Action::kBacklink, Action::kKeyword};
  const double p[] = {0.2, 0.5, 0.8};
  BanditState state(arms, 2024);
  std::mt19937_64 rng(2024);
  std::bernoulli_distribution coin[] = {std::bernoulli_distribution(p[0]), std::bernoulli_distribution(p[1]),
                                        std::bernoulli_distribution(p[2])};
  const PullResult empty{.source_page = normalize_url("http://bandit.test/")};
  double regret = 0.0, regret_1000 = 0.0;
  int best = 0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t i = t < 3 ? static_cast<std::size_t>(t) : static_cast<std::size_t>(select_arm(state));
    state.update(arms[i], coin[i](rng) ? 1.0 : 0.0, empty);
    regret += 0.8 - p[i];
    best += i == 2;
    if (t + 1 == 1000) regret_1000 = regret;
  }
  const double share = best / 10000.0;
  const bool sublinear = regret / 10000.0 < regret_1000 / 1000.0;
  return {share > 0.8 && sublinear, "best-arm share " + fmt("%.4f", share) + ", regret/t " +
                                        fmt("%.4f", regret_1000 / 1000.0) + " at 1000 vs " +
                                        fmt("%.4f", regret / 10000.0) + " at 10000"};
}

Outcome reward_suite() {
  std::mt19937_64 rng(77);
  int mismatches = 0, out_of_range = 0;
  for (int i = 0; i < 1000; ++i) {
    PullResult r{.source_page = normalize_url("http://subject.test/")};
    const int n = static_cast<int>(rng() % 30);
    int relevant = 0;
    for (int k = 0; k < n; ++k) {
      PageRecord page{.url = normalize_url("http://p" + std::to_string(k) + ".test/")};
      page.label = static_cast<Label>(rng() % 3);
      relevant += page.label != Label::kIrrelevant;
      r.retrieved.push_back(page);
    }
    const int domains = n == 0 ? 0 : static_cast<int>(rng() % (n + 1));
    for (int k = 0; k < domains; ++k) r.new_domains.insert(Domain{"d" + std::to_string(k) + ".test"});
    r.failed = rng() % 20 == 0;
    const double delta = static_cast<double>(rng() % 500) / 100.0;

    const double want_raw = r.failed ? 0.0 : std::max(delta * domains + relevant, 0.0);
    // The exact quotient never exceeds 1, but its rounded double can by an
    // ulp (3.57 / (3 * 1.19)); the range guarantee takes precedence.
    const double want_norm = std::min(1.0, want_raw / (std::max(1, n) * (1.0 + delta)));
    const double raw = raw_reward(r, delta);
    const double norm = normalized_reward(raw, r.retrieved.size(), delta);
    mismatches += raw != want_raw || norm != want_norm;
    out_of_range += norm < 0.0 || norm > 1.0;
  }
  return {mismatches == 0 && out_of_range == 0,
          std::to_string(mismatches) + " mismatches, " + std::to_string(out_of_range) + " out of [0,1]"};
}

Outcome relevance_suite() {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  auto random_vec = [&](std::size_t d) {
    std::vector<double> v(d);
    for (auto& x : v) x = normal(rng);
    return Embedding(std::move(v));
  };
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t d = 2 + rng() % 30;
    SeedSet seeds;
    const int n = 1 + static_cast<int>(rng() % 8);
    for (int s = 0; s < n; ++s) seeds.add(normalize_url("http://s" + std::to_string(s) + ".test/"), random_vec(d));
    const auto e = random_vec(d);
    double want = -2.0;
    for (const auto& s : seeds.embeddings()) {
      const double c = cosine_similarity(e, s);
      failures += c != cosine_similarity(s, e);
      failures += std::abs(c - cosine_similarity(e.scaled(scale(rng)), s.scaled(scale(rng)))) > 1e-12;
      failures += c < -1.0 || c > 1.0;
      want = std::max(want, c);
    }
    failures += similarity_to_set(e, seeds) != want;
    // Parallel and antiparallel vectors stay inside the clamp.
    const double self = cosine_similarity(e, e.scaled(scale(rng)));
    const double anti = cosine_similarity(e, e.scaled(-scale(rng)));
    failures += self > 1.0 || anti < -1.0;
  }
  const bool boundary = label_for(0.6, 0.6, 0.8) == Label::kRelevant &&
                        label_for(0.8, 0.6, 0.8) == Label::kSeedCandidate &&
                        label_for(std::nextafter(0.6, 0.0), 0.6, 0.8) == Label::kIrrelevant &&
                        label_for(std::nextafter(0.8, 0.0), 0.6, 0.8) == Label::kRelevant;
  return {failures == 0 && boundary,
          std::to_string(failures) + " property failures, boundary " + (boundary ? "inclusive" : "wrong")};
}

Outcome frontier_order() {
  std::mt19937_64 rng(31);
  Frontier f;
  std::set<std::pair<double, std::uint64_t>> oracle;  // (-priority, insertion index)
  std::map<std::uint64_t, std::string> url_of;
  std::set<std::string> popped;
  int disorder = 0, twice = 0, pushes = 0;
  std::uint64_t index = 0;
  auto pop = [&] {
    const auto e = f.pop_max();
    const auto want = *oracle.begin();
    oracle.erase(oracle.begin());
    if (!e || e->url.str() != url_of[want.second] || e->priority != -want.first) ++disorder;
    if (e && !popped.insert(e->url.str()).second) ++twice;
  };
  while (pushes < 10000) {
    if (rng() % 3 != 0 || oracle.empty()) {
      // Occasional repeats of earlier URLs must be rejected.
      const bool repeat = index > 0 && rng() % 10 == 0;
      const std::uint64_t id = repeat ? rng() % index : index;
      const auto url = normalize_url("http://f.test/" + std::to_string(id));
      const double p = static_cast<double>(rng() % 31) / 10.0 - 1.0;
      const bool accepted = f.push(url, p);
      if (accepted != !repeat) ++disorder;
      if (accepted) {
        oracle.insert({-p, index});
        url_of[index] = url.str();
        ++index;
        ++pushes;
      }
    } else {
      pop();
    }
  }
  while (!oracle.empty()) pop();
  if (!f.empty()) ++disorder;
  return {disorder == 0 && twice == 0, std::to_string(pushes) + " entries, " + std::to_string(disorder) +
                                           " order violations, " + std::to_string(twice) + " duplicate pops"};
}

Outcome robots_blacklist() {
  WebParams params;
  params.pages_per_cluster = 50;
  params.intra_link_prob = 0.08;
  params.inter_link_prob = 0.01;
  const auto web = generate_web(params, 7);
  SimEnvironment env(web);

  CrawlConfig cfg;
  cfg.seeds = pick_seeds(web, 6);
  cfg.max_steps = 300;
  std::set<std::string> seed_hosts;
  for (const auto& s : cfg.seeds) seed_hosts.insert(s.host());

  std::set<std::string> hosts;
  for (const auto& p : web.pages()) hosts.insert(p.url.host());
  std::map<std::string, RobotsRules> rules;
  int n = 0;
  for (const auto& h : hosts) {
    if (seed_hosts.contains(h)) continue;
    const int kind = n++ % 4;
    if (kind == 0) {
      const std::string txt = "User-agent: *\nDisallow: /p1.html\nDisallow: /p3\n";
      env.transport().set_robots(h, txt);
      rules.emplace(h, RobotsRules::parse(txt));
    } else if (kind == 1) {
      const std::string txt = "User-agent: *\nDisallow: /\n";
      env.transport().set_robots(h, txt);
      rules.emplace(h, RobotsRules::parse(txt));
    } else if (kind == 2) {
      cfg.blacklist_domains.insert(domain_of_host(h).name);
    }
  }
  const auto blacklist = Blacklist::from_config(cfg);

  auto forbidden = [&](const CanonicalUrl& u) {
    if (u.path() == "/robots.txt") return blacklist.blocks(u);
    if (blacklist.blocks(u)) return true;
    const auto it = rules.find(u.host());
    return it != rules.end() && !it->second.allowed(u, cfg.user_agent);
  };
  int forbidden_in_web = 0;
  for (const auto& p : web.pages()) forbidden_in_web += forbidden(p.url);

  Crawler crawler(cfg, env.services());
  crawler.init();
  crawler.run();

  // Forbidden URLs the crawl actually ran into as candidates.
  std::set<std::string> exposed;
  for (const auto& e : crawler.events()) {
    const auto* page = web.find(normalize_url(e.url));
    if (!page) continue;
    for (const auto& l : page->out_links) {
      if (forbidden(l)) exposed.insert(l.str());
    }
  }
  int violations = 0;
  const auto requests = env.transport().requests();
  for (const auto& r : requests) violations += forbidden(normalize_url(r));
  return {violations == 0 && !exposed.empty(),
          std::to_string(requests.size()) + " requests, " + std::to_string(violations) + " forbidden; " +
              std::to_string(forbidden_in_web) + " forbidden pages in the web, " + std::to_string(exposed.size()) +
              " met as candidates"};
}

Outcome end_to_end() {
  const auto& web = standard_web();
  const auto cfg = standard_config(web);
  const auto ucb = run_simulation(cfg, web, PolicyKind::kUcb1);
  const auto random = run_simulation(cfg, web, PolicyKind::kRandom);
  const auto again = run_simulation(cfg, web, PolicyKind::kUcb1);
  const double hr = ucb.report.harvest_rate;
  const double hr_random = random.report.harvest_rate;
  const bool ratio = hr >= 1.5 * hr_random;
  const bool absolute = hr >= 20.0;
  const bool precise = ucb.precision >= 0.8;
  const bool promoted = ucb.report.new_seeds >= 1;
  const bool identical = joined_log(ucb.events) == joined_log(again.events);
  std::string detail = "UCB1 HR " + fmt("%.2f", hr) + "% vs Random " + fmt("%.2f", hr_random) + "% (ratio " +
                       fmt("%.3f", hr_random > 0 ? hr / hr_random : 0.0) + (ratio ? " ok" : " below 1.5") +
                       "), precision " + fmt("%.3f", ucb.precision) + ", new seeds " +
                       std::to_string(ucb.report.new_seeds) + ", steps " + std::to_string(ucb.report.steps) +
                       ", logs " + (identical ? "identical" : "DIFFER");
  return {ratio && absolute && precise && promoted && identical, detail};
}

Outcome checkpoint_equivalence() {
  const auto& web = standard_web();
  auto cfg = standard_config(web);
  cfg.max_steps = 100;

  SimEnvironment env_full(web);
  Crawler full(cfg, env_full.services());
  full.init();
  full.run();

  SimEnvironment env_first(web);
  Crawler first(cfg, env_first.services());
  first.init();
  while (first.steps_taken() < 50 && first.step()) {
  }
  const auto doc = first.checkpoint();

  SimEnvironment env_resumed(web);
  auto resumed = Crawler::restore(doc, env_resumed.services());
  resumed->run();
  const bool same = joined_log(resumed->events()) == joined_log(full.events());
  return {same && full.steps_taken() == 100, "interrupted at " + std::to_string(first.steps_taken()) + ", " +
                                                 std::to_string(full.events().size()) + " events, logs " +
                                                 (same ? "identical" : "DIFFER")};
}

Outcome action_subsets() {
  const auto& web = standard_web();
  std::map<std::string, std::int64_t> pages;
  std::string detail;
  for (const char* code : {"F", "B", "K", "BF", "FK", "BK", "BFK"}) {
    auto cfg = standard_config(web);
    cfg.actions_enabled = parse_actions(code);
    const auto r = run_simulation(cfg, web, PolicyKind::kUcb1).report;
    pages[actions_code(cfg.actions_enabled)] = r.pages_total;
    detail += std::string(detail.empty() ? "" : ", ") + "TC_" + actions_code(cfg.actions_enabled) + " " +
              std::to_string(r.pages_total);
  }
  bool k_lowest = true;
  for (const auto& [code, n] : pages) {
    if (code != "K" && n <= pages["K"]) k_lowest = false;
  }
  return {k_lowest, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"harvest-rate formula", 1000, harvest_formula},
      {"UCB1 Bernoulli oracle", 1000, ucb_bernoulli},
      {"reward function suite", 1000, reward_suite},
      {"relevance suite", 5000, relevance_suite},
      {"frontier order oracle", 5000, frontier_order},
      {"robots and blacklist compliance", 5000, robots_blacklist},
      {"end-to-end simulation regression", 60000, end_to_end},
      {"checkpoint equivalence", 30000, checkpoint_equivalence},
      {"action-combination parity", 600000, action_subsets},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (ms > c.budget_ms) {
      o.pass = false;
      o.detail += "; over time budget";
    }
    failed += !o.pass;
    std::printf("%s  %-34s %s (%.0f ms)\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), ms);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
