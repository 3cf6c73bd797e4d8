#include "threatcrawl/engine.h"

#include <algorithm>
#include <cstdio>

#include "threatcrawl/errors.h"
#include "threatcrawl/text.h"

namespace threatcrawl {

using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_opt(const json& j, const char* key) {
  if (j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json url_list(const std::vector<CanonicalUrl>& urls) {
  json out = json::array();
  for (const auto& u : urls) out.push_back(u.str());
  return out;
}

std::vector<CanonicalUrl> read_urls(const json& j) {
  std::vector<CanonicalUrl> out;
  for (const auto& s : j) out.push_back(CanonicalUrl::parse(s.get<std::string>()));
  return out;
}

// Splits a checkpoint into its body after checking version and digest.
json open_checkpoint(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw CorruptCheckpoint(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("version") || !doc.contains("digest") || !doc.contains("state")) {
    throw CorruptCheckpoint("checkpoint lacks version, digest or state");
  }
  if (doc["version"] != kCheckpointVersion) {
    throw CorruptCheckpoint("unsupported checkpoint version " + doc["version"].dump());
  }
  const json& state = doc["state"];
  if (doc["digest"] != hex64(fnv1a64(state.dump()))) throw CorruptCheckpoint("checkpoint digest mismatch");
  return state;
}

}  // namespace

Crawler::Crawler(CrawlConfig cfg, Services services, EngineOptions options, EventSink sink)
    : cfg_(std::move(cfg)),
      services_(services),
      options_(options),
      sink_(std::move(sink)),
      fetcher_(services.transport, services.clock, FetchPolicy::from_config(cfg_), Blacklist::from_config(cfg_),
               services.psl) {
  validate(cfg_);
}

ActionContext Crawler::context() {
  return ActionContext{
      .fetcher = fetcher_,
      .backlinks = services_.backlinks,
      .search = services_.search,
      .provider = services_.provider,
      .extractor = services_.extractor,
      .seeds = seeds_,
      .cfg = cfg_,
      .psl = services_.psl,
      .known_url = [this](const CanonicalUrl& u) { return known_urls_.contains(u); },
      .known_domain = [this](const Domain& d) { return domains_.contains(d); },
  };
}

void Crawler::init() {
  if (initialized_) return;
  for (const auto& url : cfg_.seeds) {
    if (known_urls_.contains(url)) continue;
    known_urls_.insert(url);
    try {
      const FetchResult r = fetcher_.fetch(url);
      if (r.status < 200 || r.status >= 300 || (r.url != url && known_urls_.contains(r.url))) continue;
      std::string text;
      try {
        text = services_.extractor.extract(r.body);
      } catch (const NoContent&) {
        continue;
      }
      Embedding emb = embed_document(text, services_.provider);
      known_urls_.insert(r.url);
      seeds_.add(r.url, emb);
      domains_.insert(domain_of(r.url, services_.psl));
      frontier_.push(r.url, kSeedPriority);
      pending_[r.url] = Pending{.text = text,
                                .similarity = 1.0,
                                .label = Label::kSeedCandidate,
                                .origin = Origin::kSeed,
                                .step = 0,
                                .out_links = forward_links(r.body, r.url)};
    } catch (const FetchError& e) {
      skipped_seeds_.push_back(url.str() + ": " + e.what());
    } catch (const EmptyDocument& e) {
      skipped_seeds_.push_back(url.str() + ": " + e.what());
    }
  }
  if (seeds_.empty()) throw EngineError("none of the seed pages could be fetched and embedded");

  // Discovery: arm i is pulled on seed i mod |seeds|. Seeds leave the
  // frontier as they become subjects.
  std::unordered_map<CanonicalUrl, PageRecord> subjects;
  const auto seed_urls = seeds_.urls();
  auto execute = [&](Action action, const CanonicalUrl& subject) {
    auto it = subjects.find(subject);
    if (it == subjects.end()) {
      const auto entry = frontier_.pop_max();
      if (!entry || entry->url != subject) throw EngineError("seed order broken during discovery");
      it = subjects.emplace(subject, take_subject(subject)).first;
    }
    return pull(action, it->second, next_step_);
  };
  auto observe = [&](const PullResult& result, double raw, double norm) {
    record("discovery", subjects.at(result.source_page), result, raw, norm, next_step_++);
  };
  bandit_.emplace(init_discovery(seed_urls, cfg_.actions_enabled, cfg_.domain_weight, cfg_.rng_seed, execute,
                                 observe));
  initialized_ = true;
}

PageRecord Crawler::take_subject(const CanonicalUrl& url) {
  auto node = pending_.extract(url);
  if (node.empty()) throw EngineError("no page data for frontier entry " + url.str());
  Pending& p = node.mapped();
  return PageRecord{.url = url,
                    .text = std::move(p.text),
                    .similarity = p.similarity,
                    .label = p.label,
                    .discovered_by = p.origin,
                    .step = p.step,
                    .out_links = std::move(p.out_links)};
}

PullResult Crawler::pull(Action action, const PageRecord& subject, std::uint64_t step) {
  ActionContext ctx = context();
  try {
    return execute_action(action, subject, ctx, step);
  } catch (const Error& e) {
    return PullResult{.source_page = subject.url, .action = action, .failed = true, .error = e.what()};
  }
}

void Crawler::record(const std::string& phase, const PageRecord& subject, const PullResult& result, double raw,
                     double norm, std::uint64_t step) {
  CrawlEvent e{.step = step,
               .phase = phase,
               .action = result.action,
               .url = subject.url.str(),
               .origin = subject.discovered_by,
               .similarity = subject.similarity,
               .label = subject.label,
               .reward_raw = raw,
               .reward_normalized = norm,
               .failed = result.failed,
               .error = result.error};
  for (const auto& d : result.new_domains) e.new_domains.push_back(d.name);

  for (const auto& page : result.retrieved) {
    Domain d = domain_of(page.url, services_.psl);
    e.retrieved.push_back(
        RetrievedPage{.url = page.url.str(), .domain = d.name, .similarity = page.similarity, .label = page.label});
    known_urls_.insert(page.url);
    domains_.insert(std::move(d));
    if (is_relevant(page.label) && page.similarity) {
      if (frontier_.push(page.url, std::clamp(*page.similarity, -1.0, 1.0))) {
        pending_[page.url] = Pending{.text = page.text,
                                     .similarity = page.similarity,
                                     .label = page.label,
                                     .origin = page.discovered_by,
                                     .step = page.step,
                                     .out_links = page.out_links};
      }
    }
  }
  // Promotion happens after the pull so every page of one pull is judged
  // against the same seed set.
  for (const auto& page : result.retrieved) {
    if (page.label == Label::kSeedCandidate && page.embedding) seeds_.add(page.url, *page.embedding);
  }
  e.timestamp = services_.clock.now_ms();
  emit(std::move(e));
}

void Crawler::emit(CrawlEvent e) {
  events_.push_back(std::move(e));
  if (sink_) sink_(events_.back());
}

bool Crawler::finished() const {
  return should_stop(StopState{.steps_taken = steps_taken_, .budget = cfg_.max_steps, .frontier_empty = frontier_.empty()});
}

bool Crawler::step() {
  if (!initialized_) throw EngineError("step before init");
  if (finished()) return false;
  const auto entry = frontier_.pop_max();
  const PageRecord subject = take_subject(entry->url);
  const Action action = select_arm(*bandit_, options_.policy, options_.epsilon);
  const std::uint64_t step = next_step_++;
  PullResult result = pull(action, subject, step);
  const double raw = result.failed ? 0.0 : raw_reward(result, cfg_.domain_weight);
  const double norm = normalized_reward(raw, result.retrieved.size(), cfg_.domain_weight);
  bandit_->update(action, norm, result);
  record("crawl", subject, result, raw, norm, step);
  ++steps_taken_;
  return true;
}

bool Crawler::run(const std::atomic<bool>* interrupt) {
  if (!initialized_) init();
  while (!finished()) {
    if (interrupt && interrupt->load()) return false;
    step();
  }
  return true;
}

ConfigEcho Crawler::echo() const {
  return make_echo(cfg_, policy_name(options_.policy), services_.provider.model_id());
}

RunReport Crawler::report() const { return build_report(events_, echo()); }

std::string Crawler::checkpoint(const json& extra) const {
  if (!initialized_) throw EngineError("checkpoint before init");
  json frontier_entries = json::array();
  for (const auto& e : frontier_.entries()) {
    frontier_entries.push_back({{"priority", e.priority}, {"seq", e.seq}, {"url", e.url.str()}});
  }
  std::vector<std::string> pending_keys;
  for (const auto& [url, _] : pending_) pending_keys.push_back(url.str());
  std::sort(pending_keys.begin(), pending_keys.end());
  json pending = json::array();
  for (const auto& key : pending_keys) {
    const Pending& p = pending_.at(CanonicalUrl::parse(key));
    pending.push_back({{"url", key},
                       {"text", p.text},
                       {"similarity", opt_number(p.similarity)},
                       {"label", label_name(p.label)},
                       {"origin", origin_name(p.origin)},
                       {"step", p.step},
                       {"out_links", url_list(p.out_links)}});
  }
  json seeds = json::array();
  for (std::size_t i = 0; i < seeds_.size(); ++i) {
    const auto v = seeds_.embeddings()[i].values();
    seeds.push_back({{"url", seeds_.urls()[i].str()}, {"embedding", std::vector<double>(v.begin(), v.end())}});
  }
  json arms = json::array();
  for (const auto& a : bandit_->arms()) {
    arms.push_back({{"action", std::string(1, action_code(a.action))},
                    {"pulls", a.pulls},
                    {"mean_reward", a.mean_reward},
                    {"cumulative_similarity", a.cumulative_similarity},
                    {"pages_retrieved", a.pages_retrieved}});
  }
  std::vector<std::string> known(known_urls_.size());
  std::transform(known_urls_.begin(), known_urls_.end(), known.begin(), [](const CanonicalUrl& u) { return u.str(); });
  std::sort(known.begin(), known.end());
  json domains = json::array();
  for (const auto& d : domains_) domains.push_back(d.name);
  json events = json::array();
  for (const auto& e : events_) events.push_back(event_to_json(e));
  const auto fs = fetcher_.state();
  std::optional<std::int64_t> clock_ms;
  if (dynamic_cast<ManualClock*>(&services_.clock)) clock_ms = services_.clock.now_ms();

  json state = {
      {"config", json::parse(serialize_config(cfg_))},
      {"policy", policy_name(options_.policy)},
      {"epsilon", options_.epsilon},
      {"next_step", next_step_},
      {"steps_taken", steps_taken_},
      {"frontier", {{"entries", frontier_entries}, {"seen", url_list(frontier_.seen_urls())}, {"next_seq", frontier_.next_seq()}}},
      {"pending", pending},
      {"seeds", seeds},
      {"skipped_seeds", skipped_seeds_},
      {"bandit", {{"arms", arms}, {"rng", bandit_->rng_state()}}},
      {"known_urls", known},
      {"domains", domains},
      {"events", events},
      {"fetcher", {{"robots", fs.robots}, {"last_request_ms", fs.last_request_ms}}},
      {"clock_ms", clock_ms ? json(*clock_ms) : json(nullptr)},
      {"extra", extra},
  };
  json doc = {{"version", kCheckpointVersion}, {"digest", hex64(fnv1a64(state.dump()))}, {"state", state}};
  return doc.dump();
}

std::unique_ptr<Crawler> Crawler::restore(const std::string& document, Services services, EventSink sink) {
  const json state = open_checkpoint(document);
  try {
    CrawlConfig cfg = parse_config(state.at("config").dump());
    EngineOptions options{.policy = policy_from_name(state.at("policy").get<std::string>()),
                          .epsilon = state.at("epsilon").get<double>()};
    auto c = std::make_unique<Crawler>(std::move(cfg), services, options, std::move(sink));
    c->next_step_ = state.at("next_step").get<std::uint64_t>();
    c->steps_taken_ = state.at("steps_taken").get<std::int64_t>();

    const json& f = state.at("frontier");
    std::vector<FrontierEntry> entries;
    for (const auto& e : f.at("entries")) {
      entries.push_back(FrontierEntry{.priority = e.at("priority").get<double>(),
                                      .seq = e.at("seq").get<std::uint64_t>(),
                                      .url = CanonicalUrl::parse(e.at("url").get<std::string>())});
    }
    c->frontier_ = Frontier::restore(std::move(entries), read_urls(f.at("seen")), f.at("next_seq").get<std::uint64_t>());

    for (const auto& p : state.at("pending")) {
      const auto origin = p.at("origin").get<std::string>();
      c->pending_[CanonicalUrl::parse(p.at("url").get<std::string>())] =
          Pending{.text = p.at("text").get<std::string>(),
                  .similarity = read_opt(p, "similarity"),
                  .label = label_from_name(p.at("label").get<std::string>()),
                  .origin = origin == "seed" ? Origin::kSeed : origin_from_action(action_from_code(origin.at(0))),
                  .step = p.at("step").get<std::uint64_t>(),
                  .out_links = read_urls(p.at("out_links"))};
    }
    for (const auto& s : state.at("seeds")) {
      c->seeds_.add(CanonicalUrl::parse(s.at("url").get<std::string>()),
                    Embedding(s.at("embedding").get<std::vector<double>>()));
    }
    c->skipped_seeds_ = state.at("skipped_seeds").get<std::vector<std::string>>();

    BanditState bandit(c->cfg_.actions_enabled, c->cfg_.rng_seed);
    std::vector<ArmStats> arms;
    for (const auto& a : state.at("bandit").at("arms")) {
      arms.push_back(ArmStats{.action = action_from_code(a.at("action").get<std::string>().at(0)),
                              .pulls = a.at("pulls").get<std::uint64_t>(),
                              .mean_reward = a.at("mean_reward").get<double>(),
                              .cumulative_similarity = a.at("cumulative_similarity").get<double>(),
                              .pages_retrieved = a.at("pages_retrieved").get<std::uint64_t>()});
    }
    bandit.restore_arms(std::move(arms));
    bandit.set_rng_state(state.at("bandit").at("rng").get<std::string>());
    c->bandit_.emplace(std::move(bandit));

    for (const auto& u : state.at("known_urls")) c->known_urls_.insert(CanonicalUrl::parse(u.get<std::string>()));
    for (const auto& d : state.at("domains")) c->domains_.insert(Domain{d.get<std::string>()});
    for (const auto& e : state.at("events")) c->events_.push_back(event_from_json(e));

    const json& fs = state.at("fetcher");
    c->fetcher_.restore(Fetcher::State{
        .robots = fs.at("robots").get<std::map<std::string, std::string>>(),
        .last_request_ms = fs.at("last_request_ms").get<std::map<std::string, std::int64_t>>()});
    if (!state.at("clock_ms").is_null()) {
      if (auto* manual = dynamic_cast<ManualClock*>(&services.clock)) manual->set(state.at("clock_ms").get<std::int64_t>());
    }
    c->initialized_ = true;
    return c;
  } catch (const CorruptCheckpoint&) {
    throw;
  } catch (const std::exception& e) {
    throw CorruptCheckpoint(std::string("unreadable checkpoint state: ") + e.what());
  }
}

json read_checkpoint_extra(const std::string& document) { return open_checkpoint(document).at("extra"); }

}  // namespace threatcrawl
