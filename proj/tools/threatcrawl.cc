// threatcrawl: focused crawler driven by a multi-armed bandit over
// forward, backlink and keyword search.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "threatcrawl/clients.h"
#include "threatcrawl/config.h"
#include "threatcrawl/engine.h"
#include "threatcrawl/errors.h"
#include "threatcrawl/metrics.h"
#include "threatcrawl/relevance.h"
#include "threatcrawl/simharness.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace threatcrawl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitEngine = 3;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_interrupt{false};

void on_signal(int) { g_interrupt.store(true); }

// Errors caused by the user's input rather than by the run itself.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

// Overrides shared by crawl and simulate.
struct RunFlags {
  std::optional<std::string> actions;
  std::optional<std::int64_t> steps;
  std::optional<std::uint64_t> rng_seed;
  std::string policy = "ucb1";
  std::string out = "threatcrawl-out";
  std::optional<std::string> resume;
  std::int64_t stop_after = -1;  // testing aid: behave as if interrupted after this many crawl steps
};

void apply_overrides(CrawlConfig& cfg, const RunFlags& flags) {
  if (flags.actions) cfg.actions_enabled = parse_actions(*flags.actions);
  if (flags.steps) cfg.max_steps = *flags.steps;
  if (flags.rng_seed) cfg.rng_seed = *flags.rng_seed;
  validate(cfg);
}

// Live-crawl collaborators built from the configuration.
class LiveEnvironment {
 public:
  explicit LiveEnvironment(const CrawlConfig& cfg) {
    if (cfg.embedding_endpoint) {
      provider_ = std::make_unique<RemoteEmbeddingProvider>(*cfg.embedding_endpoint,
                                                            static_cast<std::size_t>(cfg.embedding_dimension));
    } else {
      provider_ = std::make_unique<HashEmbeddingProvider>(static_cast<std::size_t>(cfg.embedding_dimension));
    }
    if (cfg.clients_fixture) {
      fixture_ = std::make_unique<FixtureClients>(FixtureClients::load(*cfg.clients_fixture));
      backlinks_ = fixture_.get();
      search_ = fixture_.get();
    }
    if (cfg.backlink_endpoint) {
      http_backlinks_ = std::make_unique<HttpBacklinkClient>(
          HttpClientOptions{.endpoint = *cfg.backlink_endpoint, .param = "url", .token_env = "THREATCRAWL_BACKLINK_TOKEN"});
      backlinks_ = http_backlinks_.get();
    }
    if (cfg.search_endpoint) {
      http_search_ = std::make_unique<HttpSearchClient>(
          HttpClientOptions{.endpoint = *cfg.search_endpoint, .param = "q", .token_env = "THREATCRAWL_SEARCH_TOKEN"});
      search_ = http_search_.get();
    }
    for (const Action a : cfg.actions_enabled) {
      if (a == Action::kBacklink && !backlinks_) {
        throw InputError("action B needs backlink_endpoint or clients_fixture in the config");
      }
      if (a == Action::kKeyword && !search_) {
        throw InputError("action K needs search_endpoint or clients_fixture in the config");
      }
    }
  }

  Services services() {
    return Services{.transport = transport_,
                    .clock = clock_,
                    .provider = *provider_,
                    .extractor = extractor_,
                    .backlinks = backlinks_,
                    .search = search_,
                    .psl = &PublicSuffixList::builtin()};
  }

 private:
  HttpTransport transport_;
  SystemClock clock_;
  DensityExtractor extractor_;
  std::unique_ptr<EmbeddingProvider> provider_;
  std::unique_ptr<FixtureClients> fixture_;
  std::unique_ptr<HttpBacklinkClient> http_backlinks_;
  std::unique_ptr<HttpSearchClient> http_search_;
  BacklinkClient* backlinks_ = nullptr;
  SearchClient* search_ = nullptr;
};

// Runs (or continues) a crawl, writing events.jsonl, report.json, run.json
// and checkpoint.json into out.
int drive(Crawler& crawler, const fs::path& out, const json& extra, std::int64_t stop_after) {
  fs::create_directories(out);
  std::ofstream events(out / "events.jsonl", std::ios::binary | std::ios::trunc);
  if (!events) throw InputError("cannot write '" + (out / "events.jsonl").string() + "'");
  for (const auto& e : crawler.events()) events << event_line(e) << '\n';
  events.flush();

  crawler.set_sink([&](const CrawlEvent& e) {
    events << event_line(e) << '\n';
    events.flush();
    if (stop_after >= 0 && crawler.steps_taken() + 1 >= stop_after && e.phase == "crawl") g_interrupt.store(true);
  });
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  if (!crawler.initialized()) crawler.init();
  for (const auto& s : crawler.skipped_seeds()) std::cerr << "warning: seed skipped: " << s << '\n';
  if (stop_after == 0) g_interrupt.store(true);
  const bool done = crawler.run(&g_interrupt);
  crawler.set_sink({});

  write_file(out / "checkpoint.json", crawler.checkpoint(extra));
  write_file(out / "run.json", echo_to_json(crawler.echo()).dump(2) + "\n");
  if (!done) {
    std::cerr << "interrupted after step " << crawler.steps_taken() << "; checkpoint written to "
              << (out / "checkpoint.json").string() << '\n';
    return kExitInterrupted;
  }
  const RunReport report = crawler.report();
  write_file(out / "report.json", report_to_json(report).dump(2) + "\n");
  std::cout << format_report(report);
  return kExitOk;
}

int resume_from(const std::string& checkpoint_path, const std::optional<std::string>& out_override,
                std::int64_t stop_after, const std::string& default_out) {
  const std::string doc = read_file(checkpoint_path);
  const json extra = read_checkpoint_extra(doc);
  fs::path out = out_override ? fs::path(*out_override)
                              : (default_out.empty() ? fs::path(checkpoint_path).parent_path() : fs::path(default_out));
  if (out.empty()) out = ".";
  const CrawlConfig cfg = parse_config(json::parse(doc).at("state").at("config").dump());
  if (extra.is_object() && extra.value("mode", "") == "simulate") {
    const WebParams params = params_from_json(extra.at("params"));
    const SyntheticWeb web = generate_web(params, extra.at("web_seed").get<std::uint64_t>());
    SimEnvironment env(web, static_cast<std::size_t>(cfg.embedding_dimension));
    auto crawler = Crawler::restore(doc, env.services());
    return drive(*crawler, out, extra, stop_after);
  }
  LiveEnvironment env(cfg);
  auto crawler = Crawler::restore(doc, env.services());
  return drive(*crawler, out, extra, stop_after);
}

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--actions", flags.actions, "Enabled actions, e.g. BFK, BF, K");
  cmd->add_option("--steps", flags.steps, "Step budget after discovery");
  cmd->add_option("--rng-seed", flags.rng_seed, "Seed of the policy's random generator");
  cmd->add_option("--policy", flags.policy, "ucb1, eps or random")->check(CLI::IsMember({"ucb1", "eps", "random"}));
  cmd->add_option("--out", flags.out, "Output directory");
  cmd->add_option("--resume", flags.resume, "Continue from a checkpoint instead of starting a new run");
  cmd->add_option("--stop-after", flags.stop_after)->group("");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"threatcrawl: bandit-driven focused web crawler"};
  app.require_subcommand(1);

  RunFlags crawl_flags;
  std::string config_path;
  auto* crawl = app.add_subcommand("crawl", "Crawl the live web");
  crawl->add_option("--config", config_path, "JSON configuration file")->required();
  add_run_flags(crawl, crawl_flags);

  RunFlags sim_flags;
  sim_flags.out = "threatcrawl-sim";
  std::string fixture = "standard";
  std::optional<std::string> params_arg;
  std::uint64_t web_seed = kStandardWebSeed;
  auto* simulate = app.add_subcommand("simulate", "Crawl a generated synthetic web");
  simulate->add_option("--fixture", fixture, "Named fixture")->check(CLI::IsMember({"standard"}));
  simulate->add_option("--params", params_arg, "Web parameters as JSON text or a JSON file");
  simulate->add_option("--web-seed", web_seed, "Seed of the web generator");
  add_run_flags(simulate, sim_flags);

  std::string events_path;
  std::optional<std::string> echo_path, report_out;
  auto* report = app.add_subcommand("report", "Rebuild the report from an event log");
  report->add_option("events", events_path, "events.jsonl")->required();
  report->add_option("--run", echo_path, "run.json describing the run (default: next to the log)");
  report->add_option("--out", report_out, "Directory for report.json (default: next to the log)");

  std::string checkpoint_path;
  std::optional<std::string> resume_out;
  std::int64_t resume_stop_after = -1;
  auto* resume = app.add_subcommand("resume", "Continue an interrupted run");
  resume->add_option("checkpoint", checkpoint_path, "checkpoint.json")->required();
  resume->add_option("--out", resume_out, "Output directory (default: the checkpoint's directory)");
  resume->add_option("--stop-after", resume_stop_after)->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*crawl) {
      if (crawl_flags.resume) return resume_from(*crawl_flags.resume, crawl_flags.out, crawl_flags.stop_after, "");
      CrawlConfig cfg = load_config(config_path);
      apply_overrides(cfg, crawl_flags);
      LiveEnvironment env(cfg);
      Crawler crawler(cfg, env.services(), EngineOptions{.policy = policy_from_name(crawl_flags.policy)});
      return drive(crawler, crawl_flags.out, json{{"mode", "crawl"}}, crawl_flags.stop_after);
    }
    if (*simulate) {
      if (sim_flags.resume) return resume_from(*sim_flags.resume, sim_flags.out, sim_flags.stop_after, "");
      WebParams params = standard_params();
      if (params_arg) {
        const std::string text = params_arg->starts_with("{") ? *params_arg : read_file(*params_arg);
        try {
          params = params_from_json(json::parse(text));
        } catch (const json::parse_error& e) {
          throw InvalidParams(std::string("--params is not valid JSON: ") + e.what());
        }
      }
      const SyntheticWeb web = generate_web(params, web_seed);
      CrawlConfig cfg = standard_config(web);
      apply_overrides(cfg, sim_flags);
      SimEnvironment env(web, static_cast<std::size_t>(cfg.embedding_dimension));
      Crawler crawler(cfg, env.services(), EngineOptions{.policy = policy_from_name(sim_flags.policy)});
      const json extra = {{"mode", "simulate"}, {"params", params_to_json(params)}, {"web_seed", web_seed}};
      return drive(crawler, sim_flags.out, extra, sim_flags.stop_after);
    }
    if (*report) {
      const fs::path log(events_path);
      const fs::path dir = log.has_parent_path() ? log.parent_path() : fs::path(".");
      const fs::path run_json = echo_path ? fs::path(*echo_path) : dir / "run.json";
      ConfigEcho echo;
      if (fs::exists(run_json)) {
        echo = echo_from_json(json::parse(read_file(run_json.string())));
      } else {
        std::cerr << "warning: " << run_json.string() << " not found; report has no configuration summary\n";
      }
      std::vector<CrawlEvent> events;
      try {
        events = load_event_log(events_path);
      } catch (const std::runtime_error& e) {
        throw InputError(e.what());
      }
      const RunReport r = build_report(events, echo);
      const fs::path out = report_out ? fs::path(*report_out) : dir;
      fs::create_directories(out);
      write_file(out / "report.json", report_to_json(r).dump(2) + "\n");
      std::cout << format_report(r);
      return kExitOk;
    }
    if (*resume) return resume_from(checkpoint_path, resume_out, resume_stop_after, "");
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConstraintError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const MalformedUrl& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedScheme& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidParams& e) {
    std::cerr << "invalid simulation parameters: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ClientError& e) {
    std::cerr << "client setup error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CorruptCheckpoint& e) {
    std::cerr << "corrupt checkpoint: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "engine error: " << e.what() << '\n';
    return kExitEngine;
  }
  return kExitOk;
}
