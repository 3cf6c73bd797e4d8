#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "json.hpp"
#include "threatcrawl/bandit.h"
#include "threatcrawl/config.h"
#include "threatcrawl/errors.h"
#include "threatcrawl/fetcher.h"
#include "threatcrawl/html.h"
#include "threatcrawl/keywords.h"
#include "threatcrawl/metrics.h"
#include "threatcrawl/relevance.h"
#include "threatcrawl/simharness.h"

namespace py = pybind11;
using namespace threatcrawl;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; json.loads is cheap and keeps the
// binding free of a converter.
py::object to_python(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }
json from_python(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Embedding to_embedding(const std::vector<double>& v) { return Embedding(v); }

std::vector<double> to_list(const Embedding& e) { return {e.values().begin(), e.values().end()}; }

py::dict simulate(const py::object& params, std::uint64_t web_seed, const std::string& actions,
                  std::int64_t steps, const std::string& policy, std::optional<std::uint64_t> rng_seed) {
  const WebParams p = params.is_none() ? standard_params() : params_from_json(from_python(params));
  SimResult result;
  {
    py::gil_scoped_release release;
    const SyntheticWeb web = generate_web(p, web_seed);
    CrawlConfig cfg = standard_config(web);
    cfg.actions_enabled = parse_actions(actions);
    cfg.max_steps = steps;
    if (rng_seed) cfg.rng_seed = *rng_seed;
    result = run_simulation(cfg, web, policy_from_name(policy));
  }
  py::list events;
  for (const auto& e : result.events) events.append(to_python(event_to_json(e)));
  py::dict out;
  out["report"] = to_python(report_to_json(result.report));
  out["precision"] = result.precision;
  out["events"] = events;
  out["table"] = format_report(result.report);
  return out;
}

py::dict report_from_events(const std::string& events_jsonl, const py::object& run) {
  std::istringstream in(events_jsonl);
  const auto events = read_event_log(in);
  const ConfigEcho echo = run.is_none() ? ConfigEcho{} : echo_from_json(from_python(run));
  return to_python(report_to_json(build_report(events, echo))).cast<py::dict>();
}

}  // namespace

PYBIND11_MODULE(_threatcrawl, m) {
  m.doc() = "Focused threat-intelligence crawler core";

  auto base = py::register_exception<Error>(m, "ThreatcrawlError", PyExc_RuntimeError);
  py::register_exception<MalformedUrl>(m, "MalformedUrl", base);
  py::register_exception<UnsupportedScheme>(m, "UnsupportedScheme", base);
  py::register_exception<ConstraintError>(m, "ConstraintError", base);
  py::register_exception<SchemaError>(m, "SchemaError", base);
  py::register_exception<EmptyDocument>(m, "EmptyDocument", base);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", base);
  py::register_exception<ZeroVector>(m, "ZeroVector", base);
  py::register_exception<NoContent>(m, "NoContent", base);
  py::register_exception<CountInconsistent>(m, "CountInconsistent", base);
  py::register_exception<InvalidParams>(m, "InvalidParams", base);

  m.def(
      "normalize_url",
      [](const std::string& raw, const std::optional<std::string>& base_url) {
        std::optional<CanonicalUrl> b;
        if (base_url) b = normalize_url(*base_url);
        return normalize_url(raw, b).str();
      },
      py::arg("url"), py::arg("base") = py::none());
  m.def(
      "domain_of", [](const std::string& url) { return domain_of(normalize_url(url), &PublicSuffixList::builtin()).name; },
      py::arg("url"));

  m.def(
      "parse_config", [](const std::string& text) { return to_python(json::parse(serialize_config(parse_config(text)))); },
      py::arg("text"), "Validates a JSON config and returns it with defaults filled in.");

  m.def(
      "cosine_similarity",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine_similarity(to_embedding(a), to_embedding(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "similarity_to_set",
      [](const std::vector<double>& e, const std::vector<std::vector<double>>& seeds) {
        SeedSet set;
        for (std::size_t i = 0; i < seeds.size(); ++i) {
          set.add(normalize_url("http://seed" + std::to_string(i) + ".invalid/"), to_embedding(seeds[i]));
        }
        return similarity_to_set(to_embedding(e), set);
      },
      py::arg("embedding"), py::arg("seeds"));
  m.def(
      "label_for",
      [](double sim, double relevance, double seed) { return std::string(label_name(label_for(sim, relevance, seed))); },
      py::arg("similarity"), py::arg("relevance_threshold") = 0.6, py::arg("seed_threshold") = 0.8);
  m.def(
      "hash_embed",
      [](const std::vector<std::string>& texts, std::size_t dimension, std::uint64_t seed) {
        const HashEmbeddingProvider p(dimension, seed);
        std::vector<std::vector<double>> out;
        for (const auto& e : p.embed(texts)) out.push_back(to_list(e));
        return out;
      },
      py::arg("texts"), py::arg("dimension") = 512, py::arg("seed") = 0);
  m.def(
      "embed_document",
      [](const std::string& text, std::size_t dimension, std::uint64_t seed) {
        return to_list(embed_document(text, HashEmbeddingProvider(dimension, seed)));
      },
      py::arg("text"), py::arg("dimension") = 512, py::arg("seed") = 0);

  m.def(
      "reward",
      [](std::size_t relevant, std::size_t retrieved, std::size_t new_domains, double domain_weight, bool failed) {
        if (relevant > retrieved) throw CountInconsistent("more relevant pages than retrieved pages");
        PullResult r{.source_page = normalize_url("http://subject.invalid/"), .failed = failed};
        for (std::size_t i = 0; i < retrieved; ++i) {
          PageRecord page{.url = normalize_url("http://p" + std::to_string(i) + ".invalid/")};
          page.label = i < relevant ? Label::kRelevant : Label::kIrrelevant;
          r.retrieved.push_back(std::move(page));
        }
        for (std::size_t i = 0; i < new_domains; ++i) r.new_domains.insert(Domain{"d" + std::to_string(i) + ".invalid"});
        const double raw = raw_reward(r, domain_weight);
        return std::make_pair(raw, normalized_reward(raw, retrieved, domain_weight));
      },
      py::arg("relevant"), py::arg("retrieved"), py::arg("new_domains"), py::arg("domain_weight") = 1.0,
      py::arg("failed") = false, "Returns (raw, normalized) for a pull with the given counts.");
  m.def(
      "ucb1_index",
      [](double mean, std::uint64_t pulls, std::uint64_t total) {
        return ucb1_index(ArmStats{.pulls = pulls, .mean_reward = mean}, total);
      },
      py::arg("mean"), py::arg("pulls"), py::arg("total_pulls"));
  m.def("harvest_rate", &harvest_rate, py::arg("relevant"), py::arg("total"));

  m.def("extract_main_content", &extract_main_content, py::arg("html"));
  m.def(
      "forward_links",
      [](const std::string& html, const std::string& base) {
        std::vector<std::string> out;
        for (const auto& u : forward_links(html, normalize_url(base))) out.push_back(u.str());
        return out;
      },
      py::arg("html"), py::arg("base"));
  m.def(
      "extract_keywords",
      [](const std::string& text, int k, std::size_t dimension) {
        return extract_keywords(text, k, HashEmbeddingProvider(dimension)).keywords;
      },
      py::arg("text"), py::arg("k") = 3, py::arg("dimension") = 512);
  m.def(
      "keyword_query", [](const std::vector<std::string>& kw) { return keyword_query(KeywordSet{kw}); },
      py::arg("keywords"));
  m.def(
      "robots_allowed",
      [](const std::string& robots, const std::string& url, const std::string& agent) {
        return allowed_by_robots(robots, normalize_url(url), agent);
      },
      py::arg("robots_txt"), py::arg("url"), py::arg("user_agent") = "threatcrawl/0.1");

  m.def("simulate", &simulate, py::arg("params") = py::none(), py::arg("web_seed") = kStandardWebSeed,
        py::arg("actions") = "FBK", py::arg("steps") = 500, py::arg("policy") = "ucb1", py::arg("rng_seed") = py::none(),
        "Crawls a synthetic web; the defaults are the standard fixture.");
  m.def("report_from_events", &report_from_events, py::arg("events_jsonl"), py::arg("run") = py::none(),
        "Rebuilds a run report from the text of an events.jsonl file.");
}
