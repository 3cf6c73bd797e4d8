#include "threatcrawl/simharness.h"

#include <algorithm>
#include <random>
#include <sstream>
#include <unordered_set>

#include "threatcrawl/errors.h"
#include "threatcrawl/text.h"

namespace threatcrawl {

using nlohmann::json;

json params_to_json(const WebParams& p) {
  return {{"n_clusters", p.n_clusters},
          {"relevant_clusters", p.relevant_clusters},
          {"pages_per_cluster", p.pages_per_cluster},
          {"intra_link_prob", p.intra_link_prob},
          {"inter_link_prob", p.inter_link_prob},
          {"vocab_per_cluster", p.vocab_per_cluster},
          {"noise_vocab", p.noise_vocab},
          {"words_per_page", p.words_per_page},
          {"topic_share", p.topic_share},
          {"pages_per_domain", p.pages_per_domain},
          {"words_per_sentence", p.words_per_sentence}};
}

WebParams params_from_json(const json& j) {
  if (!j.is_object()) throw InvalidParams("simulation parameters must be a JSON object");
  WebParams p;
  auto int_field = [&](const std::string& key, int& out) {
    if (!j.at(key).is_number_integer()) throw InvalidParams("'" + key + "' must be an integer");
    out = j.at(key).get<int>();
  };
  auto real_field = [&](const std::string& key, double& out) {
    if (!j.at(key).is_number()) throw InvalidParams("'" + key + "' must be a number");
    out = j.at(key).get<double>();
  };
  for (const auto& [key, _] : j.items()) {
    if (key == "n_clusters") int_field(key, p.n_clusters);
    else if (key == "relevant_clusters") int_field(key, p.relevant_clusters);
    else if (key == "pages_per_cluster") int_field(key, p.pages_per_cluster);
    else if (key == "intra_link_prob") real_field(key, p.intra_link_prob);
    else if (key == "inter_link_prob") real_field(key, p.inter_link_prob);
    else if (key == "vocab_per_cluster") int_field(key, p.vocab_per_cluster);
    else if (key == "noise_vocab") int_field(key, p.noise_vocab);
    else if (key == "words_per_page") int_field(key, p.words_per_page);
    else if (key == "topic_share") real_field(key, p.topic_share);
    else if (key == "pages_per_domain") int_field(key, p.pages_per_domain);
    else if (key == "words_per_sentence") int_field(key, p.words_per_sentence);
    else throw InvalidParams("unknown simulation parameter '" + key + "'");
  }
  validate(p);
  return p;
}

void validate(const WebParams& p) {
  auto prob = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidParams(std::string(name) + " must lie in [0, 1]");
  };
  prob(p.intra_link_prob, "intra_link_prob");
  prob(p.inter_link_prob, "inter_link_prob");
  prob(p.topic_share, "topic_share");
  if (p.n_clusters < 1 || p.pages_per_cluster < 1 || p.vocab_per_cluster < 1 || p.words_per_page < 1 ||
      p.pages_per_domain < 1 || p.words_per_sentence < 1 || p.noise_vocab < 0) {
    throw InvalidParams("counts must be at least 1");
  }
  if (p.relevant_clusters < 0 || p.relevant_clusters > p.n_clusters) {
    throw InvalidParams("relevant_clusters must lie in [0, n_clusters]");
  }
}

namespace {

// Uniform double in [0, 1), independent of the standard library's
// distribution implementations.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

// Pronounceable pseudo-words, unique and never stopwords.
std::vector<std::string> make_words(std::mt19937_64& rng, std::size_t n, std::unordered_set<std::string>& used) {
  static constexpr std::string_view kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r",
                                                 "s", "t", "v", "z", "br", "tr", "st", "kl"};
  static constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u"};
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string w;
    const std::size_t syllables = 2 + below(rng, 2);
    for (std::size_t s = 0; s < syllables; ++s) {
      w += kOnsets[below(rng, std::size(kOnsets))];
      w += kVowels[below(rng, std::size(kVowels))];
    }
    if (is_stopword(w) || !used.insert(w).second) continue;
    out.push_back(std::move(w));
  }
  return out;
}

std::string page_text(std::mt19937_64& rng, const WebParams& p, const std::vector<std::string>& topic,
                      const std::vector<std::string>& noise) {
  std::string text;
  for (int i = 0; i < p.words_per_page; ++i) {
    const bool from_topic = noise.empty() || unit(rng) < p.topic_share;
    const auto& vocab = from_topic ? topic : noise;
    std::string word = vocab[below(rng, vocab.size())];
    const bool sentence_start = i % p.words_per_sentence == 0;
    if (sentence_start) word[0] = static_cast<char>(word[0] - 'a' + 'A');
    if (i > 0) text += ' ';
    text += word;
    if ((i + 1) % p.words_per_sentence == 0 || i + 1 == p.words_per_page) text += '.';
  }
  return text;
}

std::string escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

SyntheticWeb generate_web(const WebParams& params, std::uint64_t seed) {
  validate(params);
  SyntheticWeb web;
  web.params_ = params;
  web.seed_ = seed;
  std::mt19937_64 rng(seed);

  std::unordered_set<std::string> used;
  for (int c = 0; c < params.n_clusters; ++c) {
    web.cluster_vocab_.push_back(make_words(rng, static_cast<std::size_t>(params.vocab_per_cluster), used));
  }
  web.noise_vocab_ = make_words(rng, static_cast<std::size_t>(params.noise_vocab), used);

  const HashEmbeddingProvider provider;
  for (const auto& vocab : web.cluster_vocab_) {
    std::string joined;
    for (const auto& w : vocab) joined += w + ' ';
    web.topic_vectors_.push_back(provider.embed(std::span<const std::string>(&joined, 1)).front());
  }

  for (int c = 0; c < params.n_clusters; ++c) {
    for (int j = 0; j < params.pages_per_cluster; ++j) {
      const int site = j / params.pages_per_domain;
      auto url = CanonicalUrl::parse("http://www.c" + std::to_string(c) + "s" + std::to_string(site) + ".test/p" +
                                     std::to_string(j) + ".html");
      web.index_.emplace(url, web.pages_.size());
      web.pages_.push_back(SynthPage{.url = std::move(url),
                                     .cluster_id = c,
                                     .text = page_text(rng, params, web.cluster_vocab_[c], web.noise_vocab_),
                                     .relevant = c < params.relevant_clusters});
    }
  }

  const std::size_t n = web.pages_.size();
  web.in_links_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const bool same = web.pages_[i].cluster_id == web.pages_[j].cluster_id;
      if (unit(rng) < (same ? params.intra_link_prob : params.inter_link_prob)) {
        web.pages_[i].out_links.push_back(web.pages_[j].url);
        web.in_links_[j].push_back(i);
      }
    }
  }
  return web;
}

const SynthPage* SyntheticWeb::find(const CanonicalUrl& url) const {
  const auto it = index_.find(url);
  return it == index_.end() ? nullptr : &pages_[it->second];
}

std::size_t SyntheticWeb::index_of(const CanonicalUrl& url) const {
  const auto it = index_.find(url);
  return it == index_.end() ? pages_.size() : it->second;
}

std::string SyntheticWeb::html(const SynthPage& page) const {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html><head><title>" << escape(page.url.path()) << "</title></head>\n<body>\n"
      << "<div class=\"content\">\n";
  for (const auto& sentence : split_sentences(page.text)) out << "<p>" << escape(sentence) << "</p>\n";
  out << "</div>\n<div class=\"nav-links\"><ul>\n";
  for (const auto& link : page.out_links) {
    out << "<li><a href=\"" << escape(link.str()) << "\">" << escape(link.path()) << "</a></li>\n";
  }
  out << "</ul></div>\n</body></html>\n";
  return out.str();
}

HttpResponse SimTransport::get(const CanonicalUrl& url, const RequestOptions&) {
  {
    std::lock_guard lock(mu_);
    requests_.push_back(url.str());
  }
  if (url.path() == "/robots.txt" && url.query().empty()) {
    const auto it = robots_.find(url.host());
    if (it == robots_.end()) return HttpResponse{.status = 404, .content_type = "text/plain"};
    return HttpResponse{.status = 200, .body = it->second, .content_type = "text/plain"};
  }
  const SynthPage* page = web_.find(url);
  if (!page) throw TransportError(url.str() + ": not found in the synthetic web");
  return HttpResponse{.status = 200, .body = web_.html(*page), .content_type = "text/html; charset=utf-8"};
}

void SimTransport::set_robots(const std::string& host, std::string robots_txt) {
  robots_[host] = std::move(robots_txt);
}

std::vector<std::string> SimTransport::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

std::vector<std::string> SimBacklinkClient::backlinks(const CanonicalUrl& url, std::size_t cap) {
  const std::size_t i = web_.index_of(url);
  std::vector<std::string> out;
  if (i == web_.pages().size()) return out;
  for (const std::size_t src : web_.in_links(i)) {
    if (out.size() >= cap) break;
    out.push_back(web_.pages()[src].url.str());
  }
  return out;
}

SimSearchClient::SimSearchClient(const SyntheticWeb& web) : web_(web) {
  for (const auto& page : web.pages()) {
    std::map<std::string, int> counts;
    for (auto& t : tokenize(page.text)) ++counts[t];
    counts_.push_back(std::move(counts));
  }
}

std::vector<std::string> SimSearchClient::search(const std::string& query, std::size_t cap) {
  // Terms are separated by " OR "; a quoted term matches when all its
  // tokens occur on the page.
  std::vector<std::vector<std::string>> terms;
  std::size_t pos = 0;
  while (pos <= query.size()) {
    std::size_t end = query.find(" OR ", pos);
    if (end == std::string::npos) end = query.size();
    auto tokens = tokenize(std::string_view(query).substr(pos, end - pos));
    if (!tokens.empty()) terms.push_back(std::move(tokens));
    pos = end + 4;
  }

  struct Hit {
    int matched;
    int frequency;
    std::size_t page;
  };
  std::vector<Hit> hits;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    Hit h{0, 0, i};
    for (const auto& term : terms) {
      int freq = 0;
      bool all = true;
      for (const auto& t : term) {
        const auto it = counts_[i].find(t);
        if (it == counts_[i].end()) {
          all = false;
          break;
        }
        freq += it->second;
      }
      if (all) {
        ++h.matched;
        h.frequency += freq;
      }
    }
    if (h.matched > 0) hits.push_back(h);
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
    if (a.matched != b.matched) return a.matched > b.matched;
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.page < b.page;
  });
  std::vector<std::string> out;
  for (const auto& h : hits) {
    if (out.size() >= cap) break;
    out.push_back(web_.pages()[h.page].url.str());
  }
  return out;
}

SimEnvironment::SimEnvironment(const SyntheticWeb& web, std::size_t embedding_dimension)
    : transport_(web), provider_(embedding_dimension), backlinks_(web), search_(web) {}

Services SimEnvironment::services() {
  return Services{.transport = transport_,
                  .clock = clock_,
                  .provider = provider_,
                  .extractor = extractor_,
                  .backlinks = &backlinks_,
                  .search = &search_,
                  .psl = nullptr};
}

WebParams standard_params() { return WebParams{}; }

std::vector<CanonicalUrl> pick_seeds(const SyntheticWeb& web, std::size_t count) {
  const auto& p = web.params();
  if (p.relevant_clusters < 1) throw InvalidParams("seeds need at least one relevant cluster");
  const auto max = static_cast<std::size_t>(p.relevant_clusters) * static_cast<std::size_t>(p.pages_per_cluster);
  std::vector<CanonicalUrl> out;
  for (std::size_t k = 0; k < std::min(count, max); ++k) {
    const std::size_t cluster = k % static_cast<std::size_t>(p.relevant_clusters);
    const std::size_t j = k / static_cast<std::size_t>(p.relevant_clusters);
    out.push_back(web.pages()[cluster * static_cast<std::size_t>(p.pages_per_cluster) + j].url);
  }
  return out;
}

CrawlConfig standard_config(const SyntheticWeb& web) {
  CrawlConfig cfg;
  cfg.seeds = pick_seeds(web, 17);
  cfg.max_steps = 500;
  return cfg;
}

double label_precision(const std::vector<CrawlEvent>& events, const SyntheticWeb& web) {
  std::int64_t labeled = 0, correct = 0;
  for (const auto& e : events) {
    for (const auto& r : e.retrieved) {
      if (!is_relevant(r.label)) continue;
      ++labeled;
      const SynthPage* page = web.find(CanonicalUrl::parse(r.url));
      if (page && page->relevant) ++correct;
    }
  }
  return labeled == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(labeled);
}

SimResult run_simulation(const CrawlConfig& cfg, const SyntheticWeb& web, PolicyKind policy) {
  SimEnvironment env(web, static_cast<std::size_t>(cfg.embedding_dimension));
  Crawler crawler(cfg, env.services(), EngineOptions{.policy = policy});
  crawler.run();
  SimResult out;
  out.report = crawler.report();
  out.events = crawler.events();
  out.precision = label_precision(out.events, web);
  return out;
}

}  // namespace threatcrawl
