#pragma once

#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "yarn/bench/ablation.hpp"
#include "yarn/bench/dataset.hpp"
#include "yarn/bench/runner.hpp"
#include "yarn/cli/config.hpp"
#include "yarn/core/json_io.hpp"
#include "yarn/core/parallel.hpp"
#include "yarn/embedding/embedder.hpp"
#include "yarn/embedding/remote_backend.hpp"
#include "yarn/extraction/extractor.hpp"
#include "yarn/llm/gateway.hpp"
#include "yarn/llm/http_provider.hpp"
#include "yarn/llm/mock_provider.hpp"
#include "yarn/llm/run_log.hpp"
#include "yarn/mapping/engine.hpp"
#include "yarn/store/store.hpp"

namespace yarn::cli {

enum ExitCode { kOk = 0, kRunFailures = 1, kConfigError = 2 };

// Providers, gateways, extractors and the embedder built from a RunConfig.
// Construction validates the config, so a missing credential stops the run
// before any work.
class Runtime {
 public:
  explicit Runtime(RunConfig cfg, const EnvLookup& env = process_env) : cfg_(std::move(cfg)), store_(cfg_.store_root) {
    validate_config(cfg_, env);
    if (cfg_.log_requests) log_ = std::make_shared<llm::RunLog>(store_.run_log());
    for (const auto& [tag, m] : cfg_.models) {
      auto h = std::make_unique<Model>();
      h->provider = make_provider(m, env);
      llm::GatewayOptions go;
      go.max_in_flight = cfg_.max_in_flight;
      go.max_retries = cfg_.max_retries;
      h->gateway = std::make_unique<llm::Gateway>(h->provider, go, log_);
      extraction::ExtractorOptions eo;
      eo.max_attempts = cfg_.max_attempts;
      eo.model_tag = tag;
      h->extractor = std::make_unique<extraction::Extractor>(
          *h->gateway, m.prompts_dir ? extraction::PromptSet::from_dir(*m.prompts_dir) : extraction::PromptSet{}, eo,
          &store_);
      models_[tag] = std::move(h);
    }
    auto backend = make_embedding_backend(cfg_.embedding, env);
    embedding::EmbedderOptions eo;
    eo.cache_file = store_.embedding_cache(backend->model_id());
    embedder_ = std::make_unique<embedding::Embedder>(std::move(backend), eo);
  }

  const RunConfig& config() const noexcept { return cfg_; }
  const store::Store& store() const noexcept { return store_; }
  embedding::Embedder& embedder() { return *embedder_; }

  bool has_model(const std::string& tag) const { return models_.count(tag) != 0; }

  bench::ModelHandles model(const std::string& tag) const {
    auto it = models_.find(tag);
    if (it == models_.end()) throw ConfigError("unknown model '" + tag + "' (not in config.models)");
    return {it->second->extractor.get(), it->second->gateway.get()};
  }

  std::size_t provider_calls() const {
    std::size_t n = 0;
    for (const auto& [_, m] : models_) n += m->gateway->provider_calls();
    return n;
  }

  bench::RunContext context(bench::DatasetSchema schema) {
    bench::RunContext ctx;
    ctx.models = [this](const std::string& tag) { return model(tag); };
    ctx.embedder = embedder_.get();
    ctx.schema = schema;
    ctx.seed = *cfg_.rng_seed;
    ctx.threads = cfg_.threads;
    ctx.max_attempts = cfg_.max_attempts;
    ctx.parallel_specs = cfg_.parallel_specs;
    ctx.default_beam = cfg_.beam_n.at(std::string(bench::to_string(schema)));
    return ctx;
  }

 private:
  struct Model {
    std::shared_ptr<llm::Provider> provider;
    std::unique_ptr<llm::Gateway> gateway;
    std::unique_ptr<extraction::Extractor> extractor;
  };

  static std::string credential(const std::string& var, const EnvLookup& env) {
    return var.empty() ? std::string() : env(var).value_or("");
  }

  static std::shared_ptr<llm::Provider> make_provider(const ModelConfig& m, const EnvLookup& env) {
    if (m.provider == "mock") return std::make_shared<llm::MockProvider>(*m.fixtures_dir);
    llm::HttpProviderOptions o;
    o.base_url = m.base_url;
    o.path = m.path;
    o.model = m.model;
    o.api_key = credential(m.api_key_env, env);
    o.timeout = std::chrono::seconds(m.timeout_s);
    return std::make_shared<llm::HttpProvider>(o);
  }

  static std::shared_ptr<embedding::EmbeddingBackend> make_embedding_backend(const EmbeddingConfig& e,
                                                                             const EnvLookup& env) {
    if (e.backend == "hash") return std::make_shared<embedding::HashProjectionBackend>(e.dim);
    if (e.backend == "file") return std::make_shared<embedding::FileBackend>(*e.path, e.model);
    embedding::RemoteBackendOptions o;
    o.base_url = e.base_url;
    o.path = e.endpoint_path;
    o.model = e.model;
    o.api_key = credential(e.api_key_env, env);
    o.timeout = std::chrono::seconds(e.timeout_s);
    return std::make_shared<embedding::RemoteBackend>(o);
  }

  RunConfig cfg_;
  store::Store store_;
  std::shared_ptr<llm::RunLog> log_;
  std::map<std::string, std::unique_ptr<Model>> models_;
  std::unique_ptr<embedding::Embedder> embedder_;
};

inline extraction::Needs parse_layers(const std::vector<std::string>& names) {
  extraction::Needs n;
  for (const auto& s : names) {
    if (s == "all") {
      for (auto l : {extraction::Layer::conceptual1, extraction::Layer::stage1}) n.insert(l);
      continue;
    }
    auto l = extraction::parse_layer(s);
    if (!l) throw ConfigError("unknown layer '" + s + "'");
    n.insert(*l);
  }
  return extraction::close_needs(n);
}

struct ExtractSummary {
  std::size_t stories = 0;
  std::size_t built = 0;
  std::map<std::string, std::size_t> failures;  // task -> count
  std::vector<std::string> messages;
  std::size_t provider_calls = 0;
};

// Builds and stores the requested layers for every story of the dataset.
inline ExtractSummary cmd_extract(Runtime& rt, const std::vector<bench::BenchmarkItem>& items,
                                  const std::string& model_tag, const extraction::Needs& needs, bool force,
                                  std::ostream& out) {
  auto h = rt.model(model_tag);
  std::vector<Story> stories;
  for (const auto& it : items)
    for (auto& s : it.stories()) stories.push_back(std::move(s));
  const auto calls_before = rt.provider_calls();
  std::vector<std::string> errors(stories.size()), tasks(stories.size());
  parallel_for(stories.size(), rt.config().threads, [&](std::size_t i) {
    try {
      h.extractor->build_representation(stories[i], needs, force);
    } catch (const ExtractionFailed& e) {
      tasks[i] = e.task();
      errors[i] = e.what();
    }
  });
  ExtractSummary s;
  s.stories = stories.size();
  for (std::size_t i = 0; i < stories.size(); ++i) {
    if (tasks[i].empty()) {
      ++s.built;
      continue;
    }
    ++s.failures[tasks[i]];
    s.messages.push_back(errors[i]);
  }
  s.provider_calls = rt.provider_calls() - calls_before;
  std::vector<std::string> layer_names;
  for (auto l : needs) layer_names.emplace_back(extraction::to_string(l));
  out << "model: " << model_tag << "\n";
  out << "layers: " << text::join(layer_names, ", ") << "\n";
  out << "stories: " << s.stories << " (" << s.built << " stored)\n";
  out << "provider calls: " << s.provider_calls << "\n";
  if (s.failures.empty()) {
    out << "failures: none\n";
  } else {
    out << "failures:\n";
    for (const auto& [task, n] : s.failures) out << "  " << task << ": " << n << "\n";
    for (const auto& m : s.messages) out << "  - " << m << "\n";
  }
  return s;
}

struct EvaluateOptions {
  bool dry_run = false;
  std::string report_name = "report";
};

// Runs the grid, prints the comparison table and writes
// reports/<name>.json (records) and reports/<name>.txt (table).
inline int cmd_evaluate(Runtime& rt, const std::vector<bench::BenchmarkItem>& items, bench::DatasetSchema schema,
                        const std::vector<bench::AblationSpec>& specs, const EvaluateOptions& opts, std::ostream& out) {
  if (specs.empty()) throw ConfigError("no specs to evaluate");
  auto ctx = rt.context(schema);
  for (const auto& s : specs) {
    if (!rt.has_model(s.model_tag)) throw ConfigError("spec '" + s.name + "': unknown model '" + s.model_tag + "'");
    if (!bench::is_baseline(s)) {
      if (auto err = check_mapping_config(bench::effective_mapping(s, ctx)))
        throw ConfigError("spec '" + s.name + "': " + *err);
    }
  }
  if (opts.dry_run) {
    std::size_t total = 0;
    out << "dry run: " << specs.size() << " spec(s), " << items.size() << " item(s)\n";
    for (const auto& s : specs) {
      auto n = bench::planned_calls(items, s, ctx);
      total += n;
      out << "  " << s.name << ": " << n << " provider call(s)" << (bench::is_standard_combination(s) ? "" : " (non-standard)")
          << "\n";
    }
    out << "total planned provider calls (cold caches, no retries): " << total << "\n";
    return kOk;
  }
  auto g = bench::run_grid(specs, items, ctx);
  auto table = bench::render_table(g);
  auto records = bench::grid_records(g, items);
  const auto dir = rt.store().reports_dir();
  store::atomic_write(dir / (opts.report_name + ".json"), records.dump(2) + "\n");
  store::atomic_write(dir / (opts.report_name + ".txt"), table);
  out << table;
  out << "records: " << (dir / (opts.report_name + ".json")).string() << "\n";
  return g.any_failed() ? kRunFailures : kOk;
}

inline Representation load_rep(const Runtime& rt, const std::string& model_tag, const std::string& story_id) {
  auto rep = rt.store().load(model_tag, story_id);
  if (!rep) throw NotFound("no stored representation for story '" + story_id + "' under model '" + model_tag + "'");
  return *rep;
}

// Human-readable trace of one story-pair mapping.
inline std::string render_explanation(const mapping::PairScore& ps, const MappingConfig& config) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << "mapping: " << to_json(config).dump() << "\n";
  auto elements = [&](const char* side, const mapping::PairSourceView& v) {
    out << side << " " << v.story_id << " (" << v.size() << " element" << (v.size() == 1 ? "" : "s") << ")\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      out << "  [" << i << "] " << v.elements[i].text;
      for (const auto& [k, t] : v.elements[i].constraint_texts) out << "  {" << to_string(k) << ": " << t << "}";
      out << "\n";
    }
  };
  elements("base", ps.base_view);
  elements("target", ps.target_view);
  if (ps.fallback_used) {
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < ps.base_view.size(); ++i)
      for (std::size_t j = 0; j < ps.target_view.size(); ++j)
        if (ps.tables.element.at(i, j) > ps.tables.element.at(bi, bj)) bi = i, bj = j;
    out << "fallback: a view has a single element, so the score is the best element cosine\n";
    out << "  " << ps.base_view.elements[bi].text << "  <->  " << ps.target_view.elements[bj].text << "  "
        << ps.score << "\n";
    out << "score: " << ps.score << "\n";
    return out.str();
  }
  const auto& best = ps.greedy.best;
  out << "runs: " << ps.greedy.runs.size() << ", best run " << ps.greedy.best_run + 1 << "\n";
  out << "correspondences:\n";
  for (const auto& [a, b] : best.correspondences)
    out << "  " << ps.base_view.elements[a].text << "  <->  " << ps.target_view.elements[b].text << "\n";
  out << "kept quadruples:\n";
  for (const auto& q : best.included_quadruples)
    out << "  (" << q.s1_pair.first << "," << q.s1_pair.second << ") -> (" << q.s2_pair.first << ","
        << q.s2_pair.second << ")  " << q.score << "\n";
  out << "all quadruples (" << ps.quadruples.size() << ", rank order):\n";
  for (const auto& q : ps.quadruples)
    out << "  (" << q.s1_pair.first << "," << q.s1_pair.second << ") -> (" << q.s2_pair.first << ","
        << q.s2_pair.second << ")  " << q.score << "\n";
  out << "score: " << ps.score << "\n";
  return out.str();
}

// Loads both stored representations and prints the mapping trace, or the
// line-delimited records when as_json is set.
inline void cmd_explain(Runtime& rt, const std::string& model_tag, const std::string& base_id,
                        const std::string& target_id, const MappingConfig& config, bool as_json, std::ostream& out) {
  auto base = load_rep(rt, model_tag, base_id);
  auto target = load_rep(rt, model_tag, target_id);
  auto ps = mapping::score_story_pair_detailed(base, target, config, rt.embedder());
  if (as_json) {
    for (const auto& r : mapping::trace_records(ps, config)) out << r.dump() << "\n";
    return;
  }
  out << render_explanation(ps, config);
}

inline std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!text::is_blank(line)) ++n;
  return n;
}

inline void cmd_cache_inspect(const store::Store& st, std::ostream& out) {
  out << "store: " << st.root().string() << "\n";
  auto tags = st.model_tags();
  out << "representations:" << (tags.empty() ? " none" : "") << "\n";
  for (const auto& t : tags) out << "  " << t << ": " << st.count_reps(t) << "\n";
  out << "embedding caches:";
  const auto edir = st.root() / "embeddings";
  std::vector<std::pair<std::string, std::size_t>> caches;
  if (fs::is_directory(edir))
    for (const auto& e : fs::directory_iterator(edir))
      if (e.is_regular_file()) caches.emplace_back(e.path().filename().string(), count_lines(e.path()));
  std::sort(caches.begin(), caches.end());
  out << (caches.empty() ? " none" : "") << "\n";
  for (const auto& [f, n] : caches) out << "  " << f << ": " << n << " vectors\n";
  out << "run log: " << (fs::exists(st.run_log()) ? std::to_string(count_lines(st.run_log())) + " requests" : "none")
      << "\n";
}

// what: reps | embeddings | logs | reports | all
inline void cmd_cache_clear(const store::Store& st, const std::string& what, std::ostream& out) {
  std::vector<fs::path> targets;
  if (what == "reps" || what == "all") targets.push_back(st.root() / "reps");
  if (what == "embeddings" || what == "all") targets.push_back(st.root() / "embeddings");
  if (what == "logs" || what == "all") targets.push_back(st.run_log().parent_path());
  if (what == "reports" || what == "all") targets.push_back(st.reports_dir());
  if (targets.empty()) throw ConfigError("cache clear: unknown target '" + what + "'");
  for (const auto& p : targets) {
    auto n = fs::exists(p) ? fs::remove_all(p) : 0;
    out << "removed " << p.string() << " (" << n << " entries)\n";
  }
}

// Turns the recorded run log into mock fixtures (latest reply per tag).
inline std::size_t cmd_fixtures(const store::Store& st, const fs::path& out_dir, std::ostream& out) {
  if (!fs::exists(st.run_log())) throw NotFound("no run log at " + st.run_log().string());
  auto n = llm::harvest_fixtures(st.run_log(), out_dir);
  out << "wrote " << n << " fixture(s) to " << out_dir.string() << "\n";
  return n;
}

inline std::vector<bench::AblationSpec> load_specs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read spec file " + path.string());
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError(path.string() + ": not valid JSON");
  return bench::specs_from_json(j);
}

}  // namespace yarn::cli
