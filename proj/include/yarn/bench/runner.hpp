#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "yarn/bench/ablation.hpp"
#include "yarn/bench/dataset.hpp"
#include "yarn/bench/report.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/parallel.hpp"
#include "yarn/core/text.hpp"
#include "yarn/embedding/embedder.hpp"
#include "yarn/extraction/extractor.hpp"
#include "yarn/llm/gateway.hpp"
#include "yarn/mapping/engine.hpp"

namespace yarn::bench {

struct ModelHandles {
  extraction::Extractor* extractor = nullptr;
  llm::Gateway* gateway = nullptr;
};

struct RunContext {
  // Resolves a spec's model_tag; throws ConfigError for unknown tags.
  std::function<ModelHandles(const std::string&)> models;
  embedding::Embedder* embedder = nullptr;
  DatasetSchema schema = DatasetSchema::arn;
  std::uint64_t seed = 0;
  int threads = 1;
  int max_attempts = 3;
  bool parallel_specs = false;
  // Beam width for specs that do not set one; the benchmark default if unset.
  std::optional<int> default_beam;
};

struct RunResult {
  std::vector<Prediction> predictions;  // item order
  std::vector<std::string> errors;      // per item; empty unless it fell back
  EvalReport report;
};

// Seeded pick used whenever an item cannot be answered. Depends only on the
// seed and the item id.
inline Prediction fallback_prediction(const BenchmarkItem& item, std::uint64_t seed) {
  Prediction p;
  p.base_id = item.base.id;
  for (const auto& t : item.targets) p.per_target_scores.push_back({t.id, -std::numeric_limits<double>::infinity()});
  p.chosen_index = text::seeded_pick(seed, "fallback", item.item_id, item.targets.size());
  p.chosen_target = item.targets[p.chosen_index].id;
  p.fallback = true;
  return p;
}

inline MappingConfig effective_mapping(const AblationSpec& spec, const RunContext& ctx) {
  MappingConfig c = spec.mapping;
  c.beam_n = spec.beam_n.value_or(ctx.default_beam.value_or(default_beam(ctx.schema)));
  c.rng_seed = ctx.seed;
  return c;
}

namespace detail {

inline ModelHandles resolve(const RunContext& ctx, const std::string& tag, bool need_gateway) {
  if (!ctx.models) throw ConfigError("no models configured");
  auto h = ctx.models(tag);
  if (!h.extractor) throw ConfigError("model '" + tag + "' has no extractor");
  if (need_gateway && !h.gateway) throw ConfigError("model '" + tag + "' has no gateway");
  return h;
}

// Runs fn per item in parallel; ExtractionFailed / PredictionFailed turn into
// the seeded fallback, anything else aborts the run.
template <typename Fn>
RunResult run_items(const std::vector<BenchmarkItem>& items, const RunContext& ctx, Fn&& fn) {
  RunResult r;
  r.predictions.resize(items.size());
  r.errors.resize(items.size());
  parallel_for(items.size(), ctx.threads, [&](std::size_t i) {
    try {
      r.predictions[i] = fn(items[i]);
    } catch (const ExtractionFailed& e) {
      r.predictions[i] = fallback_prediction(items[i], ctx.seed);
      r.errors[i] = e.what();
    } catch (const PredictionFailed& e) {
      r.predictions[i] = fallback_prediction(items[i], ctx.seed);
      r.errors[i] = e.what();
    }
  });
  r.report = score_report(r.predictions, items);
  return r;
}

}  // namespace detail

inline RunResult run_sm(const std::vector<BenchmarkItem>& items, const AblationSpec& spec, const RunContext& ctx) {
  if (spec.method != Method::sm) throw std::invalid_argument("run_sm needs an sm spec");
  if (!ctx.embedder) throw ConfigError("run_sm needs an embedder");
  const auto config = effective_mapping(spec, ctx);
  validate_mapping_config(config);
  const auto needs = extraction::needs_for(config);
  auto h = detail::resolve(ctx, spec.model_tag, false);
  return detail::run_items(items, ctx, [&](const BenchmarkItem& item) {
    auto base = h.extractor->build_representation(item.base, needs);
    std::vector<Representation> targets;
    for (const auto& t : item.targets) targets.push_back(h.extractor->build_representation(t, needs));
    return mapping::select_target(base, targets, config, *ctx.embedder);
  });
}

// Splits on ., ! or ? followed by whitespace and an uppercase letter.
inline std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '.' && s[i] != '!' && s[i] != '?') continue;
    std::size_t j = i + 1;
    while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j == i + 1 || j >= s.size() || !std::isupper(static_cast<unsigned char>(s[j]))) continue;
    out.push_back(text::trim(s.substr(start, i + 1 - start)));
    start = j;
    i = j - 1;
  }
  auto tail = text::trim(s.substr(start));
  if (!tail.empty()) out.push_back(tail);
  return out;
}

// ZS replies: the first integer in the text that is not part of a word.
inline std::optional<nlohmann::json> first_standalone_integer(std::string_view raw) {
  auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; };
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(raw[i]))) continue;
    if (i > 0 && word(raw[i - 1])) {
      while (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i]))) ++i;
      continue;
    }
    std::size_t j = i;
    while (j < raw.size() && std::isdigit(static_cast<unsigned char>(raw[j]))) ++j;
    bool decimal = j + 1 < raw.size() && raw[j] == '.' && std::isdigit(static_cast<unsigned char>(raw[j + 1]));
    if (!decimal && (j == raw.size() || !std::isalnum(static_cast<unsigned char>(raw[j]))) && j - i <= 9)
      return nlohmann::json(std::stoll(std::string(raw.substr(i, j - i))));
    i = j;
  }
  return std::nullopt;
}

// Text shown to the baseline for one story at the given granularity.
inline std::string baseline_view(const Story& story, Granularity g, extraction::Extractor& ext) {
  switch (g) {
    case Granularity::story:
      return text::trim(story.text);
    case Granularity::sentence:
      return text::join(split_sentences(story.text), "\n");
    case Granularity::event: {
      auto rep = ext.build_representation(story, {extraction::Layer::events});
      std::vector<std::string> lines;
      for (const auto& u : rep.units) lines.push_back("- " + u.phrase);
      return text::join(lines, "\n");
    }
    case Granularity::stage1: {
      auto rep = ext.build_representation(story, {extraction::Layer::stage1});
      return rep.stage.at(StageLayer::stage1).front().label;
    }
  }
  return {};
}

inline llm::ChatRequest baseline_request(const BenchmarkItem& item, const AblationSpec& spec,
                                         extraction::Extractor& ext) {
  std::string targets;
  for (std::size_t i = 0; i < item.targets.size(); ++i) {
    if (i) targets += "\n\n";
    targets += "Candidate " + std::to_string(i + 1) + ":\n" + baseline_view(item.targets[i], spec.granularity, ext);
  }
  const std::string task = spec.method == Method::llm_zs ? "baseline_zs" : "baseline_cot";
  const std::string scope =
      std::string(to_string(spec.granularity)) + "-" + std::string(to_string(spec.instruction)) + "/" + item.item_id;
  return ext.make_request(task, scope,
                          {{"instruction", instruction_text(spec.instruction)},
                           {"base", baseline_view(item.base, spec.granularity, ext)},
                           {"targets", targets}});
}

// Candidates are numbered from 1 in the prompt. A reply that never yields a
// valid number takes the seeded fallback.
inline RunResult run_llm_baseline(const std::vector<BenchmarkItem>& items, const AblationSpec& spec,
                                  const RunContext& ctx) {
  if (!is_baseline(spec)) throw std::invalid_argument("run_llm_baseline needs an llm spec");
  auto h = detail::resolve(ctx, spec.model_tag, true);
  const bool zs = spec.method == Method::llm_zs;
  return detail::run_items(items, ctx, [&](const BenchmarkItem& item) {
    const auto k = static_cast<long long>(item.targets.size());
    auto answer_of = [zs](const nlohmann::json& j) -> std::optional<long long> {
      const nlohmann::json* v = &j;
      if (!zs) {
        if (!j.is_object() || !j.contains("answer")) return std::nullopt;
        v = &j["answer"];
      }
      if (!v->is_number_integer()) return std::nullopt;
      return v->get<long long>();
    };
    llm::Schema schema = [&](const nlohmann::json& j) -> std::optional<std::string> {
      auto a = answer_of(j);
      if (!a) return "no answer number";
      if (*a < 1 || *a > k) return "answer out of range";
      return std::nullopt;
    };
    auto req = baseline_request(item, spec, *h.extractor);
    auto reply = zs ? h.gateway->complete_structured(req, schema, ctx.max_attempts, first_standalone_integer)
                    : h.gateway->complete_structured(req, schema, ctx.max_attempts);
    if (!reply.parse_ok) throw PredictionFailed("unusable answer for '" + item.item_id + "'");
    Prediction p;
    p.base_id = item.base.id;
    p.chosen_index = static_cast<std::size_t>(*answer_of(reply.extracted_payload) - 1);
    for (std::size_t i = 0; i < item.targets.size(); ++i)
      p.per_target_scores.push_back({item.targets[i].id, i == p.chosen_index ? 1.0 : 0.0});
    p.chosen_target = item.targets[p.chosen_index].id;
    return p;
  });
}

inline RunResult run_spec(const std::vector<BenchmarkItem>& items, const AblationSpec& spec, const RunContext& ctx) {
  return is_baseline(spec) ? run_llm_baseline(items, spec, ctx) : run_sm(items, spec, ctx);
}

// Provider calls a spec needs with cold caches and no retries.
inline std::size_t planned_calls(const std::vector<BenchmarkItem>& items, const AblationSpec& spec,
                                 const RunContext& ctx) {
  std::size_t stories = 0;
  for (const auto& it : items) stories += 1 + it.targets.size();
  if (!is_baseline(spec)) return stories * extraction::needs_for(effective_mapping(spec, ctx)).size();
  std::size_t per_story = 0;
  if (spec.granularity == Granularity::event) per_story = 1;
  if (spec.granularity == Granularity::stage1) per_story = extraction::close_needs({extraction::Layer::stage1}).size();
  return items.size() + stories * per_story;
}

struct GridRow {
  AblationSpec spec;
  std::optional<RunResult> result;
  std::string error;  // set when the spec aborted
};

struct GridResult {
  std::vector<GridRow> rows;
  bool any_failed() const {
    for (const auto& r : rows)
      if (!r.result) return true;
    return false;
  }
};

inline GridResult run_grid(const std::vector<AblationSpec>& specs, const std::vector<BenchmarkItem>& items,
                           const RunContext& ctx) {
  if (specs.empty()) throw std::invalid_argument("run_grid needs at least one spec");
  GridResult g;
  g.rows.resize(specs.size());
  parallel_for(specs.size(), ctx.parallel_specs ? ctx.threads : 1, [&](std::size_t i) {
    g.rows[i].spec = specs[i];
    try {
      g.rows[i].result = run_spec(items, specs[i], ctx);
    } catch (const std::exception& e) {
      g.rows[i].error = e.what();
    }
  });
  return g;
}

inline std::vector<std::string> report_columns(const GridResult& g) {
  std::set<std::string> cats;
  for (const auto& r : g.rows)
    if (r.result)
      for (const auto& [k, _] : r.result->report.per_category) cats.insert(k);
  std::vector<std::string> cols;
  for (const char* c : {"near-far", "far-far", "near-near", "far-near", "near", "far"})
    if (cats.count(c)) cols.push_back(c);
  return cols;
}

// Fixed-width comparison table: one row per spec.
inline std::string render_table(const GridResult& g) {
  const auto cols = report_columns(g);
  std::size_t w = 4;
  for (const auto& r : g.rows) w = std::max(w, r.spec.name.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(w)) << "spec" << "  " << std::right << std::setw(8) << "overall";
  for (const auto& c : cols) out << "  " << std::setw(9) << c;
  out << "  " << std::setw(5) << "fallb" << "  " << std::setw(4) << "ties" << "\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& r : g.rows) {
    out << std::left << std::setw(static_cast<int>(w)) << r.spec.name << "  " << std::right;
    if (!r.result) {
      out << "FAILED: " << r.error << "\n";
      continue;
    }
    const auto& rep = r.result->report;
    out << std::setw(8) << rep.accuracy;
    for (const auto& c : cols) {
      auto it = rep.per_category.find(c);
      if (it == rep.per_category.end()) out << "  " << std::setw(9) << "-";
      else out << "  " << std::setw(9) << it->second.accuracy;
    }
    out << "  " << std::setw(5) << rep.n_fallbacks << "  " << std::setw(4) << rep.n_ties;
    if (!is_standard_combination(r.spec)) out << "  (non-standard)";
    out << "\n";
  }
  return out.str();
}

// Machine-readable records: one object per spec with its report and
// per-item predictions.
inline nlohmann::json grid_records(const GridResult& g, const std::vector<BenchmarkItem>& items) {
  auto arr = nlohmann::json::array();
  for (const auto& r : g.rows) {
    nlohmann::json rec{{"spec", to_json(r.spec)}, {"non_standard", !is_standard_combination(r.spec)}};
    if (!r.result) {
      rec["status"] = "failed";
      rec["error"] = r.error;
      arr.push_back(rec);
      continue;
    }
    rec["status"] = "ok";
    rec["report"] = to_json(r.result->report);
    auto preds = nlohmann::json::array();
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& p = r.result->predictions[i];
      auto scores = nlohmann::json::array();
      for (const auto& ts : p.per_target_scores) {
        if (std::isfinite(ts.score)) scores.push_back(ts.score);
        else scores.push_back(nullptr);
      }
      nlohmann::json pj{{"item_id", items[i].item_id}, {"chosen_index", p.chosen_index},
                        {"gold_index", items[i].gold_index}, {"correct", p.chosen_index == items[i].gold_index},
                        {"scores", scores}, {"tie_broken", p.tie_broken}, {"fallback", p.fallback}};
      if (!r.result->errors[i].empty()) pj["error"] = r.result->errors[i];
      preds.push_back(pj);
    }
    rec["predictions"] = preds;
    arr.push_back(rec);
  }
  return arr;
}

}  // namespace yarn::bench
