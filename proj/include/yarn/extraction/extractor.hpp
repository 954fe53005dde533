#pragma once

// Story -> Representation through the chat gateway.
//
// Requests are tagged "<task>/<story_id>" so that recorded replies can be
// replayed per task and story.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/model.hpp"
#include "yarn/core/parallel.hpp"
#include "yarn/core/text.hpp"
#include "yarn/extraction/parsers.hpp"
#include "yarn/extraction/prompts.hpp"
#include "yarn/llm/gateway.hpp"
#include "yarn/store/store.hpp"

namespace yarn::extraction {

enum class Layer { events, temporal, conceptual0, conceptual1, evaluative, arc, stage0, stage1 };

inline std::string_view to_string(Layer l) {
  switch (l) {
    case Layer::events: return "events";
    case Layer::temporal: return "temporal";
    case Layer::conceptual0: return "conceptual0";
    case Layer::conceptual1: return "conceptual1";
    case Layer::evaluative: return "evaluative";
    case Layer::arc: return "arc";
    case Layer::stage0: return "stage0";
    case Layer::stage1: return "stage1";
  }
  return "?";
}

inline std::optional<Layer> parse_layer(std::string_view s) {
  for (auto l : {Layer::events, Layer::temporal, Layer::conceptual0, Layer::conceptual1, Layer::evaluative,
                 Layer::arc, Layer::stage0, Layer::stage1})
    if (to_string(l) == s) return l;
  return std::nullopt;
}

using Needs = std::set<Layer>;

// Adds every layer the requested ones are built from.
inline Needs close_needs(Needs n) {
  if (n.count(Layer::stage1)) n.insert({Layer::stage0, Layer::evaluative});
  if (n.count(Layer::stage0)) n.insert(Layer::arc);
  if (n.count(Layer::conceptual1)) n.insert(Layer::conceptual0);
  if (std::any_of(n.begin(), n.end(), [](Layer l) { return l != Layer::events; })) n.insert(Layer::temporal);
  n.insert(Layer::events);
  return n;
}

// Layers needed to score under a mapping configuration.
inline Needs needs_for(const MappingConfig& c) {
  Needs n{Layer::events, Layer::temporal};
  if (c.pair_source == PairSource::conceptual)
    n.insert(c.conceptual_level == 0 ? Layer::conceptual0 : Layer::conceptual1);
  if (c.pair_source == PairSource::stage) n.insert(c.stage_layer == StageLayer::stage0 ? Layer::stage0 : Layer::stage1);
  if (c.constraints.count(Constraint::evaluative)) n.insert(Layer::evaluative);
  if (c.constraints.count(Constraint::arc)) n.insert(Layer::arc);
  return close_needs(n);
}

// Representation restricted to the given (closed) layers.
inline Representation restrict_layers(Representation r, const Needs& n) {
  if (!n.count(Layer::temporal))
    for (auto& u : r.units) u.temporal_index.reset();
  if (!n.count(Layer::conceptual0)) r.conceptual.erase(0);
  if (!n.count(Layer::conceptual1)) r.conceptual.erase(1);
  if (!n.count(Layer::evaluative)) r.evaluative.reset();
  if (!n.count(Layer::arc)) r.arc.reset();
  if (!n.count(Layer::stage0)) r.stage.erase(StageLayer::stage0);
  if (!n.count(Layer::stage1)) r.stage.erase(StageLayer::stage1);
  return r;
}

// Fraction of the story's distinct words that appear in some unit.
inline double coverage_ratio(const std::string& story_text, const std::vector<EventUnit>& units) {
  auto story_words = text::split_words(story_text);
  std::set<std::string> have;
  for (const auto& u : units)
    for (auto& w : text::split_words(u.phrase)) have.insert(w);
  std::set<std::string> distinct(story_words.begin(), story_words.end());
  if (distinct.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& w : distinct) hit += have.count(w);
  return static_cast<double>(hit) / static_cast<double>(distinct.size());
}

// True when `prompt` contains `window` consecutive words of `story_text`.
inline bool shares_word_window(const std::string& prompt, const std::string& story_text, std::size_t window) {
  auto sw = text::split_words(story_text);
  auto pw = text::split_words(prompt);
  if (sw.size() < window || pw.size() < window) return false;
  std::set<std::vector<std::string>> grams;
  for (std::size_t i = 0; i + window <= sw.size(); ++i) grams.emplace(sw.begin() + i, sw.begin() + i + window);
  for (std::size_t i = 0; i + window <= pw.size(); ++i)
    if (grams.count(std::vector<std::string>(pw.begin() + i, pw.begin() + i + window))) return true;
  return false;
}

// Groups units by arc stage. Groups are ordered by their earliest member
// (temporal index, extraction index as tiebreak); members ascend.
inline std::vector<std::vector<std::size_t>> stage_groups(const std::vector<EventUnit>& units,
                                                          const std::vector<ArcLabel>& arc) {
  if (arc.size() != units.size()) throw std::invalid_argument("arc layer does not match the units");
  auto pos = [&](std::size_t i) {
    long t = units[i].temporal_index ? *units[i].temporal_index : static_cast<long>(i) + 1;
    return std::pair<long, std::size_t>{t, i};
  };
  std::map<ArcStage, std::vector<std::size_t>> by_stage;
  for (std::size_t i = 0; i < units.size(); ++i) by_stage[arc[i].stage].push_back(i);
  std::vector<std::vector<std::size_t>> groups;
  for (auto& [_, m] : by_stage) groups.push_back(m);
  auto first = [&](const std::vector<std::size_t>& g) {
    auto best = pos(g.front());
    for (auto i : g) best = std::min(best, pos(i));
    return best;
  };
  std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) { return first(a) < first(b); });
  return groups;
}

struct ExtractorOptions {
  int max_attempts = 3;
  // Namespace for stored representations (one per extraction model).
  std::string model_tag = "default";
};

class Extractor {
 public:
  Extractor(llm::Gateway& gateway, PromptSet prompts = {}, ExtractorOptions opts = {},
            const store::Store* store = nullptr)
      : gw_(gateway), prompts_(std::move(prompts)), opts_(std::move(opts)), store_(store) {
    if (opts_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
  }

  struct EventsResult {
    std::vector<EventUnit> units;
    std::size_t dropped_duplicates = 0;
  };

  EventsResult extract_events_detailed(const Story& story) {
    check_story(story);
    auto phrases = ask<std::vector<std::string>>(
        "events", story.id, {{"story", story.text}}, [](const json& j) { return parse_events(j); },
        lenient_event_payload);
    EventsResult r;
    std::set<std::string> seen;
    for (auto& p : phrases) {
      auto norm = normalize_phrase(p);
      if (norm.empty()) continue;
      if (!seen.insert(norm).second) {
        ++r.dropped_duplicates;
        continue;
      }
      r.units.push_back({r.units.size(), p, std::nullopt});
    }
    if (r.units.empty()) throw ExtractionFailed(story.id, "events", "model returned no events");
    return r;
  }

  std::vector<EventUnit> extract_events(const Story& story) { return extract_events_detailed(story).units; }

  struct TemporalResult {
    std::vector<EventUnit> units;
    bool fallback = false;
    std::string reason;
  };

  // Never throws on bad replies: falls back to textual order and says so.
  TemporalResult assign_temporal_order(const Story& story, std::vector<EventUnit> units) {
    check_story(story);
    check_units(units);
    TemporalResult r;
    try {
      auto idx = ask<std::vector<int>>(
          "temporal", story.id, {{"story", story.text}, {"phrases", numbered(units)}},
          [n = units.size()](const json& j) { return parse_temporal(j, n); });
      for (std::size_t i = 0; i < units.size(); ++i) units[i].temporal_index = idx[i];
    } catch (const ExtractionFailed& e) {
      r.fallback = true;
      r.reason = e.what();
      for (std::size_t i = 0; i < units.size(); ++i) units[i].temporal_index = static_cast<int>(i) + 1;
    }
    r.units = std::move(units);
    return r;
  }

  std::vector<ConceptualAbstraction> abstract_conceptual(const Story& story, const std::vector<EventUnit>& units,
                                                         int level,
                                                         const std::optional<std::vector<ConceptualAbstraction>>& prior) {
    check_story(story);
    check_units(units);
    if (level != 0 && level != 1) throw std::invalid_argument("conceptual level must be 0 or 1");
    if (level == 0 && prior) throw std::invalid_argument("level 0 takes no prior abstractions");
    if (level == 1 && (!prior || prior->size() != units.size()))
      throw std::invalid_argument("level 1 needs level 0 abstractions for every unit");
    json phrases = json::array();
    for (std::size_t i = 0; i < units.size(); ++i) {
      json p{{"id", "p" + std::to_string(i + 1)}, {"text", units[i].phrase}};
      if (prior) p["frame"] = text::to_upper(render_conceptual((*prior)[i], ConceptualRender::modifier_and_root));
      phrases.push_back(std::move(p));
    }
    const std::string task = "conceptual_level" + std::to_string(level);
    return ask<std::vector<ConceptualAbstraction>>(
        task, story.id, {{"story", story.text}, {"phrases", phrases.dump()}},
        [n = units.size(), level](const json& j) { return parse_conceptual(j, n, level); });
  }

  std::vector<EvaluativeLabel> abstract_evaluative(const Story& story, const std::vector<EventUnit>& units) {
    check_story(story);
    check_units(units);
    return ask<std::vector<EvaluativeLabel>>("evaluative", story.id,
                                             {{"story", story.text}, {"phrases", id_list(units)}},
                                             [n = units.size()](const json& j) { return parse_evaluative(j, n); });
  }

  std::vector<ArcLabel> abstract_arc(const Story& story, const std::vector<EventUnit>& units) {
    check_story(story);
    check_units(units);
    return ask<std::vector<ArcLabel>>("arc", story.id, {{"story", story.text}, {"phrases", id_list(units)}},
                                      [n = units.size()](const json& j) { return parse_arc(j, n); });
  }

  std::vector<StageAbstraction> abstract_stage0(const Story& story, const std::vector<EventUnit>& units,
                                                const std::vector<ArcLabel>& arc) {
    check_story(story);
    check_units(units);
    auto groups = stage_groups(units, arc);
    std::string listing;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      listing += std::to_string(g + 1) + ". " + arc_display_name(arc[groups[g].front()].stage) + ":";
      for (auto i : groups[g]) listing += " [" + units[i].phrase + "]";
      listing += "\n";
    }
    auto labels = ask<std::vector<std::string>>(
        "stage0", story.id, {{"story", story.text}, {"groups", listing}},
        [n = groups.size()](const json& j) { return parse_stage0(j, n); });
    std::vector<StageAbstraction> out;
    for (std::size_t g = 0; g < groups.size(); ++g) out.push_back({StageLayer::stage0, groups[g], labels[g]});
    return out;
  }

  // Built from the stage0 labels and the arc and evaluative sequences only.
  // `story` supplies the id and is used to check that none of its text
  // reaches the prompt.
  StageAbstraction abstract_stage1(const Story& story, const std::vector<StageAbstraction>& stage0,
                                   const std::vector<ArcLabel>& arc, const std::vector<EvaluativeLabel>& evaluative) {
    if (stage0.empty()) throw std::invalid_argument("stage1 needs stage0 abstractions");
    if (arc.size() != evaluative.size()) throw std::invalid_argument("arc and evaluative layers differ in length");
    std::vector<std::size_t> members;
    for (const auto& s : stage0) members.insert(members.end(), s.members.begin(), s.members.end());
    std::sort(members.begin(), members.end());
    if (members.size() != arc.size()) throw std::invalid_argument("stage0 does not cover the arc layer");

    std::string labels, arc_seq, eva_seq;
    for (std::size_t g = 0; g < stage0.size(); ++g) {
      const auto& first = stage0[g].members.front();
      labels += std::to_string(g + 1) + ". " + stage0[g].label + " (" + arc_display_name(arc.at(first).stage) + ")\n";
    }
    // Sequences follow the stage0 order, members ascending within a group.
    for (const auto& s : stage0)
      for (auto i : s.members) {
        arc_seq += (arc_seq.empty() ? "" : " -> ") + arc_display_name(arc.at(i).stage);
        eva_seq += (eva_seq.empty() ? "" : " -> ") + std::string(yarn::to_string(evaluative.at(i).joint));
      }
    std::map<std::string, std::string> vars{
        {"stage_labels", labels}, {"arc_sequence", arc_seq}, {"evaluative_sequence", eva_seq}};
    auto req = make_request("stage1", story.id, vars);
    if (shares_word_window(req.system_prompt + "\n" + req.user_prompt, story.text, 4))
      throw ExtractionFailed(story.id, "stage1", "stage0 labels repeat story text; refusing to send it");
    auto label = ask_request<std::string>(req, story.id, "stage1", [](const json& j) { return parse_stage1(j); });
    return {StageLayer::stage1, members, label};
  }

  // Reuses stored layers unless force_refresh; persists the merged result.
  // Returns exactly the closure of `needs`.
  Representation build_representation(const Story& story, const Needs& needs, bool force_refresh = false) {
    const Needs want = close_needs(needs);
    Representation rep;
    bool changed = false;
    if (store_ && !force_refresh) {
      if (auto cached = store_->load(opts_.model_tag, story.id)) rep = std::move(*cached);
    }
    rep.story_id = story.id;
    if (!rep.has_units()) {
      rep = Representation{};
      rep.story_id = story.id;
      auto ev = extract_events_detailed(story);
      rep.units = std::move(ev.units);
      rep.flags.dropped_duplicates = ev.dropped_duplicates;
      rep.flags.coverage_ratio = coverage_ratio(story.text, rep.units);
      changed = true;
    }
    if (want.count(Layer::temporal) && !rep.has_temporal()) {
      auto t = assign_temporal_order(story, rep.units);
      rep.units = std::move(t.units);
      rep.flags.temporal_fallback = t.fallback;
      changed = true;
    }
    if (want.count(Layer::conceptual0) && !rep.has_conceptual(0)) {
      rep.conceptual[0] = abstract_conceptual(story, rep.units, 0, std::nullopt);
      changed = true;
    }
    if (want.count(Layer::conceptual1) && !rep.has_conceptual(1)) {
      rep.conceptual[1] = abstract_conceptual(story, rep.units, 1, rep.conceptual.at(0));
      changed = true;
    }
    if (want.count(Layer::evaluative) && !rep.evaluative) {
      rep.evaluative = abstract_evaluative(story, rep.units);
      changed = true;
    }
    if (want.count(Layer::arc) && !rep.arc) {
      rep.arc = abstract_arc(story, rep.units);
      changed = true;
    }
    if (want.count(Layer::stage0) && !rep.has_stage(StageLayer::stage0)) {
      rep.stage[StageLayer::stage0] = abstract_stage0(story, rep.units, *rep.arc);
      changed = true;
    }
    if (want.count(Layer::stage1) && !rep.has_stage(StageLayer::stage1)) {
      rep.stage[StageLayer::stage1] = {
          abstract_stage1(story, rep.stage.at(StageLayer::stage0), *rep.arc, *rep.evaluative)};
      changed = true;
    }
    if (auto err = check_representation(rep)) throw ExtractionFailed(story.id, "validate", *err);
    if (store_ && changed) store_->save(opts_.model_tag, rep);
    return restrict_layers(std::move(rep), want);
  }

  // Stories run in parallel; layers within one story run in order. The first
  // failure (lowest story position) is rethrown.
  std::vector<Representation> build_all(const std::vector<Story>& stories, const Needs& needs, int threads,
                                        bool force_refresh = false) {
    std::vector<Representation> out(stories.size());
    parallel_for(stories.size(), threads,
                 [&](std::size_t i) { out[i] = build_representation(stories[i], needs, force_refresh); });
    return out;
  }

  llm::ChatRequest make_request(const std::string& task, const std::string& story_id,
                                const std::map<std::string, std::string>& vars) const {
    const auto& t = prompts_.get(task);
    llm::ChatRequest req;
    req.system_prompt = render_template(t.system, vars);
    req.user_prompt = render_template(t.user, vars);
    req.temperature = 0.0;
    req.tag = task + "/" + story_id;
    return req;
  }

  const ExtractorOptions& options() const noexcept { return opts_; }

 private:
  template <typename T, typename Parse>
  T ask(const std::string& task, const std::string& story_id, const std::map<std::string, std::string>& vars,
        Parse parse, const llm::PayloadParser& payload_parser = llm::extract_payload) {
    return ask_request<T>(make_request(task, story_id, vars), story_id, task, parse, payload_parser);
  }

  template <typename T, typename Parse>
  T ask_request(const llm::ChatRequest& req, const std::string& story_id, const std::string& task, Parse parse,
                const llm::PayloadParser& payload_parser = llm::extract_payload) {
    std::string last_error = "no parsable payload";
    llm::Schema schema = [&](const json& j) -> std::optional<std::string> {
      try {
        parse(j);
        return std::nullopt;
      } catch (const ReplyError& e) {
        last_error = e.what();
        return last_error;
      }
    };
    auto reply = gw_.complete_structured(req, schema, opts_.max_attempts, payload_parser);
    if (!reply.parse_ok)
      throw ExtractionFailed(story_id, task,
                             last_error + " (after " + std::to_string(reply.attempts) + " attempt(s))");
    return parse(reply.extracted_payload);
  }

  static void check_story(const Story& s) {
    if (text::is_blank(s.text)) throw std::invalid_argument("story text is empty");
  }
  static void check_units(const std::vector<EventUnit>& u) {
    if (u.empty()) throw std::invalid_argument("no units");
  }
  static std::string numbered(const std::vector<EventUnit>& units) {
    std::string s;
    for (std::size_t i = 0; i < units.size(); ++i) s += std::to_string(i + 1) + ". " + units[i].phrase + "\n";
    return s;
  }
  static std::string id_list(const std::vector<EventUnit>& units) {
    json a = json::array();
    for (std::size_t i = 0; i < units.size(); ++i)
      a.push_back({{"id", "p" + std::to_string(i + 1)}, {"text", units[i].phrase}});
    return a.dump();
  }

  llm::Gateway& gw_;
  PromptSet prompts_;
  ExtractorOptions opts_;
  const store::Store* store_;
};

}  // namespace yarn::extraction
