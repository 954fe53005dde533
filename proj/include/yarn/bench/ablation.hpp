#pragma once

// One row of an experiment grid: either structural mapping with a mapping
// config, or a prompting baseline over some input granularity.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/json_io.hpp"
#include "yarn/core/model.hpp"

namespace yarn::bench {

enum class Method { sm, llm_zs, llm_cot };
enum class Granularity { story, sentence, event, stage1 };
enum class Instruction { message_inference, event_mapping };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::sm: return "sm";
    case Method::llm_zs: return "llm_zs";
    case Method::llm_cot: return "llm_cot";
  }
  return "?";
}
inline std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::story: return "story";
    case Granularity::sentence: return "sentence";
    case Granularity::event: return "event";
    case Granularity::stage1: return "stage1";
  }
  return "?";
}
inline std::string_view to_string(Instruction i) {
  return i == Instruction::message_inference ? "message_inference" : "event_mapping";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (auto m : {Method::sm, Method::llm_zs, Method::llm_cot})
    if (to_string(m) == s) return m;
  return std::nullopt;
}
inline std::optional<Granularity> parse_granularity(std::string_view s) {
  for (auto g : {Granularity::story, Granularity::sentence, Granularity::event, Granularity::stage1})
    if (to_string(g) == s) return g;
  return std::nullopt;
}
inline std::optional<Instruction> parse_instruction(std::string_view s) {
  for (auto i : {Instruction::message_inference, Instruction::event_mapping})
    if (to_string(i) == s) return i;
  return std::nullopt;
}

// Task instruction placed in the baseline system prompt.
inline std::string instruction_text(Instruction i) {
  if (i == Instruction::message_inference)
    return "Each text is a story or a summary of one. Work out the message or lesson each one conveys, then pick the "
           "candidate whose message is closest to the base story's.";
  return "Each text is a list of events. Line up the events of the base story with the events of each candidate, then "
         "pick the candidate whose events correspond best.";
}

struct AblationSpec {
  std::string name;
  std::string model_tag = "default";
  Method method = Method::sm;
  MappingConfig mapping;
  // Set only when the spec states a beam width; otherwise the benchmark
  // default applies.
  std::optional<int> beam_n;
  Granularity granularity = Granularity::story;
  Instruction instruction = Instruction::message_inference;
  friend bool operator==(const AblationSpec&, const AblationSpec&) = default;
};

inline bool is_baseline(const AblationSpec& s) { return s.method != Method::sm; }

// True for the combinations covered by the built-in grids.
inline bool is_standard_combination(const AblationSpec& s) {
  if (is_baseline(s)) {
    if (s.granularity == Granularity::event) return true;
    return s.instruction == Instruction::message_inference;
  }
  const auto& m = s.mapping;
  if (m.normalize_by_included) return false;
  switch (m.pair_source) {
    case PairSource::units:
      return m.constraints.empty();
    case PairSource::conceptual:
      if (m.constraints.empty()) return true;
      return m.conceptual_level == 0 && m.conceptual_render == ConceptualRender::root_only;
    case PairSource::stage:
      return m.stage_layer == StageLayer::stage0 || m.constraints.empty();
  }
  return false;
}

inline nlohmann::json to_json(const AblationSpec& s) {
  nlohmann::json j{{"name", s.name}, {"model_tag", s.model_tag}, {"method", to_string(s.method)}};
  if (is_baseline(s)) {
    j["granularity"] = to_string(s.granularity);
    j["instruction"] = to_string(s.instruction);
  } else {
    auto m = to_json(s.mapping);
    m.erase("rng_seed");
    if (s.beam_n) m["beam_n"] = *s.beam_n;
    else m.erase("beam_n");
    j["mapping"] = m;
  }
  return j;
}

// Strict: unknown fields are a ConfigError naming the field.
inline AblationSpec ablation_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("ablation spec must be an object");
  for (const auto& [k, _] : j.items())
    if (k != "name" && k != "model_tag" && k != "method" && k != "mapping" && k != "granularity" && k != "instruction")
      throw ConfigError("ablation spec: unknown field '" + k + "'");
  auto str = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_string()) throw ConfigError(std::string("ablation spec: '") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  AblationSpec s;
  auto name = str("name");
  if (!name || name->empty()) throw ConfigError("ablation spec: missing 'name'");
  s.name = *name;
  if (auto t = str("model_tag")) s.model_tag = *t;
  auto method = str("method");
  if (!method) throw ConfigError("ablation spec '" + s.name + "': missing 'method'");
  auto m = parse_method(*method);
  if (!m) throw ConfigError("ablation spec '" + s.name + "': unknown method '" + *method + "'");
  s.method = *m;
  if (s.method == Method::sm) {
    if (j.contains("granularity") || j.contains("instruction"))
      throw ConfigError("ablation spec '" + s.name + "': granularity/instruction only apply to llm methods");
    if (!j.contains("mapping")) throw ConfigError("ablation spec '" + s.name + "': sm needs a 'mapping'");
    const auto& mj = j["mapping"];
    if (mj.is_object() && mj.contains("rng_seed"))
      throw ConfigError("ablation spec '" + s.name + "': rng_seed comes from the run config");
    s.mapping = mapping_config_from_json(mj);
    if (mj.contains("beam_n")) s.beam_n = s.mapping.beam_n;
  } else {
    if (j.contains("mapping")) throw ConfigError("ablation spec '" + s.name + "': 'mapping' only applies to sm");
    auto g = str("granularity");
    auto i = str("instruction");
    if (g) {
      auto pg = parse_granularity(*g);
      if (!pg) throw ConfigError("ablation spec '" + s.name + "': unknown granularity '" + *g + "'");
      s.granularity = *pg;
    }
    if (i) {
      auto pi = parse_instruction(*i);
      if (!pi) throw ConfigError("ablation spec '" + s.name + "': unknown instruction '" + *i + "'");
      s.instruction = *pi;
    }
  }
  return s;
}

// A spec file is a JSON array of specs, or {"specs": [...]}.
inline std::vector<AblationSpec> specs_from_json(const nlohmann::json& j) {
  const nlohmann::json* arr = &j;
  if (j.is_object()) {
    for (const auto& [k, _] : j.items())
      if (k != "specs") throw ConfigError("spec file: unknown field '" + k + "'");
    if (!j.contains("specs")) throw ConfigError("spec file: missing 'specs'");
    arr = &j["specs"];
  }
  if (!arr->is_array() || arr->empty()) throw ConfigError("spec file needs a non-empty list of specs");
  std::vector<AblationSpec> out;
  for (const auto& s : *arr) out.push_back(ablation_from_json(s));
  for (std::size_t a = 0; a < out.size(); ++a)
    for (std::size_t b = a + 1; b < out.size(); ++b)
      if (out[a].name == out[b].name) throw ConfigError("spec file: duplicate spec name '" + out[a].name + "'");
  return out;
}

namespace grid {

inline AblationSpec baseline(const std::string& model, Method m, Granularity g, Instruction i) {
  AblationSpec s;
  s.model_tag = model;
  s.method = m;
  s.granularity = g;
  s.instruction = i;
  s.name = model + ":" + std::string(to_string(m)) + "/" + std::string(to_string(g));
  if (g == Granularity::event) s.name += "/" + std::string(to_string(i));
  return s;
}

inline AblationSpec sm(const std::string& model, const std::string& label, MappingConfig c) {
  AblationSpec s;
  s.model_tag = model;
  s.method = Method::sm;
  s.mapping = std::move(c);
  s.name = model + ":sm/" + label;
  return s;
}

inline MappingConfig conceptual(int level, ConceptualRender r) {
  MappingConfig c;
  c.pair_source = PairSource::conceptual;
  c.conceptual_level = level;
  c.conceptual_render = r;
  return c;
}

inline MappingConfig stage(StageLayer l) {
  MappingConfig c;
  c.pair_source = PairSource::stage;
  c.stage_layer = l;
  return c;
}

// The main results table: two event-mapping baselines over event phrases and
// five mapping rows.
inline std::vector<AblationSpec> headline(const std::string& model) {
  auto ce = conceptual(0, ConceptualRender::root_only);
  ce.constraints = {Constraint::evaluative};
  auto sa = stage(StageLayer::stage0);
  sa.constraints = {Constraint::arc};
  return {baseline(model, Method::llm_zs, Granularity::event, Instruction::event_mapping),
          baseline(model, Method::llm_cot, Granularity::event, Instruction::event_mapping),
          sm(model, "units", MappingConfig{}),
          sm(model, "conceptual", conceptual(0, ConceptualRender::root_only)),
          sm(model, "conceptual+evaluative", ce),
          sm(model, "stage0", stage(StageLayer::stage0)),
          sm(model, "stage0+arc", sa)};
}

// Conceptual level and rendering.
inline std::vector<AblationSpec> conceptual_levels(const std::string& model) {
  std::vector<AblationSpec> out;
  for (int level : {0, 1})
    for (auto r : {ConceptualRender::root_only, ConceptualRender::modifier_and_root})
      out.push_back(sm(model, "conceptual-l" + std::to_string(level) + "-" + std::string(to_string(r)),
                       conceptual(level, r)));
  return out;
}

// Stage layers. Stage 1 is a single label per story, so mapping reduces to
// one cosine; the baselines read the same labels.
inline std::vector<AblationSpec> stage_levels(const std::string& model) {
  return {sm(model, "stage0", stage(StageLayer::stage0)), sm(model, "stage1", stage(StageLayer::stage1)),
          baseline(model, Method::llm_zs, Granularity::stage1, Instruction::message_inference),
          baseline(model, Method::llm_cot, Granularity::stage1, Instruction::message_inference)};
}

// Baseline input granularity.
inline std::vector<AblationSpec> input_granularity(const std::string& model) {
  std::vector<AblationSpec> out;
  for (auto m : {Method::llm_zs, Method::llm_cot}) {
    out.push_back(baseline(model, m, Granularity::story, Instruction::message_inference));
    out.push_back(baseline(model, m, Granularity::sentence, Instruction::message_inference));
    out.push_back(baseline(model, m, Granularity::event, Instruction::message_inference));
    out.push_back(baseline(model, m, Granularity::event, Instruction::event_mapping));
  }
  return out;
}

inline std::optional<std::vector<AblationSpec>> by_name(std::string_view grid, const std::string& model) {
  if (grid == "headline") return headline(model);
  if (grid == "conceptual-levels") return conceptual_levels(model);
  if (grid == "stage-levels") return stage_levels(model);
  if (grid == "granularity") return input_granularity(model);
  return std::nullopt;
}

}  // namespace grid

}  // namespace yarn::bench
