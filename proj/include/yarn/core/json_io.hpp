#pragma once

// JSON forms of the core types. Field names follow the struct members; the
// representation schema is the on-disk format of the representation store.

#include <set>
#include <string>

#include "json.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/model.hpp"

namespace yarn {

using json = nlohmann::json;

namespace detail {

template <typename E>
E enum_from_json(const json& j, std::string_view field) {
  if (!j.is_string()) throw Error(std::string("field '") + std::string(field) + "' must be a string");
  auto v = parse_enum<E>(j.get<std::string>());
  if (!v) throw Error("unknown value '" + j.get<std::string>() + "' for field '" + std::string(field) + "'");
  return *v;
}

inline void reject_unknown_fields(const json& j, std::initializer_list<std::string_view> allowed,
                                  std::string_view where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError("unknown field '" + key + "' in " + std::string(where));
  }
}

}  // namespace detail

inline json to_json(const EventUnit& u) {
  json j{{"index", u.index}, {"phrase", u.phrase}};
  if (u.temporal_index) j["temporal_index"] = *u.temporal_index;
  return j;
}

inline json to_json(const ConceptualAbstraction& a) {
  return {{"level", a.level}, {"modifier", a.modifier}, {"root", a.root}};
}

inline json to_json(const EvaluativeLabel& e) {
  return {{"functional_role", to_string(e.functional_role)},
          {"polarity", to_string(e.polarity)},
          {"joint", to_string(e.joint)}};
}

inline json to_json(const StageAbstraction& s) {
  return {{"layer", to_string(s.layer)}, {"members", s.members}, {"label", s.label}};
}

inline json to_json(const Representation& r) {
  json j;
  j["story_id"] = r.story_id;
  json units = json::array();
  for (const auto& u : r.units) units.push_back(to_json(u));
  j["units"] = units;
  if (!r.conceptual.empty()) {
    json con = json::object();
    for (const auto& [level, list] : r.conceptual) {
      json arr = json::array();
      for (const auto& a : list) arr.push_back(to_json(a));
      con[std::to_string(level)] = arr;
    }
    j["conceptual"] = con;
  }
  if (r.evaluative) {
    json arr = json::array();
    for (const auto& e : *r.evaluative) arr.push_back(to_json(e));
    j["evaluative"] = arr;
  }
  if (r.arc) {
    json arr = json::array();
    for (const auto& a : *r.arc) arr.push_back(json{{"stage", to_string(a.stage)}});
    j["arc"] = arr;
  }
  if (!r.stage.empty()) {
    json st = json::object();
    for (const auto& [layer, list] : r.stage) {
      json arr = json::array();
      for (const auto& s : list) arr.push_back(to_json(s));
      st[std::string(to_string(layer))] = arr;
    }
    j["stage"] = st;
  }
  json flags{{"temporal_fallback", r.flags.temporal_fallback},
             {"dropped_duplicates", r.flags.dropped_duplicates}};
  if (r.flags.coverage_ratio) flags["coverage_ratio"] = *r.flags.coverage_ratio;
  j["flags"] = flags;
  return j;
}

inline Representation representation_from_json(const json& j) {
  Representation r;
  r.story_id = j.at("story_id").get<std::string>();
  for (const auto& ju : j.at("units")) {
    EventUnit u;
    u.index = ju.at("index").get<std::size_t>();
    u.phrase = ju.at("phrase").get<std::string>();
    if (ju.contains("temporal_index")) u.temporal_index = ju["temporal_index"].get<int>();
    r.units.push_back(std::move(u));
  }
  if (j.contains("conceptual")) {
    for (const auto& [key, arr] : j["conceptual"].items()) {
      int level = std::stoi(key);
      auto& list = r.conceptual[level];
      for (const auto& ja : arr)
        list.push_back({ja.at("level").get<int>(), ja.at("modifier").get<std::string>(),
                        ja.at("root").get<std::string>()});
    }
  }
  if (j.contains("evaluative")) {
    std::vector<EvaluativeLabel> evs;
    for (const auto& je : j["evaluative"]) {
      EvaluativeLabel e;
      e.functional_role = detail::enum_from_json<FunctionalRole>(je.at("functional_role"), "functional_role");
      e.polarity = detail::enum_from_json<Polarity>(je.at("polarity"), "polarity");
      e.joint = detail::enum_from_json<JointLabel>(je.at("joint"), "joint");
      evs.push_back(e);
    }
    r.evaluative = std::move(evs);
  }
  if (j.contains("arc")) {
    std::vector<ArcLabel> arcs;
    for (const auto& ja : j["arc"]) arcs.push_back({detail::enum_from_json<ArcStage>(ja.at("stage"), "stage")});
    r.arc = std::move(arcs);
  }
  if (j.contains("stage")) {
    for (const auto& [key, arr] : j["stage"].items()) {
      auto layer = parse_enum<StageLayer>(key);
      if (!layer) throw Error("unknown stage layer '" + key + "'");
      auto& list = r.stage[*layer];
      for (const auto& js : arr)
        list.push_back({detail::enum_from_json<StageLayer>(js.at("layer"), "layer"),
                        js.at("members").get<std::vector<std::size_t>>(),
                        js.at("label").get<std::string>()});
    }
  }
  if (j.contains("flags")) {
    const auto& f = j["flags"];
    r.flags.temporal_fallback = f.value("temporal_fallback", false);
    r.flags.dropped_duplicates = f.value("dropped_duplicates", std::size_t{0});
    if (f.contains("coverage_ratio")) r.flags.coverage_ratio = f["coverage_ratio"].get<double>();
  }
  validate_representation(r);
  return r;
}

inline json to_json(const MappingConfig& c) {
  json cons = json::array();
  for (auto k : c.constraints) cons.push_back(to_string(k));
  json j{{"pair_source", to_string(c.pair_source)}, {"constraints", cons}, {"beam_n", c.beam_n},
         {"rng_seed", c.rng_seed}};
  if (c.pair_source == PairSource::conceptual) {
    j["conceptual_level"] = c.conceptual_level;
    j["conceptual_render"] = to_string(c.conceptual_render);
  }
  if (c.pair_source == PairSource::stage) j["stage_layer"] = to_string(c.stage_layer);
  if (c.normalize_by_included) j["normalize_by_included"] = true;
  return j;
}

// Strict: unknown fields raise ConfigError naming the field.
inline MappingConfig mapping_config_from_json(const json& j) {
  detail::reject_unknown_fields(j,
                                {"pair_source", "conceptual_level", "conceptual_render", "stage_layer",
                                 "constraints", "beam_n", "rng_seed", "normalize_by_included"},
                                "mapping config");
  MappingConfig c;
  try {
    c.pair_source = detail::enum_from_json<PairSource>(j.at("pair_source"), "pair_source");
    if (j.contains("conceptual_level")) c.conceptual_level = j["conceptual_level"].get<int>();
    if (j.contains("conceptual_render"))
      c.conceptual_render = detail::enum_from_json<ConceptualRender>(j["conceptual_render"], "conceptual_render");
    if (j.contains("stage_layer"))
      c.stage_layer = detail::enum_from_json<StageLayer>(j["stage_layer"], "stage_layer");
    if (j.contains("constraints"))
      for (const auto& k : j["constraints"]) c.constraints.insert(detail::enum_from_json<Constraint>(k, "constraints"));
    if (j.contains("beam_n")) c.beam_n = j["beam_n"].get<int>();
    if (j.contains("rng_seed")) c.rng_seed = j["rng_seed"].get<std::uint64_t>();
    if (j.contains("normalize_by_included")) c.normalize_by_included = j["normalize_by_included"].get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("mapping config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("mapping config: ") + e.what());
  }
  if (auto err = check_mapping_config(c)) throw ConfigError("mapping config: " + *err);
  return c;
}

}  // namespace yarn
