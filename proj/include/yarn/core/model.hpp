#pragma once

// Domain types shared by every part of the pipeline: stories, extracted event
// units, the four abstraction layers, and the mapping results.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "yarn/core/errors.hpp"
#include "yarn/core/text.hpp"

namespace yarn {

// ---------------------------------------------------------------------------
// Enumerations and their canonical spellings.

enum class StoryRole { base, target };
enum class ArnCategory { near_far, far_far, near_near, far_near };
enum class FunctionalRole { state, action, outcome };
enum class Polarity { positive, negative, neutral };
enum class JointLabel {
  struggle,
  ease,
  effort,
  indifference,
  gain,
  loss,
  neutral_state,
  neutral_action,
  neutral_outcome,
};
enum class ArcStage { background, main_event, challenge, action, conclusion };
enum class StageLayer { stage0, stage1 };
enum class PairSource { units, conceptual, stage };
enum class ConceptualRender { root_only, modifier_and_root };
enum class Constraint { evaluative, arc };

namespace detail {

template <typename E, std::size_t N>
struct EnumNames {
  std::array<std::pair<E, std::string_view>, N> entries;

  constexpr std::string_view name(E e) const {
    for (const auto& [v, n] : entries)
      if (v == e) return n;
    return {};
  }
  std::optional<E> parse(std::string_view s) const {
    for (const auto& [v, n] : entries)
      if (n == s) return v;
    return std::nullopt;
  }
};

inline constexpr EnumNames<StoryRole, 2> kStoryRole{{{{StoryRole::base, "base"},
                                                      {StoryRole::target, "target"}}}};
inline constexpr EnumNames<ArnCategory, 4> kArnCategory{{{
    {ArnCategory::near_far, "near-far"},
    {ArnCategory::far_far, "far-far"},
    {ArnCategory::near_near, "near-near"},
    {ArnCategory::far_near, "far-near"},
}}};
inline constexpr EnumNames<FunctionalRole, 3> kFunctionalRole{{{
    {FunctionalRole::state, "state"},
    {FunctionalRole::action, "action"},
    {FunctionalRole::outcome, "outcome"},
}}};
inline constexpr EnumNames<Polarity, 3> kPolarity{{{
    {Polarity::positive, "positive"},
    {Polarity::negative, "negative"},
    {Polarity::neutral, "neutral"},
}}};
inline constexpr EnumNames<JointLabel, 9> kJointLabel{{{
    {JointLabel::struggle, "struggle"},
    {JointLabel::ease, "ease"},
    {JointLabel::effort, "effort"},
    {JointLabel::indifference, "indifference"},
    {JointLabel::gain, "gain"},
    {JointLabel::loss, "loss"},
    {JointLabel::neutral_state, "neutral_state"},
    {JointLabel::neutral_action, "neutral_action"},
    {JointLabel::neutral_outcome, "neutral_outcome"},
}}};
inline constexpr EnumNames<ArcStage, 5> kArcStage{{{
    {ArcStage::background, "background"},
    {ArcStage::main_event, "main_event"},
    {ArcStage::challenge, "challenge"},
    {ArcStage::action, "action"},
    {ArcStage::conclusion, "conclusion"},
}}};
inline constexpr EnumNames<StageLayer, 2> kStageLayer{{{{StageLayer::stage0, "stage0"},
                                                        {StageLayer::stage1, "stage1"}}}};
inline constexpr EnumNames<PairSource, 3> kPairSource{{{
    {PairSource::units, "units"},
    {PairSource::conceptual, "conceptual"},
    {PairSource::stage, "stage"},
}}};
inline constexpr EnumNames<ConceptualRender, 2> kConceptualRender{{{
    {ConceptualRender::root_only, "root_only"},
    {ConceptualRender::modifier_and_root, "modifier_and_root"},
}}};
inline constexpr EnumNames<Constraint, 2> kConstraint{{{{Constraint::evaluative, "evaluative"},
                                                        {Constraint::arc, "arc"}}}};

}  // namespace detail

inline std::string_view to_string(StoryRole v) { return detail::kStoryRole.name(v); }
inline std::string_view to_string(ArnCategory v) { return detail::kArnCategory.name(v); }
inline std::string_view to_string(FunctionalRole v) { return detail::kFunctionalRole.name(v); }
inline std::string_view to_string(Polarity v) { return detail::kPolarity.name(v); }
inline std::string_view to_string(JointLabel v) { return detail::kJointLabel.name(v); }
inline std::string_view to_string(ArcStage v) { return detail::kArcStage.name(v); }
inline std::string_view to_string(StageLayer v) { return detail::kStageLayer.name(v); }
inline std::string_view to_string(PairSource v) { return detail::kPairSource.name(v); }
inline std::string_view to_string(ConceptualRender v) { return detail::kConceptualRender.name(v); }
inline std::string_view to_string(Constraint v) { return detail::kConstraint.name(v); }

template <typename E>
std::optional<E> parse_enum(std::string_view s);

template <> inline std::optional<StoryRole> parse_enum(std::string_view s) { return detail::kStoryRole.parse(s); }
template <> inline std::optional<ArnCategory> parse_enum(std::string_view s) { return detail::kArnCategory.parse(s); }
template <> inline std::optional<FunctionalRole> parse_enum(std::string_view s) { return detail::kFunctionalRole.parse(s); }
template <> inline std::optional<Polarity> parse_enum(std::string_view s) { return detail::kPolarity.parse(s); }
template <> inline std::optional<JointLabel> parse_enum(std::string_view s) { return detail::kJointLabel.parse(s); }
template <> inline std::optional<ArcStage> parse_enum(std::string_view s) { return detail::kArcStage.parse(s); }
template <> inline std::optional<StageLayer> parse_enum(std::string_view s) { return detail::kStageLayer.parse(s); }
template <> inline std::optional<PairSource> parse_enum(std::string_view s) { return detail::kPairSource.parse(s); }
template <> inline std::optional<ConceptualRender> parse_enum(std::string_view s) { return detail::kConceptualRender.parse(s); }
template <> inline std::optional<Constraint> parse_enum(std::string_view s) { return detail::kConstraint.parse(s); }

inline constexpr std::array<JointLabel, 9> kAllJointLabels = {
    JointLabel::struggle,      JointLabel::ease,           JointLabel::effort,
    JointLabel::indifference,  JointLabel::gain,           JointLabel::loss,
    JointLabel::neutral_state, JointLabel::neutral_action, JointLabel::neutral_outcome,
};
inline constexpr std::array<ArcStage, 5> kAllArcStages = {
    ArcStage::background, ArcStage::main_event, ArcStage::challenge, ArcStage::action,
    ArcStage::conclusion,
};
inline constexpr std::array<ArnCategory, 4> kAllArnCategories = {
    ArnCategory::near_far, ArnCategory::far_far, ArnCategory::near_near, ArnCategory::far_near,
};

// Surface text used when an arc stage is embedded as a soft-constraint label.
inline std::string arc_display_name(ArcStage s) {
  return s == ArcStage::main_event ? "main event" : std::string(to_string(s));
}

// ---------------------------------------------------------------------------
// Evaluative labels.

constexpr JointLabel joint_label(FunctionalRole role, Polarity polarity) {
  switch (role) {
    case FunctionalRole::state:
      return polarity == Polarity::positive   ? JointLabel::ease
             : polarity == Polarity::negative ? JointLabel::struggle
                                              : JointLabel::neutral_state;
    case FunctionalRole::action:
      return polarity == Polarity::positive   ? JointLabel::effort
             : polarity == Polarity::negative ? JointLabel::indifference
                                              : JointLabel::neutral_action;
    case FunctionalRole::outcome:
      return polarity == Polarity::positive   ? JointLabel::gain
             : polarity == Polarity::negative ? JointLabel::loss
                                              : JointLabel::neutral_outcome;
  }
  return JointLabel::neutral_state;
}

// Inverse of joint_label.
constexpr std::pair<FunctionalRole, Polarity> split_joint_label(JointLabel j) {
  switch (j) {
    case JointLabel::struggle: return {FunctionalRole::state, Polarity::negative};
    case JointLabel::ease: return {FunctionalRole::state, Polarity::positive};
    case JointLabel::effort: return {FunctionalRole::action, Polarity::positive};
    case JointLabel::indifference: return {FunctionalRole::action, Polarity::negative};
    case JointLabel::gain: return {FunctionalRole::outcome, Polarity::positive};
    case JointLabel::loss: return {FunctionalRole::outcome, Polarity::negative};
    case JointLabel::neutral_state: return {FunctionalRole::state, Polarity::neutral};
    case JointLabel::neutral_action: return {FunctionalRole::action, Polarity::neutral};
    case JointLabel::neutral_outcome: return {FunctionalRole::outcome, Polarity::neutral};
  }
  return {FunctionalRole::state, Polarity::neutral};
}

struct EvaluativeLabel {
  FunctionalRole functional_role = FunctionalRole::state;
  Polarity polarity = Polarity::neutral;
  JointLabel joint = JointLabel::neutral_state;

  static EvaluativeLabel from_joint(JointLabel j) {
    auto [role, pol] = split_joint_label(j);
    return {role, pol, j};
  }
  static EvaluativeLabel from_parts(FunctionalRole role, Polarity pol) {
    return {role, pol, joint_label(role, pol)};
  }
  friend bool operator==(const EvaluativeLabel&, const EvaluativeLabel&) = default;
};

// ---------------------------------------------------------------------------
// Stories and per-story layers.

struct DatasetMeta {
  std::string dataset_name;
  std::string item_id;
  std::optional<ArnCategory> arn_category;
  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

struct Story {
  std::string id;
  std::string text;
  StoryRole role = StoryRole::base;
  std::optional<DatasetMeta> dataset_meta;

  Story() = default;
  Story(std::string id_, std::string text_, StoryRole role_,
        std::optional<DatasetMeta> meta = std::nullopt)
      : id(std::move(id_)), text(std::move(text_)), role(role_), dataset_meta(std::move(meta)) {
    if (text::is_blank(text)) throw std::invalid_argument("story '" + id + "' has empty text");
  }
  friend bool operator==(const Story&, const Story&) = default;
};

struct EventUnit {
  std::size_t index = 0;
  std::string phrase;
  // 1-based chronological position; unset until temporal ordering has run.
  std::optional<int> temporal_index;
  friend bool operator==(const EventUnit&, const EventUnit&) = default;
};

struct ConceptualAbstraction {
  int level = 0;
  std::string modifier;
  std::string root;
  friend bool operator==(const ConceptualAbstraction&, const ConceptualAbstraction&) = default;
};

struct ArcLabel {
  ArcStage stage = ArcStage::background;
  friend bool operator==(const ArcLabel&, const ArcLabel&) = default;
};

struct StageAbstraction {
  StageLayer layer = StageLayer::stage0;
  std::vector<std::size_t> members;
  std::string label;
  friend bool operator==(const StageAbstraction&, const StageAbstraction&) = default;
};

// Extraction bookkeeping stored next to the layers.
struct RepresentationFlags {
  bool temporal_fallback = false;
  std::size_t dropped_duplicates = 0;
  std::optional<double> coverage_ratio;
  friend bool operator==(const RepresentationFlags&, const RepresentationFlags&) = default;
};

// The per-story bundle the mapping engine consumes. Every layer is optional;
// a mapping configuration checks for the layers it needs.
struct Representation {
  std::string story_id;
  std::vector<EventUnit> units;
  std::map<int, std::vector<ConceptualAbstraction>> conceptual;
  std::optional<std::vector<EvaluativeLabel>> evaluative;
  std::optional<std::vector<ArcLabel>> arc;
  std::map<StageLayer, std::vector<StageAbstraction>> stage;
  RepresentationFlags flags;

  bool has_units() const { return !units.empty(); }
  bool has_temporal() const {
    return has_units() && std::all_of(units.begin(), units.end(),
                                      [](const EventUnit& u) { return u.temporal_index.has_value(); });
  }
  bool has_conceptual(int level) const { return conceptual.count(level) != 0; }
  bool has_stage(StageLayer l) const { return stage.count(l) != 0; }

  friend bool operator==(const Representation&, const Representation&) = default;
};

// ---------------------------------------------------------------------------
// Operations on single values.

// "modifier_root" when the modifier is present, otherwise the root alone.
inline std::string render_conceptual(const ConceptualAbstraction& abs, ConceptualRender mode) {
  if (mode == ConceptualRender::root_only || abs.modifier.empty()) return abs.root;
  return abs.modifier + "_" + abs.root;
}

inline std::string normalize_phrase(std::string_view phrase) { return text::normalize(phrase); }

// Returns a description of the first violated invariant, or nullopt.
inline std::optional<std::string> check_representation(const Representation& rep) {
  const std::size_t n = rep.units.size();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& u = rep.units[i];
    if (u.index != i) return "unit " + std::to_string(i) + " has index " + std::to_string(u.index);
    if (text::is_blank(u.phrase)) return "unit " + std::to_string(i) + " has an empty phrase";
    if (!seen.insert(normalize_phrase(u.phrase)).second)
      return "duplicate phrase '" + u.phrase + "'";
    if (u.temporal_index && *u.temporal_index < 1)
      return "unit " + std::to_string(i) + " has temporal_index < 1";
  }
  for (const auto& [level, abs] : rep.conceptual) {
    if (level < 0) return "negative conceptual level";
    if (abs.size() != n) return "conceptual level " + std::to_string(level) + " is not index-aligned";
    for (const auto& a : abs) {
      if (a.level != level) return "conceptual abstraction carries the wrong level";
      if (a.root.empty()) return "conceptual abstraction with empty root";
    }
  }
  if (rep.evaluative && rep.evaluative->size() != n) return "evaluative layer is not index-aligned";
  if (rep.evaluative)
    for (const auto& e : *rep.evaluative)
      if (joint_label(e.functional_role, e.polarity) != e.joint)
        return "evaluative joint label disagrees with role/polarity";
  if (rep.arc) {
    if (rep.arc->size() != n) return "arc layer is not index-aligned";
    if (n > 0 && std::none_of(rep.arc->begin(), rep.arc->end(),
                              [](const ArcLabel& a) { return a.stage == ArcStage::main_event; }))
      return "no unit carries the main_event stage";
  }
  if (auto it = rep.stage.find(StageLayer::stage0); it != rep.stage.end()) {
    std::vector<int> hits(n, 0);
    for (const auto& s : it->second) {
      if (s.layer != StageLayer::stage0) return "stage0 entry with the wrong layer";
      if (s.members.empty()) return "stage0 abstraction without members";
      for (auto m : s.members) {
        if (m >= n) return "stage0 member out of range";
        ++hits[m];
      }
      if (rep.arc) {
        for (auto m : s.members)
          if ((*rep.arc)[m].stage != (*rep.arc)[s.members.front()].stage)
            return "stage0 group mixes arc stages";
      }
    }
    for (int h : hits)
      if (h != 1) return "stage0 members do not partition the units";
    if (it->second.size() > n) return "more stage0 abstractions than units";
  }
  if (auto it = rep.stage.find(StageLayer::stage1); it != rep.stage.end()) {
    if (it->second.size() != 1) return "stage1 must hold exactly one abstraction";
    const auto& s = it->second.front();
    if (s.layer != StageLayer::stage1) return "stage1 entry with the wrong layer";
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    if (s.members != all) return "stage1 members must be every unit index";
  }
  return std::nullopt;
}

inline void validate_representation(const Representation& rep) {
  if (auto err = check_representation(rep))
    throw Error("invalid representation '" + rep.story_id + "': " + *err);
}

// ---------------------------------------------------------------------------
// Mapping configuration and results.

struct MappingConfig {
  PairSource pair_source = PairSource::units;
  int conceptual_level = 0;
  ConceptualRender conceptual_render = ConceptualRender::root_only;
  StageLayer stage_layer = StageLayer::stage0;
  std::set<Constraint> constraints;
  int beam_n = 3;
  std::uint64_t rng_seed = 0;
  // Divides the global score by the number of included quadruples. Off for
  // replication runs.
  bool normalize_by_included = false;

  friend bool operator==(const MappingConfig&, const MappingConfig&) = default;
};

inline std::optional<std::string> check_mapping_config(const MappingConfig& c) {
  if (c.beam_n < 1) return "beam_n must be >= 1";
  if (c.pair_source == PairSource::conceptual && (c.conceptual_level < 0 || c.conceptual_level > 1))
    return "conceptual_level must be 0 or 1";
  for (auto k : c.constraints) {
    if (c.pair_source == PairSource::stage && k != Constraint::arc)
      return "stage pairs only accept the arc constraint";
    if (c.pair_source != PairSource::stage && k != Constraint::evaluative)
      return "unit and conceptual pairs only accept the evaluative constraint";
  }
  return std::nullopt;
}

inline void validate_mapping_config(const MappingConfig& c) {
  if (auto err = check_mapping_config(c)) throw std::invalid_argument("mapping config: " + *err);
}

using ElementPair = std::pair<std::size_t, std::size_t>;

struct Quadruple {
  ElementPair s1_pair;
  ElementPair s2_pair;
  double score = 0.0;
  friend bool operator==(const Quadruple&, const Quadruple&) = default;
};

struct GlobalMapping {
  // s1 element -> s2 element
  std::map<std::size_t, std::size_t> correspondences;
  std::vector<Quadruple> included_quadruples;
  double score = 0.0;
  friend bool operator==(const GlobalMapping&, const GlobalMapping&) = default;
};

struct TargetScore {
  std::string target_id;
  double score = 0.0;
  friend bool operator==(const TargetScore&, const TargetScore&) = default;
};

struct Prediction {
  std::string base_id;
  std::vector<TargetScore> per_target_scores;  // in candidate order
  std::string chosen_target;
  std::size_t chosen_index = 0;
  bool tie_broken = false;
  // Set when the prediction came from the seeded random fallback.
  bool fallback = false;
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

}  // namespace yarn
