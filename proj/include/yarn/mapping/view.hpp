#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "yarn/core/errors.hpp"
#include "yarn/core/model.hpp"

namespace yarn::mapping {

struct ViewElement {
  // Unit index for unit/conceptual views, position in the stage layer for
  // stage views.
  std::size_t element_id = 0;
  std::string text;
  std::map<Constraint, std::string> constraint_texts;
};

// The elements of one story that pairs are drawn from, in ascending temporal
// position.
struct PairSourceView {
  std::string story_id;
  std::vector<ViewElement> elements;
  std::size_t size() const noexcept { return elements.size(); }
};

namespace detail {

// Sort key of unit i: temporal index, extraction index as tiebreak. Units
// without a temporal index fall back to textual order.
inline std::pair<long, std::size_t> unit_position(const Representation& rep, std::size_t i) {
  const auto& u = rep.units[i];
  long t = u.temporal_index ? *u.temporal_index : static_cast<long>(i) + 1;
  return {t, i};
}

}  // namespace detail

inline PairSourceView build_view(const Representation& rep, const MappingConfig& config) {
  validate_mapping_config(config);
  PairSourceView view;
  view.story_id = rep.story_id;
  const bool want_eva = config.constraints.count(Constraint::evaluative) != 0;
  const bool want_arc = config.constraints.count(Constraint::arc) != 0;

  if (!rep.has_units()) throw ConfigUnsatisfiable("units");

  if (config.pair_source == PairSource::units || config.pair_source == PairSource::conceptual) {
    const std::vector<ConceptualAbstraction>* con = nullptr;
    if (config.pair_source == PairSource::conceptual) {
      auto it = rep.conceptual.find(config.conceptual_level);
      if (it == rep.conceptual.end())
        throw ConfigUnsatisfiable("conceptual" + std::to_string(config.conceptual_level));
      con = &it->second;
    }
    if (want_eva && !rep.evaluative) throw ConfigUnsatisfiable("evaluative");

    std::vector<std::size_t> order(rep.units.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return detail::unit_position(rep, a) < detail::unit_position(rep, b);
    });
    for (auto i : order) {
      ViewElement e;
      e.element_id = i;
      e.text = con ? render_conceptual((*con)[i], config.conceptual_render) : rep.units[i].phrase;
      if (want_eva) e.constraint_texts[Constraint::evaluative] = std::string(to_string((*rep.evaluative)[i].joint));
      view.elements.push_back(std::move(e));
    }
    return view;
  }

  // Stage abstractions.
  auto it = rep.stage.find(config.stage_layer);
  if (it == rep.stage.end()) throw ConfigUnsatisfiable(std::string(to_string(config.stage_layer)));
  const auto& groups = it->second;
  if (groups.empty()) throw ConfigUnsatisfiable(std::string(to_string(config.stage_layer)));
  if (config.stage_layer == StageLayer::stage1) {
    if (want_arc) throw ConfigUnsatisfiable("arc constraint on stage1");
    ViewElement e;
    e.element_id = 0;
    e.text = groups.front().label;
    view.elements.push_back(std::move(e));
    return view;
  }
  if (want_arc && !rep.arc) throw ConfigUnsatisfiable("arc");

  auto group_key = [&](std::size_t g) {
    std::pair<long, std::size_t> best{0, 0};
    bool first = true;
    for (auto m : groups[g].members) {
      auto p = detail::unit_position(rep, m);
      if (first || p < best) best = p;
      first = false;
    }
    return best;
  };
  std::vector<std::size_t> order(groups.size());
  for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::tuple(group_key(a), a) < std::tuple(group_key(b), b); });
  for (auto g : order) {
    ViewElement e;
    e.element_id = g;
    e.text = groups[g].label;
    if (want_arc) e.constraint_texts[Constraint::arc] = arc_display_name((*rep.arc)[groups[g].members.front()].stage);
    view.elements.push_back(std::move(e));
  }
  return view;
}

}  // namespace yarn::mapping
