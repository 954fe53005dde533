#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "yarn/bench/dataset.hpp"
#include "yarn/core/errors.hpp"
#include "yarn/core/model.hpp"

namespace yarn::bench {

struct CategoryStats {
  std::size_t n = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  friend bool operator==(const CategoryStats&, const CategoryStats&) = default;
};

struct EvalReport {
  std::size_t n_items = 0;
  std::size_t n_correct = 0;
  double accuracy = 0.0;
  // ARN only: the four cells plus "near" (near-far, near-near) and "far"
  // (far-far, far-near).
  std::map<std::string, CategoryStats> per_category;
  std::size_t n_fallbacks = 0;
  std::size_t n_ties = 0;
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

inline bool is_near(ArnCategory c) { return c == ArnCategory::near_far || c == ArnCategory::near_near; }

inline EvalReport score_report(const std::vector<Prediction>& predictions, const std::vector<BenchmarkItem>& items) {
  if (items.empty()) throw ReportError("no items to score");
  std::map<std::string, const Prediction*> by_base;
  for (const auto& p : predictions) by_base[p.base_id] = &p;
  EvalReport r;
  auto bump = [&](const std::string& key, bool ok) {
    auto& c = r.per_category[key];
    ++c.n;
    c.correct += ok;
  };
  for (const auto& item : items) {
    auto it = by_base.find(item.base.id);
    if (it == by_base.end()) throw ReportError("no prediction for item '" + item.item_id + "'");
    const auto& p = *it->second;
    if (p.chosen_index >= item.targets.size()) throw ReportError("prediction index out of range for '" + item.item_id + "'");
    const bool ok = p.chosen_index == item.gold_index;
    ++r.n_items;
    r.n_correct += ok;
    r.n_fallbacks += p.fallback;
    r.n_ties += p.tie_broken;
    if (item.category) {
      bump(std::string(to_string(*item.category)), ok);
      bump(is_near(*item.category) ? "near" : "far", ok);
    }
  }
  r.accuracy = static_cast<double>(r.n_correct) / static_cast<double>(r.n_items);
  for (auto& [_, c] : r.per_category) c.accuracy = static_cast<double>(c.correct) / static_cast<double>(c.n);
  return r;
}

inline nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json cats = nlohmann::json::object();
  for (const auto& [k, c] : r.per_category) cats[k] = {{"n", c.n}, {"correct", c.correct}, {"accuracy", c.accuracy}};
  return {{"n_items", r.n_items},         {"n_correct", r.n_correct}, {"accuracy", r.accuracy},
          {"per_category", cats},         {"n_fallbacks", r.n_fallbacks}, {"n_ties", r.n_ties}};
}

}  // namespace yarn::bench
