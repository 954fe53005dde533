#pragma once

// Story-pair scoring and target selection.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "yarn/core/json_io.hpp"
#include "yarn/core/model.hpp"
#include "yarn/core/text.hpp"
#include "yarn/embedding/embedder.hpp"
#include "yarn/mapping/greedy.hpp"
#include "yarn/mapping/local_score.hpp"
#include "yarn/mapping/view.hpp"

namespace yarn::mapping {

struct PairScore {
  double score = 0.0;
  // True when a view had a single element and the max element cosine was
  // used instead of quadruple mapping.
  bool fallback_used = false;
  PairSourceView base_view;
  PairSourceView target_view;
  SimilarityTables tables;
  std::vector<Quadruple> quadruples;  // rank order
  GreedyResult greedy;
};

inline PairScore score_story_pair_detailed(const Representation& rep1, const Representation& rep2,
                                           const MappingConfig& config, embedding::Embedder& embedder) {
  PairScore out;
  out.base_view = build_view(rep1, config);
  out.target_view = build_view(rep2, config);
  out.tables = build_tables(out.base_view, out.target_view, config, embedder);

  if (out.base_view.size() < 2 || out.target_view.size() < 2) {
    out.fallback_used = true;
    double best = -std::numeric_limits<double>::infinity();
    for (double c : out.tables.element.data) best = std::max(best, c);
    out.score = best;
    return out;
  }
  out.quadruples = enumerate_quadruples(out.base_view, out.target_view, out.tables);
  std::sort(out.quadruples.begin(), out.quadruples.end(), quadruple_precedes);
  out.greedy = greedy_global(out.quadruples, config.beam_n, config.normalize_by_included);
  out.score = out.greedy.best.score;
  return out;
}

inline double score_story_pair(const Representation& rep1, const Representation& rep2,
                               const MappingConfig& config, embedding::Embedder& embedder) {
  return score_story_pair_detailed(rep1, rep2, config, embedder).score;
}

// Scores every target against the base and picks the argmax. Exact ties are
// broken by a pick from the ("tie", base id) sub-stream of config.rng_seed. A
// target whose scoring throws scores -inf; an unreachable embedding service
// is rethrown instead.
inline Prediction select_target(const Representation& base, const std::vector<Representation>& targets,
                                const MappingConfig& config, embedding::Embedder& embedder) {
  if (targets.empty()) throw std::invalid_argument("select_target needs at least one target");
  Prediction p;
  p.base_id = base.story_id;
  std::string last_error;
  for (const auto& t : targets) {
    double s = -std::numeric_limits<double>::infinity();
    try {
      s = score_story_pair(base, t, config, embedder);
    } catch (const EmbeddingUnavailable&) {
      throw;
    } catch (const Error& e) {
      last_error = e.what();
    }
    p.per_target_scores.push_back({t.story_id, s});
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& ts : p.per_target_scores) best = std::max(best, ts.score);
  if (best == -std::numeric_limits<double>::infinity())
    throw PredictionFailed("every target failed for base '" + base.story_id + "': " + last_error);

  std::vector<std::size_t> tied;
  for (std::size_t i = 0; i < p.per_target_scores.size(); ++i)
    if (p.per_target_scores[i].score == best) tied.push_back(i);
  p.tie_broken = tied.size() > 1;
  p.chosen_index = p.tie_broken ? tied[text::seeded_pick(config.rng_seed, "tie", base.story_id, tied.size())]
                                : tied.front();
  p.chosen_target = p.per_target_scores[p.chosen_index].target_id;
  return p;
}

// Line-delimited debug dump of one story-pair scoring: elements, the full
// quadruple table, every run, and the result.
inline std::vector<nlohmann::json> trace_records(const PairScore& ps, const MappingConfig& config) {
  using nlohmann::json;
  std::vector<json> out;
  out.push_back(json{{"record", "config"}, {"mapping", to_json(config)}});
  auto elements = [&](int side, const PairSourceView& v) {
    for (std::size_t pos = 0; pos < v.size(); ++pos) {
      const auto& e = v.elements[pos];
      json cons = json::object();
      for (const auto& [k, t] : e.constraint_texts) cons[std::string(to_string(k))] = t;
      out.push_back(json{{"record", "element"},
                         {"side", side},
                         {"story_id", v.story_id},
                         {"position", pos},
                         {"element_id", e.element_id},
                         {"text", e.text},
                         {"constraints", cons}});
    }
  };
  elements(1, ps.base_view);
  elements(2, ps.target_view);
  if (ps.fallback_used) {
    out.push_back(json{{"record", "result"},
                       {"score", ps.score},
                       {"fallback", true},
                       {"rule", "single-element view: score is the max element cosine"}});
    return out;
  }
  for (const auto& q : ps.quadruples) {
    json cons = json::object();
    for (const auto& [k, m] : ps.tables.constraint)
      cons[std::string(to_string(k))] = {m.at(q.s1_pair.first, q.s2_pair.first),
                                         m.at(q.s1_pair.second, q.s2_pair.second)};
    out.push_back(json{{"record", "quadruple"},
                       {"s1", {q.s1_pair.first, q.s1_pair.second}},
                       {"s2", {q.s2_pair.first, q.s2_pair.second}},
                       {"s1_text", {ps.base_view.elements[q.s1_pair.first].text,
                                    ps.base_view.elements[q.s1_pair.second].text}},
                       {"s2_text", {ps.target_view.elements[q.s2_pair.first].text,
                                    ps.target_view.elements[q.s2_pair.second].text}},
                       {"cosines", {ps.tables.element.at(q.s1_pair.first, q.s2_pair.first),
                                    ps.tables.element.at(q.s1_pair.second, q.s2_pair.second)}},
                       {"constraint_cosines", cons},
                       {"score", q.score}});
  }
  for (std::size_t r = 0; r < ps.greedy.runs.size(); ++r) {
    const auto& run = ps.greedy.runs[r];
    json corr = json::array();
    for (const auto& [a, b] : run.correspondences) corr.push_back({a, b});
    out.push_back(json{{"record", "run"},
                       {"run", r},
                       {"score", run.score},
                       {"included", run.included_quadruples.size()},
                       {"correspondences", corr}});
  }
  out.push_back(json{{"record", "result"}, {"score", ps.score}, {"fallback", false}, {"best_run", ps.greedy.best_run}});
  return out;
}

}  // namespace yarn::mapping
