#pragma once

// Pair generation and the local (quadruple) score.
//
// A quadruple [(p_i, p_j), (p_k, p_l)] scores the mean of cos(p_i, p_k) and
// cos(p_j, p_l). Each active soft constraint g adds the two terms
// cos(g(p_i), g(p_k)) and cos(g(p_j), g(p_l)) to the same uniform mean.

#include <cstddef>
#include <map>
#include <vector>

#include "yarn/core/model.hpp"
#include "yarn/embedding/embedder.hpp"
#include "yarn/mapping/view.hpp"

namespace yarn::mapping {

// All C(m, 2) position pairs (a, b) with a < b in view order.
inline std::vector<ElementPair> generate_pairs(const PairSourceView& view) {
  const std::size_t m = view.size();
  if (m < 2) throw InsufficientUnits(m);
  std::vector<ElementPair> pairs;
  pairs.reserve(m * (m - 1) / 2);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) pairs.emplace_back(a, b);
  return pairs;
}

// Uniform mean of the two element cosines and any constraint cosine pairs.
inline double combine_local_terms(double elem_first, double elem_second,
                                  const std::vector<std::pair<double, double>>& constraint_terms = {}) {
  double sum = elem_first + elem_second;
  for (const auto& [a, b] : constraint_terms) sum += a + b;
  return sum / static_cast<double>(2 + 2 * constraint_terms.size());
}

struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;
  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Cross-story cosine tables indexed by view position.
struct SimilarityTables {
  Matrix element;
  std::map<Constraint, Matrix> constraint;
};

inline SimilarityTables build_tables(const PairSourceView& v1, const PairSourceView& v2,
                                     const MappingConfig& config, embedding::Embedder& embedder) {
  std::vector<std::string> all;
  for (const auto* v : {&v1, &v2})
    for (const auto& e : v->elements) {
      all.push_back(e.text);
      for (const auto& [k, t] : e.constraint_texts) all.push_back(t);
    }
  embedder.prefetch(all);

  auto table = [&](auto text_of) {
    std::vector<embedding::Vector> a, b;
    for (const auto& e : v1.elements) a.push_back(embedder.embed(text_of(e)));
    for (const auto& e : v2.elements) b.push_back(embedder.embed(text_of(e)));
    Matrix m(a.size(), b.size());
    for (std::size_t r = 0; r < a.size(); ++r)
      for (std::size_t c = 0; c < b.size(); ++c) m.at(r, c) = embedding::cosine(a[r], b[c]);
    return m;
  };
  SimilarityTables t;
  t.element = table([](const ViewElement& e) -> const std::string& { return e.text; });
  for (auto k : config.constraints)
    t.constraint[k] = table([k](const ViewElement& e) -> const std::string& { return e.constraint_texts.at(k); });
  return t;
}

inline double score_local(const Quadruple& q, const SimilarityTables& t) {
  const auto [i, j] = q.s1_pair;
  const auto [k, l] = q.s2_pair;
  std::vector<std::pair<double, double>> extra;
  extra.reserve(t.constraint.size());
  for (const auto& [_, m] : t.constraint) extra.emplace_back(m.at(i, k), m.at(j, l));
  return combine_local_terms(t.element.at(i, k), t.element.at(j, l), extra);
}

// Direct evaluation from the views, without precomputed tables.
inline double score_local(const Quadruple& q, const PairSourceView& v1, const PairSourceView& v2,
                          const MappingConfig& config, embedding::Embedder& embedder) {
  const auto& pi = v1.elements.at(q.s1_pair.first);
  const auto& pj = v1.elements.at(q.s1_pair.second);
  const auto& pk = v2.elements.at(q.s2_pair.first);
  const auto& pl = v2.elements.at(q.s2_pair.second);
  auto cos = [&](const std::string& a, const std::string& b) {
    return embedding::cosine(embedder.embed(a), embedder.embed(b));
  };
  std::vector<std::pair<double, double>> extra;
  for (auto k : config.constraints)
    extra.emplace_back(cos(pi.constraint_texts.at(k), pk.constraint_texts.at(k)),
                       cos(pj.constraint_texts.at(k), pl.constraint_texts.at(k)));
  return combine_local_terms(cos(pi.text, pk.text), cos(pj.text, pl.text), extra);
}

// Every (P1 pair, P2 pair) combination, scored. Both views need >= 2 elements.
inline std::vector<Quadruple> enumerate_quadruples(const PairSourceView& v1, const PairSourceView& v2,
                                                   const SimilarityTables& t) {
  auto p1 = generate_pairs(v1);
  auto p2 = generate_pairs(v2);
  std::vector<Quadruple> out;
  out.reserve(p1.size() * p2.size());
  for (const auto& a : p1)
    for (const auto& b : p2) {
      Quadruple q{a, b, 0.0};
      q.score = score_local(q, t);
      out.push_back(q);
    }
  return out;
}

}  // namespace yarn::mapping
