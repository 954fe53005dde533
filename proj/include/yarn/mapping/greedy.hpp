#pragma once

// Greedy one-to-one global mapping with restarts.
//
// Quadruples are ranked by descending score (ties: lexicographic
// (s1_pair, s2_pair)). Each of the top-n quadruples seeds one run: the run
// starts from the seed's two atomic mappings, then scans every other
// quadruple in rank order and keeps each one whose mappings agree with the
// current partial mapping. A run scores the sum of its kept quadruples; the
// result is the best run (earliest rank on equal scores).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "yarn/core/model.hpp"

namespace yarn::mapping {

struct GreedyResult {
  GlobalMapping best;
  std::size_t best_run = 0;
  std::vector<GlobalMapping> runs;  // one per seed, in seed rank order
};

// Rank order used by the greedy scan.
inline bool quadruple_precedes(const Quadruple& a, const Quadruple& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.s1_pair != b.s1_pair) return a.s1_pair < b.s1_pair;
  return a.s2_pair < b.s2_pair;
}

namespace detail {

class PartialMapping {
 public:
  explicit PartialMapping(std::size_t n1, std::size_t n2) : fwd_(n1, kNone), bwd_(n2, kNone) {}

  // x -> y is acceptable if x is unmapped and y unassigned, or x -> y already.
  bool accepts(std::size_t x, std::size_t y) const {
    if (fwd_[x] == y) return true;
    return fwd_[x] == kNone && bwd_[y] == kNone;
  }
  bool accepts(const Quadruple& q) const {
    return accepts(q.s1_pair.first, q.s2_pair.first) && accepts(q.s1_pair.second, q.s2_pair.second);
  }
  void add(const Quadruple& q) {
    put(q.s1_pair.first, q.s2_pair.first);
    put(q.s1_pair.second, q.s2_pair.second);
  }
  std::map<std::size_t, std::size_t> correspondences() const {
    std::map<std::size_t, std::size_t> out;
    for (std::size_t x = 0; x < fwd_.size(); ++x)
      if (fwd_[x] != kNone) out.emplace(x, fwd_[x]);
    return out;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  void put(std::size_t x, std::size_t y) {
    fwd_[x] = y;
    bwd_[y] = x;
  }
  std::vector<std::size_t> fwd_, bwd_;
};

}  // namespace detail

inline GreedyResult greedy_global(std::vector<Quadruple> quadruples, int beam_n,
                                  bool normalize_by_included = false) {
  if (beam_n < 1) throw std::invalid_argument("beam_n must be >= 1");
  GreedyResult result;
  if (quadruples.empty()) return result;

  std::size_t n1 = 0, n2 = 0;
  for (const auto& q : quadruples) {
    if (std::isnan(q.score)) throw std::invalid_argument("quadruple with NaN score");
    if (q.s1_pair.first == q.s1_pair.second || q.s2_pair.first == q.s2_pair.second)
      throw std::invalid_argument("quadruple pairs must hold two distinct elements");
    n1 = std::max({n1, q.s1_pair.first + 1, q.s1_pair.second + 1});
    n2 = std::max({n2, q.s2_pair.first + 1, q.s2_pair.second + 1});
  }
  std::sort(quadruples.begin(), quadruples.end(), quadruple_precedes);

  const std::size_t seeds = std::min<std::size_t>(static_cast<std::size_t>(beam_n), quadruples.size());
  for (std::size_t r = 0; r < seeds; ++r) {
    detail::PartialMapping partial(n1, n2);
    GlobalMapping run;
    partial.add(quadruples[r]);
    run.included_quadruples.push_back(quadruples[r]);
    for (std::size_t s = 0; s < quadruples.size(); ++s) {
      if (s == r || !partial.accepts(quadruples[s])) continue;
      partial.add(quadruples[s]);
      run.included_quadruples.push_back(quadruples[s]);
    }
    double sum = 0;
    for (const auto& q : run.included_quadruples) sum += q.score;
    run.score = normalize_by_included ? sum / static_cast<double>(run.included_quadruples.size()) : sum;
    run.correspondences = partial.correspondences();
    if (r == 0 || run.score > result.best.score) {
      result.best = run;
      result.best_run = r;
    }
    result.runs.push_back(std::move(run));
  }
  return result;
}

}  // namespace yarn::mapping
