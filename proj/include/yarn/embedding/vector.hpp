#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "yarn/core/errors.hpp"

namespace yarn::embedding {

struct Vector {
  std::vector<double> values;

  Vector() = default;
  explicit Vector(std::vector<double> v) : values(std::move(v)) {}
  Vector(std::initializer_list<double> v) : values(v) {}

  std::size_t dim() const noexcept { return values.size(); }
  std::span<const double> view() const noexcept { return values; }

  bool is_zero() const noexcept {
    return std::all_of(values.begin(), values.end(), [](double x) { return x == 0.0; });
  }
  bool is_finite() const noexcept {
    return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
  }

  friend bool operator==(const Vector&, const Vector&) = default;
};

// Cosine similarity without the final clamp. Exposed for property tests.
inline double raw_cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DimensionError(u.size(), v.size());
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw DegenerateVector("cosine of a zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

// Cosine similarity clamped to [-1, 1].
inline double cosine(const Vector& u, const Vector& v) {
  return std::clamp(raw_cosine(u.view(), v.view()), -1.0, 1.0);
}

}  // namespace yarn::embedding
