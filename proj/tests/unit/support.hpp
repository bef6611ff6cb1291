#pragma once

#include "specflow/core.hpp"
#include "specflow/functionals.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace testkit {

using specflow::Functional;
using specflow::Index;
using specflow::Matrix;
using specflow::Vector;

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(Index(xs.size()));
  Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vector gaussian(Index n, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> d(0.0, sigma);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = d(rng);
  return v;
}

/// Integers in [-range, range] divided by den; exactly representable and tie-prone.
inline Vector dyadic(Index n, std::mt19937_64& rng, int range = 8, double den = 4.0) {
  std::uniform_int_distribution<int> d(-range, range);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = d(rng) / den;
  return v;
}

inline double max_abs_diff(const Vector& a, const Vector& b) { return (a - b).cwiseAbs().maxCoeff(); }

/// The four built-in families used by the property suites, at dimension 16 (grid 2x4).
inline std::vector<Functional> builtin_family(Index n = 16) {
  return {specflow::tv1d(n), specflow::l1(n), specflow::linf(n),
          specflow::grid_divergence({2, int(n / 4)})};
}

}  // namespace testkit
