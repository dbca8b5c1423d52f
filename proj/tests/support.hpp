// Shared helpers for the unit tests: random map generators and the
// default generator maps built directly from primitives.
#pragma once

#include <random>

#include "doctest.h"
#include <vector>

#include "distortion/geomaps.hpp"

namespace testsupport {

using namespace distortion;

inline std::vector<Real> random_knots(std::mt19937_64& rng, Real lo, Real hi,
                                      int inner) {
  std::uniform_real_distribution<double> u(0.3, 1.0);
  std::vector<double> w(inner + 1);
  double total = 0;
  for (auto& x : w) total += (x = u(rng));
  std::vector<Real> out{lo};
  double acc = 0;
  for (int i = 0; i < inner; ++i) {
    acc += w[i];
    out.push_back(lo + (hi - lo) * Real(acc / total));
  }
  out.push_back(hi);
  return out;
}

/// Random strictly increasing profile with slopes in roughly [0.3, 3.3].
inline MonotonePL random_profile(std::mt19937_64& rng, Real lo, Real hi,
                                 int inner, bool radial) {
  if (radial) lo = 0;
  return MonotonePL(random_knots(rng, lo, hi, inner), random_knots(rng, lo, hi, inner));
}

inline Point random_point(std::mt19937_64& rng, int dim, Real radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Point p(dim);
    for (int k = 0; k < dim; ++k) p[k] = u(rng);
    if (p.norm2() <= 1) return p * radius;
  }
}

/// One random primitive of a random kind (radial, translation, push, twist).
inline MapExpr random_primitive(std::mt19937_64& rng, int dim) {
  std::uniform_int_distribution<int> pick(0, dim >= 2 ? 3 : 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point c = random_point(rng, dim, 0.5);
  switch (pick(rng)) {
    case 0:
      return radial(dim, random_profile(rng, 0, 1.5, 3, true), c);
    case 1: {
      Point a = random_point(rng, dim, 0.6);
      return localized_translation(a, Ramp{0.5, 1.5}, c);
    }
    case 2: {
      int axis = std::uniform_int_distribution<int>(0, dim - 1)(rng);
      return axis_push(dim, axis, random_profile(rng, -1.5, 1.5, 3, false),
                       Ramp{0.3, 1.0}, c);
    }
    default: {
      int i = std::uniform_int_distribution<int>(0, dim - 1)(rng);
      int j = (i + 1) % dim;
      return twist(dim, i, j, Real(4 * u(rng) - 2), Ramp{0.2, 1.2}, c);
    }
  }
}

/// Random composition chain of the given depth, with some inverses and
/// exact powers mixed in.
inline MapExpr random_chain(std::mt19937_64& rng, int dim, int depth) {
  std::vector<MapExpr> ms;
  std::uniform_int_distribution<int> coin(0, 3);
  for (int i = 0; i < depth; ++i) {
    MapExpr m = random_primitive(rng, dim);
    int c = coin(rng);
    if (c == 0) m = inverse(m);
    if (c == 1 && (m.kind() == MapKind::radial || m.kind() == MapKind::push))
      m = power_exact(m, 3);
    ms.push_back(m);
  }
  return compose(ms);
}

inline MapExpr default_f1(int dim, Real lambda = 0.5L) {
  return radial(dim, MonotonePL({0, 2, 4}, {0, 2 * lambda, 4}));
}

inline MapExpr default_f2(int dim) {
  return localized_translation(Point::axis(dim, 0, 0.5L), Ramp{1, 2});
}

inline MapExpr default_f3(int dim) {
  return axis_push(dim, 0, MonotonePL({-1.5L, 0, 1}, {-1.5L, 0.5L, 1}),
                   Ramp{0.5L, 1});
}

}  // namespace testsupport

namespace doctest {
template <>
struct StringMaker<distortion::Point> {
  static String convert(const distortion::Point& p) {
    std::string s = "(";
    for (int i = 0; i < p.dim(); ++i)
      s += (i ? ", " : "") + distortion::format_real(p[i], 21);
    return (s + ")").c_str();
  }
};
}  // namespace doctest

namespace testsupport {

/// Localized translation with |a| <= 0.5, |c| <= 0.3, ramp (0.4, 1):
/// declared support radius stays below 1.9.
inline MapExpr random_bump(std::mt19937_64& rng, int dim) {
  Point a = random_point(rng, dim, 0.5L);
  Point c = random_point(rng, dim, 0.3L);
  return localized_translation(a, Ramp{0.4L, 1}, c);
}

}  // namespace testsupport
