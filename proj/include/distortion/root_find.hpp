#pragma once

#include <cmath>

#include "distortion/errors.hpp"
#include "distortion/real.hpp"

namespace distortion {

struct SolveResult {
  Real x;
  Real residual;  // |g(x) - y|
  int iterations;
};

/// Solves g(x) = y for a nondecreasing g on [lo, hi] with g(lo) <= y <= g(hi).
/// Bisects until the bracket is narrower than `switch_width`, then runs a
/// bracketed secant (Illinois weighting) until the residual is below `tol`.
template <class G>
SolveResult monotone_solve(const G& g, Real y, Real lo, Real hi, Real tol,
                           Real switch_width = 1e-2L, int max_iter = 200) {
  Real flo = g(lo) - y, fhi = g(hi) - y;
  if (flo > 0 || fhi < 0) throw DomainError("monotone_solve: target not bracketed");
  if (flo == 0) return {lo, 0, 0};
  if (fhi == 0) return {hi, 0, 0};
  int it = 0;
  while (hi - lo > switch_width && it < max_iter) {
    Real mid = (lo + hi) / 2;
    Real fm = g(mid) - y;
    ++it;
    if (rm::abs(fm) < tol) return {mid, rm::abs(fm), it};
    if (fm < 0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  int side = 0;
  while (it < max_iter) {
    Real x = lo - flo * (hi - lo) / (fhi - flo);
    if (!(x > lo && x < hi)) x = (lo + hi) / 2;
    Real fx = g(x) - y;
    ++it;
    if (rm::abs(fx) < tol || hi - lo <= 4 * rm::epsilon() * (1 + rm::abs(x)))
      return {x, rm::abs(fx), it};
    if (fx < 0) {
      lo = x;
      flo = fx;
      if (side == -1) fhi /= 2;
      side = -1;
    } else {
      hi = x;
      fhi = fx;
      if (side == 1) flo /= 2;
      side = 1;
    }
  }
  throw ConvergenceError("monotone_solve: no convergence in " + std::to_string(max_iter) +
                         " iterations");
}

}  // namespace distortion
