#pragma once

#include <memory>
#include <vector>

#include "distortion/geomaps.hpp"

namespace distortion {

/// Raised when a slice map along some axis is not increasing enough.
class MonotonicityError : public DecompositionError {
 public:
  MonotonicityError(int axis, Point sample, Real slope);
  int axis;
  Point sample;
  Real slope;
};

/// phi_k: changes coordinate k only.
struct FoliationFactor {
  int axis;
  Real solve_tol;
  MapExpr map;
};

struct FoliationOptions {
  Real half_width = 1;   // the cube (-w, w)^N
  int grid = 17;         // points per axis of the verification grid
  Real tol = 1e-6L;      // reconstruction tolerance
  Real solve_tol = 1e-10L;
  Real min_slope = 0.2L;
  int slope_refine = 8;  // slope samples per grid cell along each axis
  int projection_samples = 200;
  std::uint64_t seed = 1;
};

struct DecompositionReport {
  std::vector<FoliationFactor> factors;  // factors[k] = phi_k, f = phi_{N-1} o ... o phi_0
  Real sup_error = 0;                    // reconstruction on the grid
  std::vector<Real> margins;             // min slice slope per axis
  std::vector<Real> projection_errors;   // |p_k(f o phi_0^-1 o ... o phi_k^-1) - p_k|
  Real max_solve_residual = 0;
  std::size_t grid_points = 0;
  bool passed = false;
};

/// The recursion phi_k(x)_k = (f o phi_0^-1 o ... o phi_{k-1}^-1)(x)_k, with no
/// checks. Inverses are monotone 1-D solves.
std::vector<FoliationFactor> foliation_factors(const MapExpr& f, Real half_width = 1,
                                               Real solve_tol = 1e-10L);

DecompositionReport foliation_decompose(const MapExpr& f, const FoliationOptions& options = {});

struct LeafReport {
  int axis;
  Real off_axis_drift;  // max |phi(x)_j - x_j| over j != axis
  Real margin;          // sampled lower bound of the slice slope
  bool ok;              // drift == 0 and margin > 0
};

/// Slopes are finite differences with step `step` along the factor's axis.
LeafReport leaf_preservation_check(const FoliationFactor& factor,
                                   const std::vector<Point>& samples, Real step = 1.0L / 16);

struct Slab {
  int axis;
  Real lo, hi;
};

struct Fragment {
  int axis;
  int slab;  // index into the cover
  MapExpr map;
};

/// Splits h into maps each supported in one slab; h = out[0] o out[1] o ...
/// Every axis whose factor moves points needs slabs covering [-w, w] with
/// overlaps. Throws DecompositionError when a cut point moves by more than
/// half the overlap it sits in.
std::vector<Fragment> fragmentation_c0(const MapExpr& h, const std::vector<Slab>& cover,
                                       const FoliationOptions& options = {});

/// Composition of `twists` twists in random coordinate planes, each turning
/// by +-amplitude inside B(c, 0.25) and fading out by radius 0.35, |c| <= 0.3.
/// Supported in B(0, 0.65) inside the unit cube.
MapExpr random_perturbation(int dim, Real amplitude, std::uint64_t seed, int twists = 3);

/// Points of the grid^N lattice on [-w, w]^N, last axis varying fastest.
std::vector<Point> cube_grid(int dim, int per_axis, Real half_width);

}  // namespace distortion
