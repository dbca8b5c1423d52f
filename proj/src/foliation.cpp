#include "distortion/foliation.hpp"

#include <algorithm>
#include <random>

#include "distortion/root_find.hpp"

namespace distortion {

MonotonicityError::MonotonicityError(int axis_, Point sample_, Real slope_)
    : DecompositionError("slice map along axis " + std::to_string(axis_) +
                         " is not increasing enough at " + to_string(sample_) +
                         " (slope " + format_real(slope_, 6) + ")"),
      axis(axis_),
      sample(std::move(sample_)),
      slope(slope_) {}

namespace {

struct Shared {
  MapExpr f;
  Real half_width;
  Real solve_tol;
  std::vector<MapExpr> factors;  // filled in order; factor k reads 0..k-1
  mutable Real max_residual = 0;
};

class Factor final : public ExternalMap {
 public:
  Factor(std::shared_ptr<Shared> s, int k) : s_(std::move(s)), k_(k) {}

  Point forward(const Point& x) const override {
    Point out = x;
    out[k_] = coordinate(x);
    return out;
  }

  Point backward(const Point& y) const override {
    const Real w = s_->half_width, yk = y[k_];
    Point x = y;
    auto g = [&](Real t) {
      x[k_] = t;
      return coordinate(x);
    };
    Real lo = std::min(yk, -w) - 1, hi = std::max(yk, w) + 1;
    SolveResult r = monotone_solve(g, yk, lo, hi, s_->solve_tol);
    s_->max_residual = std::max(s_->max_residual, r.residual);
    Point out = y;
    out[k_] = r.x;
    return out;
  }

  std::string name() const override { return "foliation factor " + std::to_string(k_); }

 private:
  // (f o phi_0^-1 o ... o phi_{k-1}^-1)(x)_k
  Real coordinate(const Point& x) const {
    Point z = x;
    for (int j = k_ - 1; j >= 0; --j) z = s_->factors[j].apply_inverse(z);
    return s_->f.apply(z)[k_];
  }

  std::shared_ptr<Shared> s_;
  int k_;
};

std::shared_ptr<Shared> build_factors(const MapExpr& f, Real half_width, Real solve_tol,
                                      std::vector<FoliationFactor>& out) {
  const int n = f.dim();
  if (n < 1) throw DimensionError("foliation needs a map with a known dimension");
  if (!(half_width > 0)) throw DomainError("cube half width must be positive");
  auto shared = std::make_shared<Shared>(Shared{f, half_width, solve_tol, {}});
  if (f.is_identity()) {
    for (int k = 0; k < n; ++k) out.push_back({k, solve_tol, identity(n)});
    return shared;
  }
  const Real support = half_width * rm::sqrt(Real(n)) * (1 + 1e-12L);
  for (int k = 0; k < n; ++k) {
    MapExpr m = external(std::make_shared<Factor>(shared, k), n, support);
    shared->factors.push_back(m);
    out.push_back({k, solve_tol, m});
  }
  return shared;
}

}  // namespace

std::vector<Point> cube_grid(int dim, int per_axis, Real half_width) {
  if (per_axis < 2) throw DomainError("grid needs at least 2 points per axis");
  long total = 1;
  for (int k = 0; k < dim; ++k) total *= per_axis;
  std::vector<Point> out;
  out.reserve(total);
  for (long i = 0; i < total; ++i) {
    Point p(dim);
    long r = i;
    for (int k = dim - 1; k >= 0; --k, r /= per_axis)
      p[k] = -half_width + 2 * half_width * (r % per_axis) / (per_axis - 1);
    out.push_back(p);
  }
  return out;
}

std::vector<FoliationFactor> foliation_factors(const MapExpr& f, Real half_width,
                                               Real solve_tol) {
  std::vector<FoliationFactor> out;
  build_factors(f, half_width, solve_tol, out);
  return out;
}

namespace {

// Flat index helpers for the grid^N lattice (axis 0 varies slowest).
long stride_of(int dim, int per_axis, int axis) {
  long s = 1;
  for (int k = axis + 1; k < dim; ++k) s *= per_axis;
  return s;
}

}  // namespace

DecompositionReport foliation_decompose(const MapExpr& f, const FoliationOptions& opt) {
  const int n = f.dim();
  const Real w = opt.half_width;
  const auto grid = cube_grid(n, opt.grid, w);

  // f must be the identity near the boundary of the cube
  for (const auto& x : grid) {
    bool boundary = false;
    for (int k = 0; k < n; ++k) boundary = boundary || rm::abs(x[k]) == w;
    if (boundary && distance(f.apply(x), x) > 1e-12L)
      throw SupportError("map moves the boundary point " + to_string(x) + " of the cube");
  }

  DecompositionReport rep;
  auto shared = build_factors(f, w, opt.solve_tol, rep.factors);
  rep.grid_points = grid.size();
  const Real h = 2 * w / (opt.grid - 1);

  const int refine = std::max(1, opt.slope_refine);
  for (int k = 0; k < n; ++k) {
    const MapExpr& phi = rep.factors[k].map;
    const long stride = stride_of(n, opt.grid, k);
    Real margin = 1;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      long idx = static_cast<long>(i) / stride % opt.grid;
      if (idx + 1 >= opt.grid) continue;
      // walk the cell [x_k, x_k + h] in `refine` steps
      Point x = grid[i];
      Real prev = phi.apply(x)[k];
      for (int s = 1; s <= refine; ++s) {
        Point y = grid[i];
        y[k] = s == refine ? grid[i + stride][k] : grid[i][k] + h * s / refine;
        Real cur = phi.apply(y)[k];
        Real slope = (cur - prev) / (y[k] - x[k]);
        if (slope < opt.min_slope) throw MonotonicityError(k, x, slope);
        margin = std::min(margin, slope);
        prev = cur;
        x = y;
      }
    }
    rep.margins.push_back(margin);
  }

  for (const auto& x : grid) {
    Point y = x;
    for (const auto& fac : rep.factors) y = fac.map.apply(y);
    rep.sup_error = std::max(rep.sup_error, distance(y, f.apply(x)));
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> samples;
  for (int i = 0; i < opt.projection_samples; ++i) {
    Point x(n);
    for (int k = 0; k < n; ++k) x[k] = w * Real(u(rng));
    samples.push_back(x);
  }
  for (int k = 0; k < n; ++k) {
    Real err = 0;
    for (const auto& x : samples) {
      Point z = x;
      for (int j = k; j >= 0; --j) z = rep.factors[j].map.apply_inverse(z);
      Point fz = f.apply(z);
      for (int j = 0; j <= k; ++j) err = std::max(err, rm::abs(fz[j] - x[j]));
    }
    rep.projection_errors.push_back(err);
  }
  rep.max_solve_residual = shared->max_residual;
  rep.passed = rep.sup_error < opt.tol && rep.max_solve_residual < opt.solve_tol;
  for (Real e : rep.projection_errors) rep.passed = rep.passed && e < 1e-8L;
  return rep;
}

LeafReport leaf_preservation_check(const FoliationFactor& factor,
                                   const std::vector<Point>& samples, Real step) {
  const int k = factor.axis;
  LeafReport r{k, 0, 1, true};
  for (const auto& x : samples) {
    Point y = factor.map.apply(x);
    for (int j = 0; j < x.dim(); ++j)
      if (j != k) r.off_axis_drift = std::max(r.off_axis_drift, rm::abs(y[j] - x[j]));
    Point x2 = x;
    x2[k] += step;
    r.margin = std::min(r.margin, (factor.map.apply(x2)[k] - y[k]) / step);
  }
  r.ok = r.off_axis_drift == 0 && r.margin > 0;
  return r;
}

MapExpr random_perturbation(int dim, Real amplitude, std::uint64_t seed, int twists) {
  if (dim < 2) throw DimensionError("twist perturbations need dimension >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> axis(0, dim - 1);
  std::vector<MapExpr> parts;
  for (int t = 0; t < twists; ++t) {
    int i = axis(rng), j = axis(rng);
    while (j == i) j = axis(rng);
    Point c(dim);
    do {
      for (int k = 0; k < dim; ++k) c[k] = 0.3L * Real(u(rng));
    } while (c.norm() > 0.3L);
    Real sign = u(rng) < 0 ? -1 : 1;
    parts.push_back(twist(dim, i, j, sign * amplitude, Ramp{0.25L, 0.35L}, c));
  }
  return compose(parts);
}

// ---- fragmentation ---------------------------------------------------------

namespace {

struct AxisCover {
  std::vector<int> index;  // positions in the caller's cover
  std::vector<Real> lo, hi, cut, half_overlap;
};

// The factor restricted to one coordinate line, split at the cuts:
// R_0 = g, P_j = g-like on t <= c_j and linear up to hi_j, R_{j+1} = R_j o P_j^-1.
class LineSplit {
 public:
  LineSplit(const MapExpr& phi, const AxisCover& cov, int axis, const Point& x)
      : phi_(phi), cov_(cov), k_(axis), x_(x) {}

  Real g(Real t) const {
    Point p = x_;
    p[k_] = t;
    return phi_.apply(p)[k_];
  }
  Real ginv(Real s) const {
    Point p = x_;
    p[k_] = s;
    return phi_.apply_inverse(p)[k_];
  }
  // R_j is the identity below R_{j-1}(c_{j-1}); return those points untouched
  Real R(int j, Real t) const {
    if (j == 0) return g(t);
    if (t <= R(j - 1, cov_.cut[j - 1])) return t;
    return R(j - 1, Pinv(j - 1, t));
  }
  Real Rinv(int j, Real s) const {
    if (j == 0) return ginv(s);
    if (s <= R(j - 1, cov_.cut[j - 1])) return s;
    return P(j - 1, Rinv(j - 1, s));
  }
  Real P(int j, Real t) const {
    const Real c = cov_.cut[j], hi = cov_.hi[j];
    if (t <= c) return R(j, t);
    if (t >= hi) return t;
    Real a = R(j, c);
    return a + (t - c) * ((hi - a) / (hi - c));
  }
  Real Pinv(int j, Real s) const {
    const Real c = cov_.cut[j], hi = cov_.hi[j];
    if (s >= hi) return s;
    Real a = R(j, c);
    if (s <= a) return Rinv(j, s);
    return c + (s - a) * ((hi - c) / (hi - a));
  }
  // piece j of the line map
  Real piece(int j, Real t) const {
    return j + 1 == static_cast<int>(cov_.lo.size()) ? R(j, t) : P(j, t);
  }
  Real piece_inv(int j, Real s) const {
    return j + 1 == static_cast<int>(cov_.lo.size()) ? Rinv(j, s) : Pinv(j, s);
  }

 private:
  const MapExpr& phi_;
  const AxisCover& cov_;
  int k_;
  const Point& x_;
};

class SlabPiece final : public ExternalMap {
 public:
  SlabPiece(MapExpr phi, std::shared_ptr<const AxisCover> cov, int axis, int j)
      : phi_(std::move(phi)), cov_(std::move(cov)), k_(axis), j_(j) {}
  Point forward(const Point& x) const override {
    Point y = x;
    y[k_] = LineSplit(phi_, *cov_, k_, x).piece(j_, x[k_]);
    return y;
  }
  Point backward(const Point& y) const override {
    Point x = y;
    x[k_] = LineSplit(phi_, *cov_, k_, y).piece_inv(j_, y[k_]);
    return x;
  }
  std::string name() const override {
    return "slab piece " + std::to_string(k_) + "." + std::to_string(j_);
  }

 private:
  MapExpr phi_;
  std::shared_ptr<const AxisCover> cov_;
  int k_, j_;
};

}  // namespace

std::vector<Fragment> fragmentation_c0(const MapExpr& h, const std::vector<Slab>& cover,
                                       const FoliationOptions& opt) {
  const int n = h.dim();
  const Real w = opt.half_width;
  std::vector<AxisCover> axes(n);
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const Slab& s = cover[i];
    if (s.axis < 0 || s.axis >= n) throw DimensionError("slab axis out of range");
    if (!(s.lo < s.hi)) throw DomainError("slab needs lo < hi");
    axes[s.axis].index.push_back(static_cast<int>(i));
  }
  for (int k = 0; k < n; ++k) {
    AxisCover& a = axes[k];
    std::sort(a.index.begin(), a.index.end(),
              [&](int x, int y) { return cover[x].lo < cover[y].lo; });
    for (int i : a.index) {
      a.lo.push_back(cover[i].lo);
      a.hi.push_back(cover[i].hi);
    }
    if (a.index.empty()) continue;
    if (a.lo.front() > -w || a.hi.back() < w)
      throw DomainError("slabs along axis " + std::to_string(k) + " do not cover the cube");
    for (std::size_t j = 0; j + 1 < a.lo.size(); ++j) {
      if (!(a.lo[j + 1] < a.hi[j]) || !(a.lo[j + 1] > a.lo[j]) || !(a.hi[j + 1] > a.hi[j]))
        throw DomainError("consecutive slabs along axis " + std::to_string(k) +
                          " must overlap and be nested in order");
      a.cut.push_back((a.lo[j + 1] + a.hi[j]) / 2);
      a.half_overlap.push_back((a.hi[j] - a.lo[j + 1]) / 2);
    }
  }

  DecompositionReport rep = foliation_decompose(h, opt);
  const auto grid = cube_grid(n, opt.grid, w);
  std::vector<Fragment> out;
  for (int k = n - 1; k >= 0; --k) {
    const MapExpr& phi = rep.factors[k].map;
    auto cov = std::make_shared<const AxisCover>(axes[k]);
    if (cov->index.empty()) {
      for (const auto& x : grid)
        if (distance(phi.apply(x), x) > opt.tol)
          throw DecompositionError("factor " + std::to_string(k) +
                                   " moves points but the cover has no slab along that axis");
      continue;
    }
    const int m = static_cast<int>(cov->lo.size());
    if (!phi.is_identity()) {
      for (const auto& x : grid) {
        if (x[k] != -w) continue;  // one representative per line
        LineSplit line(phi, *cov, k, x);
        for (int j = 0; j + 1 < m; ++j) {
          Real moved = rm::abs(line.R(j, cov->cut[j]) - cov->cut[j]);
          if (moved >= cov->half_overlap[j])
            throw DecompositionError(
                "cover too fine along axis " + std::to_string(k) + ": cut " +
                format_real(cov->cut[j], 6) + " moves by " + format_real(moved, 6) +
                " but the overlap allows " + format_real(cov->half_overlap[j], 6));
        }
      }
    }
    for (int j = m - 1; j >= 0; --j) {
      MapExpr piece = phi.is_identity()
                          ? identity(n)
                          : external(std::make_shared<SlabPiece>(phi, cov, k, j), n,
                                     phi.support_radius());
      out.push_back({k, cov->index[j], piece});
    }
  }
  return out;
}

}  // namespace distortion
