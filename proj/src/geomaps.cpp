#include "distortion/geomaps.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <string>

namespace distortion {

namespace {

constexpr Real kFixedPointTol = 1e-14L;
constexpr int kFixedPointMaxIter = 10000;

Real infinity() { return std::numeric_limits<Real>::infinity(); }

// Support bounds built from sums of norms are padded so that points whose
// computed norm is at the bound are also fixed after rounding.
Real padded(const Real& r) { return r * (1 + 256 * rm::epsilon()); }

Point center_or_origin(int dim, const std::optional<Point>& c) {
  if (!c) return Point(dim);
  if (c->dim() != dim) throw DimensionError("center dimension mismatch");
  if (!c->is_finite()) throw DomainError("center must be finite");
  return *c;
}

void check_dim(int dim) {
  if (dim < 1 || dim > kMaxDim)
    throw DimensionError("map dimension must be in [1, " +
                         std::to_string(kMaxDim) + "]");
}

int common_dim(int a, int b) {
  if (a == 0) return b;
  if (b == 0 || a == b) return a;
  throw DimensionError("dimension mismatch: " + std::to_string(a) + " vs " +
                       std::to_string(b));
}

Real push_support(int dim, int axis, const MonotonePL& p, const Ramp& t,
                  const Point& c) {
  Real cperp = 0;
  for (int k = 0; k < dim; ++k)
    if (k != axis) cperp += c[k] * c[k];
  Real along = std::max(rm::abs(p.lo()), rm::abs(p.hi()));
  Real across = dim > 1 ? rm::sqrt(cperp) + t.r_out : Real(0);
  return padded(rm::sqrt(along * along + across * across));
}

}  // namespace

std::string_view to_string(MapKind kind) {
  switch (kind) {
    case MapKind::identity: return "identity";
    case MapKind::radial: return "radial";
    case MapKind::translation: return "translation";
    case MapKind::push: return "push";
    case MapKind::twist: return "twist";
    case MapKind::affine: return "affine";
    case MapKind::compose: return "compose";
    case MapKind::inverse: return "inverse";
    case MapKind::piecewise_union: return "union";
    case MapKind::stack: return "stack";
    case MapKind::external: return "external";
  }
  return "unknown";
}

MapNode::MapNode(int dim, Real support_radius)
    : dim_(dim),
      support_(support_radius),
      support2_(rm::isfinite(support_radius) ? support_radius * support_radius
                                             : infinity()) {}

MapExpr::MapExpr() : node_(std::make_shared<nodes::Identity>(0)) {}

MapExpr::MapExpr(std::shared_ptr<const MapNode> node) : node_(std::move(node)) {
  if (!node_) node_ = std::make_shared<nodes::Identity>(0);
}

// ---- regions ---------------------------------------------------------------

bool RegionDescriptor::contains_exact(const Point& x) const {
  return map.apply_inverse(x).norm2() < radius * radius;
}

bool RegionDescriptor::contains(const Point& x) const {
  if (hint_center && (x - *hint_center).norm2() >= hint_radius * hint_radius)
    return false;
  return contains_exact(x);
}

Real RegionDescriptor::outer_bound() const {
  if (hint_center) return hint_center->norm() + hint_radius;
  return std::max(radius, map.support_radius());
}

// ---- nodes -------------------------------------------------------------------

namespace nodes {

Identity::Identity(int dim) : MapNode(dim, 0) {}

Radial::Radial(int dim, MonotonePL p, Point c, std::optional<PowerOrigin> o)
    : MapNode(dim, c.norm2() == 0 ? p.hi() : padded(c.norm() + p.hi())),
      profile(std::move(p)),
      center(std::move(c)),
      centered(center.norm2() == 0),
      origin(std::move(o)) {}

Point Radial::forward(const Point& x) const {
  if (centered) {
    Real r = x.norm();
    if (r == 0) return x;
    return x * profile.ratio(r);
  }
  Point d = x - center;
  Real r = d.norm();
  if (r == 0 || r >= profile.hi()) return x;
  return center + d * profile.ratio(r);
}

Point Radial::backward(const Point& y) const {
  if (centered) {
    Real r = y.norm();
    if (r == 0) return y;
    return y * profile.inverse_ratio(r);
  }
  Point d = y - center;
  Real r = d.norm();
  if (r == 0 || r >= profile.hi()) return y;
  return center + d * profile.inverse_ratio(r);
}

Translation::Translation(Point a_, Ramp cutoff_, Point c)
    : MapNode(a_.dim(), padded(c.norm() + cutoff_.r_out + a_.norm())),
      a(std::move(a_)),
      cutoff(cutoff_),
      center(std::move(c)),
      contraction(a.norm() * cutoff.lipschitz()) {}

Point Translation::forward(const Point& x) const {
  Real b = cutoff((x - center).norm());
  if (b == 0) return x;
  return x + a * b;
}

Point Translation::backward(const Point& y) const {
  // x = y - beta(|x - c|) a is a contraction with constant q = |a| Lip(beta).
  const Real q = contraction;
  Point x = y;
  for (int it = 0; it < kFixedPointMaxIter; ++it) {
    Point next = y - a * cutoff((x - center).norm());
    Real step = distance(next, x);
    x = next;
    if (step == 0 || step * q / (1 - q) <= kFixedPointTol) return x;
  }
  throw ConvergenceError("translation inverse did not converge (q = " +
                         format_real(q, 6) + ")");
}

Push::Push(int dim, int axis_, MonotonePL p, Ramp t, Point c, long power_)
    : MapNode(dim, power_ == 0 ? Real(0) : push_support(dim, axis_, p, t, c)),
      axis(axis_),
      profile(std::move(p)),
      powered(profile.power(power_)),
      transverse(t),
      center(std::move(c)),
      power(power_) {}

Real Push::weight(const Point& x) const {
  Real s = 0;
  for (int k = 0; k < x.dim(); ++k) {
    if (k == axis) continue;
    Real d = x[k] - center[k];
    s += d * d;
  }
  return transverse(rm::sqrt(s));
}

Point Push::forward(const Point& x) const {
  Real w = weight(x);
  if (w == 0 || power == 0) return x;
  Point y = x;
  if (w == 1) {
    y[axis] = powered(x[axis]);
  } else if (power > 0) {
    for (long i = 0; i < power; ++i) y[axis] = profile.blend(y[axis], w);
  } else {
    for (long i = 0; i < -power; ++i) y[axis] = profile.blend_inverse(y[axis], w);
  }
  return y;
}

Point Push::backward(const Point& y) const {
  Real w = weight(y);
  if (w == 0 || power == 0) return y;
  Point x = y;
  if (w == 1) {
    x[axis] = powered.inverse(y[axis]);
  } else if (power > 0) {
    for (long i = 0; i < power; ++i) x[axis] = profile.blend_inverse(x[axis], w);
  } else {
    for (long i = 0; i < -power; ++i) x[axis] = profile.blend(x[axis], w);
  }
  return x;
}

Twist::Twist(int dim, int i_, int j_, Real angle_, Ramp cutoff_, Point c)
    : MapNode(dim, padded(c.norm() + cutoff_.r_out)),
      i(i_),
      j(j_),
      angle(angle_),
      cutoff(cutoff_),
      center(std::move(c)) {}

Point Twist::rotate(const Point& x, const Real& sign) const {
  Point d = x - center;
  Real t = sign * angle * cutoff(d.norm());
  if (t == 0) return x;
  Real c = rm::cos(t), s = rm::sin(t);
  Point y = x;
  y[i] = center[i] + c * d[i] - s * d[j];
  y[j] = center[j] + s * d[i] + c * d[j];
  return y;
}

Point Twist::forward(const Point& x) const { return rotate(x, 1); }
Point Twist::backward(const Point& y) const { return rotate(y, -1); }

Affine::Affine(int dim, Real s, Point sh)
    : MapNode(dim, infinity()), scale(s), shift(std::move(sh)) {}

Point Affine::forward(const Point& x) const { return x * scale + shift; }
Point Affine::backward(const Point& y) const { return (y - shift) * (1 / scale); }

Compose::Compose(int dim, Real support, std::vector<MapExpr> ms)
    : MapNode(dim, support), maps(std::move(ms)) {}

Point Compose::forward(const Point& x) const {
  Point y = x;
  for (auto it = maps.rbegin(); it != maps.rend(); ++it) y = it->apply(y);
  return y;
}

Point Compose::backward(const Point& y) const {
  Point x = y;
  for (const auto& m : maps) x = m.apply_inverse(x);
  return x;
}

Inverse::Inverse(MapExpr c)
    : MapNode(c.dim(), c.support_radius()), child(std::move(c)) {}

PiecewiseUnion::PiecewiseUnion(int dim, Real support, std::vector<UnionPart> ps)
    : MapNode(dim, support), parts(std::move(ps)) {}

int PiecewiseUnion::locate(const Point& x) const {
  int found = -1;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (!parts[k].region.contains(x)) continue;
    if (found >= 0)
      throw RegionOverlapError("point claimed by regions " +
                               std::to_string(found) + " and " +
                               std::to_string(k));
    found = static_cast<int>(k);
  }
  return found;
}

Point PiecewiseUnion::forward(const Point& x) const {
  int k = locate(x);
  return k < 0 ? x : parts[k].map.apply(x);
}

Point PiecewiseUnion::backward(const Point& y) const {
  int k = locate(y);
  return k < 0 ? y : parts[k].map.apply_inverse(y);
}

Stack::Stack(MapExpr in, Real r0)
    : MapNode(in.dim(), r0), inner(std::move(in)), outer_radius(r0) {}

namespace {

// Applies 2^-i m(2^i x) on the layer of x; scalings by powers of two are exact.
template <class F>
Point stack_apply(const Point& x, const Real& r0, F&& f) {
  Real r = x.norm();
  if (r == 0 || r >= r0) return x;
  int e = 0;
  rm::frexp(r / r0, &e);
  int i = -e;
  Point y = x;
  for (int k = 0; k < y.dim(); ++k) y[k] = rm::ldexp(y[k], i);
  Point z = f(y);
  for (int k = 0; k < z.dim(); ++k) z[k] = rm::ldexp(z[k], -i);
  return z;
}

}  // namespace

Point Stack::forward(const Point& x) const {
  return stack_apply(x, outer_radius, [&](const Point& p) { return inner.apply(p); });
}

Point Stack::backward(const Point& y) const {
  return stack_apply(y, outer_radius,
                     [&](const Point& p) { return inner.apply_inverse(p); });
}

External::External(std::shared_ptr<const ExternalMap> i, int dim, Real support)
    : MapNode(dim, support), impl(std::move(i)) {}

}  // namespace nodes

// ---- constructors ------------------------------------------------------------

MapExpr identity(int dim) {
  if (dim != 0) check_dim(dim);
  return MapExpr(std::make_shared<nodes::Identity>(dim));
}

MapExpr radial(int dim, MonotonePL profile, std::optional<Point> center) {
  check_dim(dim);
  if (profile.lo() != 0 || profile.ys().front() != 0)
    throw DomainError("radial profile must start at (0, 0)");
  if (profile.is_identity()) return identity(dim);
  return MapExpr(std::make_shared<nodes::Radial>(
      dim, std::move(profile), center_or_origin(dim, center), std::nullopt));
}

MapExpr localized_translation(Point a, Ramp cutoff, std::optional<Point> center) {
  check_dim(a.dim());
  cutoff.validate();
  if (!a.is_finite()) throw DomainError("translation vector must be finite");
  if (a.norm2() == 0) return identity(a.dim());
  if (a.norm() * cutoff.lipschitz() >= 1)
    throw DomainError("translation displacement is not contractive: |a| Lip = " +
                      format_real(a.norm() * cutoff.lipschitz(), 6));
  int dim = a.dim();
  return MapExpr(std::make_shared<nodes::Translation>(
      std::move(a), cutoff, center_or_origin(dim, center)));
}


MapExpr axis_push(int dim, int axis, MonotonePL profile, Ramp transverse,
                  std::optional<Point> center) {
  check_dim(dim);
  transverse.validate();
  if (axis < 0 || axis >= dim) throw DimensionError("push axis out of range");
  if (profile.is_identity()) return identity(dim);
  return MapExpr(std::make_shared<nodes::Push>(
      dim, axis, std::move(profile), transverse, center_or_origin(dim, center), 1));
}

MapExpr twist(int dim, int i, int j, Real angle, Ramp cutoff,
              std::optional<Point> center) {
  check_dim(dim);
  cutoff.validate();
  if (i < 0 || j < 0 || i >= dim || j >= dim || i == j)
    throw DimensionError("twist plane needs two distinct axes");
  if (!rm::isfinite(angle)) throw DomainError("twist angle must be finite");
  if (angle == 0) return identity(dim);
  return MapExpr(std::make_shared<nodes::Twist>(dim, i, j, angle, cutoff,
                                                center_or_origin(dim, center)));
}

MapExpr affine(int dim, Real scale, std::optional<Point> shift) {
  check_dim(dim);
  if (!(scale > 0) || !rm::isfinite(scale))
    throw DomainError("affine scale must be positive and finite");
  Point s = center_or_origin(dim, shift);
  if (scale == 1 && s.norm2() == 0) return identity(dim);
  return MapExpr(std::make_shared<nodes::Affine>(dim, scale, std::move(s)));
}

MapExpr compose(std::vector<MapExpr> maps) {
  std::vector<MapExpr> flat;
  int dim = 0;
  Real support = 0;
  for (auto& m : maps) {
    dim = common_dim(dim, m.dim());
    if (m.is_identity()) continue;
    if (auto c = m.node_as<nodes::Compose>()) {
      for (const auto& child : c->maps) flat.push_back(child);
    } else {
      flat.push_back(std::move(m));
    }
  }
  for (const auto& m : flat) support = std::max(support, m.support_radius());
  if (flat.empty()) return identity(dim);
  if (flat.size() == 1) return flat.front();
  return MapExpr(std::make_shared<nodes::Compose>(dim, support, std::move(flat)));
}

MapExpr inverse(const MapExpr& m) {
  if (m.is_identity()) return m;
  if (auto inv = m.node_as<nodes::Inverse>()) return inv->child;
  return MapExpr(std::make_shared<nodes::Inverse>(m));
}

MapExpr conjugate(const MapExpr& by, const MapExpr& m) {
  if (m.is_identity()) return m;
  return compose({by, m, inverse(by)});
}

MapExpr power_exact(const MapExpr& m, long k) {
  if (k == 0 || m.is_identity()) return identity(m.dim());
  if (auto inv = m.node_as<nodes::Inverse>()) return power_exact(inv->child, -k);
  if (auto r = m.node_as<nodes::Radial>()) {
    MapExpr base = r->origin ? r->origin->base : m;
    long total = r->origin ? r->origin->k * k : k;
    if (total == 1) return base;
    const auto& b = *base.node_as<nodes::Radial>();
    return MapExpr(std::make_shared<nodes::Radial>(
        m.dim(), b.profile.power(total), b.center,
        nodes::PowerOrigin{base, total}));
  }
  if (auto p = m.node_as<nodes::Push>()) {
    return MapExpr(std::make_shared<nodes::Push>(
        m.dim(), p->axis, p->profile, p->transverse, p->center, p->power * k));
  }
  throw UnsupportedError("power_exact needs a radial or push node, got " +
                         std::string(to_string(m.kind())));
}

MapExpr annular_stack(const MapExpr& inner, Real outer_radius) {
  if (inner.is_identity()) return inner;
  if (!(outer_radius > 0)) throw DomainError("stack radius must be positive");
  return MapExpr(std::make_shared<nodes::Stack>(inner, outer_radius));
}

MapExpr external(std::shared_ptr<const ExternalMap> impl, int dim,
                 Real support_radius) {
  check_dim(dim);
  if (!impl) throw DomainError("external map needs an implementation");
  return MapExpr(std::make_shared<nodes::External>(std::move(impl), dim,
                                                   support_radius));
}

MapExpr piecewise_union(int dim, std::vector<UnionPart> parts, int spot_samples) {
  check_dim(dim);
  std::vector<UnionPart> kept;
  Real support = 0;
  for (auto& p : parts) {
    common_dim(dim, p.region.map.dim());
    common_dim(dim, p.map.dim());
    if (!(p.region.radius > 0)) throw DomainError("region radius must be positive");
    if (p.map.is_identity()) continue;
    support = std::max(support, p.region.outer_bound());
    kept.push_back(std::move(p));
  }
  if (kept.empty()) return identity(dim);
  for (std::size_t i = 0; i < kept.size() && spot_samples > 0; ++i) {
    Sampler s{Sampler::Kind::ball, dim, spot_samples, kept[i].region.radius,
              0x5eedULL + i, std::nullopt};
    for (const auto& y : draw(s)) {
      Point x = kept[i].region.map.apply(y);
      for (std::size_t j = 0; j < kept.size(); ++j) {
        if (j != i && kept[j].region.contains(x))
          throw RegionOverlapError("regions " + std::to_string(i) + " and " +
                                   std::to_string(j) + " intersect");
      }
    }
  }
  return MapExpr(
      std::make_shared<nodes::PiecewiseUnion>(dim, support, std::move(kept)));
}

// ---- evaluation --------------------------------------------------------------

namespace {

void check_input(const MapExpr& m, const Point& x) {
  if (m.dim() != 0 && x.dim() != m.dim())
    throw DimensionError("point has dimension " + std::to_string(x.dim()) +
                         ", map has " + std::to_string(m.dim()));
  if (!x.is_finite()) throw DomainError("non-finite input point");
}

}  // namespace

Point eval(const MapExpr& m, const Point& x) {
  check_input(m, x);
  return m.apply(x);
}

Point eval_inverse(const MapExpr& m, const Point& y) {
  check_input(m, y);
  return m.apply_inverse(y);
}

std::vector<Point> draw(const Sampler& s) {
  std::vector<Point> out;
  if (s.count <= 0) return out;
  check_dim(s.dim);
  Point c = center_or_origin(s.dim, s.center);
  std::mt19937_64 rng(s.seed);
  switch (s.kind) {
    case Sampler::Kind::ball: {
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      out.reserve(s.count);
      while (static_cast<int>(out.size()) < s.count) {
        Point p(s.dim);
        for (int k = 0; k < s.dim; ++k) p[k] = u(rng);
        if (p.norm2() > 1) continue;
        out.push_back(c + p * s.radius);
      }
      break;
    }
    case Sampler::Kind::shell: {
      std::normal_distribution<double> g(0.0, 1.0);
      out.reserve(s.count);
      while (static_cast<int>(out.size()) < s.count) {
        Point p(s.dim);
        for (int k = 0; k < s.dim; ++k) p[k] = g(rng);
        Real n = p.norm();
        if (n < 1e-9L) continue;
        out.push_back(c + p * (s.radius / n));
      }
      break;
    }
    case Sampler::Kind::grid: {
      int m = s.count;
      long total = 1;
      for (int k = 0; k < s.dim; ++k) total *= m;
      out.reserve(total);
      std::vector<int> idx(s.dim, 0);
      for (long t = 0; t < total; ++t) {
        Point p(s.dim);
        for (int k = 0; k < s.dim; ++k)
          p[k] = m == 1 ? Real(0) : -s.radius + 2 * s.radius * idx[k] / (m - 1);
        out.push_back(c + p);
        for (int k = 0; k < s.dim && ++idx[k] == m; ++k) idx[k] = 0;
      }
      break;
    }
  }
  return out;
}

Real sup_error(const MapExpr& a, const MapExpr& b,
               const std::vector<Point>& samples) {
  common_dim(a.dim(), b.dim());
  Real e = 0;
  for (const auto& x : samples) e = std::max(e, distance(a.apply(x), b.apply(x)));
  return e;
}

Real c0_distance(const MapExpr& f, const MapExpr& g,
                 const std::vector<Point>& samples) {
  if (samples.empty()) throw DomainError("c0_distance needs a non-empty sampler");
  common_dim(f.dim(), g.dim());
  Real fwd = 0, bwd = 0;
  for (const auto& x : samples) {
    fwd = std::max(fwd, distance(f.apply(x), g.apply(x)));
    bwd = std::max(bwd, distance(f.apply_inverse(x), g.apply_inverse(x)));
  }
  return fwd + bwd;
}

Real c0_distance(const MapExpr& f, const MapExpr& g, const Sampler& sampler) {
  return c0_distance(f, g, draw(sampler));
}

}  // namespace distortion
