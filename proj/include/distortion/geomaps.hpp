#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "distortion/point.hpp"
#include "distortion/profile.hpp"

namespace distortion {

enum class MapKind {
  identity,
  radial,
  translation,
  push,
  twist,
  affine,
  compose,
  inverse,
  piecewise_union,
  stack,
  external,
};

std::string_view to_string(MapKind kind);

/// Node of a map expression tree. Nodes are immutable; `forward` and
/// `backward` assume the caller already checked dimension and support.
class MapNode {
 public:
  virtual ~MapNode() = default;
  virtual MapKind kind() const = 0;
  virtual Point forward(const Point& x) const = 0;
  virtual Point backward(const Point& y) const = 0;

  int dim() const { return dim_; }
  const Real& support_radius() const { return support_; }
  const Real& support_radius2() const { return support2_; }

 protected:
  MapNode(int dim, Real support_radius);

 private:
  int dim_;
  Real support_;
  Real support2_;
};

/// Exactly-invertible homeomorphism of R^N given as an expression tree.
///
/// Every expression carries a declared support radius R: for |x| >= R the
/// map returns x unchanged. A default-constructed MapExpr is the identity and
/// acts in every dimension (dim() == 0).
class MapExpr {
 public:
  MapExpr();
  explicit MapExpr(std::shared_ptr<const MapNode> node);

  MapKind kind() const { return node_->kind(); }
  int dim() const { return node_->dim(); }
  Real support_radius() const { return node_->support_radius(); }
  bool is_identity() const { return kind() == MapKind::identity; }

  /// Unchecked evaluation (no dimension or finiteness test).
  Point apply(const Point& x) const {
    if (x.norm2() >= node_->support_radius2()) return x;
    return node_->forward(x);
  }
  Point apply_inverse(const Point& y) const {
    if (y.norm2() >= node_->support_radius2()) return y;
    return node_->backward(y);
  }

  const MapNode& node() const { return *node_; }
  const std::shared_ptr<const MapNode>& node_ptr() const { return node_; }

  template <class T>
  const T* node_as() const {
    return dynamic_cast<const T*>(node_.get());
  }

 private:
  std::shared_ptr<const MapNode> node_;
};

/// Callback-backed map used for transported sphere maps and numerically
/// defined factors. Not serializable.
class ExternalMap {
 public:
  virtual ~ExternalMap() = default;
  virtual Point forward(const Point& x) const = 0;
  virtual Point backward(const Point& y) const = 0;
  virtual std::string name() const = 0;
};

/// Open set T(B(0, r)); membership is decided exactly as |T^-1(x)| < r.
/// The optional bounding ball is a caller-certified superset used only to
/// skip the exact test for far-away points.
struct RegionDescriptor {
  MapExpr map;
  Real radius = 1;
  std::optional<Point> hint_center;
  Real hint_radius = 0;

  bool contains(const Point& x) const;
  /// Exact test, ignoring the bounding ball.
  bool contains_exact(const Point& x) const;
  Real outer_bound() const;
};

struct UnionPart {
  RegionDescriptor region;
  MapExpr map;
};

// ---- constructors ---------------------------------------------------------

MapExpr identity(int dim = 0);
/// x -> c + rho(|x-c|) (x-c)/|x-c| ; profile must start at (0, 0).
MapExpr radial(int dim, MonotonePL profile, std::optional<Point> center = {});
/// x -> x + beta(|x-c|) a; requires |a| Lip(beta) < 1.
MapExpr localized_translation(Point a, Ramp cutoff,
                              std::optional<Point> center = {});
/// Moves only coordinate `axis`: x_k -> x_k + (u(x_k) - x_k) chi(|x_perp - c_perp|).
MapExpr axis_push(int dim, int axis, MonotonePL profile, Ramp transverse,
                  std::optional<Point> center = {});
/// Rotation of the (i, j) plane by angle * ramp(|x - c|) about c.
MapExpr twist(int dim, int i, int j, Real angle, Ramp cutoff,
              std::optional<Point> center = {});
/// x -> scale * x + shift (not compactly supported).
MapExpr affine(int dim, Real scale, std::optional<Point> shift = {});
/// compose({a, b, c}) = a o b o c (c applied first). Empty list -> identity.
MapExpr compose(std::vector<MapExpr> maps);
MapExpr inverse(const MapExpr& m);
/// by o m o by^-1
MapExpr conjugate(const MapExpr& by, const MapExpr& m);
/// k-fold composite computed on the profile (radial and push nodes only).
MapExpr power_exact(const MapExpr& m, long k);
/// Self-similar stacking: on the layer 2^-(i+1) r0 <= |x| < 2^-i r0 the map is
/// 2^-i h(2^i x). `inner` must be supported in the open base layer; this is
/// not checked, since the declared support of a conjugate is usually loose.
MapExpr annular_stack(const MapExpr& inner, Real outer_radius);
MapExpr external(std::shared_ptr<const ExternalMap> impl, int dim,
                 Real support_radius);
/// Disjoint-region union; identity off every region. Disjointness is
/// spot-checked on `spot_samples` points per region.
MapExpr piecewise_union(int dim, std::vector<UnionPart> parts,
                        int spot_samples = 64);

// ---- evaluation -----------------------------------------------------------

/// Checked evaluation: dimension must match and input must be finite.
Point eval(const MapExpr& m, const Point& x);
Point eval_inverse(const MapExpr& m, const Point& y);

struct Sampler {
  enum class Kind { ball, shell, grid };
  Kind kind = Kind::ball;
  int dim = 2;
  int count = 1000;  // per-axis node count for grids
  Real radius = 1;
  std::uint64_t seed = 1;
  std::optional<Point> center;
};

std::vector<Point> draw(const Sampler& sampler);

/// max |f(x) - g(x)| + max |f^-1(x) - g^-1(x)| over the samples; a lower
/// bound of the true C0 distance.
Real c0_distance(const MapExpr& f, const MapExpr& g,
                 const std::vector<Point>& samples);
Real c0_distance(const MapExpr& f, const MapExpr& g, const Sampler& sampler);

/// sup |a(x) - b(x)| over the samples.
Real sup_error(const MapExpr& a, const MapExpr& b,
               const std::vector<Point>& samples);

// ---- node types (exposed for serialization and inspection) ---------------

namespace nodes {

struct Identity final : MapNode {
  explicit Identity(int dim);
  MapKind kind() const override { return MapKind::identity; }
  Point forward(const Point& x) const override { return x; }
  Point backward(const Point& y) const override { return y; }
};

struct PowerOrigin {
  MapExpr base;
  long k;
};

struct Radial final : MapNode {
  Radial(int dim, MonotonePL profile, Point center,
         std::optional<PowerOrigin> origin);
  MapKind kind() const override { return MapKind::radial; }
  Point forward(const Point& x) const override;
  Point backward(const Point& y) const override;

  MonotonePL profile;
  Point center;
  bool centered;
  std::optional<PowerOrigin> origin;
};

struct Translation final : MapNode {
  Translation(Point a, Ramp cutoff, Point center);
  MapKind kind() const override { return MapKind::translation; }
  Point forward(const Point& x) const override;
  Point backward(const Point& y) const override;

  Point a;
  Ramp cutoff;
  Point center;
  Real contraction;  // Lipschitz constant of the displacement
};

struct Push final : MapNode {
  Push(int dim, int axis, MonotonePL profile, Ramp transverse, Point center,
       long power);
  MapKind kind() const override { return MapKind::push; }
  Point forward(const Point& x) const override;
  Point backward(const Point& y) const override;
  Real weight(const Point& x) const;

  int axis;
  MonotonePL profile;   // one application
  MonotonePL powered;   // profile^power, used where the weight is 1
  Ramp transverse;
  Point center;
  long power;
};

struct Twist final : MapNode {
  Twist(int dim, int i, int j, Real angle, Ramp cutoff, Point center);
  MapKind kind() const override { return MapKind::twist; }
  Point forward(const Point& x) const override;
  Point backward(const Point& y) const override;
  Point rotate(const Point& x, const Real& sign) const;

  int i, j;
  Real angle;
  Ramp cutoff;
  Point center;
};

struct Affine final : MapNode {
  Affine(int dim, Real scale, Point shift);
  MapKind kind() const override { return MapKind::affine; }
  Point forward(const Point& x) const override;
  Point backward(const Point& y) const override;

  Real scale;
  Point shift;
};

struct Compose final : MapNode {
  Compose(int dim, Real support, std::vector<MapExpr> maps);
  MapKind kind() const override { return MapKind::compose; }
  Point forward(const Point& x) const override;
  Point backward(const Point& y) const override;

  std::vector<MapExpr> maps;  // maps.front() applied last
};

struct Inverse final : MapNode {
  explicit Inverse(MapExpr child);
  MapKind kind() const override { return MapKind::inverse; }
  Point forward(const Point& x) const override { return child.apply_inverse(x); }
  Point backward(const Point& y) const override { return child.apply(y); }

  MapExpr child;
};

struct PiecewiseUnion final : MapNode {
  PiecewiseUnion(int dim, Real support, std::vector<UnionPart> parts);
  MapKind kind() const override { return MapKind::piecewise_union; }
  Point forward(const Point& x) const override;
  Point backward(const Point& y) const override;
  /// Index of the unique region containing x, or -1.
  int locate(const Point& x) const;

  std::vector<UnionPart> parts;
};

struct Stack final : MapNode {
  Stack(MapExpr inner, Real outer_radius);
  MapKind kind() const override { return MapKind::stack; }
  Point forward(const Point& x) const override;
  Point backward(const Point& y) const override;

  MapExpr inner;
  Real outer_radius;
};

struct External final : MapNode {
  External(std::shared_ptr<const ExternalMap> impl, int dim, Real support);
  MapKind kind() const override { return MapKind::external; }
  Point forward(const Point& x) const override { return impl->forward(x); }
  Point backward(const Point& y) const override { return impl->backward(y); }

  std::shared_ptr<const ExternalMap> impl;
};

}  // namespace nodes

}  // namespace distortion
