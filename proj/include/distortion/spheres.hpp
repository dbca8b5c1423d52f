#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "distortion/geomaps.hpp"
#include "distortion/map_json.hpp"
#include "distortion/witness.hpp"
#include "distortion/words.hpp"

namespace distortion {

/// Unit vector of R^(n+1) representing a point of S^n (n = 1 or 2).
Point sphere_point(const Point& v);
/// Point of S^1 at the given number of turns.
Point circle_point(Real turns);
/// Angle of a point of S^1 in turns, in [0, 1).
Real circle_turns(const Point& v);

/// Stereographic projection from `pole`. The chart is centred at -pole.
class Chart {
 public:
  Chart(Point pole, std::vector<Point> basis);
  /// S^1 chart projecting from the point at `pole_turns`; the chart
  /// coordinate of the point at -pole + delta turns is tan(pi delta).
  static Chart circle(Real pole_turns);
  static Chart sphere_from_south();
  static Chart sphere_from_north();

  int sphere_dim() const { return static_cast<int>(basis_.size()); }
  const Point& pole() const { return pole_; }
  bool is_pole(const Point& v) const;
  Point to_plane(const Point& v) const;
  Point to_sphere(const Point& t) const;

 private:
  Point pole_;
  std::vector<Point> basis_;
};

enum class SphereMapKind {
  identity,
  circle_rotation,
  z_rotation,
  transported,
  compose,
  inverse,
  corrector,
  z_twist,
  iterate,
};

class SphereMapNode {
 public:
  virtual ~SphereMapNode() = default;
  virtual SphereMapKind kind() const = 0;
  virtual Point forward(const Point& v) const = 0;
  virtual Point backward(const Point& v) const = 0;
  int sphere_dim() const { return n_; }

 protected:
  explicit SphereMapNode(int n) : n_(n) {}

 private:
  int n_;
};

/// Homeomorphism of S^1 or S^2.
class SphereMap {
 public:
  explicit SphereMap(std::shared_ptr<const SphereMapNode> node);

  SphereMapKind kind() const { return node_->kind(); }
  int sphere_dim() const { return node_->sphere_dim(); }
  bool is_identity() const { return kind() == SphereMapKind::identity; }
  Point apply(const Point& v) const { return node_->forward(v); }
  Point apply_inverse(const Point& v) const { return node_->backward(v); }

  template <class T>
  const T* node_as() const {
    return dynamic_cast<const T*>(node_.get());
  }

 private:
  std::shared_ptr<const SphereMapNode> node_;
};

SphereMap sphere_identity(int n);
/// Rotation of S^1 by alpha turns.
SphereMap circle_rotation(Real alpha);
/// Rotation of S^2 about the z axis by theta radians.
SphereMap sphere_rotation(Real theta);
/// c^-1 o m o c, fixing the pole; m must be compactly supported.
SphereMap transport(const MapExpr& m, const Chart& chart);
/// compose({a, b}) = a o b.
SphereMap sphere_compose(std::vector<SphereMap> maps);
SphereMap sphere_inverse(const SphereMap& m);
/// p-th power: closed form for rotations and twists, otherwise an iterate
/// (|p| <= kMaxIteratedPower).
SphereMap sphere_power(const SphereMap& m, long p);
inline constexpr long kMaxIteratedPower = 10000;

/// (phi, z) -> (phi + theta w(z), z) with w = beta or 1 - beta, where beta is
/// 0 for z <= -1/2, 1 for z >= 1/2 and linear between.
SphereMap z_twist(Real theta, bool complementary);

/// Pull a sphere map back to the chart plane as a MapExpr supported in
/// B(0, support_radius) (the caller certifies the support).
MapExpr pullback(const SphereMap& h, const Chart& chart, Real support_radius);

// ---- decompositions ------------------------------------------------------

struct Arc {
  Real start;   // turns
  Real length;  // turns, in (0, 1)
  bool contains_interior(Real turns) const;
};

inline const Arc kArcI1{0.0L, 0.75L};
inline const Arc kArcI2{0.5L, 0.75L};
inline constexpr long double kJLength = 0.05L;
inline constexpr int kJAnchors = 20;

struct CircleDecomposition {
  SphereMap h1;   // supported in I2
  SphereMap h2;   // identity on J
  SphereMap tau;  // corrector: supported in I2, tau o h = id on J
  int anchor = 0;
  Arc J;
};

/// h = h1 o h2 with h1 = tau^-1 and h2 = tau o h.
CircleDecomposition decompose_circle(const SphereMap& h);
/// Start (in turns) of the J arc for the given anchor index.
Real j_anchor_start(int anchor);

struct SphereRotationDecomposition {
  SphereMap T1;  // identity on the south cap z <= -1/2
  SphereMap T2;  // identity on the north cap z >= 1/2
};
SphereRotationDecomposition decompose_sphere_rotation(Real theta);

/// One factor of a decomposition, tagged with the chart it lives in.
struct ChartPiece {
  std::string chart_id;
  Chart chart;
  Real support_radius;  // piece is the identity where |chart coordinate| >= this
  SphereMap piece;
};

/// Splits h^p into pieces with h^p = pieces[0] o pieces[1] o ...
using Decomposer = std::function<std::vector<ChartPiece>(const SphereMap&)>;

Decomposer circle_decomposer();
Decomposer sphere_rotation_decomposer();

// ---- demo ------------------------------------------------------------------

struct DemoOptions {
  int n_max = 6;
  int samples = 500;
  std::uint64_t seed = 1;
  Real tol = 1e-6L;
  long scale = 0;  // 0 -> floor(100 / n_max) + 1 for closed-form powers
  std::optional<Real> recurrent_alpha;
};

struct DemoRow {
  int n;
  long p;
  long k;
  std::size_t reduced_len;
  double ratio;  // k / p, or 0 when the word is empty
  Real sup_err;
  bool passed;
};

struct DemoResult {
  std::vector<DemoRow> rows;
  std::vector<Word> words;
  std::vector<std::string> charts;  // chart ids in first-use order
  bool all_passed = true;
};

/// Per-piece bound for a plan: homeo bound plus the two normalizer letters.
long piece_k_bound(const WitnessPlan& plan, int n);
/// Total bounds k_n for `pieces` pieces per step; never looks at the map.
std::vector<long> demo_k_bounds(const WitnessPlan& plan, int pieces);

DemoResult sphere_distortion_demo(const SphereMap& h, const Decomposer& decompose,
                                  const DemoOptions& options);
/// Chooses the decomposer and power scale from the map kind.
DemoResult sphere_distortion_demo(const SphereMap& h, const DemoOptions& options);

/// {"kind":"circle_rotation","alpha":a} | {"kind":"sphere_rotation","theta":t} |
/// {"kind":"circle_transported","pole":turns,"map":{...dim 1...}} |
/// {"kind":"sphere_transported","pole":"south"|"north","map":{...dim 2...}}
SphereMap sphere_map_from_json(const Json& j);

}  // namespace distortion
