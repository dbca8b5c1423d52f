#include "distortion/spheres.hpp"

#include <algorithm>

namespace distortion {

namespace {

Real dot(const Point& a, const Point& b) {
  Real s = 0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}

Point rotate_xy(const Point& v, const Real& angle) {
  if (angle == 0) return v;
  Real c = rm::cos(angle), s = rm::sin(angle);
  Point w = v;
  w[0] = c * v[0] - s * v[1];
  w[1] = s * v[0] + c * v[1];
  return w;
}

Real two_pi() { return 2 * rm::pi(); }

// Lift of a turn value into [0.5, 1.5), the coordinate used on I2.
Real lift_i2(Real turns) { return 0.5L + rm::frac(turns - 0.5L); }

}  // namespace

Point sphere_point(const Point& v) {
  if (v.dim() != 2 && v.dim() != 3)
    throw DimensionError("sphere points live in R^2 or R^3");
  Real n = v.norm();
  if (!(n > 0) || !rm::isfinite(n)) throw DomainError("cannot normalize a zero vector");
  return v * (1 / n);
}

Point circle_point(Real turns) {
  Real a = two_pi() * rm::frac(turns);
  return Point{rm::cos(a), rm::sin(a)};
}

Real circle_turns(const Point& v) {
  return rm::frac(rm::atan2(v[1], v[0]) / two_pi());
}

// ---- charts ----------------------------------------------------------------

Chart::Chart(Point pole, std::vector<Point> basis)
    : pole_(std::move(pole)), basis_(std::move(basis)) {
  if (pole_.dim() != static_cast<int>(basis_.size()) + 1)
    throw DimensionError("chart basis must span the tangent plane at the pole");
}

Chart Chart::circle(Real pole_turns) {
  Point p = circle_point(pole_turns);
  return Chart(p, {Point{p[1], -p[0]}});
}

Chart Chart::sphere_from_south() {
  return Chart(Point{0, 0, -1}, {Point{1, 0, 0}, Point{0, 1, 0}});
}

Chart Chart::sphere_from_north() {
  return Chart(Point{0, 0, 1}, {Point{1, 0, 0}, Point{0, -1, 0}});
}

bool Chart::is_pole(const Point& v) const { return (v - pole_).norm2() == 0; }

Point Chart::to_plane(const Point& v) const {
  // 1 - <v, P> written as |v - P|^2 / 2 to avoid cancellation near the pole
  Real den = (v - pole_).norm2() / 2;
  Point t(sphere_dim());
  for (int i = 0; i < sphere_dim(); ++i) t[i] = dot(v, basis_[i]) / den;
  return t;
}

Point Chart::to_sphere(const Point& t) const {
  Real s = t.norm2();
  if (!rm::isfinite(s)) return pole_;
  Point v = pole_ * (s - 1);
  for (int i = 0; i < sphere_dim(); ++i) v += basis_[i] * (2 * t[i]);
  return v * (1 / (s + 1));
}

// ---- nodes -----------------------------------------------------------------

namespace {

struct IdentityS final : SphereMapNode {
  explicit IdentityS(int n) : SphereMapNode(n) {}
  SphereMapKind kind() const override { return SphereMapKind::identity; }
  Point forward(const Point& v) const override { return v; }
  Point backward(const Point& v) const override { return v; }
};

struct CircleRotation final : SphereMapNode {
  explicit CircleRotation(Real a) : SphereMapNode(1), alpha(a) {}
  SphereMapKind kind() const override { return SphereMapKind::circle_rotation; }
  Point forward(const Point& v) const override { return rotate_xy(v, two_pi() * alpha); }
  Point backward(const Point& v) const override { return rotate_xy(v, -two_pi() * alpha); }
  Real alpha;  // turns, in [0, 1)
};

struct ZRotation final : SphereMapNode {
  explicit ZRotation(Real t) : SphereMapNode(2), theta(t) {}
  SphereMapKind kind() const override { return SphereMapKind::z_rotation; }
  Point forward(const Point& v) const override { return rotate_xy(v, theta); }
  Point backward(const Point& v) const override { return rotate_xy(v, -theta); }
  Real theta;
};

struct Transported final : SphereMapNode {
  Transported(MapExpr m_, Chart c_)
      : SphereMapNode(c_.sphere_dim()), m(std::move(m_)), chart(std::move(c_)) {}
  SphereMapKind kind() const override { return SphereMapKind::transported; }
  template <bool Inverse>
  Point run(const Point& v) const {
    if (chart.is_pole(v)) return v;
    Point t = chart.to_plane(v);
    if (t.norm2() >= m.node().support_radius2()) return v;
    Point u = Inverse ? m.apply_inverse(t) : m.apply(t);
    if (u == t) return v;
    return chart.to_sphere(u);
  }
  Point forward(const Point& v) const override { return run<false>(v); }
  Point backward(const Point& v) const override { return run<true>(v); }
  MapExpr m;
  Chart chart;
};

struct ComposeS final : SphereMapNode {
  ComposeS(int n, std::vector<SphereMap> ms) : SphereMapNode(n), maps(std::move(ms)) {}
  SphereMapKind kind() const override { return SphereMapKind::compose; }
  Point forward(const Point& v) const override {
    Point w = v;
    for (auto it = maps.rbegin(); it != maps.rend(); ++it) w = it->apply(w);
    return w;
  }
  Point backward(const Point& v) const override {
    Point w = v;
    for (const auto& m : maps) w = m.apply_inverse(w);
    return w;
  }
  std::vector<SphereMap> maps;
};

struct InverseS final : SphereMapNode {
  explicit InverseS(SphereMap c) : SphereMapNode(c.sphere_dim()), child(std::move(c)) {}
  SphereMapKind kind() const override { return SphereMapKind::inverse; }
  Point forward(const Point& v) const override { return child.apply_inverse(v); }
  Point backward(const Point& v) const override { return child.apply(v); }
  SphereMap child;
};

struct ZTwist final : SphereMapNode {
  ZTwist(Real t, bool c) : SphereMapNode(2), theta(t), complementary(c) {}
  SphereMapKind kind() const override { return SphereMapKind::z_twist; }
  Real weight(const Real& z) const {
    Real beta = std::clamp(z + 0.5L, Real(0), Real(1));
    return complementary ? 1 - beta : beta;
  }
  Point forward(const Point& v) const override { return rotate_xy(v, theta * weight(v[2])); }
  Point backward(const Point& v) const override {
    return rotate_xy(v, -theta * weight(v[2]));
  }
  Real theta;
  bool complementary;
};

struct Iterate final : SphereMapNode {
  Iterate(SphereMap b, long p_) : SphereMapNode(b.sphere_dim()), base(std::move(b)), p(p_) {}
  SphereMapKind kind() const override { return SphereMapKind::iterate; }
  Point forward(const Point& v) const override {
    Point w = v;
    for (long i = 0; i < std::labs(p); ++i) w = p > 0 ? base.apply(w) : base.apply_inverse(w);
    return w;
  }
  Point backward(const Point& v) const override {
    Point w = v;
    for (long i = 0; i < std::labs(p); ++i) w = p > 0 ? base.apply_inverse(w) : base.apply(w);
    return w;
  }
  SphereMap base;
  long p;
};

// Identity off I2, h^-1 on h(J), linear in turns on the two gaps.
struct Corrector final : SphereMapNode {
  Corrector(SphereMap h_, Real j0_, Real j1_, Real y0_, Real y1_)
      : SphereMapNode(1), h(std::move(h_)), j0(j0_), j1(j1_), y0(y0_), y1(y1_) {}
  SphereMapKind kind() const override { return SphereMapKind::corrector; }

  static Real lerp(Real x, Real a0, Real a1, Real b0, Real b1) {
    return b0 + (x - a0) * ((b1 - b0) / (a1 - a0));
  }
  Point forward(const Point& v) const override {
    const Real lo = kArcI2.start, hi = kArcI2.start + kArcI2.length;
    Real x = lift_i2(circle_turns(v));
    if (x <= lo || x >= hi) return v;
    if (x >= y0 && x <= y1) return h.apply_inverse(v);
    return circle_point(x < y0 ? lerp(x, lo, y0, lo, j0) : lerp(x, y1, hi, j1, hi));
  }
  Point backward(const Point& v) const override {
    const Real lo = kArcI2.start, hi = kArcI2.start + kArcI2.length;
    Real x = lift_i2(circle_turns(v));
    if (x <= lo || x >= hi) return v;
    if (x >= j0 && x <= j1) return h.apply(v);
    return circle_point(x < j0 ? lerp(x, lo, j0, lo, y0) : lerp(x, j1, hi, y1, hi));
  }
  SphereMap h;
  Real j0, j1, y0, y1;
};

class Pullback final : public ExternalMap {
 public:
  Pullback(SphereMap h, Chart c, Real R, Real s)
      : h_(std::move(h)), chart_(std::move(c)), R_(R), s_(s) {}
  // u = s t: the chart coordinate rescaled by the normalizer
  Point forward(const Point& u) const override { return run(u, false); }
  Point backward(const Point& u) const override { return run(u, true); }
  std::string name() const override { return "chart pullback"; }

 private:
  Point run(const Point& u, bool inv) const {
    Point t = u * (1 / s_);
    if (t.norm2() >= R_ * R_) return u;
    Point v = chart_.to_sphere(t);
    Point w = inv ? h_.apply_inverse(v) : h_.apply(v);
    if (chart_.is_pole(w)) return u;
    return chart_.to_plane(w) * s_;
  }
  SphereMap h_;
  Chart chart_;
  Real R_, s_;
};

// Largest power of two s <= 1 with s R <= 1.5.
Real normalizer_scale(Real R) {
  Real s = 1;
  while (s * R > 1.5L) s /= 2;
  return s;
}

MapExpr normalizer(int n, Real R) {
  Real s = normalizer_scale(R);
  if (s == 1) return identity(n);
  return radial(n, MonotonePL({0, R, 2 * R}, {0, s * R, 2 * R}));
}

}  // namespace

SphereMap::SphereMap(std::shared_ptr<const SphereMapNode> node) : node_(std::move(node)) {
  if (!node_) throw DomainError("null sphere map");
}

SphereMap sphere_identity(int n) {
  if (n != 1 && n != 2) throw DimensionError("only S^1 and S^2 are supported");
  return SphereMap(std::make_shared<IdentityS>(n));
}

SphereMap circle_rotation(Real alpha) {
  if (!rm::isfinite(alpha)) throw DomainError("rotation number must be finite");
  Real a = rm::frac(alpha);
  if (a == 0) return sphere_identity(1);
  return SphereMap(std::make_shared<CircleRotation>(a));
}

SphereMap sphere_rotation(Real theta) {
  if (!rm::isfinite(theta)) throw DomainError("rotation angle must be finite");
  Real t = theta - two_pi() * rm::floor(theta / two_pi());
  if (t == 0 || t == two_pi()) return sphere_identity(2);
  return SphereMap(std::make_shared<ZRotation>(t));
}

SphereMap transport(const MapExpr& m, const Chart& chart) {
  const int n = chart.sphere_dim();
  if (m.dim() != 0 && m.dim() != n)
    throw DimensionError("chart map dimension must match the sphere");
  if (!rm::isfinite(m.support_radius()))
    throw SupportError("transported map must be compactly supported in the chart");
  if (m.is_identity()) return sphere_identity(n);
  return SphereMap(std::make_shared<Transported>(m, chart));
}

SphereMap sphere_compose(std::vector<SphereMap> maps) {
  if (maps.empty()) throw DomainError("sphere_compose needs at least one map");
  const int n = maps.front().sphere_dim();
  std::vector<SphereMap> kept;
  for (auto& m : maps) {
    if (m.sphere_dim() != n) throw DimensionError("sphere dimension mismatch");
    if (!m.is_identity()) kept.push_back(std::move(m));
  }
  if (kept.empty()) return sphere_identity(n);
  if (kept.size() == 1) return kept.front();
  return SphereMap(std::make_shared<ComposeS>(n, std::move(kept)));
}

SphereMap sphere_inverse(const SphereMap& m) {
  if (m.is_identity()) return m;
  if (auto r = m.node_as<CircleRotation>()) return circle_rotation(-r->alpha);
  if (auto r = m.node_as<ZRotation>()) return sphere_rotation(-r->theta);
  if (auto i = m.node_as<InverseS>()) return i->child;
  return SphereMap(std::make_shared<InverseS>(m));
}

SphereMap sphere_power(const SphereMap& m, long p) {
  if (p == 0 || m.is_identity()) return sphere_identity(m.sphere_dim());
  if (auto r = m.node_as<CircleRotation>()) return circle_rotation(rm::frac(r->alpha * p));
  if (auto r = m.node_as<ZRotation>()) return sphere_rotation(r->theta * p);
  if (auto t = m.node_as<ZTwist>()) return z_twist(t->theta * p, t->complementary);
  if (auto i = m.node_as<InverseS>()) return sphere_power(i->child, -p);
  if (p == 1) return m;
  if (std::labs(p) > kMaxIteratedPower)
    throw DomainError("power " + std::to_string(p) + " exceeds the iterate cap " +
                      std::to_string(kMaxIteratedPower));
  return SphereMap(std::make_shared<Iterate>(m, p));
}

SphereMap z_twist(Real theta, bool complementary) {
  if (!rm::isfinite(theta)) throw DomainError("twist angle must be finite");
  if (theta == 0) return sphere_identity(2);
  return SphereMap(std::make_shared<ZTwist>(theta, complementary));
}

MapExpr pullback(const SphereMap& h, const Chart& chart, Real support_radius) {
  if (h.is_identity()) return identity(chart.sphere_dim());
  return external(std::make_shared<Pullback>(h, chart, support_radius, 1),
                  chart.sphere_dim(), support_radius);
}

// ---- decompositions --------------------------------------------------------

bool Arc::contains_interior(Real turns) const {
  Real x = rm::frac(turns - start);
  return x > 0 && x < length;
}

Real j_anchor_start(int anchor) {
  if (anchor < 0 || anchor >= kJAnchors) throw DomainError("J anchor out of range");
  const Real margin = 0.01L;
  const Real span = kArcI2.length - 2 * margin - kJLength;
  return kArcI2.start + margin + span * anchor / (kJAnchors - 1);
}

CircleDecomposition decompose_circle(const SphereMap& h) {
  if (h.sphere_dim() != 1) throw DimensionError("decompose_circle needs a map of S^1");
  CircleDecomposition out{sphere_identity(1), sphere_identity(1), sphere_identity(1), 0,
                          Arc{j_anchor_start(0), kJLength}};
  if (h.is_identity()) return out;

  const Real lo = kArcI2.start, hi = kArcI2.start + kArcI2.length;
  int best = -1;
  Real best_margin = 0, by0 = 0, by1 = 0;
  for (int k = 0; k < kJAnchors; ++k) {
    Real j0 = j_anchor_start(k), j1 = j0 + kJLength;
    Real t0 = circle_turns(h.apply(circle_point(j0)));
    Real t1 = circle_turns(h.apply(circle_point(j1)));
    Real y0 = lift_i2(t0);
    Real y1 = y0 + rm::frac(t1 - t0);
    Real margin = std::min({y0 - lo, hi - y1, j0 - lo, hi - j1});
    if (margin > best_margin) {
      best = k;
      best_margin = margin;
      by0 = y0;
      by1 = y1;
    }
  }
  if (best < 0)
    throw DecompositionError("h(J) leaves I2 for every J anchor; the map moves arcs too far");
  Real j0 = j_anchor_start(best);
  out.anchor = best;
  out.J = Arc{rm::frac(j0), kJLength};
  out.tau = SphereMap(std::make_shared<Corrector>(h, j0, j0 + kJLength, by0, by1));
  out.h1 = sphere_inverse(out.tau);
  out.h2 = sphere_compose({out.tau, h});
  return out;
}

SphereRotationDecomposition decompose_sphere_rotation(Real theta) {
  return {z_twist(theta, false), z_twist(theta, true)};
}

Decomposer circle_decomposer() {
  return [](const SphereMap& h) {
    CircleDecomposition d = decompose_circle(h);
    const Real i2_mid = kArcI2.start + kArcI2.length / 2;
    Real j_mid = j_anchor_start(d.anchor) + kJLength / 2;
    std::vector<ChartPiece> out;
    out.push_back({"I2", Chart::circle(i2_mid - 0.5L),
                   rm::tan(rm::pi() * kArcI2.length / 2), d.h1});
    out.push_back({"J" + std::to_string(d.anchor), Chart::circle(j_mid),
                   rm::tan(rm::pi() * (1 - kJLength) / 2), d.h2});
    return out;
  };
}

Decomposer sphere_rotation_decomposer() {
  return [](const SphereMap& h) {
    if (h.sphere_dim() != 2) throw DimensionError("sphere decomposer needs a map of S^2");
    Real theta = 0;
    if (auto r = h.node_as<ZRotation>())
      theta = r->theta;
    else if (!h.is_identity())
      throw DecompositionError("only rotations about the z axis can be decomposed");
    SphereRotationDecomposition d = decompose_sphere_rotation(theta);
    const Real R = rm::sqrt(3);
    return std::vector<ChartPiece>{{"S", Chart::sphere_from_south(), R, d.T1},
                                   {"N", Chart::sphere_from_north(), R, d.T2}};
  };
}

// ---- demo ------------------------------------------------------------------

long piece_k_bound(const WitnessPlan& plan, int n) { return homeo_k_bound(plan, n) + 2; }

std::vector<long> demo_k_bounds(const WitnessPlan& plan, int pieces) {
  std::vector<long> k;
  for (int n = 0; n < plan.n_max(); ++n) k.push_back(pieces * piece_k_bound(plan, n));
  return k;
}

namespace {

struct ChartCopy {
  Chart chart;
  Real R;
  Real s;
  std::unique_ptr<WitnessMachinery> machinery;
  Assignment asg;
};

struct Block {
  const ChartCopy* copy;
  Word word;
};

Point eval_blocks(const std::vector<std::pair<const ChartCopy*, BoundWord>>& blocks,
                  const Point& v) {
  Point w = v;
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    const Chart& c = it->first->chart;
    if (c.is_pole(w)) continue;
    w = c.to_sphere(it->second.apply(c.to_plane(w)));
  }
  return w;
}

}  // namespace

DemoResult sphere_distortion_demo(const SphereMap& h, const Decomposer& decompose,
                                  const DemoOptions& opt) {
  const int n = h.sphere_dim();
  if (opt.n_max < 0) throw DomainError("N_max must be non-negative");
  auto plan = std::make_shared<const WitnessPlan>(
      build_plan(GeneratorParams::defaults(n), opt.n_max));
  const int pieces_per_step = 2;
  // bounds and powers come from the plan alone
  const std::vector<long> k = demo_k_bounds(*plan, pieces_per_step);
  long scale = opt.scale > 0 ? opt.scale : (opt.n_max > 0 ? 100 / opt.n_max + 1 : 1);
  const std::vector<long> p = schedule_powers(k, ScheduleOptions{scale, opt.recurrent_alpha});

  DemoResult result;
  std::map<std::string, ChartCopy> copies;
  std::vector<std::vector<std::string>> used(opt.n_max);
  std::vector<SphereMap> powers;
  for (int i = 0; i < opt.n_max; ++i) {
    SphereMap hp = sphere_power(h, p[i]);
    powers.push_back(hp);
    auto pieces = decompose(hp);
    if (static_cast<int>(pieces.size()) > pieces_per_step)
      throw DecompositionError("decomposer returned more pieces than the bound allows");
    for (auto& piece : pieces) {
      if (piece.piece.is_identity()) continue;
      auto it = copies.find(piece.chart_id);
      if (it == copies.end()) {
        ChartCopy c{piece.chart, piece.support_radius, normalizer_scale(piece.support_radius),
                    std::make_unique<WitnessMachinery>(plan, piece.chart_id + ":"),
                    Assignment()};
        it = copies.emplace(piece.chart_id, std::move(c)).first;
        result.charts.push_back(piece.chart_id);
      }
      ChartCopy& c = it->second;
      if (piece.support_radius != c.R)
        throw DecompositionError("chart '" + piece.chart_id + "' reused with another radius");
      MapExpr normalized = external(
          std::make_shared<Pullback>(piece.piece, c.chart, c.R, c.s), n, c.s * c.R);
      c.machinery->set_homeo(i, normalized);
      used[i].push_back(piece.chart_id);
    }
  }
  for (auto& [id, c] : copies) {
    c.machinery->build();
    c.asg = c.machinery->assignment();
    c.asg.bind(id + ":A", normalizer(n, c.R));
  }

  for (int i = 0; i < opt.n_max; ++i) {
    std::vector<std::pair<const ChartCopy*, BoundWord>> blocks;
    Word full;
    for (const auto& id : used[i]) {
      const ChartCopy& c = copies.at(id);
      Word inner = c.machinery->raw_word(i);
      Word w;
      if (!inner.empty()) {
        Word a = Word::letter(id + ":A");
        w = reduce(a.inverse() * inner * a);
      }
      full = full * w;
      blocks.emplace_back(&c, BoundWord(w, c.asg));
    }
    full = reduce(full);
    DemoRow row{i, p[i], k[i], full.size(), 0, 0, false};
    // an empty word certifies l_S = 0, so the bound drops to 0 as well
    if (!full.empty()) row.ratio = static_cast<double>(row.k) / static_cast<double>(row.p);
    Sampler s{Sampler::Kind::shell, n + 1, opt.samples, 1,
              opt.seed + static_cast<std::uint64_t>(i)};
    for (const auto& v : draw(s)) {
      Point u = sphere_point(v);
      row.sup_err = std::max(row.sup_err, distance(eval_blocks(blocks, u), powers[i].apply(u)));
    }
    row.passed = row.sup_err < opt.tol && static_cast<long>(row.reduced_len) <= row.k;
    result.all_passed = result.all_passed && row.passed;
    result.rows.push_back(row);
    result.words.push_back(std::move(full));
  }
  return result;
}

DemoResult sphere_distortion_demo(const SphereMap& h, const DemoOptions& opt) {
  DemoOptions o = opt;
  const bool closed_form = h.is_identity() || h.kind() == SphereMapKind::circle_rotation ||
                           h.kind() == SphereMapKind::z_rotation;
  if (!closed_form && o.scale == 0) o.scale = 1;
  if (h.sphere_dim() == 1) return sphere_distortion_demo(h, circle_decomposer(), o);
  return sphere_distortion_demo(h, sphere_rotation_decomposer(), o);
}

SphereMap sphere_map_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw ParseError("/: sphere map needs a string 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  auto num = [&](const char* key) {
    if (!j.contains(key)) throw ParseError(std::string("/: missing field '") + key + "'");
    return real_from_json(j[key], std::string("/") + key);
  };
  if (kind == "circle_rotation") return circle_rotation(num("alpha"));
  if (kind == "sphere_rotation") return sphere_rotation(num("theta"));
  if (kind == "circle_transported" || kind == "sphere_transported") {
    if (!j.contains("map")) throw ParseError("/: missing field 'map'");
    const int n = kind == "circle_transported" ? 1 : 2;
    Chart c = Chart::circle(0);
    if (n == 1) {
      c = Chart::circle(num("pole"));
    } else {
      std::string pole = j.value("pole", "south");
      if (pole != "south" && pole != "north")
        throw ParseError("/pole: expected \"south\" or \"north\"");
      c = pole == "south" ? Chart::sphere_from_south() : Chart::sphere_from_north();
    }
    return transport(map_from_json(j["map"], n, "/map"), c);
  }
  throw ParseError("/kind: unknown sphere map kind '" + kind + "'");
}

}  // namespace distortion
