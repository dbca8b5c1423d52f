#include <random>

#include "doctest.h"
#include "support.hpp"

#include "distortion/geomaps.hpp"
#include "distortion/map_json.hpp"

using namespace distortion;
using namespace testsupport;

namespace {

// Independent piecewise-linear evaluation by linear scan.
Real pl_oracle(const std::vector<Real>& xs, const std::vector<Real>& ys, Real t) {
  if (t <= xs.front() || t >= xs.back()) return t;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (t < xs[i + 1])
      return ys[i] + (ys[i + 1] - ys[i]) * (t - xs[i]) / (xs[i + 1] - xs[i]);
  return t;
}

double d(const Point& a, const Point& b) { return to_double(distance(a, b)); }

}  // namespace

TEST_CASE("identity and generator examples") {
  CHECK(eval(identity(2), Point{0.3L, 0.4L}) == Point{0.3L, 0.4L});
  CHECK(eval(default_f1(2), Point{1, 0}) == Point{0.5L, 0});
  CHECK(eval(default_f2(2), Point{0, 0}) == Point{0.5L, 0});
  CHECK(eval_inverse(default_f1(2), Point{0.5L, 0}) == Point{1, 0});
  CHECK(d(eval_inverse(default_f2(2), Point{0.5L, 0}), Point{0, 0}) < 1e-14);
}

TEST_CASE("eval errors") {
  CHECK_THROWS_AS(eval(default_f1(2), Point{1, 0, 0}), DimensionError);
  Point bad{1, 0};
  bad[1] = std::numeric_limits<Real>::infinity();
  CHECK_THROWS_AS(eval(default_f1(2), bad), DomainError);
  // |a| Lip(beta) >= 1 is rejected up front
  CHECK_THROWS_AS(localized_translation(Point{1.5L, 0}, Ramp{1, 2}), DomainError);
}

TEST_CASE("compose") {
  MapExpr f1 = default_f1(2);
  Point x{1, 0};
  Point oracle = eval(f1, eval(f1, x));
  CHECK(eval(compose({f1, f1}), x) == oracle);
  CHECK(oracle == Point{0.25L, 0});
  CHECK(compose({}).is_identity());
  CHECK_THROWS_AS(compose({default_f1(2), default_f1(3)}), DimensionError);
  MapExpr m = compose({default_f3(2), default_f2(2)});
  MapExpr mm = compose({m, inverse(m)});
  for (const auto& p : draw(Sampler{Sampler::Kind::ball, 2, 1000, 3, 7}))
    CHECK(d(mm.apply(p), p) < 1e-12);
  CHECK(m.support_radius() == std::max(default_f3(2).support_radius(),
                                       default_f2(2).support_radius()));
}

TEST_CASE("power_exact") {
  MapExpr f1 = default_f1(2);
  Point oracle = eval(f1, eval(f1, eval(f1, Point{1, 0})));
  CHECK(eval(power_exact(f1, 3), Point{1, 0}) == oracle);
  CHECK(oracle == Point{0.125L, 0});
  CHECK(power_exact(f1, 0).is_identity());
  CHECK_THROWS_AS(power_exact(default_f2(2), 2), UnsupportedError);

  MapExpr f3 = default_f3(2);
  for (int n = 0; n <= 12; ++n) {
    Point iter(2);
    for (int i = 0; i < n; ++i) iter = eval(f3, iter);
    Point p = eval(power_exact(f3, n), Point(2));
    CHECK(p == iter);
    CHECK(p[0] == 1 - rm::ldexp(1, -n));
    CHECK(p[1] == 0);
  }
}

TEST_CASE("power_exact agrees with k-fold compose for k <= 64") {
  std::mt19937_64 rng(11);
  std::vector<MapExpr> bases = {default_f1(2), default_f3(2), inverse(default_f3(2)),
                                radial(2, random_profile(rng, 0, 1.5L, 4, true)),
                                axis_push(2, 1, random_profile(rng, -1, 1, 4, false),
                                          Ramp{0.2L, 0.9L})};
  auto samples = draw(Sampler{Sampler::Kind::ball, 2, 1000, 2.5L, 3});
  for (const auto& m : bases) {
    for (long k : {1L, 2L, 5L, 17L, 64L, -3L}) {
      MapExpr p = power_exact(m, k);
      std::vector<MapExpr> chain(std::labs(k), k > 0 ? m : inverse(m));
      MapExpr c = compose(chain);
      double e = to_double(sup_error(p, c, samples));
      CHECK_MESSAGE(e < 1e-12, "k=" << k << " err=" << e);
    }
  }
}

TEST_CASE("profile algebra against a scan oracle") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    MonotonePL f = random_profile(rng, -1, 2, 5, false);
    MonotonePL g = random_profile(rng, -0.5L, 1.5L, 4, false);
    MonotonePL fg = f.compose(g);
    std::uniform_real_distribution<double> u(-2, 3);
    for (int i = 0; i < 200; ++i) {
      Real t = u(rng);
      Real want = pl_oracle(f.xs(), f.ys(), pl_oracle(g.xs(), g.ys(), t));
      CHECK(to_double(rm::abs(fg(t) - want)) < 1e-15);
      CHECK(to_double(rm::abs(f.inverse(f(t)) - t)) < 1e-15);
      Real w = u(rng) / 5 + 0.4;
      CHECK(to_double(rm::abs(f.blend_inverse(f.blend(t, w), w) - t)) < 1e-15);
    }
    CHECK(f.min_slope() > 0);
    CHECK(fg.min_slope() > 0);
  }
}

TEST_CASE("round trip on depth-12 chains and all primitive kinds") {
  std::mt19937_64 rng(2024);
  for (int dim : {1, 2, 3}) {
    for (int trial = 0; trial < 4; ++trial) {
      MapExpr m = random_chain(rng, dim, 12);
      Real R = m.support_radius();
      double worst = 0;
      for (int i = 0; i < 2500; ++i) {
        Point x = random_point(rng, dim, R + 1);
        worst = std::max(worst, d(m.apply_inverse(m.apply(x)), x));
      }
      CHECK_MESSAGE(worst < 1e-9, "dim=" << dim << " worst=" << worst);
    }
  }
  for (const MapExpr& m : {twist(2, 0, 1, 2.5L, Ramp{0.1L, 1}, Point{0.2L, 0}),
                           affine(2, 0.75L, Point{0.1L, -0.2L})}) {
    for (int i = 0; i < 1000; ++i) {
      Point x = random_point(rng, 2, 3);
      CHECK(d(m.apply_inverse(m.apply(x)), x) < 1e-15);
    }
  }
}

TEST_CASE("identity outside the declared support radius") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    int dim = 1 + trial % 3;
    MapExpr m = random_chain(rng, dim, 6);
    Real R = m.support_radius();
    auto shell = draw(Sampler{Sampler::Kind::shell, dim, 500, R, 3u + trial});
    for (auto x : shell) {
      CHECK(m.apply(x) == x);
      CHECK(m.apply_inverse(x) == x);
      x *= 1.7L;
      CHECK(m.apply(x) == x);
    }
  }
}

TEST_CASE("c0_distance") {
  Sampler s{Sampler::Kind::ball, 2, 1000, 2, 1};
  CHECK(c0_distance(identity(2), identity(2), s) == 0);
  CHECK(c0_distance(default_f2(2), identity(2), s) >= 0.5L);
  CHECK_THROWS_AS(c0_distance(identity(2), identity(2), std::vector<Point>{}),
                  DomainError);
  auto pts = draw(s);
  MapExpr f = default_f1(2), g = default_f2(2), h = default_f3(2);
  CHECK(c0_distance(f, g, pts) == c0_distance(g, f, pts));
  CHECK(c0_distance(f, h, pts) <= c0_distance(f, g, pts) + c0_distance(g, h, pts));
}

TEST_CASE("piecewise_union") {
  CHECK(piecewise_union(2, {}).is_identity());

  MapExpr small = localized_translation(Point{0.25L, 0}, Ramp{0.5L, 1});
  UnionPart one{RegionDescriptor{identity(2), 1.5L}, small};
  MapExpr u1 = piecewise_union(2, {one});
  CHECK(eval(u1, Point{1.8L, 0}) == Point{1.8L, 0});

  // two disjoint translated copies of the same local map
  Point c1{-2, 0}, c2{2, 0.5L};
  auto moved = [](const Point& c) {
    return localized_translation(Point{0.25L, 0.1L}, Ramp{0.5L, 1}, c);
  };
  auto shift = [](const Point& c) {
    return localized_translation(c, Ramp{3, 6});  // identity far away, x+c near 0
  };
  std::vector<UnionPart> parts = {
      {RegionDescriptor{shift(c1), 1.2L}, moved(c1)},
      {RegionDescriptor{shift(c2), 1.2L}, moved(c2)}};
  MapExpr u = piecewise_union(2, parts);
  std::mt19937_64 rng(4);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    Point x = random_point(rng, 2, 3.5L);
    Point want = x;
    if ((x - c1).norm() < 1.2L) want = moved(c1).apply(x);
    else if ((x - c2).norm() < 1.2L) want = moved(c2).apply(x);
    worst = std::max(worst, d(u.apply(x), want));
    CHECK(d(u.apply_inverse(u.apply(x)), x) < 1e-12);
  }
  CHECK(worst < 1e-12);

  std::vector<UnionPart> clash = {
      {RegionDescriptor{shift(c1), 1.2L}, moved(c1)},
      {RegionDescriptor{shift(Point{-1.5L, 0}), 1.2L}, moved(Point{-1.5L, 0})}};
  CHECK_THROWS_AS(piecewise_union(2, clash), RegionOverlapError);
}

TEST_CASE("annular stack") {
  MapExpr h = localized_translation(Point{0.05L, 0}, Ramp{0.02L, 0.08L},
                                    Point{0.375L, 0});
  MapExpr g = annular_stack(h, 0.5L);
  Point x{0.37L, 0.01L};
  CHECK(g.apply(x) == h.apply(x));
  Point y{0.185L, 0.005L};
  CHECK(d(g.apply(y), h.apply(y * 2) * 0.5L) == 0);
  CHECK(d(g.apply_inverse(g.apply(y)), y) < 1e-14);
  CHECK(g.apply(Point(2)) == Point(2));
}

TEST_CASE("JSON round trip") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    int dim = 1 + trial % 3;
    MapExpr m = random_chain(rng, dim, 5);
    std::string text = serialize_map(m);
    MapExpr back = parse_map(text);
    CHECK(serialize_map(back) == text);
    for (int i = 0; i < 50; ++i) {
      Point x = random_point(rng, dim, 2);
      CHECK(back.apply(x) == m.apply(x));
    }
  }
  MapExpr st = annular_stack(localized_translation(Point{0.05L, 0}, Ramp{0.02L, 0.08L},
                                                   Point{0.375L, 0}), 0.5L);
  CHECK(serialize_map(parse_map(serialize_map(st))) == serialize_map(st));
  CHECK_THROWS_AS(parse_map("{\"dim\": 2, \"kind\": \"radial\""), ParseError);
  CHECK_THROWS_AS(parse_map("{\"dim\": 2, \"kind\": \"warp\"}"), ParseError);
  CHECK_THROWS_AS(parse_map(R"({"dim": 2, "kind": "radial", "knots": [[0,0],[1,2]]})"),
                  ParseError);
}
