#include <chrono>
#include <random>

#include "doctest.h"
#include "support.hpp"

#include "distortion/foliation.hpp"
#include "distortion/root_find.hpp"

using namespace distortion;
using namespace testsupport;

namespace {

// f(x, y) = (x + 0.1 s(x, y), y): a push of the first coordinate.
MapExpr push_example() {
  return axis_push(2, 0, MonotonePL({-0.8L, 0, 0.8L}, {-0.8L, 0.1L, 0.8L}),
                   Ramp{0.2L, 0.7L});
}

std::vector<Point> cube_samples(int dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) {
    Point x(dim);
    for (int k = 0; k < dim; ++k) x[k] = u(rng);
    out.push_back(x);
  }
  return out;
}

}  // namespace

TEST_CASE("monotone solve") {
  auto g = [](Real t) { return t + 0.3L * rm::sin(t); };
  for (Real y : {-2.0L, -0.3L, 0.0L, 0.7L, 1.9L}) {
    auto r = monotone_solve(g, y, -4, 4, 1e-10L);
    CHECK(r.residual < 1e-10L);
    CHECK(rm::abs(g(r.x) - y) < 1e-10L);
  }
  // flat pieces still converge to a point of the level set
  auto step = [](Real t) { return std::clamp(t, Real(-1), Real(1)); };
  CHECK(rm::abs(step(monotone_solve(step, 0.5L, -3, 3, 1e-12L).x) - 0.5L) < 1e-12L);
  CHECK_THROWS_AS(monotone_solve(g, 10, -1, 1, 1e-10L), DomainError);
}

TEST_CASE("identity decomposes into identities") {
  for (int n : {1, 2, 3}) {
    auto rep = foliation_decompose(identity(n));
    for (const auto& f : rep.factors) CHECK(f.map.is_identity());
    CHECK(rep.passed);
    CHECK(rep.sup_error == 0);
    for (Real m : rep.margins) CHECK(m == 1);
    auto leaf = leaf_preservation_check(rep.factors[0], cube_samples(n, 50, 1));
    CHECK(leaf.margin == 1);
    CHECK(leaf.off_axis_drift == 0);
  }
}

TEST_CASE("push along the first axis") {
  MapExpr f = push_example();
  auto rep = foliation_decompose(f);
  CHECK(rep.passed);
  auto pts = cube_samples(2, 1000, 2);
  Real e0 = 0, e1 = 0;
  for (const auto& x : pts) {
    e0 = std::max(e0, distance(rep.factors[0].map.apply(x), f.apply(x)));
    e1 = std::max(e1, distance(rep.factors[1].map.apply(x), x));
  }
  CHECK(e0 < 1e-10L);
  CHECK(e1 < 1e-10L);
  auto leaf = leaf_preservation_check(rep.factors[0], pts);
  CHECK(leaf.off_axis_drift == 0);
  CHECK(leaf.ok);
}

TEST_CASE("near-identity perturbations") {
  for (int n : {2, 3}) {
    for (std::uint64_t seed : {1u, 2u}) {
      MapExpr f = random_perturbation(n, 0.05L, seed);
      auto t0 = std::chrono::steady_clock::now();
      auto rep = foliation_decompose(f);
      double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      INFO("N=" << n << " seed=" << seed << " err=" << double(rep.sup_error) << " t=" << secs);
      CHECK(rep.grid_points == static_cast<std::size_t>(std::pow(17, n)));
      CHECK(rep.sup_error < 1e-6L);
      CHECK(rep.max_solve_residual < 1e-10L);
      for (Real e : rep.projection_errors) CHECK(e < 1e-8L);
      for (Real m : rep.margins) CHECK(m >= 0.2L);
      CHECK(rep.passed);
      CHECK(secs < 60);
      // every factor moves its own coordinate only, bitwise
      auto pts = cube_samples(n, 300, seed);
      for (const auto& fac : rep.factors) {
        auto leaf = leaf_preservation_check(fac, pts);
        CHECK(leaf.off_axis_drift == 0);
        CHECK(leaf.margin > 0);
      }
      // inverses
      for (const auto& fac : rep.factors)
        for (int i = 0; i < 50; ++i)
          CHECK(distance(fac.map.apply(fac.map.apply_inverse(pts[i])), pts[i]) < 1e-9L);
    }
  }
}

TEST_CASE("large perturbations are rejected") {
  MapExpr f = random_perturbation(2, 0.5L, 1);
  CHECK_THROWS_AS(foliation_decompose(f), MonotonicityError);
  try {
    foliation_decompose(f);
  } catch (const MonotonicityError& e) {
    CHECK(e.slope < 0.2L);
    CHECK(e.axis >= 0);
  }
  // the unchecked first factor reports a negative sampled slope
  MapExpr g = random_perturbation(2, 0.3L, 3);
  CHECK_THROWS_AS(foliation_decompose(g), MonotonicityError);
  auto factors = foliation_factors(g);
  auto leaf = leaf_preservation_check(factors[0], cube_grid(2, 129, 1), 1.0L / 128);
  CHECK(leaf.margin < 0);
  CHECK_FALSE(leaf.ok);
  CHECK(leaf.off_axis_drift == 0);
}

TEST_CASE("support must sit inside the cube") {
  MapExpr wide = localized_translation(Point{0.2L, 0}, Ramp{1, 2});
  CHECK_THROWS_AS(foliation_decompose(wide), SupportError);
}

TEST_CASE("fragmentation along slabs") {
  SUBCASE("identity") {
    auto pieces = fragmentation_c0(identity(2), {{0, -1.2L, 0.3L}, {0, -0.3L, 1.2L}});
    REQUIRE(pieces.size() == 2);
    for (const auto& p : pieces) CHECK(p.map.is_identity());
  }
  SUBCASE("push split across two slabs") {
    MapExpr h = push_example();
    std::vector<Slab> cover{{0, -0.3L, 1.2L}, {0, -1.2L, 0.3L}};
    auto pieces = fragmentation_c0(h, cover);
    REQUIRE(pieces.size() == 2);
    std::vector<MapExpr> maps;
    for (const auto& p : pieces) maps.push_back(p.map);
    MapExpr prod = compose(maps);
    auto pts = cube_samples(2, 1000, 3);
    Real err = 0;
    for (const auto& x : pts) {
      err = std::max(err, distance(prod.apply(x), h.apply(x)));
      for (const auto& p : pieces) {
        const Slab& s = cover[p.slab];
        if (x[0] <= s.lo || x[0] >= s.hi) CHECK(p.map.apply(x) == x);
      }
    }
    CHECK(err < 1e-6L);
  }
  SUBCASE("cover too fine") {
    CHECK_THROWS_AS(fragmentation_c0(push_example(), {{0, -1.2L, 0.05L}, {0, -0.05L, 1.2L}}),
                    DecompositionError);
  }
  SUBCASE("missing axis") {
    MapExpr f = random_perturbation(2, 0.05L, 1);
    CHECK_THROWS_AS(fragmentation_c0(f, {{0, -1.2L, 0.3L}, {0, -0.3L, 1.2L}}),
                    DecompositionError);
  }
  SUBCASE("both axes") {
    MapExpr f = random_perturbation(2, 0.05L, 4);
    std::vector<Slab> cover{{0, -1.2L, 0.3L}, {0, -0.3L, 1.2L},
                            {1, -1.2L, 0.3L}, {1, -0.3L, 1.2L}};
    auto pieces = fragmentation_c0(f, cover);
    REQUIRE(pieces.size() == 4);
    std::vector<MapExpr> maps;
    for (const auto& p : pieces) maps.push_back(p.map);
    MapExpr prod = compose(maps);
    Real err = 0;
    for (const auto& x : cube_samples(2, 300, 5)) {
      err = std::max(err, distance(prod.apply(x), f.apply(x)));
      for (const auto& p : pieces) {
        const Slab& s = cover[p.slab];
        if (x[s.axis] <= s.lo || x[s.axis] >= s.hi) CHECK(p.map.apply(x) == x);
      }
    }
    CHECK(err < 1e-6L);
  }
}
