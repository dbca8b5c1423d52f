// Acceptance run: one PASS/FAIL line per criterion. With arguments, runs only
// the listed criteria.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "support.hpp"

#include "distortion/cli.hpp"
#include "distortion/foliation.hpp"
#include "distortion/spheres.hpp"
#include "distortion/witness.hpp"

using namespace distortion;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// l_n and l~_n from the budget 2 lambda^l 3^n <= 2^-(n+3), in double.
int l_oracle(int n) {
  for (int l = 1;; ++l)
    if (2 * std::pow(0.5, l) * std::pow(3.0, n) <= std::pow(2.0, -(n + 3))) return l;
}
int m_oracle() {
  for (int m = 0;; ++m)
    if (2 * std::pow(0.5, m) <= 0.5 / 3) return m;
}
long k_oracle(int n) {
  int l = l_oracle(n);
  return 14L * n + 12L * l + 2L * (l + m_oracle()) + 14;
}

// Applies F3^n F1^l letter by letter.
Point push_scale(const WitnessPlan& p, int n, int l, Point x) {
  for (int i = 0; i < l; ++i) x = p.F1.apply(x);
  for (int i = 0; i < n; ++i) x = p.F3.apply(x);
  return x;
}
Point push_scale_inv(const WitnessPlan& p, int n, int l, Point x) {
  for (int i = 0; i < n; ++i) x = p.F3.apply_inverse(x);
  for (int i = 0; i < l; ++i) x = p.F1.apply_inverse(x);
  return x;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_column(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line, out;
  int idx = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (idx < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i] == name) idx = static_cast<int>(i);
      if (idx < 0) return "";
      continue;
    }
    out += cells.at(idx) + "\n";
  }
  return out;
}

int run_cli(std::vector<std::string> v) {
  v.insert(v.begin(), "distortion");
  std::vector<const char*> argv;
  for (const auto& s : v) argv.push_back(s.c_str());
  std::ostringstream out, err;
  return run_command(parse_args(static_cast<int>(argv.size()), argv.data()), out, err);
}

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / "distortion_acceptance";
  fs::create_directories(d);
  return d;
}

// Session file with random localized-translation pairs in slots 0..count-1.
void write_pair_session(const fs::path& path, int dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Session s;
  s.params = GeneratorParams::defaults(dim);
  s.nmax = count;
  for (int i = 0; i < count; ++i)
    s.targets.push_back(CommutatorPair{random_bump(rng, dim), random_bump(rng, dim)});
  std::ofstream(path) << session_to_json(s).dump(2) << "\n";
}

// ---- criteria ----------------------------------------------------------------

Outcome criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(11);
  double worst = 0;
  long points = 0, support_fail = 0;
  std::vector<MapExpr> maps;
  for (int dim : {1, 2, 3}) {
    for (int depth : {1, 4, 8, 12}) maps.push_back(random_chain(rng, dim, depth));
    for (int t = 0; t < 8; ++t) maps.push_back(random_primitive(rng, dim));
    maps.push_back(affine(dim, 0.75L, random_point(rng, dim, 0.5L)));
  }
  const int per_map = 10000 / static_cast<int>(maps.size()) + 1;
  for (const auto& m : maps) {
    const int dim = m.dim();
    Real R = m.support_radius();
    Real box = rm::isfinite(R) ? R + 1 : 3;
    for (int i = 0; i < per_map; ++i) {
      Point x = random_point(rng, dim, box);
      worst = std::max(worst, to_double(distance(m.apply_inverse(m.apply(x)), x)));
      worst = std::max(worst, to_double(distance(m.apply(m.apply_inverse(x)), x)));
      ++points;
    }
    if (!rm::isfinite(R)) continue;
    for (auto x : draw(Sampler{Sampler::Kind::shell, dim, 200, R, 5})) {
      for (Real s : {1.0L, 1.25L, 3.0L}) {
        Point y = x * s;
        if (!(m.apply(y) == y) || !(m.apply_inverse(y) == y)) ++support_fail;
      }
    }
  }
  double t = secs_since(t0);
  bool pass = worst < 1e-9 && support_fail == 0 && points >= 10000 && t < 30;
  return {pass, std::to_string(points) + " points, " + std::to_string(maps.size()) +
                    " maps, round trip " + fmt("%.2e", worst) + ", support misses " +
                    std::to_string(support_fail) + ", " + fmt("%.1f s", t)};
}

Outcome criterion2() {
  auto t0 = std::chrono::steady_clock::now();
  const int N = 6, dim = 2;
  WitnessPlan plan = build_plan(GeneratorParams::defaults(dim), N);
  bool ok = plan.checks.ok();
  long overlaps = 0, hits = 0;
  std::vector<double> diam;
  for (int n = 0; n < N; ++n) {
    const int l = l_oracle(n);
    ok = ok && plan.slots[n].l == l;
    auto ball = draw(Sampler{Sampler::Kind::ball, dim, 1000, 2, 900u + n});
    for (int m = 0; m < N; ++m) {
      if (m == n) continue;
      for (const auto& z : ball) {
        Point x = push_scale(plan, n, l, z);
        if (push_scale_inv(plan, m, l_oracle(m), x).norm() < 2) ++overlaps;
      }
    }
    // diam U_n from the image of the boundary sphere
    std::vector<Point> edge;
    for (const auto& z : draw(Sampler{Sampler::Kind::shell, dim, 256, 2, 950u + n}))
      edge.push_back(push_scale(plan, n, l, z));
    double d = 0;
    for (std::size_t i = 0; i < edge.size(); ++i)
      for (std::size_t j = i + 1; j < edge.size(); ++j)
        d = std::max(d, to_double(distance(edge[i], edge[j])));
    diam.push_back(d);
    // F^_n = F_n F2 F_n^-1 moves V_n = F_n(B(0, rho)) off itself
    for (const auto& z : draw(Sampler{Sampler::Kind::ball, dim, 1000, plan.rho, 970u + n})) {
      Point y = push_scale(plan, n, l, z);
      Point w = push_scale(plan, n, l, plan.F2.apply(push_scale_inv(plan, n, l, y)));
      if (push_scale_inv(plan, n, l, w).norm() < plan.rho) ++hits;
    }
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < diam.size(); ++i) decreasing = decreasing && diam[i] < diam[i - 1];
  double t = secs_since(t0);
  bool pass = ok && overlaps == 0 && hits == 0 && decreasing && t < 60;
  return {pass, std::to_string(N * (N - 1)) + " ordered pairs, overlaps " +
                    std::to_string(overlaps) + ", diameters " +
                    (decreasing ? "decreasing" : "NOT decreasing") + " (last " +
                    fmt("%.2e", diam.back()) + "), F^(V) hits " + std::to_string(hits) + ", " +
                    fmt("%.1f s", t)};
}

Outcome criterion3() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  bool lengths = true;
  int count = 0;
  for (int dim : {1, 2}) {
    auto plan = std::make_shared<const WitnessPlan>(
        build_plan(GeneratorParams::defaults(dim), 5));
    std::mt19937_64 rng(300 + dim);
    std::vector<CommutatorPair> pairs;
    WitnessMachinery m(plan);
    for (int n = 0; n <= 4; ++n) {
      pairs.push_back({random_bump(rng, dim), random_bump(rng, dim)});
      m.set_pair(n, pairs.back());
    }
    m.build();
    for (int n = 0; n <= 4; ++n) {
      Witness w = m.witness(n);
      lengths = lengths && static_cast<long>(w.word.size()) <= k_oracle(n) &&
                w.k_bound == k_oracle(n);
      const auto& [f, g] = pairs[n];
      for (const auto& x : draw(Sampler{Sampler::Kind::ball, dim, 1000, 2.5L, 40u + n})) {
        Point direct = f.apply(g.apply(f.apply_inverse(g.apply_inverse(x))));
        worst = std::max(worst,
                         to_double(distance(evaluate_word(w.word, m.assignment(), x), direct)));
      }
      ++count;
    }
  }
  double t = secs_since(t0);
  bool pass = worst < 1e-6 && lengths && t < 120;
  return {pass, std::to_string(count) + " witnesses, sup error " + fmt("%.2e", worst) +
                    ", lengths " + (lengths ? "within" : "EXCEED") + " k_n, " +
                    fmt("%.1f s", t)};
}

Outcome criterion4() {
  std::mt19937_64 rng(404);
  double worst = 0;
  bool continuity = true;
  for (int t = 0; t < 10; ++t) {
    const int dim = 1 + t % 3;
    MapExpr h = random_bump(rng, dim);
    SwindleFactorization s = swindle_factorize(h);
    for (const auto& x : draw(Sampler{Sampler::Kind::ball, dim, 1000, 2, 60u + t})) {
      // d^-1 g phi g^-1 phi^-1 d
      Point y = s.d.apply(x);
      y = s.g.apply(s.phi_c.apply(s.g.apply_inverse(s.phi_c.apply_inverse(y))));
      worst = std::max(worst, to_double(distance(s.d.apply_inverse(y), h.apply(x))));
    }
    // layer i of g lives in B(0, r0 2^-i) and moves points by at most C 2^-i
    Real disp = 0;
    for (const auto& x : draw(Sampler{Sampler::Kind::ball, dim, 1000, s.r0, 80u + t}))
      disp = std::max(disp, distance(s.h_conj.apply(x), x));
    const Real C = s.r0 * (1 + disp);
    for (int i = 0; i <= 20; ++i) {
      Real r = rm::ldexp(s.r0, -i);
      for (const auto& x : draw(Sampler{Sampler::Kind::ball, dim, 200, r, 100u + i}))
        if (distance(s.g.apply(x), x) > rm::ldexp(C, -i)) continuity = false;
    }
  }
  return {worst < 1e-6 && continuity,
          "10 homeomorphisms, sup error " + fmt("%.2e", worst) + ", continuity bound " +
              (continuity ? "holds" : "FAILS") + " on 20 layers"};
}

Outcome demo_contract(const DemoResult& r, std::size_t rows, double t, double limit) {
  bool ok = r.rows.size() == rows && r.all_passed;
  double err = 0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const auto& row = r.rows[i];
    err = std::max(err, to_double(row.sup_err));
    ok = ok && row.sup_err < 1e-6L && static_cast<long>(row.reduced_len) <= row.k;
    ok = ok && row.k == 2 * (k_oracle(static_cast<int>(i)) + 4);
    ok = ok && row.ratio == double(row.k) / double(row.p);
    if (i > 0) ok = ok && row.ratio < r.rows[i - 1].ratio;
  }
  ok = ok && !r.rows.empty() && r.rows.back().ratio < 0.01 && t < limit;
  return {ok, std::to_string(r.rows.size()) + " rows, max error " + fmt("%.2e", err) +
                  ", final k/p " + fmt("%.5f", r.rows.empty() ? 1.0 : r.rows.back().ratio) +
                  ", " + fmt("%.1f s", t)};
}

Outcome criterion5() {
  auto t0 = std::chrono::steady_clock::now();
  DemoOptions o;
  o.n_max = 6;
  auto r = sphere_distortion_demo(circle_rotation((rm::sqrt(5) - 1) / 2), o);
  return demo_contract(r, 6, secs_since(t0), 120);
}

Outcome criterion6() {
  auto t0 = std::chrono::steady_clock::now();
  DemoOptions o;
  o.n_max = 4;
  auto r = sphere_distortion_demo(sphere_rotation(1), o);
  Outcome out = demo_contract(r, 4, secs_since(t0), 120);
  auto d = decompose_sphere_rotation(1);
  double worst = 0;
  for (const auto& v : draw(Sampler{Sampler::Kind::shell, 3, 10000, 1, 6})) {
    Point u = sphere_point(v);
    Point rot{std::cos(1.0L) * u[0] - std::sin(1.0L) * u[1],
              std::sin(1.0L) * u[0] + std::cos(1.0L) * u[1], u[2]};
    worst = std::max(worst, to_double(distance(d.T1.apply(d.T2.apply(u)), rot)));
  }
  out.pass = out.pass && worst < 1e-12;
  out.detail += ", twist decomposition error " + fmt("%.2e", worst);
  return out;
}

Outcome criterion7() {
  fs::path d = scratch();
  write_pair_session(d / "seq_a.json", 2, 5, 71);
  write_pair_session(d / "seq_b.json", 2, 5, 72);
  bool distinct = slurp(d / "seq_a.json") != slurp(d / "seq_b.json");
  int ca = run_cli({"witness", "--input", (d / "seq_a.json").string(), "--out",
                    (d / "ka.json").string(), "--csv", (d / "ka.csv").string()});
  int cb = run_cli({"witness", "--input", (d / "seq_b.json").string(), "--out",
                    (d / "kb.json").string(), "--csv", (d / "kb.csv").string()});
  std::string a = csv_column(slurp(d / "ka.csv"), "k_n");
  std::string b = csv_column(slurp(d / "kb.csv"), "k_n");
  run_cli({"demo", "--alpha", "0.2", "--nmax", "4", "--samples", "200", "--out",
           (d / "da.csv").string()});
  run_cli({"demo", "--alpha", "0.7071", "--nmax", "4", "--samples", "200", "--out",
           (d / "db.csv").string()});
  std::string da = csv_column(slurp(d / "da.csv"), "k_n");
  std::string db = csv_column(slurp(d / "db.csv"), "k_n");
  bool pass = distinct && ca == 0 && cb == 0 && !a.empty() && a == b && !da.empty() && da == db;
  return {pass, std::string("witness k_n columns ") + (a == b ? "identical" : "DIFFER") +
                    ", demo k_n columns " + (da == db ? "identical" : "DIFFER")};
}

Outcome criterion8() {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (int n : {2, 3}) {
    MapExpr f = random_perturbation(n, 0.05L, 8);
    DecompositionReport rep = foliation_decompose(f);
    const auto grid = cube_grid(n, 17, 1);
    double recon = 0;
    long drift = 0;
    for (const auto& x : grid) {
      Point y = x;
      for (int k = 0; k < n; ++k) {
        Point z = rep.factors[k].map.apply(y);
        for (int j = 0; j < n; ++j)
          if (j != k && !(z[j] == y[j])) ++drift;
        y = z;
      }
      recon = std::max(recon, to_double(distance(y, f.apply(x))));
    }
    // p_k(f o phi_0^-1 o ... o phi_k^-1) = p_k
    double proj = 0;
    std::mt19937_64 rng(88);
    for (int s = 0; s < 100; ++s) {
      Point x = random_point(rng, n, 0.9L);
      for (int k = 0; k < n; ++k) {
        Point z = x;
        for (int j = k; j >= 0; --j) z = rep.factors[j].map.apply_inverse(z);
        Point fz = f.apply(z);
        for (int j = 0; j <= k; ++j) proj = std::max(proj, to_double(rm::abs(fz[j] - x[j])));
      }
    }
    ok = ok && grid.size() == std::pow(17, n) && recon < 1e-6 && drift == 0 && proj < 1e-8 &&
         rep.passed;
    detail += "N=" + std::to_string(n) + ": reconstruction " + fmt("%.2e", recon) +
              ", off-axis changes " + std::to_string(drift) + ", p_k " + fmt("%.2e", proj) +
              "; ";
  }
  double t = secs_since(t0);
  return {ok && t < 60, detail + fmt("%.1f s", t)};
}

Outcome criterion9() {
  fs::path d = scratch();
  write_pair_session(d / "det.json", 2, 5, 91);
  bool ok = true;
  for (int i = 0; i < 2; ++i) {
    std::string s = std::to_string(i);
    ok = ok && run_cli({"witness", "--input", (d / "det.json").string(), "--seed", "13",
                        "--out", (d / ("w" + s + ".json")).string(), "--words",
                        (d / ("words" + s + ".json")).string(), "--csv",
                        (d / ("w" + s + ".csv")).string()}) == 0;
    ok = ok && run_cli({"demo", "--seed", "13", "--out", (d / ("d" + s + ".csv")).string(),
                        "--words", (d / ("dw" + s + ".json")).string()}) == 0;
  }
  bool same = true;
  for (const char* stem : {"w%.json", "words%.json", "w%.csv", "d%.csv", "dw%.json"}) {
    std::string a = stem, b = stem;
    a.replace(a.find('%'), 1, "0");
    b.replace(b.find('%'), 1, "1");
    same = same && slurp(d / a) == slurp(d / b) && !slurp(d / a).empty();
  }
  return {ok && same, std::string("witness report, words, csv and demo outputs ") +
                          (same ? "byte-identical" : "DIFFER") + " across two seeded runs"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::function<Outcome()>> all{criterion1, criterion2, criterion3,
                                            criterion4, criterion5, criterion6,
                                            criterion7, criterion8, criterion9};
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (int i = 1; i <= 9; ++i) which.push_back(i);
  int failed = 0;
  for (int c : which) {
    if (c < 1 || c > 9) {
      std::printf("criterion %d: unknown\n", c);
      ++failed;
      continue;
    }
    Outcome o;
    try {
      o = all[c - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", c, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
