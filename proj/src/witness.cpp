#include "distortion/witness.hpp"

#include <algorithm>

namespace distortion {

namespace {

Real int_pow(Real base, long k) {
  Real r = 1;
  for (long i = 0; i < k; ++i) r *= base;
  return r;
}

std::vector<Point> mapped(const MapExpr& m, std::vector<Point> pts) {
  for (auto& p : pts) p = m.apply(p);
  return pts;
}

std::vector<Point> ball_and_shell(int dim, int count, Real radius, std::uint64_t seed) {
  auto pts = draw(Sampler{Sampler::Kind::ball, dim, count, radius, seed});
  auto shell = draw(Sampler{Sampler::Kind::shell, dim, count / 4 + 1,
                            radius * (1 - 1e-12L), seed ^ 0x9e3779b97f4a7c15ULL});
  pts.insert(pts.end(), shell.begin(), shell.end());
  return pts;
}

Real sampled_diameter(const std::vector<Point>& pts) {
  Real d2 = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      d2 = std::max(d2, (pts[i] - pts[j]).norm2());
  return rm::sqrt(d2);
}

void verify_plan(WitnessPlan& plan, const PlanOptions& opt) {
  const int dim = plan.params.dim;
  const int N = plan.n_max();
  PlanChecks& c = plan.checks;

  std::vector<std::vector<Point>> in_U(N);
  for (int n = 0; n < N; ++n) {
    const auto& s = plan.slots[n];
    in_U[n] = mapped(s.F, draw(Sampler{Sampler::Kind::ball, dim, opt.samples, 2,
                                       opt.seed + 101 * n}));

    // bounding balls are only shortcuts, but they must be sound
    for (const auto* region : {&s.U, &s.V}) {
      auto edge = mapped(s.F, draw(Sampler{Sampler::Kind::shell, dim, opt.samples / 4,
                                           region->radius, opt.seed + 7 * n + 3}));
      for (const auto& p : edge)
        if ((p - *region->hint_center).norm() >= region->hint_radius) ++c.hint_violations;
    }

    auto edge = mapped(s.F, draw(Sampler{Sampler::Kind::shell, dim,
                                         opt.diameter_samples, 2, opt.seed + 13 * n}));
    Real diam = sampled_diameter(edge);
    if (!c.diameters.empty() && diam >= c.diameters.back()) c.diameters_decreasing = false;
    if (diam >= rm::ldexp(1, -n)) c.diameters_below_bound = false;
    c.diameters.push_back(diam);

    // F^_n(V_n) must miss V_n: z in B(0, rho), y = F_n z in V_n, F^_n y = F_n F2 z
    for (const auto& z : ball_and_shell(dim, opt.samples, plan.rho, opt.seed + 17 * n)) {
      if (s.V.contains_exact(s.F.apply(plan.F2.apply(z)))) ++c.displacement_violations;
    }
    for (const auto& x : ball_and_shell(dim, opt.samples, 2, opt.seed + 19 * n)) {
      if (!s.V.contains_exact(s.F_tilde.apply(x))) ++c.containment_violations;
    }
  }
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) {
      if (m == n) continue;
      ++c.pairs_checked;
      for (const auto& p : in_U[m])
        if (plan.slots[n].U.contains_exact(p)) ++c.overlap_violations;
    }
  }
  if (!c.ok())
    throw PlanError("plan verification failed: overlaps=" +
                    std::to_string(c.overlap_violations) +
                    " displacement=" + std::to_string(c.displacement_violations) +
                    " containment=" + std::to_string(c.containment_violations) +
                    " hints=" + std::to_string(c.hint_violations) +
                    (c.diameters_decreasing ? "" : " diameters not decreasing") +
                    (c.diameters_below_bound ? "" : " diameter above 2^-n"));
}

}  // namespace

GeneratorParams GeneratorParams::defaults(int dim) {
  GeneratorParams p;
  p.dim = dim;
  return p.validated();
}

GeneratorParams GeneratorParams::validated() const {
  GeneratorParams p = *this;
  if (p.dim < 1 || p.dim > kMaxDim)
    throw DimensionError("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  if (!(p.lambda > 0 && p.lambda < 1))
    throw DomainError("lambda must lie in (0, 1), got " + format_real(p.lambda, 6));
  if (p.a.dim() == 0) p.a = Point::axis(p.dim, 0, 0.5L);
  if (p.a.dim() != p.dim) throw DimensionError("vector a has the wrong dimension");
  if (!p.a.is_finite() || !(p.a.norm() > 0 && p.a.norm() < 1))
    throw DomainError("vector a must satisfy 0 < |a| < 1");
  return p;
}

bool PlanChecks::ok() const {
  return overlap_violations == 0 && displacement_violations == 0 &&
         containment_violations == 0 && hint_violations == 0 &&
         diameters_decreasing && diameters_below_bound;
}

WitnessPlan build_plan(const GeneratorParams& params, int n_max,
                       const PlanOptions& opt) {
  if (n_max < 0) throw DomainError("N_max must be non-negative");
  WitnessPlan plan;
  plan.params = params.validated();
  const int dim = plan.params.dim;
  const Real lambda = plan.params.lambda;

  plan.rho = plan.params.a.norm() / 3;
  plan.F1 = radial(dim, MonotonePL({0, 2, 4}, {0, 2 * lambda, 4}));
  plan.F2 = localized_translation(plan.params.a, Ramp{1, 2});
  plan.F3 = axis_push(dim, 0, MonotonePL({-1.5L, 0, 1}, {-1.5L, 0.5L, 1}),
                      Ramp{0.5L, 1});

  while (2 * int_pow(lambda, plan.m) > plan.rho) ++plan.m;

  int prev_l = 0;
  for (int n = 0; n < n_max; ++n) {
    const Real budget = rm::ldexp(1, -(n + 3)) / int_pow(kPushLipschitz, n);
    int l = 1;
    while (2 * int_pow(lambda, l) > budget) ++l;
    if (n > 0) l = std::max(l, prev_l + 1);
    prev_l = l;

    PlanSlot s;
    s.l = l;
    s.l_tilde = l + plan.m;
    MapExpr push_n = power_exact(plan.F3, n);
    s.F = compose({push_n, power_exact(plan.F1, s.l)});
    s.F_tilde = compose({push_n, power_exact(plan.F1, s.l_tilde)});
    Point center = push_n.apply(Point(dim));
    Real scale = int_pow(lambda, l) * int_pow(kPushLipschitz, n) * (1 + 1e-9L);
    s.U = RegionDescriptor{s.F, 2, center, 2 * scale};
    s.V = RegionDescriptor{s.F, plan.rho, center, plan.rho * scale};
    plan.slots.push_back(std::move(s));
  }
  if (opt.verify) verify_plan(plan, opt);
  return plan;
}

long k_bound(const WitnessPlan& plan, int n) {
  if (n < 0 || n >= plan.n_max())
    throw DomainError("slot " + std::to_string(n) + " outside [0, " +
                      std::to_string(plan.n_max()) + ")");
  const auto& s = plan.slots[n];
  return 14L * n + 12L * s.l + 2L * s.l_tilde + 14;
}

long homeo_k_bound(const WitnessPlan& plan, int n) { return k_bound(plan, n) + 2; }

Word commutator_word(const WitnessPlan& plan, int n, const std::string& prefix) {
  k_bound(plan, n);  // range check
  const auto& s = plan.slots[n];
  auto letter = [&](const char* g) { return Word::letter(prefix + g); };
  Word f3n = letter("F3").repeated(n);
  Word fn = f3n * letter("F1").repeated(s.l);
  Word ft = f3n * letter("F1").repeated(s.l_tilde);
  Word fh = fn * letter("F2") * fn.inverse();
  Word f4 = letter("F4"), f5 = letter("F5");
  Word a = f4 * fh * f4.inverse() * fh.inverse();
  Word b = f5 * fh * f5.inverse() * fh.inverse();
  Word c = f4.inverse() * f5.inverse() * fh * f5 * f4 * fh.inverse();
  return ft.inverse() * a * b * c * ft;
}

void check_target_support(const MapExpr& m, Real max_radius, const std::string& what) {
  if (m.is_identity()) return;
  if (m.support_radius() > max_radius * (1 + 1e-12L))
    throw SupportError(what + " has declared support radius " +
                       format_real(m.support_radius(), 6) + " > " +
                       format_real(max_radius, 6));
  const int dim = m.dim();
  int k = 0;
  for (Real r : {m.support_radius(), (m.support_radius() + max_radius) / 2 + 1e-9L,
                 max_radius * 1.25L}) {
    for (const auto& x : draw(Sampler{Sampler::Kind::shell, dim, 64, r, 77u + k++})) {
      if (distance(m.node().forward(x), x) > 1e-12L)
        throw SupportError(what + " moves a point outside its declared support");
    }
  }
}

// ---- swindle ---------------------------------------------------------------

MapExpr swindle_conjugator(int dim) {
  MapExpr shrink = radial(dim, MonotonePL({0, kSwindleSupport, 2},
                                          {0, 1.0L / 16, 2}));
  MapExpr shift = localized_translation(Point::axis(dim, 0, 0.375L),
                                        Ramp{1.0L / 16, 1});
  return compose({shift, shrink});
}

MapExpr swindle_contraction(int dim) {
  return radial(dim, MonotonePL({0, 1, kSwindleSupport}, {0, 0.5L, kSwindleSupport}));
}

SwindleFactorization swindle_factorize(const MapExpr& h) {
  const int dim = h.dim();
  if (dim < 1) throw DimensionError("swindle target needs a dimension");
  check_target_support(h, kSwindleSupport, "swindle target");
  SwindleFactorization s;
  s.h = h;
  s.d = swindle_conjugator(dim);
  s.phi_c = swindle_contraction(dim);
  s.h_conj = h.is_identity() ? identity(dim) : conjugate(s.d, h);
  s.g = annular_stack(s.h_conj, s.r0);
  return s;
}

SwindleReport verify_swindle(SwindleFactorization& s, int samples, std::uint64_t seed,
                             int layers, Real tol) {
  SwindleReport rep;
  const int dim = s.h.dim();
  const MapExpr& g = s.g;
  const MapExpr& phi = s.phi_c;
  for (const auto& x : draw(Sampler{Sampler::Kind::ball, dim, samples, 2, seed})) {
    Point y = s.d.apply(x);
    y = phi.apply_inverse(y);
    y = g.apply_inverse(y);
    y = phi.apply(y);
    y = g.apply(y);
    y = s.d.apply_inverse(y);
    rep.sup_err = std::max(rep.sup_err, distance(y, s.h.apply(x)));
  }
  rep.samples = samples;

  Real disp = 0;
  for (const auto& x : draw(Sampler{Sampler::Kind::ball, dim, samples, s.r0, seed + 1}))
    disp = std::max(disp, distance(s.h_conj.apply(x), x));
  const Real C = s.r0 * (1 + disp);
  s.continuity.clear();
  if (!(g.apply(Point(dim)) == Point(dim))) rep.continuity_ok = false;
  for (int i = 0; i <= layers; ++i) {
    Real r = rm::ldexp(s.r0, -i);
    Real sup = 0;
    for (const auto& x : draw(Sampler{Sampler::Kind::ball, dim, 200, r, seed + 2 + i}))
      sup = std::max(sup, distance(g.apply(x), x));
    Real bound = rm::ldexp(C, -i);
    s.continuity.push_back({i, sup, bound});
    if (sup > bound) rep.continuity_ok = false;
  }
  rep.passed = rep.sup_err < tol && rep.continuity_ok;
  return rep;
}

// ---- machinery -------------------------------------------------------------

WitnessMachinery::WitnessMachinery(std::shared_ptr<const WitnessPlan> plan,
                                   std::string prefix)
    : plan_(std::move(plan)), prefix_(std::move(prefix)) {
  if (!plan_) throw DomainError("machinery needs a plan");
  slots_.resize(plan_->n_max());
  d_ = swindle_conjugator(plan_->params.dim);
}

void WitnessMachinery::check_slot(int n) const {
  if (built_) throw DomainError("targets must be registered before build()");
  if (n < 0 || n >= plan_->n_max())
    throw DomainError("slot " + std::to_string(n) + " overflows N_max = " +
                      std::to_string(plan_->n_max()));
  if (slots_[n].pair || slots_[n].swindle)
    throw DomainError("slot " + std::to_string(n) + " already populated");
}

void WitnessMachinery::set_pair(int n, CommutatorPair pair) {
  check_slot(n);
  const int dim = plan_->params.dim;
  for (const MapExpr* m : {&pair.f, &pair.g}) {
    if (m->dim() != 0 && m->dim() != dim)
      throw DimensionError("target dimension does not match the plan");
    check_target_support(*m, 2, "target of slot " + std::to_string(n));
  }
  slots_[n].pair = std::move(pair);
}

void WitnessMachinery::set_homeo(int n, MapExpr h) {
  check_slot(n);
  if (h.dim() == 0) h = identity(plan_->params.dim);
  if (h.dim() != plan_->params.dim)
    throw DimensionError("target dimension does not match the plan");
  SwindleFactorization s = swindle_factorize(h);
  if (!s.g.is_identity()) slots_[n].pair = CommutatorPair{s.g, s.phi_c};
  slots_[n].swindle = std::move(s);
}

bool WitnessMachinery::has_slot(int n) const {
  return n >= 0 && n < plan_->n_max() && (slots_[n].pair || slots_[n].swindle);
}

void WitnessMachinery::build() {
  if (built_) return;
  const int dim = plan_->params.dim;
  std::vector<UnionPart> p4, p5;
  for (int n = 0; n < plan_->n_max(); ++n) {
    const auto& pair = slots_[n].pair;
    if (!pair) continue;
    const auto& s = plan_->slots[n];
    if (!pair->f.is_identity()) p4.push_back({s.V, conjugate(s.F_tilde, pair->f)});
    if (!pair->g.is_identity()) p5.push_back({s.V, conjugate(s.F_tilde, pair->g)});
  }
  f4_ = piecewise_union(dim, std::move(p4));
  f5_ = piecewise_union(dim, std::move(p5));
  asg_ = Assignment(dim);
  asg_.bind(name("F1"), plan_->F1);
  asg_.bind(name("F2"), plan_->F2);
  asg_.bind(name("F3"), plan_->F3);
  asg_.bind(name("F4"), f4_);
  asg_.bind(name("F5"), f5_);
  asg_.bind(name("D"), d_);
  built_ = true;
}

const Assignment& WitnessMachinery::assignment() const {
  if (!built_) throw DomainError("machinery not built");
  return asg_;
}

const SwindleFactorization* WitnessMachinery::swindle(int n) const {
  if (n < 0 || n >= plan_->n_max() || !slots_[n].swindle) return nullptr;
  return &*slots_[n].swindle;
}

Word WitnessMachinery::raw_word(int n) const {
  k_bound(n);
  const auto& slot = slots_[n];
  if (!slot.pair || slot.pair->f.is_identity() || slot.pair->g.is_identity())
    return Word();
  Word w = commutator_word(*plan_, n, prefix_);
  if (slot.swindle) {
    Word d = Word::letter(name("D"));
    w = d.inverse() * w * d;
  }
  return w;
}

MapExpr WitnessMachinery::target(int n) const {
  k_bound(n);
  const auto& slot = slots_[n];
  if (slot.swindle) return slot.swindle->h;
  if (slot.pair)
    return compose({slot.pair->f, slot.pair->g, inverse(slot.pair->f),
                    inverse(slot.pair->g)});
  return identity(plan_->params.dim);
}

long WitnessMachinery::k_bound(int n) const {
  if (n >= 0 && n < plan_->n_max() && slots_[n].swindle)
    return homeo_k_bound(*plan_, n);
  return distortion::k_bound(*plan_, n);
}

Witness WitnessMachinery::witness(int n, const VerifyOptions& opt) const {
  const Assignment& asg = assignment();
  Witness w;
  w.n = n;
  w.kind = slots_[n].swindle ? "homeo" : "pair";
  Word raw = raw_word(n);
  w.unreduced_len = raw.size();
  w.word = reduce(raw);
  w.k_bound = k_bound(n);

  BoundWord bw(w.word, asg);
  MapExpr t = target(n);
  auto pts = draw(Sampler{Sampler::Kind::ball, plan_->params.dim, opt.samples,
                          opt.radius, opt.seed + static_cast<std::uint64_t>(n)});
  for (const auto& x : pts)
    w.report.sup_err = std::max(w.report.sup_err, distance(bw.apply(x), t.apply(x)));
  w.report.samples = static_cast<int>(pts.size());
  w.report.reduced_len = w.word.size();
  w.report.passed = w.report.sup_err < opt.tol &&
                    static_cast<long>(w.report.reduced_len) <= w.k_bound;
  return w;
}

Assignment build_generators(const WitnessPlan& plan,
                            const std::vector<CommutatorPair>& targets) {
  WitnessMachinery m(std::make_shared<WitnessPlan>(plan));
  for (std::size_t i = 0; i < targets.size(); ++i)
    m.set_pair(static_cast<int>(i), targets[i]);
  m.build();
  return m.assignment();
}

Witness commutator_witness(const WitnessMachinery& machinery, int n,
                           const VerifyOptions& opt) {
  Witness w = machinery.witness(n, opt);
  return w;
}

std::vector<Witness> homeo_witness(std::shared_ptr<const WitnessPlan> plan,
                                   const std::vector<MapExpr>& homeos,
                                   const VerifyOptions& opt) {
  WitnessMachinery m(std::move(plan));
  for (std::size_t i = 0; i < homeos.size(); ++i)
    m.set_homeo(static_cast<int>(i), homeos[i]);
  m.build();
  std::vector<Witness> out;
  for (std::size_t i = 0; i < homeos.size(); ++i)
    out.push_back(m.witness(static_cast<int>(i), opt));
  return out;
}

// ---- schedules -------------------------------------------------------------

std::vector<long> continued_fraction_denominators(Real alpha, long max_q) {
  if (!rm::isfinite(alpha)) throw DomainError("rotation number must be finite");
  std::vector<long> out{1};
  Real x = rm::frac(alpha);
  long q_prev = 0, q = 1;
  // the partial-quotient recursion loses about q^2 eps of accuracy
  while (x > 0) {
    Real y = 1 / x;
    Real a = rm::floor(y);
    x = y - a;
    if (a > Real(max_q)) break;
    long next = static_cast<long>(a) * q + q_prev;
    if (next > max_q || Real(next) * Real(next) * rm::epsilon() > 1e-4L) break;
    q_prev = q;
    q = next;
    if (q > out.back()) out.push_back(q);
  }
  return out;
}

std::vector<long> schedule_powers(const std::vector<long>& k_bounds,
                                  const ScheduleOptions& opt) {
  if (opt.scale < 1) throw DomainError("schedule scale must be >= 1");
  std::vector<long> dens;
  if (opt.recurrent_alpha)
    dens = continued_fraction_denominators(*opt.recurrent_alpha, 1L << 40);
  std::vector<long> p;
  for (std::size_t n = 0; n < k_bounds.size(); ++n) {
    long k = k_bounds[n];
    if (k <= 0) throw DomainError("k bounds must be positive");
    long want = 0;
    if (__builtin_mul_overflow(static_cast<long>(n + 1) * opt.scale, k, &want))
      throw DomainError("power schedule overflows");
    if (!p.empty()) want = std::max(want, p.back() + 1);
    if (opt.recurrent_alpha) {
      auto it = std::lower_bound(dens.begin(), dens.end(), want);
      if (it == dens.end())
        throw DomainError("rotation number has too few convergent denominators");
      want = *it;
    }
    p.push_back(want);
  }
  return p;
}

}  // namespace distortion
