#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "distortion/geomaps.hpp"
#include "distortion/words.hpp"

namespace distortion {

/// Parameters of the generators F1, F2, F3. x0 is always e1.
struct GeneratorParams {
  int dim = 2;
  Real lambda = 0.5L;
  Point a;  // empty -> (1/2, 0, ..., 0)

  static GeneratorParams defaults(int dim);
  /// Fills `a` if empty and checks 0 < lambda < 1, 0 < |a| < 1.
  GeneratorParams validated() const;
};

/// Certified Lipschitz constant of the default F3 (true value <= 7/3).
inline constexpr int kPushLipschitz = 3;

struct PlanChecks {
  long pairs_checked = 0;
  long overlap_violations = 0;
  long displacement_violations = 0;
  long containment_violations = 0;
  long hint_violations = 0;
  std::vector<Real> diameters;  // sampled diam U_n
  bool diameters_decreasing = true;
  bool diameters_below_bound = true;  // diam U_n < 2^-n

  bool ok() const;
};

struct PlanOptions {
  int samples = 1000;
  int diameter_samples = 256;
  std::uint64_t seed = 1;
  bool verify = true;
};

struct PlanSlot {
  int l = 0;
  int l_tilde = 0;
  MapExpr F;        // F3^n F1^l
  MapExpr F_tilde;  // F3^n F1^l~
  RegionDescriptor U, V;
};

/// Input-independent geometry: generators, l_n, l~_n, U_n, V_n.
struct WitnessPlan {
  GeneratorParams params;
  Real rho = 0;
  int m = 0;  // l~_n - l_n
  MapExpr F1, F2, F3;
  std::vector<PlanSlot> slots;
  PlanChecks checks;

  int n_max() const { return static_cast<int>(slots.size()); }
};

WitnessPlan build_plan(const GeneratorParams& params, int n_max,
                       const PlanOptions& options = {});

/// Letter count 14n + 12 l_n + 2 l~_n + 14 of the commutator word.
long k_bound(const WitnessPlan& plan, int n);
/// k_bound + 2 (the swindle conjugator letters).
long homeo_k_bound(const WitnessPlan& plan, int n);

struct CommutatorPair {
  MapExpr f, g;
};
struct PlainHomeo {
  MapExpr h;
};
using Target = std::variant<CommutatorPair, PlainHomeo>;

/// Checks declared support radius <= max_radius and spot-checks that the map
/// fixes points on a few shells outside it.
void check_target_support(const MapExpr& m, Real max_radius, const std::string& what);

/// Swindle factorization h = d^-1 [g, phi_c] d.
struct SwindleFactorization {
  MapExpr h;
  MapExpr d;        // fixed conjugator (plan-independent)
  MapExpr phi_c;    // x/2 on B(0,1), identity outside B(0,1.9)
  MapExpr h_conj;   // d h d^-1, supported in the base annulus
  MapExpr g;        // stacked copies of h_conj
  Real r0 = 0.5L;   // outer radius of the base annulus

  struct Layer {
    int i;
    Real sup_displacement;
    Real bound;
  };
  std::vector<Layer> continuity;  // filled by verify_swindle
};

/// Largest declared support radius accepted by swindle_factorize.
inline constexpr long double kSwindleSupport = 1.9L;

MapExpr swindle_conjugator(int dim);
MapExpr swindle_contraction(int dim);
SwindleFactorization swindle_factorize(const MapExpr& h);

struct SwindleReport {
  Real sup_err = 0;
  int samples = 0;
  bool continuity_ok = true;
  bool passed = false;
};
SwindleReport verify_swindle(SwindleFactorization& s, int samples = 1000,
                             std::uint64_t seed = 1, int layers = 20,
                             Real tol = 1e-6L);

struct VerifyOptions {
  int samples = 1000;
  Real radius = 2.5L;
  std::uint64_t seed = 1;
  Real tol = 1e-6L;
};

struct VerificationReport {
  int samples = 0;
  Real sup_err = 0;
  std::size_t reduced_len = 0;
  bool passed = false;
};

struct Witness {
  int n = 0;
  std::string kind;  // "pair" or "homeo"
  Word word;
  std::size_t unreduced_len = 0;
  long k_bound = 0;
  VerificationReport report;
};

/// One copy of the generator set {F1..F5, D} over a plan, with slots filled
/// by targets. Generator names carry `prefix` so copies can share a word
/// alphabet.
class WitnessMachinery {
 public:
  WitnessMachinery(std::shared_ptr<const WitnessPlan> plan, std::string prefix = "");

  const WitnessPlan& plan() const { return *plan_; }
  const std::string& prefix() const { return prefix_; }
  std::string name(const char* gen) const { return prefix_ + gen; }

  /// Slot registration; must happen before build().
  void set_pair(int n, CommutatorPair pair);
  void set_homeo(int n, MapExpr h);
  bool has_slot(int n) const;

  /// Builds F4, F5 as unions over the populated V_n.
  void build();
  bool built() const { return built_; }

  const Assignment& assignment() const;
  const MapExpr& F4() const { return f4_; }
  const MapExpr& F5() const { return f5_; }
  const SwindleFactorization* swindle(int n) const;

  /// Unreduced word for slot n (empty for identity targets).
  Word raw_word(int n) const;
  /// The map the slot word should equal.
  MapExpr target(int n) const;
  long k_bound(int n) const;
  Witness witness(int n, const VerifyOptions& opt = {}) const;

 private:
  struct Slot {
    std::optional<CommutatorPair> pair;
    std::optional<SwindleFactorization> swindle;
  };
  void check_slot(int n) const;

  std::shared_ptr<const WitnessPlan> plan_;
  std::string prefix_;
  std::vector<Slot> slots_;
  bool built_ = false;
  MapExpr d_;
  MapExpr f4_, f5_;
  Assignment asg_;
};

/// Commutator word F~^-1 A B C F~ before reduction.
Word commutator_word(const WitnessPlan& plan, int n, const std::string& prefix = "");

// Free-function forms of the pipeline.
Assignment build_generators(const WitnessPlan& plan,
                            const std::vector<CommutatorPair>& targets);
Witness commutator_witness(const WitnessMachinery& machinery, int n,
                           const VerifyOptions& opt = {});
std::vector<Witness> homeo_witness(std::shared_ptr<const WitnessPlan> plan,
                                   const std::vector<MapExpr>& homeos,
                                   const VerifyOptions& opt = {});

// ---- power schedules ----------------------------------------------------

struct ScheduleOptions {
  long scale = 1;
  /// If set, p(n) is taken among continued-fraction denominators of alpha.
  std::optional<Real> recurrent_alpha;
};

/// Strictly increasing p(n) with k_n / p(n) <= 1/(n+1).
std::vector<long> schedule_powers(const std::vector<long>& k_bounds,
                                  const ScheduleOptions& options = {});

/// Distinct convergent denominators of alpha, increasing, up to max_q.
std::vector<long> continued_fraction_denominators(Real alpha, long max_q);

}  // namespace distortion
