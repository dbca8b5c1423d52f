#pragma once

#include <vector>

#include "distortion/real.hpp"

namespace distortion {

/// Strictly increasing piecewise-linear homeomorphism of the line that is the
/// identity outside [knots.front(), knots.back()]. Both end knots lie on the
/// diagonal. A radial profile is one whose first knot is (0, 0).
class MonotonePL {
 public:
  MonotonePL();  // identity on [0, 1]
  MonotonePL(std::vector<Real> xs, std::vector<Real> ys);

  Real operator()(const Real& t) const;
  Real inverse(const Real& t) const;

  /// rho(t) / t for a radial profile; exact slope on the first segment so
  /// that pure scalings stay exact.
  Real ratio(const Real& t) const;
  Real inverse_ratio(const Real& t) const;

  /// (*this) o inner.
  MonotonePL compose(const MonotonePL& inner) const;
  MonotonePL inverted() const;
  /// k-fold composite by knot algebra; negative k uses the inverse.
  MonotonePL power(long k) const;

  /// Value of (1-w) t + w rho(t) and its inverse; w in [0, 1].
  Real blend(const Real& t, const Real& w) const;
  Real blend_inverse(const Real& t, const Real& w) const;

  bool is_identity() const;
  Real min_slope() const;
  Real max_slope() const;
  Real lo() const { return xs_.front(); }
  Real hi() const { return xs_.back(); }
  /// sup |rho(t) - t|
  Real max_displacement() const;

  const std::vector<Real>& xs() const { return xs_; }
  const std::vector<Real>& ys() const { return ys_; }

 private:
  std::vector<Real> xs_, ys_, slopes_;
};

/// Cutoff equal to 1 on [0, r_in], 0 on [r_out, inf), linear in between.
struct Ramp {
  Real r_in = 0;
  Real r_out = 1;

  Real operator()(const Real& r) const {
    if (r <= r_in) return 1;
    if (r >= r_out) return 0;
    return (r_out - r) / (r_out - r_in);
  }
  Real lipschitz() const { return 1 / (r_out - r_in); }
  void validate() const;
};

}  // namespace distortion
