#include "distortion/profile.hpp"

#include <algorithm>
#include <cstdlib>

#include "distortion/errors.hpp"

namespace distortion {

MonotonePL::MonotonePL() : MonotonePL({0, 1}, {0, 1}) {}

MonotonePL::MonotonePL(std::vector<Real> xs, std::vector<Real> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() < 2 || xs_.size() != ys_.size())
    throw DomainError("profile needs at least two knots of matching size");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!rm::isfinite(xs_[i]) || !rm::isfinite(ys_[i]))
      throw DomainError("profile knots must be finite");
    if (i > 0 && (xs_[i] <= xs_[i - 1] || ys_[i] <= ys_[i - 1]))
      throw DomainError("profile knots must be strictly increasing");
  }
  if (xs_.front() != ys_.front() || xs_.back() != ys_.back())
    throw DomainError("profile end knots must lie on the diagonal");
  slopes_.resize(xs_.size() - 1);
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
    slopes_[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
}

Real MonotonePL::operator()(const Real& t) const {
  if (t <= xs_.front() || t >= xs_.back()) return t;
  auto i = std::upper_bound(xs_.begin(), xs_.end(), t) - xs_.begin() - 1;
  return ys_[i] + (t - xs_[i]) * slopes_[i];
}

Real MonotonePL::inverse(const Real& t) const {
  if (t <= ys_.front() || t >= ys_.back()) return t;
  auto i = std::upper_bound(ys_.begin(), ys_.end(), t) - ys_.begin() - 1;
  return xs_[i] + (t - ys_[i]) * ((xs_[i + 1] - xs_[i]) / (ys_[i + 1] - ys_[i]));
}

Real MonotonePL::ratio(const Real& t) const {
  if (t >= xs_.back()) return 1;
  if (xs_.front() == 0 && t < xs_[1]) return slopes_[0];
  return (*this)(t) / t;
}

Real MonotonePL::inverse_ratio(const Real& t) const {
  if (t >= ys_.back()) return 1;
  if (ys_.front() == 0 && t < ys_[1])
    return (xs_[1] - xs_[0]) / (ys_[1] - ys_[0]);
  return inverse(t) / t;
}

MonotonePL MonotonePL::compose(const MonotonePL& inner) const {
  const Real lo = std::min(xs_.front(), inner.xs_.front());
  const Real hi = std::max(xs_.back(), inner.xs_.back());
  std::vector<Real> ts(inner.xs_);
  for (const auto& x : xs_) ts.push_back(inner.inverse(x));
  std::sort(ts.begin(), ts.end());
  std::vector<Real> kx{lo}, ky{lo};
  auto tol = [](const Real& t) {
    return 64 * rm::epsilon() * std::max(Real(1), rm::abs(t));
  };
  for (const auto& t : ts) {
    if (t - kx.back() <= tol(t) || hi - t <= tol(t)) continue;
    Real y = (*this)(inner(t));
    // rounding can break strict monotonicity between nearly equal knots
    if (y <= ky.back() || y >= hi) continue;
    kx.push_back(t);
    ky.push_back(y);
  }
  kx.push_back(hi);
  ky.push_back(hi);
  return MonotonePL(std::move(kx), std::move(ky));
}

MonotonePL MonotonePL::inverted() const { return MonotonePL(ys_, xs_); }

MonotonePL MonotonePL::power(long k) const {
  if (k == 0) return MonotonePL({xs_.front(), xs_.back()}, {xs_.front(), xs_.back()});
  if (k < 0) return inverted().power(-k);
  MonotonePL result = *this;
  for (long i = 1; i < k; ++i) result = compose(result);
  return result;
}

Real MonotonePL::blend(const Real& t, const Real& w) const {
  if (t <= xs_.front() || t >= xs_.back()) return t;
  return (1 - w) * t + w * (*this)(t);
}

Real MonotonePL::blend_inverse(const Real& t, const Real& w) const {
  if (t <= xs_.front() || t >= xs_.back()) return t;
  auto value = [&](std::size_t i) { return (1 - w) * xs_[i] + w * ys_[i]; };
  std::size_t lo = 0, hi = xs_.size() - 1;
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (value(mid) <= t)
      lo = mid;
    else
      hi = mid;
  }
  Real b0 = value(lo), b1 = value(lo + 1);
  return xs_[lo] + (t - b0) * ((xs_[lo + 1] - xs_[lo]) / (b1 - b0));
}

bool MonotonePL::is_identity() const { return xs_ == ys_; }

Real MonotonePL::min_slope() const {
  return *std::min_element(slopes_.begin(), slopes_.end());
}

Real MonotonePL::max_slope() const {
  return *std::max_element(slopes_.begin(), slopes_.end());
}

Real MonotonePL::max_displacement() const {
  Real d = 0;
  for (std::size_t i = 0; i < xs_.size(); ++i)
    d = std::max(d, rm::abs(ys_[i] - xs_[i]));
  return d;
}

void Ramp::validate() const {
  if (!rm::isfinite(r_in) || !rm::isfinite(r_out) || r_in < 0 || r_out <= r_in)
    throw DomainError("cutoff needs 0 <= r_in < r_out");
}

}  // namespace distortion
