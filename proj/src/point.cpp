#include "distortion/point.hpp"

#include <string>

namespace distortion {

namespace {

void check_dim(int dim) {
  if (dim < 0 || dim > kMaxDim)
    throw DimensionError("dimension " + std::to_string(dim) +
                         " outside [0, " + std::to_string(kMaxDim) + "]");
}

}  // namespace

Point::Point(int dim) : dim_(dim) { check_dim(dim); }

Point::Point(std::initializer_list<Real> coords)
    : dim_(static_cast<int>(coords.size())) {
  check_dim(dim_);
  int i = 0;
  for (const auto& c : coords) c_[i++] = c;
}

Point Point::from_doubles(std::span<const double> coords) {
  Point p(static_cast<int>(coords.size()));
  for (int i = 0; i < p.dim_; ++i) p.c_[i] = coords[i];
  return p;
}

Point Point::axis(int dim, int k, Real value) {
  Point p(dim);
  if (k < 0 || k >= dim) throw DimensionError("axis index out of range");
  p.c_[k] = value;
  return p;
}

Real Point::norm2() const {
  Real s = 0;
  for (int i = 0; i < dim_; ++i) s += c_[i] * c_[i];
  return s;
}

Real Point::norm() const { return rm::sqrt(norm2()); }

bool Point::is_finite() const {
  for (int i = 0; i < dim_; ++i)
    if (!rm::isfinite(c_[i])) return false;
  return true;
}

std::vector<double> Point::to_doubles() const {
  std::vector<double> out(dim_);
  for (int i = 0; i < dim_; ++i) out[i] = to_double(c_[i]);
  return out;
}

Point& Point::operator+=(const Point& o) {
  if (o.dim_ != dim_) throw DimensionError("point dimension mismatch");
  for (int i = 0; i < dim_; ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  if (o.dim_ != dim_) throw DimensionError("point dimension mismatch");
  for (int i = 0; i < dim_; ++i) c_[i] -= o.c_[i];
  return *this;
}

Point& Point::operator*=(const Real& s) {
  for (int i = 0; i < dim_; ++i) c_[i] *= s;
  return *this;
}

bool operator==(const Point& a, const Point& b) {
  if (a.dim_ != b.dim_) return false;
  for (int i = 0; i < a.dim_; ++i)
    if (a.c_[i] != b.c_[i]) return false;
  return true;
}

Real distance(const Point& a, const Point& b) { return (a - b).norm(); }

std::string to_string(const Point& p, int digits) {
  std::string s = "(";
  for (int k = 0; k < p.dim(); ++k) {
    if (k) s += ", ";
    s += format_real(p[k], digits);
  }
  return s + ")";
}

}  // namespace distortion
