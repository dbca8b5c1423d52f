#pragma once

#include <string>

#include <array>
#include <initializer_list>
#include <span>
#include <vector>

#include "distortion/errors.hpp"
#include "distortion/real.hpp"

namespace distortion {

inline constexpr int kMaxDim = 8;

/// A point of R^N with N <= kMaxDim, stored inline.
class Point {
 public:
  Point() = default;
  explicit Point(int dim);
  Point(std::initializer_list<Real> coords);

  static Point from_doubles(std::span<const double> coords);
  static Point axis(int dim, int k, Real value = 1);

  int dim() const { return dim_; }
  Real& operator[](int i) { return c_[i]; }
  const Real& operator[](int i) const { return c_[i]; }

  Real norm2() const;
  Real norm() const;
  bool is_finite() const;
  std::vector<double> to_doubles() const;

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(const Real& s);

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, const Real& s) { return a *= s; }
  friend Point operator*(const Real& s, Point a) { return a *= s; }
  friend bool operator==(const Point& a, const Point& b);

 private:
  std::array<Real, kMaxDim> c_{};
  int dim_ = 0;
};

Real distance(const Point& a, const Point& b);
/// "(x0, x1, ...)" with `digits` significant digits.
std::string to_string(const Point& p, int digits = 10);

}  // namespace distortion
