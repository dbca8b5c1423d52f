#pragma once

#include <cmath>
#include <limits>
#include <string>

#ifdef DISTORTION_HIGH_PRECISION
#include <boost/multiprecision/float128.hpp>
#endif

namespace distortion {

// Scalar used for every map evaluation. Words route points through regions
// of diameter ~2^-30, so double is not enough for the default plan sizes.
#ifdef DISTORTION_HIGH_PRECISION
using Real = boost::multiprecision::float128;
#else
using Real = long double;
#endif

inline double to_double(const Real& x) { return static_cast<double>(x); }

namespace rm {

inline Real sqrt(const Real& x) { using std::sqrt; return sqrt(x); }
inline Real abs(const Real& x) { using std::abs; return abs(x); }
inline Real sin(const Real& x) { using std::sin; return sin(x); }
inline Real cos(const Real& x) { using std::cos; return cos(x); }
inline Real tan(const Real& x) { using std::tan; return tan(x); }
inline Real atan(const Real& x) { using std::atan; return atan(x); }
inline Real atan2(const Real& y, const Real& x) { using std::atan2; return atan2(y, x); }
inline Real floor(const Real& x) { using std::floor; return floor(x); }
inline Real ceil(const Real& x) { using std::ceil; return ceil(x); }
inline Real log(const Real& x) { using std::log; return log(x); }
inline Real ldexp(const Real& x, int e) { using std::ldexp; return ldexp(x, e); }
inline Real frexp(const Real& x, int* e) { using std::frexp; return frexp(x, e); }
inline bool isfinite(const Real& x) {
  using std::isfinite;
  return isfinite(x);
}

inline Real pi() {
#ifdef DISTORTION_HIGH_PRECISION
  return boost::multiprecision::float128(
      "3.14159265358979323846264338327950288");
#else
  return 3.141592653589793238462643383279502884L;
#endif
}

inline Real epsilon() { return std::numeric_limits<Real>::epsilon(); }

/// Fractional part in [0, 1).
inline Real frac(const Real& x) {
  Real f = x - floor(x);
  return f >= Real(1) ? Real(0) : f;
}

}  // namespace rm

/// Human-readable rendering with `digits` significant digits.
std::string format_real(const Real& x, int digits = 17);

}  // namespace distortion
