#include "distortion/real.hpp"

#include <cstdio>
#include <iomanip>
#include <sstream>

namespace distortion {

std::string format_real(const Real& x, int digits) {
#ifdef DISTORTION_HIGH_PRECISION
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
#else
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*Lg", digits, x);
  return buf;
#endif
}

}  // namespace distortion
