#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <vector>

namespace psi {

// Unbounded integer. Value bounds of solutions grow exponentially in the
// system size, so fixed-width integers are not an option.
using Int = boost::multiprecision::cpp_int;

// Parameter setting: one integer per parameter, in declaration order.
using ParamSetting = std::vector<Int>;

inline Int gcd_int(const Int& a, const Int& b) {
  return boost::multiprecision::gcd(a, b);
}

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

// cpp_int division truncates toward zero; these round toward -inf / +inf.
inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Int ceil_div(const Int& a, const Int& b) {
  Int q = a / b;
  if ((a % b) != 0 && ((a < 0) == (b < 0))) ++q;
  return q;
}

inline Int pow_int(Int base, unsigned long exp) {
  Int r = 1;
  while (exp > 0) {
    if (exp & 1) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

inline std::string to_string(const Int& a) { return a.str(); }

}  // namespace psi
