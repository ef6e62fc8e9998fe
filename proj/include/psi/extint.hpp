#pragma once

#include "psi/numeric.hpp"

#include <cassert>
#include <compare>
#include <ostream>
#include <stdexcept>
#include <string>

namespace psi {

// Element of the complete lattice Z u {-inf, +inf} with the extended
// arithmetic used by the solver:
//   x + (-inf) = (-inf) + x = -inf           for all x
//   x + inf    = inf + x    = inf            for all x != -inf
//   c * (-inf) = -inf                        for all c >= 0
//   0 * inf    = 0,   c * inf = inf          for c > 0
//   a ; b      = b if a >= 0, -inf otherwise (test of non-negativity)
class ExtInt {
 public:
  enum class Tag { NegInf, Fin, PosInf };

  ExtInt() : tag_(Tag::Fin), value_(0) {}
  explicit ExtInt(Int v) : tag_(Tag::Fin), value_(std::move(v)) {}
  explicit ExtInt(long v) : tag_(Tag::Fin), value_(v) {}

  static ExtInt neg_inf() { return ExtInt(Tag::NegInf); }
  static ExtInt pos_inf() { return ExtInt(Tag::PosInf); }
  static ExtInt fin(Int v) { return ExtInt(std::move(v)); }

  Tag tag() const { return tag_; }
  bool is_neg_inf() const { return tag_ == Tag::NegInf; }
  bool is_pos_inf() const { return tag_ == Tag::PosInf; }
  bool is_finite() const { return tag_ == Tag::Fin; }

  const Int& value() const {
    assert(is_finite());
    return value_;
  }

  friend bool operator==(const ExtInt& a, const ExtInt& b) {
    if (a.tag_ != b.tag_) return false;
    return a.tag_ != Tag::Fin || a.value_ == b.value_;
  }
  friend bool operator!=(const ExtInt& a, const ExtInt& b) { return !(a == b); }
  friend bool operator<(const ExtInt& a, const ExtInt& b) {
    if (a.tag_ != b.tag_) return rank(a.tag_) < rank(b.tag_);
    return a.tag_ == Tag::Fin && a.value_ < b.value_;
  }
  friend bool operator<=(const ExtInt& a, const ExtInt& b) { return !(b < a); }
  friend bool operator>(const ExtInt& a, const ExtInt& b) { return b < a; }
  friend bool operator>=(const ExtInt& a, const ExtInt& b) { return !(a < b); }

  std::string str() const {
    switch (tag_) {
      case Tag::NegInf: return "-inf";
      case Tag::PosInf: return "inf";
      default: return value_.str();
    }
  }

  friend std::ostream& operator<<(std::ostream& os, const ExtInt& a) {
    return os << a.str();
  }

 private:
  explicit ExtInt(Tag t) : tag_(t), value_(0) {}
  static int rank(Tag t) {
    return t == Tag::NegInf ? 0 : (t == Tag::Fin ? 1 : 2);
  }

  Tag tag_;
  Int value_;
};

// -inf absorbs over +inf: (-inf) + inf = -inf.
inline ExtInt ext_add(const ExtInt& a, const ExtInt& b) {
  if (a.is_neg_inf() || b.is_neg_inf()) return ExtInt::neg_inf();
  if (a.is_pos_inf() || b.is_pos_inf()) return ExtInt::pos_inf();
  return ExtInt::fin(a.value() + b.value());
}

// c must be non-negative; c * (-inf) = -inf for every c >= 0, 0 * inf = 0.
inline ExtInt ext_scale(const Int& c, const ExtInt& a) {
  if (c < 0) throw std::invalid_argument("ext_scale: negative coefficient");
  if (a.is_neg_inf()) return ExtInt::neg_inf();
  if (a.is_pos_inf()) return c == 0 ? ExtInt::fin(0) : ExtInt::pos_inf();
  return ExtInt::fin(c * a.value());
}

inline ExtInt ext_min(const ExtInt& a, const ExtInt& b) { return a <= b ? a : b; }
inline ExtInt ext_max(const ExtInt& a, const ExtInt& b) { return a >= b ? a : b; }

// a ; b -- passes b through iff a >= 0.
inline ExtInt ext_guard(const ExtInt& a, const ExtInt& b) {
  if (a >= ExtInt::fin(0)) return b;
  return ExtInt::neg_inf();
}

inline ExtInt ext_neg(const ExtInt& a) {
  if (a.is_neg_inf()) return ExtInt::pos_inf();
  if (a.is_pos_inf()) return ExtInt::neg_inf();
  return ExtInt::fin(-a.value());
}

}  // namespace psi
