#include "psi/linear.hpp"

#include <sstream>
#include <stdexcept>

namespace psi {

AffineFn AffineFn::neg_inf(int k) {
  AffineFn f;
  f.tag = Tag::NegInf;
  f.coeffs.assign(k, Int(0));
  return f;
}

AffineFn AffineFn::pos_inf(int k) {
  AffineFn f;
  f.tag = Tag::PosInf;
  f.coeffs.assign(k, Int(0));
  return f;
}

AffineFn AffineFn::constant(int k, Int c) {
  AffineFn f;
  f.tag = Tag::Affine;
  f.a0 = std::move(c);
  f.coeffs.assign(k, Int(0));
  return f;
}

AffineFn AffineFn::proj(int k, int i) {
  AffineFn f = constant(k, Int(0));
  f.coeffs.at(i) = 1;
  return f;
}

AffineFn AffineFn::neg_proj(int k, int i) {
  AffineFn f = constant(k, Int(0));
  f.coeffs.at(i) = -1;
  return f;
}

bool AffineFn::is_constant() const {
  if (tag != Tag::Affine) return false;
  for (const Int& c : coeffs)
    if (c != 0) return false;
  return true;
}

ExtInt AffineFn::eval(const ParamSetting& pi) const {
  if (tag == Tag::NegInf) return ExtInt::neg_inf();
  if (tag == Tag::PosInf) return ExtInt::pos_inf();
  Int v = a0;
  for (size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * pi.at(i);
  return ExtInt::fin(v);
}

bool AffineFn::operator==(const AffineFn& o) const {
  if (tag != o.tag) return false;
  if (tag != Tag::Affine) return true;
  return a0 == o.a0 && coeffs == o.coeffs;
}

std::string AffineFn::str(const std::vector<std::string>& param_names) const {
  if (tag == Tag::NegInf) return "-inf";
  if (tag == Tag::PosInf) return "inf";
  std::ostringstream os;
  os << a0.str();
  for (size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == 0) continue;
    if (coeffs[i] < 0)
      os << " - " << Int(-coeffs[i]).str();
    else
      os << " + " << coeffs[i].str();
    os << "*" << param_names.at(i);
  }
  return os.str();
}

AffineFn aff_add(const AffineFn& f, const AffineFn& g) {
  int k = f.dim();
  if (f.is_neg_inf() || g.is_neg_inf()) return AffineFn::neg_inf(k);
  if (f.is_pos_inf() || g.is_pos_inf()) return AffineFn::pos_inf(k);
  AffineFn r = f;
  r.a0 += g.a0;
  for (int i = 0; i < k; ++i) r.coeffs[i] += g.coeffs[i];
  return r;
}

AffineFn aff_scale(const Int& c, const AffineFn& f) {
  if (c < 0) throw std::invalid_argument("aff_scale: negative coefficient");
  int k = f.dim();
  if (f.is_neg_inf()) return AffineFn::neg_inf(k);
  if (f.is_pos_inf()) return c == 0 ? AffineFn::constant(k, 0) : AffineFn::pos_inf(k);
  AffineFn r = f;
  r.a0 *= c;
  for (Int& a : r.coeffs) a *= c;
  return r;
}

AffineFn aff_neg(const AffineFn& f) {
  int k = f.dim();
  if (f.is_neg_inf()) return AffineFn::pos_inf(k);
  if (f.is_pos_inf()) return AffineFn::neg_inf(k);
  AffineFn r = f;
  r.a0 = -r.a0;
  for (Int& a : r.coeffs) a = -a;
  return r;
}

LinIneq::LinIneq(std::vector<Int> cs, Int b) : coeffs(std::move(cs)), bound(std::move(b)) {
  Int g = 0;
  for (const Int& a : coeffs) g = gcd_int(g, a);
  if (g == 0) throw std::invalid_argument("LinIneq: all coefficients zero");
  if (g != 1) {
    for (Int& a : coeffs) a /= g;
    bound = floor_div(bound, g);  // integer tightening
  }
}

bool LinIneq::holds_at(const ParamSetting& pi) const {
  Int v = 0;
  for (size_t i = 0; i < coeffs.size(); ++i) v += coeffs[i] * pi.at(i);
  return v <= bound;
}

std::string LinIneq::str(const std::vector<std::string>& param_names) const {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < coeffs.size(); ++i) {
    if (coeffs[i] == 0) continue;
    if (!first) os << " + ";
    os << coeffs[i].str() << "*" << param_names.at(i);
    first = false;
  }
  os << " <= " << bound.str();
  return os.str();
}

LinIneq neg_ineq(const LinIneq& c) {
  std::vector<Int> cs;
  cs.reserve(c.coeffs.size());
  for (const Int& a : c.coeffs) cs.push_back(-a);
  return LinIneq(std::move(cs), -c.bound - 1);
}

int cmp_order(const LinIneq& c1, const LinIneq& c2) {
  int n1 = 0, n2 = 0;
  for (const Int& a : c1.coeffs) n1 += (a != 0);
  for (const Int& a : c2.coeffs) n2 += (a != 0);
  if (n1 != n2) return n1 < n2 ? -1 : 1;
  for (size_t i = 0; i < c1.coeffs.size(); ++i) {
    if (c1.coeffs[i] != c2.coeffs[i]) return c1.coeffs[i] < c2.coeffs[i] ? -1 : 1;
  }
  if (c1.bound != c2.bound) return c1.bound < c2.bound ? -1 : 1;
  return 0;
}

CanonIneq canonical_polarity(const LinIneq& c) {
  LinIneq n = neg_ineq(c);
  if (cmp_order(c, n) < 0) return CanonIneq{c, false};
  return CanonIneq{n, true};
}

CmpSplit aff_cmp_split(const AffineFn& f, const AffineFn& g) {
  // f <= g everywhere / nowhere for the infinite tags.
  if (f.is_neg_inf() || g.is_pos_inf()) return {CmpSplit::Kind::AlwaysTrue, std::nullopt};
  if (f.is_pos_inf() || g.is_neg_inf()) return {CmpSplit::Kind::AlwaysFalse, std::nullopt};
  std::vector<Int> d(f.coeffs.size());
  bool zero = true;
  for (size_t i = 0; i < d.size(); ++i) {
    d[i] = f.coeffs[i] - g.coeffs[i];
    zero = zero && d[i] == 0;
  }
  if (zero) {
    return {f.a0 <= g.a0 ? CmpSplit::Kind::AlwaysTrue : CmpSplit::Kind::AlwaysFalse,
            std::nullopt};
  }
  // f - g <= 0  <=>  sum d_i p_i <= g0 - f0
  return {CmpSplit::Kind::Split, LinIneq(std::move(d), g.a0 - f.a0)};
}

CmpSplit aff_guard_split(const AffineFn& f) {
  if (f.is_pos_inf()) return {CmpSplit::Kind::AlwaysTrue, std::nullopt};
  if (f.is_neg_inf()) return {CmpSplit::Kind::AlwaysFalse, std::nullopt};
  std::vector<Int> d(f.coeffs.size());
  bool zero = true;
  for (size_t i = 0; i < d.size(); ++i) {
    d[i] = -f.coeffs[i];
    zero = zero && d[i] == 0;
  }
  if (zero) {
    return {f.a0 >= 0 ? CmpSplit::Kind::AlwaysTrue : CmpSplit::Kind::AlwaysFalse,
            std::nullopt};
  }
  // f >= 0  <=>  -sum a_i p_i <= a0
  return {CmpSplit::Kind::Split, LinIneq(std::move(d), f.a0)};
}

}  // namespace psi
