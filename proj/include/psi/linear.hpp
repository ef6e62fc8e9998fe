#pragma once

#include "psi/extint.hpp"
#include "psi/numeric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace psi {

// Piecewise-affine leaf value: const -inf, const +inf, or an integer-affine
// function a0 + a1*p1 + ... + ak*pk of the parameters.
struct AffineFn {
  enum class Tag { NegInf, PosInf, Affine };

  Tag tag = Tag::Affine;
  Int a0;                   // constant term (Affine only)
  std::vector<Int> coeffs;  // length k (Affine only)

  static AffineFn neg_inf(int k);
  static AffineFn pos_inf(int k);
  static AffineFn constant(int k, Int c);
  static AffineFn proj(int k, int i);      // p_{i+1}
  static AffineFn neg_proj(int k, int i);  // -p_{i+1}

  bool is_neg_inf() const { return tag == Tag::NegInf; }
  bool is_pos_inf() const { return tag == Tag::PosInf; }
  bool is_affine() const { return tag == Tag::Affine; }
  bool is_constant() const;

  int dim() const { return static_cast<int>(coeffs.size()); }

  ExtInt eval(const ParamSetting& pi) const;

  bool operator==(const AffineFn& o) const;
  std::string str(const std::vector<std::string>& param_names) const;
};

AffineFn aff_add(const AffineFn& f, const AffineFn& g);
AffineFn aff_scale(const Int& c, const AffineFn& f);
AffineFn aff_neg(const AffineFn& f);

// Linear inequality a1*p1 + ... + ak*pk <= b over the integer parameters.
// Stored gcd-reduced with floored bound; the all-zero coefficient vector is
// rejected at construction (a constant inequality is not a region boundary).
struct LinIneq {
  std::vector<Int> coeffs;
  Int bound;

  LinIneq(std::vector<Int> cs, Int b);

  int dim() const { return static_cast<int>(coeffs.size()); }
  bool holds_at(const ParamSetting& pi) const;

  bool operator==(const LinIneq& o) const {
    return coeffs == o.coeffs && bound == o.bound;
  }
  bool operator!=(const LinIneq& o) const { return !(*this == o); }

  std::string str(const std::vector<std::string>& param_names) const;
};

// Integer complement: not(a.p <= b)  <=>  -a.p <= -b-1.
LinIneq neg_ineq(const LinIneq& c);

// Strict total order on reduced inequalities: number of nonzero
// coefficients, then the coefficient vector lexicographically, then the
// bound. Returns <0, 0, >0.
int cmp_order(const LinIneq& c1, const LinIneq& c2);

inline bool prec(const LinIneq& c1, const LinIneq& c2) {
  return cmp_order(c1, c2) < 0;
}

// Node labels are always the order-smaller of {c, neg c}; the bit records
// whether the input itself was the canonical one.
struct CanonIneq {
  LinIneq label;
  bool negated;  // true when label == neg_ineq(input)
};

CanonIneq canonical_polarity(const LinIneq& c);

// Result of testing a relation between leaf values over a region: either
// decided everywhere, or split by an inequality that holds exactly where the
// relation does.
struct CmpSplit {
  enum class Kind { AlwaysTrue, AlwaysFalse, Split };
  Kind kind;
  std::optional<LinIneq> ineq;  // present iff kind == Split
};

// Pointwise sign of "f <= g". Requires that at least one side is non-affine
// or the difference decides; otherwise returns the splitting inequality
// f - g <= 0 in reduced form.
CmpSplit aff_cmp_split(const AffineFn& f, const AffineFn& g);

// Pointwise sign of "f >= 0" for the guard operator; the split inequality
// holds exactly where the test passes.
CmpSplit aff_guard_split(const AffineFn& f);

}  // namespace psi
