#include "psi/oracle.hpp"

#include <stdexcept>

namespace psi {
namespace {

struct SizeScan {
  Int max_const = 0;  // absolute value of finite constants
  Int max_scale = 0;
  long size = 0;      // node count of one right-hand side
};

void scan_expr(const ParamExpr& e, SizeScan& s) {
  ++s.size;
  switch (e.kind) {
    case ParamExpr::Kind::Const:
      if (e.cval.is_finite()) {
        Int a = abs_int(e.cval.value());
        if (a > s.max_const) s.max_const = a;
      }
      break;
    case ParamExpr::Kind::Scale:
      if (e.scale > s.max_scale) s.max_scale = e.scale;
      scan_expr(*e.rhs, s);
      break;
    case ParamExpr::Kind::Min:
    case ParamExpr::Kind::Add:
    case ParamExpr::Kind::Guard:
      scan_expr(*e.lhs, s);
      scan_expr(*e.rhs, s);
      break;
    default:
      break;
  }
}

ExtInt eval_alternative(const Equation& eq, int idx, const ParamSetting& pi,
                        const VarAssign& rho) {
  return eval_pointwise(*eq.alternatives.at(idx), pi, rho);
}

}  // namespace

SystemBounds system_bounds(const EquationSystem& sys) {
  Int a = 0, c = 0;
  long s = 0;
  for (const Equation& eq : sys.equations) {
    SizeScan scan;
    for (const ExprPtr& alt : eq.alternatives) scan_expr(*alt, scan);
    scan.size += static_cast<long>(eq.alternatives.size()) - 1;  // the \/ operators
    if (scan.max_const > a) a = scan.max_const;
    if (scan.max_scale > c) c = scan.max_scale;
    if (scan.size > s) s = scan.size;
  }
  long n = static_cast<long>(sys.equations.size());
  int r = 0;
  for (const Equation& eq : sys.equations) {
    int nonconst = 0;
    for (const ExprPtr& alt : eq.alternatives)
      if (alt->kind != ParamExpr::Kind::Const) ++nonconst;
    if (nonconst > r) r = nonconst;
  }
  SystemBounds b;
  b.improvement_limit = pow_int(Int(r + 1), static_cast<unsigned long>(n));
  Int base = c > 2 ? c : Int(2);
  // floor the constant at 1: parameters enter with unit coefficients
  Int amax = a > 1 ? a : Int(1);
  b.value_bound = pow_int(base, static_cast<unsigned long>(s * n)) * amax;
  return b;
}

SiResult solve_si(const EquationSystem& sys) {
  if (!sys.params.empty())
    throw std::invalid_argument("solve_si: system must be parameter-free");
  ParamSetting pi;  // empty
  SystemBounds bounds = system_bounds(sys);
  size_t n = sys.equations.size();

  Strategy sigma;
  for (const Equation& eq : sys.equations) sigma[eq.lhs] = 0;

  SiResult result;
  VarAssign rho;
  for (;;) {
    ++result.improvement_rounds;
    if (Int(result.improvement_rounds) > bounds.improvement_limit)
      throw std::logic_error("strategy iteration exceeded its improvement limit");
    for (const Equation& eq : sys.equations) rho[eq.lhs] = ExtInt::pos_inf();
    for (size_t i = 0; i < n; ++i)
      for (const Equation& eq : sys.equations)
        rho[eq.lhs] = eval_alternative(eq, sigma[eq.lhs], pi, rho);
    Strategy improved = next_si(sigma, rho, sys);
    if (improved == sigma) break;
    sigma = std::move(improved);
  }
  result.assignment = std::move(rho);
  return result;
}

Strategy next_si(const Strategy& sigma, const VarAssign& rho, const EquationSystem& sys) {
  ParamSetting pi;
  Strategy out;
  for (const Equation& eq : sys.equations) {
    int cur = sigma.at(eq.lhs);
    ExtInt cur_val = eval_alternative(eq, cur, pi, rho);
    bool cur_max = true;
    int best = 0;
    ExtInt best_val = eval_alternative(eq, 0, pi, rho);
    for (size_t i = 0; i < eq.alternatives.size(); ++i) {
      ExtInt v = eval_alternative(eq, static_cast<int>(i), pi, rho);
      if (v > cur_val) cur_max = false;
      if (v > best_val) {
        best = static_cast<int>(i);
        best_val = v;
      }
    }
    out[eq.lhs] = cur_max ? cur : best;
  }
  return out;
}

VarAssign solve_kleene(const EquationSystem& sys) {
  if (!sys.params.empty())
    throw std::invalid_argument("solve_kleene: system must be parameter-free");
  ParamSetting pi;
  SystemBounds bounds = system_bounds(sys);

  VarAssign rho;
  for (const Equation& eq : sys.equations) rho[eq.lhs] = ExtInt::neg_inf();
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Equation& eq : sys.equations) {
      ExtInt v = eval_rhs(eq, pi, rho);
      if (v.is_finite() && v.value() > bounds.value_bound) v = ExtInt::pos_inf();
      if (v != rho[eq.lhs]) {
        rho[eq.lhs] = v;
        changed = true;
      }
    }
  }
  return rho;
}

}  // namespace psi
