#pragma once

#include "psi/eqsys.hpp"

#include <map>
#include <string>

namespace psi {

// Choice of one alternative per equation.
using Strategy = std::map<std::string, int>;

// Bounds drawn from the shape of a system: the strategy-improvement limit
// (r+1)^n and the magnitude bound (max(c,2))^(s*n) * max(a,1) on finite
// solution values, where a is the largest absolute constant, c the largest
// scale factor, s the largest right-hand-side size, n the variable count.
struct SystemBounds {
  Int improvement_limit;
  Int value_bound;
};

SystemBounds system_bounds(const EquationSystem& sys);

struct SiResult {
  VarAssign assignment;
  int improvement_rounds = 0;
};

// Ordinary strategy iteration for a parameter-free system in normal form:
// start from the all-constant strategy, fixed n rounds of round-robin
// descent from +inf per strategy, locally optimal improvement, stop when
// the strategy is stable. Returns the least solution.
SiResult solve_si(const EquationSystem& sys);

// One improvement step: keep the current choice where it is maximal under
// rho, otherwise switch to the smallest maximal alternative.
Strategy next_si(const Strategy& sigma, const VarAssign& rho, const EquationSystem& sys);

// Ascending saturation from all -inf; finite iterates above the value bound
// are replaced by +inf. Ground truth for solve_si on small systems; runtime
// grows with the bound.
VarAssign solve_kleene(const EquationSystem& sys);

}  // namespace psi
