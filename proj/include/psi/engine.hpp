#pragma once

#include "psi/eqsys.hpp"
#include "psi/oracle.hpp"
#include "psi/partition.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace psi {

// Piecewise-constant strategy / piecewise-affine value per variable.
using ParamStrategy = std::map<std::string, Partition<int>>;
using ParamAssign = std::map<std::string, Partition<AffineFn>>;

class UnsatAssumption : public std::runtime_error {
 public:
  explicit UnsatAssumption(const std::string& w) : std::runtime_error(w) {}
};

struct SolveStats {
  int improvement_rounds = 0;
  std::map<std::string, int> leaf_counts;
  std::int64_t fm_calls = 0;
  std::int64_t exact_calls = 0;
  double wall_ms = 0.0;
};

struct SolveOptions {
  Repr repr = Repr::Tree;
  bool validate = false;
  // magnitude assertion on every intermediate partition (debug aid)
  bool check_value_bound = false;
  // test hook, called once per improvement round after the BF phase
  std::function<void(int round, const ParamStrategy&, const ParamAssign&)> on_round;
};

struct ParamSolution {
  SpacePtr space;
  ParamAssign values;
  SolveStats stats;
};

// Lifted evaluation of a maximum-free expression against a parametric
// variable assignment.
Partition<AffineFn> eval_lifted(const ParamExpr& e, const ParamAssign& rho,
                                const SpacePtr& space);

// Locally optimal parametric improvement: evaluates every alternative and
// applies argmax_keep_current per equation.
ParamStrategy next(const ParamStrategy& sigma, const ParamAssign& rho,
                   const EquationSystem& sys, const SpacePtr& space);

// Parametric strategy iteration: simultaneous strategy iteration for all
// parameter settings, descending n-round round-robin per strategy, until the
// strategy is semantically stable. Returns the least parametric solution.
ParamSolution psi_solve(const EquationSystem& sys, const Conjunction& assumption,
                        const SolveOptions& opts = {});

struct CheckMismatch {
  ParamSetting setting;
  std::string var;
  ExtInt expected, got;
};

struct CheckReport {
  long total = 0;
  long matched = 0;
  std::optional<CheckMismatch> first_mismatch;

  bool ok() const { return matched == total; }
};

// Grid oracle: compares the parametric solution pointwise against ordinary
// strategy iteration on the instantiated system, over the integer grid
// [lo, hi]^k intersected with the assumption.
CheckReport check_solution(const EquationSystem& sys, const ParamSolution& sol,
                           const Int& lo, const Int& hi);

// Enumerates grid points of [lo, hi]^k; used by check_solution and tests.
void for_each_grid_point(int k, const Int& lo, const Int& hi,
                         const std::function<void(const ParamSetting&)>& fn);

}  // namespace psi
