#pragma once

#include "psi/linear.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace psi {

// A path's constraint set: conjunction of reduced linear inequalities over
// the same parameter space.
using Conjunction = std::vector<LinIneq>;

enum class SatResult { Sat, Unsat };

struct SatStats {
  std::int64_t fm_calls = 0;
  std::int64_t exact_calls = 0;
};

// Raised by the exact solver when the branch budget is exhausted; callers
// report "exact check infeasible" instead of degrading silently.
class ResourceLimitError : public std::runtime_error {
 public:
  explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

// Fourier-Motzkin elimination with integer tightening. Unsat is definitive;
// Sat only means no contradiction was derived, so it is sound for pruning in
// the direction "Unsat => no integer points".
SatResult fm_satisfiable(const Conjunction& c, SatStats* stats = nullptr);

struct ExactOptions {
  std::int64_t max_branches = 1000000;
  // Ranges wider than this are eliminated symbolically instead of enumerated.
  std::int64_t enum_width = 4096;
};

// Complete decision over the integers: branch-and-bound on FM-derived
// variable ranges, with shadow elimination and splintering for directions
// that cannot be enumerated.
SatResult exact_satisfiable(const Conjunction& c, SatStats* stats = nullptr,
                            const ExactOptions& opts = {});

bool holds_at(const Conjunction& c, const ParamSetting& pi);

}  // namespace psi
