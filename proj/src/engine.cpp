#include "psi/engine.hpp"

#include <chrono>
#include <set>

namespace psi {
namespace {

AffineFn const_to_affine(int k, const ExtInt& c) {
  if (c.is_neg_inf()) return AffineFn::neg_inf(k);
  if (c.is_pos_inf()) return AffineFn::pos_inf(k);
  return AffineFn::constant(k, c.value());
}

std::set<int> used_indices(const Partition<int>& sigma) {
  std::set<int> out;
  if (sigma.space->repr == Repr::List) {
    out.insert(sigma.list.values.begin(), sigma.list.values.end());
    return out;
  }
  std::function<void(const TreePtr<int>&)> walk = [&](const TreePtr<int>& t) {
    if (!t) return;
    if (t->is_leaf) {
      out.insert(t->value);
      return;
    }
    walk(t->yes);
    walk(t->no);
  };
  walk(sigma.tree);
  return out;
}

void check_magnitudes(const Partition<AffineFn>& p, const Int& bound) {
  auto check_int = [&](const Int& v) {
    if (abs_int(v) > bound)
      throw std::logic_error("value bound exceeded in intermediate partition");
  };
  auto check_fn = [&](const AffineFn& f) {
    if (!f.is_affine()) return;
    check_int(f.a0);
    for (const Int& c : f.coeffs) check_int(c);
  };
  auto check_label = [&](const LinIneq& q) {
    check_int(q.bound);
    for (const Int& c : q.coeffs) check_int(c);
  };
  if (p.space->repr == Repr::List) {
    for (const AffineFn& f : p.list.values) check_fn(f);
    for (const Int& z : p.list.breaks) check_int(z);
    return;
  }
  std::function<void(const TreePtr<AffineFn>&)> walk = [&](const TreePtr<AffineFn>& t) {
    if (!t) return;
    if (t->is_leaf) {
      check_fn(t->value);
      return;
    }
    check_label(*t->label);
    walk(t->yes);
    walk(t->no);
  };
  walk(p.tree);
}

}  // namespace

Partition<AffineFn> eval_lifted(const ParamExpr& e, const ParamAssign& rho,
                                const SpacePtr& space) {
  int k = space->k;
  switch (e.kind) {
    case ParamExpr::Kind::Const:
      return make_const_partition(space, const_to_affine(k, e.cval));
    case ParamExpr::Kind::Param:
      return make_const_partition(space, AffineFn::proj(k, e.index));
    case ParamExpr::Kind::NegParam:
      return make_const_partition(space, AffineFn::neg_proj(k, e.index));
    case ParamExpr::Kind::Var:
      return rho.at(e.var);
    case ParamExpr::Kind::Min:
      return lift_min(eval_lifted(*e.lhs, rho, space), eval_lifted(*e.rhs, rho, space));
    case ParamExpr::Kind::Add:
      return lift_add(eval_lifted(*e.lhs, rho, space), eval_lifted(*e.rhs, rho, space));
    case ParamExpr::Kind::Guard:
      return lift_guard(eval_lifted(*e.lhs, rho, space), eval_lifted(*e.rhs, rho, space));
    case ParamExpr::Kind::Scale:
      return lift_scale(e.scale, eval_lifted(*e.rhs, rho, space));
  }
  throw std::logic_error("eval_lifted: bad expression kind");
}

ParamStrategy next(const ParamStrategy& sigma, const ParamAssign& rho,
                   const EquationSystem& sys, const SpacePtr& space) {
  ParamStrategy out;
  for (const Equation& eq : sys.equations) {
    std::vector<Partition<AffineFn>> values;
    values.reserve(eq.alternatives.size());
    for (const ExprPtr& alt : eq.alternatives)
      values.push_back(eval_lifted(*alt, rho, space));
    out.emplace(eq.lhs, argmax_keep_current(sigma.at(eq.lhs), values));
  }
  return out;
}

ParamSolution psi_solve(const EquationSystem& sys, const Conjunction& assumption,
                        const SolveOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  if (fm_satisfiable(assumption) == SatResult::Unsat)
    throw UnsatAssumption("assumption is unsatisfiable");
  SpacePtr space = make_space(sys.k(), assumption, opts.repr, opts.validate);
  SystemBounds bounds = system_bounds(sys);
  size_t n = sys.equations.size();

  ParamStrategy sigma;
  for (const Equation& eq : sys.equations)
    sigma.emplace(eq.lhs, make_const_partition(space, 0));

  ParamSolution sol;
  sol.space = space;
  ParamAssign rho;
  for (;;) {
    ++sol.stats.improvement_rounds;
    if (Int(sol.stats.improvement_rounds) > bounds.improvement_limit)
      throw std::logic_error("parametric strategy iteration exceeded its improvement limit");

    rho.clear();
    for (const Equation& eq : sys.equations)
      rho.emplace(eq.lhs, make_const_partition(space, AffineFn::pos_inf(space->k)));
    for (size_t i = 0; i < n; ++i) {
      for (const Equation& eq : sys.equations) {
        // only the alternatives the strategy actually picks somewhere
        std::set<int> used = used_indices(sigma.at(eq.lhs));
        std::vector<std::optional<Partition<AffineFn>>> values(eq.alternatives.size());
        for (int idx : used)
          values.at(idx) = eval_lifted(*eq.alternatives.at(idx), rho, space);
        rho.at(eq.lhs) = select(sigma.at(eq.lhs), values);
      }
    }
    if (opts.check_value_bound)
      for (const auto& [name, part] : rho) check_magnitudes(part, bounds.value_bound);
    if (opts.on_round) opts.on_round(sol.stats.improvement_rounds, sigma, rho);

    ParamStrategy improved = next(sigma, rho, sys, space);
    bool stable = true;
    for (const auto& [name, part] : improved)
      if (!semantically_equal(part, sigma.at(name))) {
        stable = false;
        break;
      }
    if (stable) break;
    sigma = std::move(improved);
  }

  sol.values = std::move(rho);
  for (const auto& [name, part] : sol.values)
    sol.stats.leaf_counts[name] = leaf_count(part);
  sol.stats.fm_calls = space->sat_stats.fm_calls;
  sol.stats.exact_calls = space->sat_stats.exact_calls;
  sol.stats.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
          .count();
  return sol;
}

void for_each_grid_point(int k, const Int& lo, const Int& hi,
                         const std::function<void(const ParamSetting&)>& fn) {
  ParamSetting pi(k, lo);
  if (k == 0) {
    fn(pi);
    return;
  }
  if (lo > hi) return;
  for (;;) {
    fn(pi);
    int d = 0;
    while (d < k) {
      if (pi[d] < hi) {
        ++pi[d];
        break;
      }
      pi[d] = lo;
      ++d;
    }
    if (d == k) return;
  }
}

CheckReport check_solution(const EquationSystem& sys, const ParamSolution& sol,
                           const Int& lo, const Int& hi) {
  CheckReport report;
  for_each_grid_point(sys.k(), lo, hi, [&](const ParamSetting& pi) {
    if (!holds_at(sol.space->assumption, pi)) return;
    ++report.total;
    VarAssign expected = solve_si(instantiate(sys, pi)).assignment;
    bool all_ok = true;
    for (const Equation& eq : sys.equations) {
      ExtInt got = value_at(sol.values.at(eq.lhs), pi).eval(pi);
      if (got != expected.at(eq.lhs)) {
        all_ok = false;
        if (!report.first_mismatch)
          report.first_mismatch = CheckMismatch{pi, eq.lhs, expected.at(eq.lhs), got};
        break;
      }
    }
    if (all_ok) ++report.matched;
  });
  return report;
}

}  // namespace psi
