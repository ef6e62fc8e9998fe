#include "psi/sat.hpp"

#include <algorithm>
#include <map>
#include <optional>

namespace psi {
namespace {

// Working form: coefficients may be all-zero (constant row) while a
// derivation is in flight, unlike the reduced LinIneq invariant.
struct Row {
  std::vector<Int> c;
  Int b;

  bool operator<(const Row& o) const {
    if (c != o.c) return c < o.c;
    return b < o.b;
  }
};

enum class RowState { Useful, Trivial, Contradiction };

RowState tighten(Row& r) {
  Int g = 0;
  for (const Int& a : r.c) g = gcd_int(g, a);
  if (g == 0) return r.b >= 0 ? RowState::Trivial : RowState::Contradiction;
  if (g != 1) {
    for (Int& a : r.c) a /= g;
    r.b = floor_div(r.b, g);
  }
  return RowState::Useful;
}

// Keeps the strongest bound per coefficient vector.
bool add_row(std::map<std::vector<Int>, Int>& rows, Row r) {
  switch (tighten(r)) {
    case RowState::Trivial: return true;
    case RowState::Contradiction: return false;
    case RowState::Useful: break;
  }
  auto it = rows.find(r.c);
  if (it == rows.end())
    rows.emplace(std::move(r.c), std::move(r.b));
  else if (r.b < it->second)
    it->second = std::move(r.b);
  return true;
}

using RowSet = std::map<std::vector<Int>, Int>;

std::optional<RowSet> to_rows(const Conjunction& conj) {
  RowSet rows;
  for (const LinIneq& q : conj)
    if (!add_row(rows, Row{q.coeffs, q.bound})) return std::nullopt;
  return rows;
}

int count_occurrences(const RowSet& rows, size_t var) {
  int n = 0;
  for (const auto& [c, b] : rows) n += (c[var] != 0);
  return n;
}

// Eliminates `var` in place; false on derived contradiction.
bool eliminate(RowSet& rows, size_t var) {
  std::vector<Row> lowers, uppers;
  RowSet rest;
  for (auto& [c, b] : rows) {
    if (c[var] > 0)
      uppers.push_back(Row{c, b});
    else if (c[var] < 0)
      lowers.push_back(Row{c, b});
    else
      rest.emplace(c, b);
  }
  for (const Row& u : uppers) {
    const Int& a = u.c[var];
    for (const Row& l : lowers) {
      Int bl = -l.c[var];
      Row d;
      d.c.resize(u.c.size());
      for (size_t i = 0; i < u.c.size(); ++i) d.c[i] = bl * u.c[i] + a * l.c[i];
      d.b = bl * u.b + a * l.b;
      if (!add_row(rest, std::move(d))) return false;
    }
  }
  rows = std::move(rest);
  return true;
}

std::optional<size_t> pick_var(const RowSet& rows) {
  if (rows.empty()) return std::nullopt;
  size_t dim = rows.begin()->first.size();
  std::optional<size_t> best;
  int best_n = 0;
  for (size_t v = 0; v < dim; ++v) {
    int n = count_occurrences(rows, v);
    if (n == 0) continue;
    if (!best || n < best_n) {
      best = v;
      best_n = n;
    }
  }
  return best;
}

bool fm_core(RowSet rows) {
  while (auto var = pick_var(rows))
    if (!eliminate(rows, *var)) return false;
  return true;
}

struct VarBounds {
  bool unsat = false;
  std::optional<Int> lo, hi;
};

// Projects away every variable except `var`, yielding its global integer
// range under tightening.
VarBounds bounds_of(RowSet rows, size_t var) {
  VarBounds r;
  size_t dim = rows.begin()->first.size();
  for (size_t v = 0; v < dim; ++v) {
    if (v == var) continue;
    if (count_occurrences(rows, v) == 0) continue;
    if (!eliminate(rows, v)) {
      r.unsat = true;
      return r;
    }
  }
  for (const auto& [c, b] : rows) {
    // reduced single-variable rows have coefficient +-1
    if (c[var] > 0) {
      if (!r.hi || b < *r.hi) r.hi = b;
    } else if (c[var] < 0) {
      Int lo = -b;
      if (!r.lo || lo > *r.lo) r.lo = lo;
    }
  }
  return r;
}

struct ExactCtx {
  const ExactOptions& opts;
  std::int64_t branches = 0;

  void tick() {
    if (++branches > opts.max_branches)
      throw ResourceLimitError("exact satisfiability: branch budget exceeded");
  }
};

bool exact_rec(RowSet rows, ExactCtx& ctx);

// Substitutes var := value, dropping the variable from every row.
bool substitute_value(RowSet rows, size_t var, const Int& value, ExactCtx& ctx) {
  RowSet out;
  for (const auto& [c, b] : rows) {
    Row r{c, b - c[var] * value};
    r.c[var] = 0;
    if (!add_row(out, std::move(r))) return false;
  }
  return exact_rec(std::move(out), ctx);
}

// Lattice solution of alpha . z = beta: a particular point plus a basis of
// the null lattice, via the extended-gcd cascade.
struct EqSolution {
  bool solvable = false;
  std::vector<Int> point;
  std::vector<std::vector<Int>> basis;
};

void ext_gcd(const Int& a, const Int& b, Int& g, Int& x, Int& y) {
  if (b == 0) {
    g = a < 0 ? Int(-a) : a;
    x = a < 0 ? Int(-1) : Int(1);
    y = 0;
    return;
  }
  Int x1, y1;
  ext_gcd(b, a % b, g, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
}

EqSolution solve_equality(const std::vector<Int>& alpha, const Int& beta) {
  EqSolution sol;
  size_t dim = alpha.size();
  // running gcd g of alpha[0..j] with combination u: alpha . u = g
  Int g = 0;
  std::vector<Int> u(dim, Int(0));
  for (size_t j = 0; j < dim; ++j) {
    if (alpha[j] == 0) continue;
    if (g == 0) {
      g = abs_int(alpha[j]);
      u[j] = alpha[j] < 0 ? -1 : 1;
      continue;
    }
    Int g2, s, t;
    ext_gcd(g, alpha[j], g2, s, t);
    std::vector<Int> u2(dim, Int(0));
    for (size_t i = 0; i < dim; ++i) u2[i] = s * u[i];
    u2[j] += t;
    // null direction contributed by this variable
    std::vector<Int> w(dim, Int(0));
    Int f = alpha[j] / g2;
    for (size_t i = 0; i < dim; ++i) w[i] = f * u[i];
    w[j] -= g / g2;
    sol.basis.push_back(std::move(w));
    g = g2;
    u = std::move(u2);
  }
  if (g == 0) {
    sol.solvable = beta == 0;
    sol.point.assign(dim, Int(0));
    return sol;
  }
  if (beta % g != 0) return sol;
  sol.solvable = true;
  Int f = beta / g;
  sol.point.resize(dim);
  for (size_t i = 0; i < dim; ++i) sol.point[i] = f * u[i];
  return sol;
}

// Adds alpha . z = beta and recurses in the (dim-1)-dimensional lattice
// coordinates.
bool with_equality(const RowSet& rows, const std::vector<Int>& alpha, const Int& beta,
                   ExactCtx& ctx) {
  EqSolution sol = solve_equality(alpha, beta);
  if (!sol.solvable) return false;
  RowSet out;
  size_t rank = sol.basis.size();
  for (const auto& [c, b] : rows) {
    Row r;
    r.c.resize(rank);
    Int shift = 0;
    for (size_t i = 0; i < c.size(); ++i) shift += c[i] * sol.point[i];
    for (size_t j = 0; j < rank; ++j) {
      Int dot = 0;
      for (size_t i = 0; i < c.size(); ++i) dot += c[i] * sol.basis[j][i];
      r.c[j] = dot;
    }
    r.b = b - shift;
    if (!add_row(out, std::move(r))) return false;
  }
  return exact_rec(std::move(out), ctx);
}

bool exact_rec(RowSet rows, ExactCtx& ctx) {
  ctx.tick();
  if (rows.empty()) return true;
  if (!fm_core(rows)) return false;

  auto var_opt = pick_var(rows);
  if (!var_opt) return true;  // only trivially-true rows remained
  size_t var = *var_opt;

  std::vector<Row> lowers, uppers;
  RowSet rest;
  for (const auto& [c, b] : rows) {
    if (c[var] > 0)
      uppers.push_back(Row{c, b});
    else if (c[var] < 0)
      lowers.push_back(Row{c, b});
    else
      rest.emplace(c, b);
  }
  // one-sided variables never block an integer solution
  if (lowers.empty() || uppers.empty()) return exact_rec(std::move(rest), ctx);

  VarBounds vb = bounds_of(rows, var);
  if (vb.unsat) return false;
  if (vb.lo && vb.hi) {
    if (*vb.lo > *vb.hi) return false;
    Int width = *vb.hi - *vb.lo + 1;
    if (width <= ctx.opts.enum_width) {
      for (Int v = *vb.lo; v <= *vb.hi; ++v)
        if (substitute_value(rows, var, v, ctx)) return true;
      return false;
    }
  }

  // shadow elimination; exact when one coefficient of every pair is 1
  bool unit = true;
  Int a_max = 0;
  for (const Row& u : uppers) a_max = std::max(a_max, u.c[var]);
  RowSet real_shadow = rest, dark_shadow = rest;
  bool real_ok = true, dark_ok = true;
  for (const Row& u : uppers) {
    const Int& a = u.c[var];
    for (const Row& l : lowers) {
      Int bl = -l.c[var];
      if (a != 1 && bl != 1) unit = false;
      Row d;
      d.c.resize(u.c.size());
      for (size_t i = 0; i < u.c.size(); ++i) d.c[i] = bl * u.c[i] + a * l.c[i];
      d.b = bl * u.b + a * l.b;
      Row dk = d;
      dk.b -= (a - 1) * (bl - 1);
      real_ok = real_ok && add_row(real_shadow, std::move(d));
      dark_ok = dark_ok && add_row(dark_shadow, std::move(dk));
    }
  }
  if (!real_ok) return false;
  if (unit) return exact_rec(std::move(real_shadow), ctx);
  if (dark_ok && exact_rec(std::move(dark_shadow), ctx)) return true;

  // splinter on each lower bound: bl*var = (lower-bound expression) + i
  for (const Row& l : lowers) {
    Int bl = -l.c[var];
    Int top = floor_div(a_max * bl - a_max - bl, a_max);
    for (Int i = 0; i <= top; ++i) {
      ctx.tick();
      // l: -bl*var + L.z <= e, so bl*var = L.z - e + i becomes
      // bl*var - L.z = i - e
      std::vector<Int> alpha(l.c.size());
      for (size_t j = 0; j < l.c.size(); ++j) alpha[j] = -l.c[j];
      Int beta = i - l.b;
      if (with_equality(rows, alpha, beta, ctx)) return true;
    }
  }
  return false;
}

}  // namespace

SatResult fm_satisfiable(const Conjunction& c, SatStats* stats) {
  if (stats) ++stats->fm_calls;
  auto rows = to_rows(c);
  if (!rows) return SatResult::Unsat;
  return fm_core(std::move(*rows)) ? SatResult::Sat : SatResult::Unsat;
}

SatResult exact_satisfiable(const Conjunction& c, SatStats* stats,
                            const ExactOptions& opts) {
  if (stats) ++stats->exact_calls;
  auto rows = to_rows(c);
  if (!rows) return SatResult::Unsat;
  ExactCtx ctx{opts};
  return exact_rec(std::move(*rows), ctx) ? SatResult::Sat : SatResult::Unsat;
}

bool holds_at(const Conjunction& c, const ParamSetting& pi) {
  for (const LinIneq& q : c)
    if (!q.holds_at(pi)) return false;
  return true;
}

}  // namespace psi
