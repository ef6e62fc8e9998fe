#pragma once

#include "psi/linear.hpp"
#include "psi/sat.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace psi {

// ---------------------------------------------------------------------------
// Region tree: binary tree over canonical linear inequalities. The left child
// covers the half-space where the label holds, the right child its integer
// complement. Invariants: labels strictly increase (prec) along every path,
// every path is FM-satisfiable, labels are canonical-polarity.
// ---------------------------------------------------------------------------

template <class V>
struct TreeNode;

template <class V>
using TreePtr = std::shared_ptr<const TreeNode<V>>;

template <class V>
struct TreeNode {
  bool is_leaf;
  V value;                     // leaf only
  std::optional<LinIneq> label;  // node only
  TreePtr<V> yes, no;          // node only: label holds / negation holds
};

template <class V>
TreePtr<V> make_leaf(V v) {
  auto n = std::make_shared<TreeNode<V>>();
  n->is_leaf = true;
  n->value = std::move(v);
  return n;
}

template <class V>
TreePtr<V> make_node(LinIneq label, TreePtr<V> yes, TreePtr<V> no) {
  auto n = std::make_shared<TreeNode<V>>();
  n->is_leaf = false;
  n->label = std::move(label);
  n->yes = std::move(yes);
  n->no = std::move(no);
  return n;
}

template <class V>
bool tree_equal(const TreePtr<V>& a, const TreePtr<V>& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->is_leaf != b->is_leaf) return false;
  if (a->is_leaf) return a->value == b->value;
  if (*a->label != *b->label) return false;
  return tree_equal(a->yes, b->yes) && tree_equal(a->no, b->no);
}

// ---------------------------------------------------------------------------
// Breakpoint list: the k = 1 representation. breaks [z0..zr] partition Z into
// (-inf, z0], [z0+1, z1], ..., [zr+1, +inf); one value per interval.
// ---------------------------------------------------------------------------

template <class V>
struct BreakList {
  std::vector<Int> breaks;
  std::vector<V> values;  // breaks.size() + 1
};

enum class Repr { Tree, List };

// Shared context of all partitions of one solver run: parameter count, the
// global assumption, representation choice, satisfiability bookkeeping.
struct Space {
  int k = 0;
  Conjunction assumption;
  Repr repr = Repr::Tree;
  bool validate = false;
  SatStats sat_stats;
  std::map<std::string, bool> fm_memo;

  // assumption restricted to one parameter, as an integer range
  std::optional<Int> range_lo, range_hi;

  bool fm_sat_with_assumption(const Conjunction& path);
};

using SpacePtr = std::shared_ptr<Space>;

SpacePtr make_space(int k, Conjunction assumption, Repr repr, bool validate = false);

bool fm_sat_conjunction_with(Space& space, const Conjunction& halfspaces);
void validate_partition_failure(const std::string& what);
void validate_tree_shape(const Space& space, const std::vector<LinIneq>& path_labels,
                         const Conjunction& halfspaces, const LinIneq& label);

class OutsideAssumption : public std::runtime_error {
 public:
  explicit OutsideAssumption(const std::string& w) : std::runtime_error(w) {}
};

// ---------------------------------------------------------------------------
// Partition: one value of type V per region of the parameter space restricted
// to the assumption. Immutable after construction.
// ---------------------------------------------------------------------------

template <class V>
struct Partition {
  SpacePtr space;
  TreePtr<V> tree;      // Repr::Tree; nullptr only after an exact purge that
                        // emptied the space
  BreakList<V> list;    // Repr::List

  bool empty() const { return space->repr == Repr::Tree ? tree == nullptr : list.values.empty(); }
};

// ---------------------------------------------------------------------------
// Canonical construction. build_canonical enumerates the satisfiable sign
// vectors over a sorted label set in pre-order, pruning FM-unsatisfiable
// branches and collapsing equal siblings, so the result respects every tree
// invariant by construction.
// ---------------------------------------------------------------------------

struct SignView {
  const std::vector<std::pair<LinIneq, bool>>* signs;

  std::optional<bool> find(const LinIneq& label) const {
    for (const auto& [c, s] : *signs)
      if (c == label) return s;
    return std::nullopt;
  }
};

namespace detail {

struct BuildCtx {
  Space* space;
  Conjunction halfspaces;  // actual inequalities of the current path
  std::vector<std::pair<LinIneq, bool>> signs;
};

template <class V>
TreePtr<V> build_rec(BuildCtx& ctx, const std::vector<LinIneq>& labels, size_t idx,
                     const std::function<V(const SignView&)>& eval) {
  if (idx == labels.size()) return make_leaf(eval(SignView{&ctx.signs}));
  const LinIneq& c = labels[idx];
  LinIneq neg = neg_ineq(c);

  Conjunction with_pos = ctx.halfspaces;
  with_pos.push_back(c);
  bool pos_ok = ctx.space->fm_sat_with_assumption(with_pos);
  Conjunction with_neg = ctx.halfspaces;
  with_neg.push_back(neg);
  bool neg_ok = ctx.space->fm_sat_with_assumption(with_neg);

  if (pos_ok && neg_ok) {
    ctx.signs.emplace_back(c, true);
    std::swap(ctx.halfspaces, with_pos);
    TreePtr<V> yes = build_rec<V>(ctx, labels, idx + 1, eval);
    std::swap(ctx.halfspaces, with_pos);
    ctx.signs.back().second = false;
    std::swap(ctx.halfspaces, with_neg);
    TreePtr<V> no = build_rec<V>(ctx, labels, idx + 1, eval);
    std::swap(ctx.halfspaces, with_neg);
    ctx.signs.pop_back();
    if (!yes) return no;
    if (!no) return yes;
    if (tree_equal(yes, no)) return yes;
    return make_node(c, std::move(yes), std::move(no));
  }
  if (!pos_ok && !neg_ok) return nullptr;  // gap region without integer points
  // one side implied: record the sign but keep the path unchanged
  ctx.signs.emplace_back(c, pos_ok);
  TreePtr<V> sub = build_rec<V>(ctx, labels, idx + 1, eval);
  ctx.signs.pop_back();
  return sub;
}

template <class V>
TreePtr<V> build_canonical(Space& space, const std::vector<LinIneq>& sorted_labels,
                           const std::function<V(const SignView&)>& eval) {
  BuildCtx ctx{&space, {}, {}};
  return build_rec<V>(ctx, sorted_labels, 0, eval);
}

template <class V>
void collect_labels(const TreePtr<V>& t, std::vector<LinIneq>& out) {
  if (!t || t->is_leaf) return;
  out.push_back(*t->label);
  collect_labels(t->yes, out);
  collect_labels(t->no, out);
}

inline void sort_labels(std::vector<LinIneq>& labels) {
  std::sort(labels.begin(), labels.end(),
            [](const LinIneq& a, const LinIneq& b) { return cmp_order(a, b) < 0; });
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
}

// Value of a canonical tree in the region described by a sign vector that
// decides every label of the tree.
template <class V>
const V& lookup(const TreePtr<V>& t, const SignView& signs) {
  const TreeNode<V>* n = t.get();
  while (!n->is_leaf) {
    std::optional<bool> s = signs.find(*n->label);
    if (!s) throw std::logic_error("partition lookup: undecided label");
    n = (*s ? n->yes : n->no).get();
  }
  return n->value;
}

// Sign of a reduced inequality under a sign vector covering its canonical label.
inline bool sign_of(const LinIneq& ineq, const SignView& signs) {
  CanonIneq c = canonical_polarity(ineq);
  std::optional<bool> s = signs.find(c.label);
  if (!s) throw std::logic_error("partition: comparison label missing from sign vector");
  return c.negated ? !*s : *s;
}

// Pointwise truth of "f <= g" over a region whose sign vector decides the
// comparison label.
inline bool le_on_region(const AffineFn& f, const AffineFn& g, const SignView& signs) {
  CmpSplit s = aff_cmp_split(f, g);
  if (s.kind == CmpSplit::Kind::AlwaysTrue) return true;
  if (s.kind == CmpSplit::Kind::AlwaysFalse) return false;
  return sign_of(*s.ineq, signs);
}

inline bool guard_on_region(const AffineFn& f, const SignView& signs) {
  CmpSplit s = aff_guard_split(f);
  if (s.kind == CmpSplit::Kind::AlwaysTrue) return true;
  if (s.kind == CmpSplit::Kind::AlwaysFalse) return false;
  return sign_of(*s.ineq, signs);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// List machinery (k = 1).
// ---------------------------------------------------------------------------

namespace detail {

// Appends intervals in ascending order, merging adjacent equal values.
template <class V>
class ListBuilder {
 public:
  // upper == nullopt closes the final unbounded interval
  void push(std::optional<Int> upper, V value) {
    if (!values_.empty() && values_.back() == value) {
      if (!upper)
        open_ = false;
      else
        breaks_.back() = *upper;
      return;
    }
    if (!open_) throw std::logic_error("ListBuilder: push after final interval");
    values_.push_back(std::move(value));
    if (upper)
      breaks_.push_back(*upper);
    else
      open_ = false;
  }

  BreakList<V> take() {
    if (open_) throw std::logic_error("ListBuilder: final interval missing");
    return BreakList<V>{std::move(breaks_), std::move(values_)};
  }

 private:
  std::vector<Int> breaks_;
  std::vector<V> values_;
  bool open_ = true;
};

struct Interval {
  std::optional<Int> lo, hi;  // closed integer bounds; nullopt = unbounded
};

// Truth pattern of a reduced one-parameter inequality over an interval: the
// relation holds on one side of an integer threshold.
struct SignPattern {
  // value on [lo, cut] is `low_side`; on [cut+1, hi] it is !low_side; if cut
  // is absent the relation is constant and equals `low_side`.
  std::optional<Int> cut;
  bool low_side;
};

inline SignPattern pattern_of(const LinIneq& ineq, const Interval& iv) {
  const Int& a = ineq.coeffs[0];  // +-1 after reduction
  Int z = ineq.bound;
  if (a > 0) {
    // holds iff p <= z
    if (iv.hi && *iv.hi <= z) return {std::nullopt, true};
    if (iv.lo && *iv.lo > z) return {std::nullopt, false};
    return {z, true};
  }
  // holds iff p >= -z
  Int w = -z;
  if (iv.lo && *iv.lo >= w) return {std::nullopt, true};
  if (iv.hi && *iv.hi < w) return {std::nullopt, false};
  return {w - 1, false};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public operations, representation-dispatched.
// ---------------------------------------------------------------------------

template <class V>
Partition<V> make_const_partition(SpacePtr space, V v) {
  Partition<V> p;
  p.space = std::move(space);
  if (p.space->repr == Repr::Tree)
    p.tree = make_leaf(std::move(v));
  else
    p.list = BreakList<V>{{}, {std::move(v)}};
  return p;
}

template <class V>
int leaf_count(const Partition<V>& p) {
  if (p.space->repr == Repr::List) return static_cast<int>(p.list.values.size());
  int n = 0;
  std::function<void(const TreePtr<V>&)> walk = [&](const TreePtr<V>& t) {
    if (!t) return;
    if (t->is_leaf) {
      ++n;
      return;
    }
    walk(t->yes);
    walk(t->no);
  };
  walk(p.tree);
  return n;
}

template <class V>
const V& value_at(const Partition<V>& p, const ParamSetting& pi) {
  if (!holds_at(p.space->assumption, pi))
    throw OutsideAssumption("parameter setting outside the assumption");
  if (p.space->repr == Repr::List) {
    if (p.list.values.empty()) throw OutsideAssumption("empty partition");
    const Int& x = pi.at(0);
    size_t i = 0;
    while (i < p.list.breaks.size() && x > p.list.breaks[i]) ++i;
    return p.list.values[i];
  }
  const TreeNode<V>* n = p.tree.get();
  if (!n) throw OutsideAssumption("empty partition");
  while (!n->is_leaf) n = (n->label->holds_at(pi) ? n->yes : n->no).get();
  return n->value;
}

template <class V>
void validate_partition(const Partition<V>& p) {
  Space& sp = *p.space;
  if (sp.repr == Repr::List) {
    for (size_t i = 0; i + 1 < p.list.breaks.size(); ++i)
      if (!(p.list.breaks[i] < p.list.breaks[i + 1]))
        validate_partition_failure("breakpoints not strictly ascending");
    if (!p.list.values.empty() && p.list.values.size() != p.list.breaks.size() + 1)
      validate_partition_failure("value count != breakpoint count + 1");
    if (sp.range_lo && !p.list.breaks.empty() && p.list.breaks.front() < *sp.range_lo)
      validate_partition_failure("breakpoint below the assumed range");
    if (sp.range_hi && !p.list.breaks.empty() && p.list.breaks.back() >= *sp.range_hi)
      validate_partition_failure("breakpoint beyond the assumed range");
    return;
  }
  // tree invariants: canonical labels, strict ordering along paths,
  // satisfiable paths, and the arrangement bound on the number of leaves
  std::vector<LinIneq> path_labels;
  Conjunction halfspaces;
  int leaves = 0;
  std::vector<LinIneq> all_labels;
  std::function<void(const TreePtr<V>&)> walk = [&](const TreePtr<V>& t) {
    if (!t) return;
    if (t->is_leaf) {
      ++leaves;
      if (!fm_sat_conjunction_with(sp, halfspaces))
        validate_partition_failure("unsatisfiable path in region tree");
      return;
    }
    validate_tree_shape(sp, path_labels, halfspaces, *t->label);
    all_labels.push_back(*t->label);
    path_labels.push_back(*t->label);
    halfspaces.push_back(*t->label);
    walk(t->yes);
    halfspaces.back() = neg_ineq(*t->label);
    walk(t->no);
    halfspaces.pop_back();
    path_labels.pop_back();
  };
  walk(p.tree);
  detail::sort_labels(all_labels);
  // arrangement bound: leaves <= sum_{i<=k} C(n, i)
  Int bound = 0;
  Int n = static_cast<long>(all_labels.size());
  int kk = std::min<int>(sp.k, static_cast<int>(all_labels.size()));
  for (int i = 0; i <= kk; ++i) {
    // C(n, i)
    Int c = 1;
    for (int j = 0; j < i; ++j) c = c * (n - j) / (j + 1);
    bound += c;
  }
  if (p.tree && Int(leaves) > bound)
    validate_partition_failure("leaf count exceeds the arrangement bound");
}

template <class V>
void maybe_validate(const Partition<V>& p) {
  if (p.space->validate) validate_partition(p);
}

// --- generic canonical build entry points ----------------------------------

template <class V>
Partition<V> build_tree_partition(SpacePtr space, std::vector<LinIneq> labels,
                                  const std::function<V(const SignView&)>& eval) {
  detail::sort_labels(labels);
  Partition<V> out;
  out.space = space;
  out.tree = detail::build_canonical<V>(*space, labels, eval);
  maybe_validate(out);
  return out;
}

template <class A, class F>
auto map_partition(const Partition<A>& p, F&& fn)
    -> Partition<std::decay_t<decltype(fn(std::declval<const A&>()))>> {
  using B = std::decay_t<decltype(fn(std::declval<const A&>()))>;
  if (p.empty()) {
    Partition<B> out;
    out.space = p.space;
    return out;
  }
  if (p.space->repr == Repr::List) {
    detail::ListBuilder<B> b;
    for (size_t i = 0; i < p.list.values.size(); ++i) {
      std::optional<Int> hi =
          i < p.list.breaks.size() ? std::optional<Int>(p.list.breaks[i]) : std::nullopt;
      b.push(hi, fn(p.list.values[i]));
    }
    Partition<B> out;
    out.space = p.space;
    out.list = b.take();
    maybe_validate(out);
    return out;
  }
  std::vector<LinIneq> labels;
  detail::collect_labels(p.tree, labels);
  return build_tree_partition<B>(p.space, std::move(labels), [&](const SignView& s) {
    return fn(detail::lookup(p.tree, s));
  });
}

// Common refinement carrying the pair of values.
template <class A, class B>
Partition<std::pair<A, B>> align(const Partition<A>& a, const Partition<B>& b) {
  using P = std::pair<A, B>;
  if (a.space != b.space) throw std::logic_error("align: partitions from different spaces");
  if (a.empty() || b.empty()) {
    Partition<P> out;
    out.space = a.space;
    return out;
  }
  if (a.space->repr == Repr::List) {
    detail::ListBuilder<P> out;
    size_t i = 0, j = 0;
    for (;;) {
      std::optional<Int> ha =
          i < a.list.breaks.size() ? std::optional<Int>(a.list.breaks[i]) : std::nullopt;
      std::optional<Int> hb =
          j < b.list.breaks.size() ? std::optional<Int>(b.list.breaks[j]) : std::nullopt;
      std::optional<Int> h;
      if (ha && hb)
        h = std::min(*ha, *hb);
      else if (ha)
        h = ha;
      else if (hb)
        h = hb;
      out.push(h, P{a.list.values[i], b.list.values[j]});
      if (!h) break;
      if (ha && *ha == *h) ++i;
      if (hb && *hb == *h) ++j;
    }
    Partition<P> r;
    r.space = a.space;
    r.list = out.take();
    maybe_validate(r);
    return r;
  }
  std::vector<LinIneq> labels;
  detail::collect_labels(a.tree, labels);
  detail::collect_labels(b.tree, labels);
  return build_tree_partition<P>(a.space, std::move(labels), [&](const SignView& s) {
    return P{detail::lookup(a.tree, s), detail::lookup(b.tree, s)};
  });
}

// --- lifted arithmetic on Partition<AffineFn> ------------------------------

Partition<AffineFn> lift_add(const Partition<AffineFn>& a, const Partition<AffineFn>& b);
Partition<AffineFn> lift_scale(const Int& c, const Partition<AffineFn>& a);
Partition<AffineFn> lift_min(const Partition<AffineFn>& a, const Partition<AffineFn>& b);
Partition<AffineFn> lift_max(const Partition<AffineFn>& a, const Partition<AffineFn>& b);
Partition<AffineFn> lift_guard(const Partition<AffineFn>& test, const Partition<AffineFn>& val);

// select: one value partition per alternative index; entries may be absent
// when the strategy never picks them.
Partition<AffineFn> select(const Partition<int>& strategy,
                           const std::vector<std::optional<Partition<AffineFn>>>& values);

// Locally optimal improvement for one equation: keep the current index where
// it is maximal, otherwise switch to the smallest maximal index.
Partition<int> argmax_keep_current(const Partition<int>& current,
                                   const std::vector<Partition<AffineFn>>& values);

bool semantically_equal(const Partition<AffineFn>& a, const Partition<AffineFn>& b);
bool semantically_equal(const Partition<int>& a, const Partition<int>& b);

// Removes regions without integer points (exact check); may empty the
// partition when the assumption itself has no integer solutions.
template <class V>
Partition<V> purge_exact(const Partition<V>& p, const ExactOptions& opts = {});

// Rebuild into canonical form; identity on partitions produced by this
// module, useful for externally assembled trees.
template <class V>
Partition<V> normalize(const Partition<V>& p) {
  if (p.space->repr == Repr::List) {
    detail::ListBuilder<V> b;
    for (size_t i = 0; i < p.list.values.size(); ++i) {
      std::optional<Int> hi =
          i < p.list.breaks.size() ? std::optional<Int>(p.list.breaks[i]) : std::nullopt;
      b.push(hi, p.list.values[i]);
    }
    Partition<V> out;
    out.space = p.space;
    out.list = b.take();
    maybe_validate(out);
    return out;
  }
  std::vector<LinIneq> labels;
  std::function<void(const TreePtr<V>&)> walk = [&](const TreePtr<V>& t) {
    if (!t || t->is_leaf) return;
    labels.push_back(canonical_polarity(*t->label).label);
    walk(t->yes);
    walk(t->no);
  };
  walk(p.tree);
  // lookup must work on arbitrary input trees, whose labels may be stored
  // with either polarity and in any order
  auto lookup_raw = [&](const SignView& s) -> V {
    const TreeNode<V>* n = p.tree.get();
    while (!n->is_leaf) {
      bool holds = detail::sign_of(*n->label, s);
      n = (holds ? n->yes : n->no).get();
    }
    return n->value;
  };
  return build_tree_partition<V>(p.space, std::move(labels), lookup_raw);
}

template <class V>
Partition<V> purge_exact(const Partition<V>& p, const ExactOptions& opts) {
  Partition<V> out;
  out.space = p.space;
  Space& sp = *p.space;
  if (sp.repr == Repr::List) {
    out.list = p.list;  // intervals always contain integer points
    return out;
  }
  Conjunction path = sp.assumption;
  std::function<TreePtr<V>(const TreePtr<V>&)> walk =
      [&](const TreePtr<V>& t) -> TreePtr<V> {
    if (!t) return nullptr;
    if (t->is_leaf) {
      if (exact_satisfiable(path, &sp.sat_stats, opts) == SatResult::Unsat) return nullptr;
      return t;
    }
    path.push_back(*t->label);
    TreePtr<V> yes = walk(t->yes);
    path.back() = neg_ineq(*t->label);
    TreePtr<V> no = walk(t->no);
    path.pop_back();
    if (!yes) return no;
    if (!no) return yes;
    if (tree_equal(yes, no)) return yes;
    return make_node(*t->label, std::move(yes), std::move(no));
  };
  out.tree = walk(p.tree);
  maybe_validate(out);
  return out;
}

}  // namespace psi
