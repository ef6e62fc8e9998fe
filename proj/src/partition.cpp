#include "psi/partition.hpp"

namespace psi {

bool Space::fm_sat_with_assumption(const Conjunction& path) {
  Conjunction full = assumption;
  full.insert(full.end(), path.begin(), path.end());
  // canonical key: order-insensitive
  Conjunction sorted = full;
  std::sort(sorted.begin(), sorted.end(),
            [](const LinIneq& a, const LinIneq& b) { return cmp_order(a, b) < 0; });
  std::string key;
  for (const LinIneq& q : sorted) {
    for (const Int& c : q.coeffs) {
      key += c.str();
      key += ',';
    }
    key += '<';
    key += q.bound.str();
    key += ';';
  }
  auto it = fm_memo.find(key);
  ++sat_stats.fm_calls;
  if (it != fm_memo.end()) return it->second;
  bool sat = fm_satisfiable(full, nullptr) == SatResult::Sat;
  fm_memo.emplace(std::move(key), sat);
  return sat;
}

bool fm_sat_conjunction_with(Space& space, const Conjunction& halfspaces) {
  return space.fm_sat_with_assumption(halfspaces);
}

SpacePtr make_space(int k, Conjunction assumption, Repr repr, bool validate) {
  if (repr == Repr::List && k != 1)
    throw std::invalid_argument("list representation requires exactly one parameter");
  auto sp = std::make_shared<Space>();
  sp->k = k;
  sp->assumption = std::move(assumption);
  sp->repr = repr;
  sp->validate = validate;
  for (const LinIneq& q : sp->assumption)
    if (q.dim() != k) throw std::invalid_argument("assumption dimension mismatch");
  if (repr == Repr::List) {
    for (const LinIneq& q : sp->assumption) {
      if (q.coeffs[0] > 0) {
        if (!sp->range_hi || q.bound < *sp->range_hi) sp->range_hi = q.bound;
      } else {
        Int lo = -q.bound;
        if (!sp->range_lo || lo > *sp->range_lo) sp->range_lo = lo;
      }
    }
  }
  return sp;
}

void validate_partition_failure(const std::string& what) {
  throw std::logic_error("partition invariant violated: " + what);
}

void validate_tree_shape(const Space& space, const std::vector<LinIneq>& path_labels,
                         const Conjunction& halfspaces, const LinIneq& label) {
  (void)space;
  (void)halfspaces;
  if (canonical_polarity(label).negated)
    validate_partition_failure("node label is not canonical polarity");
  if (!path_labels.empty() && cmp_order(path_labels.back(), label) >= 0)
    validate_partition_failure("node labels not strictly ascending along path");
}

namespace {

using detail::BuildCtx;
using detail::build_canonical;
using detail::collect_labels;
using detail::Interval;
using detail::le_on_region;
using detail::ListBuilder;
using detail::lookup;
using detail::pattern_of;
using detail::sign_of;
using detail::sort_labels;

// --- tree helpers -----------------------------------------------------------

// Comparison labels needed to decide min/guard/argmax splits, gathered from
// the aligned leaves so the final build sees every relevant inequality.
void add_cmp_label(std::vector<LinIneq>& out, const AffineFn& f, const AffineFn& g) {
  CmpSplit s = aff_cmp_split(f, g);
  if (s.kind == CmpSplit::Kind::Split) out.push_back(canonical_polarity(*s.ineq).label);
}

void add_guard_label(std::vector<LinIneq>& out, const AffineFn& f) {
  CmpSplit s = aff_guard_split(f);
  if (s.kind == CmpSplit::Kind::Split) out.push_back(canonical_polarity(*s.ineq).label);
}

template <class V>
void walk_leaves(const TreePtr<V>& t, const std::function<void(const V&)>& fn) {
  if (!t) return;
  if (t->is_leaf) {
    fn(t->value);
    return;
  }
  walk_leaves(t->yes, fn);
  walk_leaves(t->no, fn);
}

// --- list helpers -----------------------------------------------------------

// Recursively refines one interval by the inequalities a predicate needs,
// then emits the decided value.
struct IntervalEmit {
  ListBuilder<AffineFn>* out = nullptr;
  ListBuilder<int>* out_idx = nullptr;

  void value(const Interval& iv, AffineFn v) const { out->push(iv.hi, std::move(v)); }
  void index(const Interval& iv, int v) const { out_idx->push(iv.hi, v); }
};

// Splits iv by the inequality when undecided; calls fn(iv', truth).
void for_each_side(const Interval& iv, const CmpSplit& s,
                   const std::function<void(const Interval&, bool)>& fn) {
  if (s.kind == CmpSplit::Kind::AlwaysTrue) {
    fn(iv, true);
    return;
  }
  if (s.kind == CmpSplit::Kind::AlwaysFalse) {
    fn(iv, false);
    return;
  }
  detail::SignPattern p = pattern_of(*s.ineq, iv);
  if (!p.cut) {
    fn(iv, p.low_side);
    return;
  }
  Interval lo{iv.lo, *p.cut};
  Interval hi{*p.cut + 1, iv.hi};
  fn(lo, p.low_side);
  fn(hi, !p.low_side);
}

// min/max over one interval, splitting at the crossing when needed.
void emit_min_max(const Interval& iv, const AffineFn& f, const AffineFn& g, bool take_min,
                  ListBuilder<AffineFn>& out) {
  for_each_side(iv, aff_cmp_split(f, g), [&](const Interval& part, bool f_le_g) {
    const AffineFn& v = (f_le_g == take_min) ? f : g;
    out.push(part.hi, v);
  });
}

void emit_guard(const Interval& iv, const AffineFn& test, const AffineFn& val, int k,
                ListBuilder<AffineFn>& out) {
  for_each_side(iv, aff_guard_split(test), [&](const Interval& part, bool passes) {
    out.push(part.hi, passes ? val : AffineFn::neg_inf(k));
  });
}

// argmax with keep-current over one interval; recursion depth is bounded by
// the number of pairwise comparisons.
void emit_argmax(const Interval& iv, int current, const std::vector<AffineFn>& vals,
                 ListBuilder<int>& out) {
  // find the first comparison that is undecided on iv and split on it
  for (size_t j = 0; j < vals.size(); ++j) {
    for (size_t l = j + 1; l < vals.size(); ++l) {
      CmpSplit s = aff_cmp_split(vals[j], vals[l]);
      if (s.kind != CmpSplit::Kind::Split) continue;
      detail::SignPattern p = pattern_of(*s.ineq, iv);
      if (!p.cut) continue;
      Interval lo{iv.lo, *p.cut};
      Interval hi{*p.cut + 1, iv.hi};
      emit_argmax(lo, current, vals, out);
      emit_argmax(hi, current, vals, out);
      return;
    }
  }
  // all comparisons decided on iv: evaluate the order at any point of iv
  auto le = [&](const AffineFn& f, const AffineFn& g) {
    CmpSplit s = aff_cmp_split(f, g);
    if (s.kind == CmpSplit::Kind::AlwaysTrue) return true;
    if (s.kind == CmpSplit::Kind::AlwaysFalse) return false;
    detail::SignPattern p = pattern_of(*s.ineq, iv);
    return p.low_side;  // constant over iv since no cut remained
  };
  bool current_max = true;
  for (size_t j = 0; j < vals.size(); ++j)
    if (!le(vals[j], vals[current])) {
      current_max = false;
      break;
    }
  if (current_max) {
    out.push(iv.hi, current);
    return;
  }
  int best = 0;
  for (size_t j = 1; j < vals.size(); ++j)
    if (!le(vals[j], vals[best])) best = static_cast<int>(j);
  out.push(iv.hi, best);
}

Interval whole_line(const Space& sp) { return Interval{sp.range_lo, sp.range_hi}; }

// Iterates the aligned intervals of several lists at once.
template <class V>
struct Cursor {
  const BreakList<V>* list;
  size_t idx = 0;

  const V& value() const { return list->values[idx]; }
  std::optional<Int> upper() const {
    return idx < list->breaks.size() ? std::optional<Int>(list->breaks[idx]) : std::nullopt;
  }
  void advance_past(const Int& h) {
    if (idx < list->breaks.size() && list->breaks[idx] == h) ++idx;
  }
};

template <class V>
void for_each_region(const Space& sp, std::vector<Cursor<V>>& cursors,
                     const std::function<void(const Interval&)>& fn) {
  std::optional<Int> lo = sp.range_lo;
  for (;;) {
    std::optional<Int> hi;
    for (const Cursor<V>& c : cursors) {
      std::optional<Int> u = c.upper();
      if (u && (!hi || *u < *hi)) hi = u;
    }
    if (sp.range_hi && (!hi || *hi > *sp.range_hi)) hi = sp.range_hi;
    fn(Interval{lo, hi});
    if (!hi || (sp.range_hi && *hi >= *sp.range_hi)) return;
    for (Cursor<V>& c : cursors) c.advance_past(*hi);
    lo = *hi + 1;
  }
}

}  // namespace

// --- lifted arithmetic -------------------------------------------------------

Partition<AffineFn> lift_add(const Partition<AffineFn>& a, const Partition<AffineFn>& b) {
  if (a.space != b.space) throw std::logic_error("lift_add: different spaces");
  Space& sp = *a.space;
  if (sp.repr == Repr::List) {
    ListBuilder<AffineFn> out;
    std::vector<Cursor<AffineFn>> cs{{&a.list}, {&b.list}};
    for_each_region<AffineFn>(sp, cs, [&](const Interval& iv) {
      out.push(iv.hi, aff_add(cs[0].value(), cs[1].value()));
    });
    Partition<AffineFn> r;
    r.space = a.space;
    r.list = out.take();
    maybe_validate(r);
    return r;
  }
  std::vector<LinIneq> labels;
  collect_labels(a.tree, labels);
  collect_labels(b.tree, labels);
  return build_tree_partition<AffineFn>(a.space, std::move(labels), [&](const SignView& s) {
    return aff_add(lookup(a.tree, s), lookup(b.tree, s));
  });
}

Partition<AffineFn> lift_scale(const Int& c, const Partition<AffineFn>& a) {
  return map_partition(a, [&](const AffineFn& f) { return aff_scale(c, f); });
}

namespace {

Partition<AffineFn> lift_min_max(const Partition<AffineFn>& a, const Partition<AffineFn>& b,
                                 bool take_min) {
  if (a.space != b.space) throw std::logic_error("lift_min/max: different spaces");
  Space& sp = *a.space;
  if (sp.repr == Repr::List) {
    ListBuilder<AffineFn> out;
    std::vector<Cursor<AffineFn>> cs{{&a.list}, {&b.list}};
    for_each_region<AffineFn>(sp, cs, [&](const Interval& iv) {
      emit_min_max(iv, cs[0].value(), cs[1].value(), take_min, out);
    });
    Partition<AffineFn> r;
    r.space = a.space;
    r.list = out.take();
    maybe_validate(r);
    return r;
  }
  using Pair = std::pair<AffineFn, AffineFn>;
  Partition<Pair> joint = align(a, b);
  std::vector<LinIneq> labels;
  collect_labels(joint.tree, labels);
  walk_leaves<Pair>(joint.tree, [&](const Pair& fg) {
    add_cmp_label(labels, fg.first, fg.second);
  });
  return build_tree_partition<AffineFn>(a.space, std::move(labels), [&](const SignView& s) {
    const Pair& fg = lookup(joint.tree, s);
    bool f_le_g = le_on_region(fg.first, fg.second, s);
    return (f_le_g == take_min) ? fg.first : fg.second;
  });
}

}  // namespace

Partition<AffineFn> lift_min(const Partition<AffineFn>& a, const Partition<AffineFn>& b) {
  return lift_min_max(a, b, true);
}

Partition<AffineFn> lift_max(const Partition<AffineFn>& a, const Partition<AffineFn>& b) {
  return lift_min_max(a, b, false);
}

Partition<AffineFn> lift_guard(const Partition<AffineFn>& test, const Partition<AffineFn>& val) {
  if (test.space != val.space) throw std::logic_error("lift_guard: different spaces");
  Space& sp = *test.space;
  if (sp.repr == Repr::List) {
    ListBuilder<AffineFn> out;
    std::vector<Cursor<AffineFn>> cs{{&test.list}, {&val.list}};
    for_each_region<AffineFn>(sp, cs, [&](const Interval& iv) {
      emit_guard(iv, cs[0].value(), cs[1].value(), sp.k, out);
    });
    Partition<AffineFn> r;
    r.space = test.space;
    r.list = out.take();
    maybe_validate(r);
    return r;
  }
  using Pair = std::pair<AffineFn, AffineFn>;
  Partition<Pair> joint = align(test, val);
  std::vector<LinIneq> labels;
  collect_labels(joint.tree, labels);
  walk_leaves<Pair>(joint.tree, [&](const Pair& fg) { add_guard_label(labels, fg.first); });
  return build_tree_partition<AffineFn>(test.space, std::move(labels), [&](const SignView& s) {
    const Pair& fg = lookup(joint.tree, s);
    bool passes = detail::guard_on_region(fg.first, s);
    return passes ? fg.second : AffineFn::neg_inf(sp.k);
  });
}

Partition<AffineFn> select(const Partition<int>& strategy,
                           const std::vector<std::optional<Partition<AffineFn>>>& values) {
  Space& sp = *strategy.space;
  if (sp.repr == Repr::List) {
    ListBuilder<AffineFn> out;
    // cursors over the strategy and every provided value list
    std::vector<Cursor<int>> sc{{&strategy.list}};
    std::vector<Cursor<AffineFn>> vc;
    std::vector<int> slot(values.size(), -1);
    for (size_t i = 0; i < values.size(); ++i)
      if (values[i]) {
        slot[i] = static_cast<int>(vc.size());
        vc.push_back(Cursor<AffineFn>{&values[i]->list});
      }
    for (;;) {
      std::optional<Int> hi;
      auto consider = [&](std::optional<Int> u) {
        if (u && (!hi || *u < *hi)) hi = u;
      };
      consider(sc[0].upper());
      for (const auto& c : vc) consider(c.upper());
      if (sp.range_hi && (!hi || *hi > *sp.range_hi)) hi = sp.range_hi;
      int idx = sc[0].value();
      if (slot.at(idx) < 0) throw std::logic_error("select: missing value for chosen index");
      out.push(hi, vc[slot[idx]].value());
      if (!hi || (sp.range_hi && *hi >= *sp.range_hi)) break;
      sc[0].advance_past(*hi);
      for (auto& c : vc) c.advance_past(*hi);
    }
    Partition<AffineFn> r;
    r.space = strategy.space;
    r.list = out.take();
    maybe_validate(r);
    return r;
  }
  std::vector<LinIneq> labels;
  collect_labels(strategy.tree, labels);
  for (const auto& v : values)
    if (v) collect_labels(v->tree, labels);
  return build_tree_partition<AffineFn>(strategy.space, std::move(labels),
                                        [&](const SignView& s) {
    int idx = lookup(strategy.tree, s);
    const auto& v = values.at(idx);
    if (!v) throw std::logic_error("select: missing value for chosen index");
    return lookup(v->tree, s);
  });
}

Partition<int> argmax_keep_current(const Partition<int>& current,
                                   const std::vector<Partition<AffineFn>>& values) {
  Space& sp = *current.space;
  if (sp.repr == Repr::List) {
    ListBuilder<int> out;
    std::vector<Cursor<int>> sc{{&current.list}};
    std::vector<Cursor<AffineFn>> vc;
    vc.reserve(values.size());
    for (const auto& v : values) vc.push_back(Cursor<AffineFn>{&v.list});
    std::optional<Int> lo = sp.range_lo;
    for (;;) {
      std::optional<Int> hi;
      auto consider = [&](std::optional<Int> u) {
        if (u && (!hi || *u < *hi)) hi = u;
      };
      consider(sc[0].upper());
      for (const auto& c : vc) consider(c.upper());
      if (sp.range_hi && (!hi || *hi > *sp.range_hi)) hi = sp.range_hi;
      std::vector<AffineFn> vals;
      vals.reserve(vc.size());
      for (const auto& c : vc) vals.push_back(c.value());
      emit_argmax(Interval{lo, hi}, sc[0].value(), vals, out);
      if (!hi || (sp.range_hi && *hi >= *sp.range_hi)) break;
      sc[0].advance_past(*hi);
      for (auto& c : vc) c.advance_past(*hi);
      lo = *hi + 1;
    }
    Partition<int> r;
    r.space = current.space;
    r.list = out.take();
    maybe_validate(r);
    return r;
  }

  struct Tuple {
    int cur;
    std::vector<AffineFn> vals;
    bool operator==(const Tuple& o) const { return cur == o.cur && vals == o.vals; }
  };
  std::vector<LinIneq> labels;
  collect_labels(current.tree, labels);
  for (const auto& v : values) collect_labels(v.tree, labels);
  sort_labels(labels);
  Partition<Tuple> joint;
  joint.space = current.space;
  joint.tree = detail::build_canonical<Tuple>(sp, labels, [&](const SignView& s) {
    Tuple t;
    t.cur = lookup(current.tree, s);
    t.vals.reserve(values.size());
    for (const auto& v : values) t.vals.push_back(lookup(v.tree, s));
    return t;
  });
  std::vector<LinIneq> labels2 = labels;
  walk_leaves<Tuple>(joint.tree, [&](const Tuple& t) {
    for (size_t j = 0; j < t.vals.size(); ++j)
      for (size_t l = j + 1; l < t.vals.size(); ++l)
        add_cmp_label(labels2, t.vals[j], t.vals[l]);
  });
  return build_tree_partition<int>(current.space, std::move(labels2), [&](const SignView& s) {
    const Tuple& t = lookup(joint.tree, s);
    auto le = [&](const AffineFn& f, const AffineFn& g) { return le_on_region(f, g, s); };
    bool current_max = true;
    for (size_t j = 0; j < t.vals.size(); ++j)
      if (!le(t.vals[j], t.vals[t.cur])) {
        current_max = false;
        break;
      }
    if (current_max) return t.cur;
    int best = 0;
    for (size_t j = 1; j < t.vals.size(); ++j)
      if (!le(t.vals[j], t.vals[best])) best = static_cast<int>(j);
    return best;
  });
}

namespace {

template <class V>
bool semantically_equal_impl(const Partition<V>& a, const Partition<V>& b) {
  if (a.space != b.space) throw std::logic_error("semantically_equal: different spaces");
  Space& sp = *a.space;
  if (sp.repr == Repr::List) {
    if (a.list.values.empty() || b.list.values.empty())
      return a.list.values.empty() == b.list.values.empty();
    bool equal = true;
    std::vector<Cursor<V>> cs{{&a.list}, {&b.list}};
    for_each_region<V>(sp, cs, [&](const Interval&) {
      if (!(cs[0].value() == cs[1].value())) equal = false;
    });
    return equal;
  }
  if (!a.tree || !b.tree) return !a.tree == !b.tree;
  std::vector<LinIneq> labels;
  collect_labels(a.tree, labels);
  collect_labels(b.tree, labels);
  sort_labels(labels);
  bool equal = true;
  detail::build_canonical<int>(sp, labels, [&](const SignView& s) {
    if (!(lookup(a.tree, s) == lookup(b.tree, s))) equal = false;
    return 0;
  });
  return equal;
}

}  // namespace

bool semantically_equal(const Partition<AffineFn>& a, const Partition<AffineFn>& b) {
  return semantically_equal_impl(a, b);
}

bool semantically_equal(const Partition<int>& a, const Partition<int>& b) {
  return semantically_equal_impl(a, b);
}

}  // namespace psi
