// Copyright 2026 The lazycasp Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lazycasp/propagators.hpp"

#include <algorithm>

namespace lazycasp {

LinearConstraint negate(const LinearConstraint& c) {
  LinearConstraint out;
  out.terms = c.terms;
  for (Term& t : out.terms) t.coef = -t.coef;
  out.bound = checked_sub(-c.bound, 1);
  return out;
}

namespace {

struct ViewBounds {
  std::vector<Int> lo;
  std::vector<Int> hi;
  Int sum_lo = 0;
  Int sum_hi = 0;
};

ViewBounds view_bounds_of(const LinearConstraint& c, BoundsView b) {
  ViewBounds vb;
  vb.lo.reserve(c.terms.size());
  vb.hi.reserve(c.terms.size());
  for (const Term& t : c.terms) {
    Int x = checked_mul(t.coef, b.lb[t.var]);
    Int y = checked_mul(t.coef, b.ub[t.var]);
    if (t.coef < 0) std::swap(x, y);
    vb.lo.push_back(x);
    vb.hi.push_back(y);
    vb.sum_lo = checked_add(vb.sum_lo, x);
    vb.sum_hi = checked_add(vb.sum_hi, y);
  }
  return vb;
}

View term_view(const Term& t) { return {t.coef, t.var, 0}; }

Lit ge_lit(const Term& t, ExtInt d, const VariableTable& vars, OrderAtomPool& pool) {
  return pool.literal(tau_ge(term_view(t), d, vars.domain(t.var)));
}

Lit gt_lit(const Term& t, ExtInt d, const VariableTable& vars, OrderAtomPool& pool) {
  return pool.literal(tau_gt(term_view(t), d, vars.domain(t.var)));
}

// Literals true by the domain alone carry no information.
void append(Nogood& ng, Lit l) {
  if (l != kTrueLit) ng.push_back(l);
}

}  // namespace

std::vector<Nogood> propagate_bounds(const HalfConstraint& h, BoundsView b,
                                     const VariableTable& vars, OrderAtomPool& pool,
                                     int strength) {
  const LinearConstraint& c = h.con;
  std::vector<Nogood> out;
  ViewBounds vb = view_bounds_of(c, b);
  if (vb.sum_hi <= c.bound) return out;
  const std::size_t n = c.terms.size();
  if (strength <= 2 || n == 0) {
    if (vb.sum_lo > c.bound) {
      Nogood ng{h.sigma};
      for (std::size_t j = 0; j < n; ++j) append(ng, ge_lit(c.terms[j], vb.lo[j], vars, pool));
      out.push_back(std::move(ng));
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Int cur = checked_sub(c.bound, checked_sub(vb.sum_lo, vb.lo[i]));
    if (cur < vb.hi[i]) {
      Nogood ng{h.sigma};
      append(ng, gt_lit(c.terms[i], cur, vars, pool));
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) append(ng, ge_lit(c.terms[j], vb.lo[j], vars, pool));
      }
      out.push_back(std::move(ng));
      if (cur < vb.lo[i]) return out;
    }
  }
  return out;
}

std::vector<Nogood> propagate_reification(const HalfConstraint& h, BoundsView b,
                                          const VariableTable& vars, OrderAtomPool& pool,
                                          int strength) {
  std::vector<Nogood> out;
  if (strength <= 1) return out;
  const LinearConstraint& c = h.con;
  ViewBounds vb = view_bounds_of(c, b);
  Int low = vb.sum_lo;
  if (low <= c.bound) return out;
  Nogood ng{h.sigma};
  const std::size_t n = c.terms.size();
  if (strength < 4) {
    for (std::size_t j = 0; j < n; ++j) append(ng, ge_lit(c.terms[j], vb.lo[j], vars, pool));
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const Term& t = c.terms[j];
      const Int low2 = checked_sub(low, vb.lo[j]);
      ExtInt cur = view_step(checked_sub(c.bound, low2), term_view(t), vars.domain(t.var), Step::Next);
      // cur never exceeds the current lower bound since low > bound
      append(ng, ge_lit(t, cur, vars, pool));
      low = checked_add(low2, cur.value());
    }
  }
  out.push_back(std::move(ng));
  return out;
}

// ---------------------------------------------------------------------------

CspPropagator::CspPropagator(AtomTable& atoms, const VariableTable& vars, OrderAtomPool& pool,
                             int strength)
    : atoms_(atoms), vars_(vars), pool_(pool), strength_(strength) {}

void CspPropagator::sync_vars() {
  for (VarId v = static_cast<VarId>(lb_.size()); v < vars_.size(); ++v) {
    const DomainSet& dom = vars_.domain(v);
    lb_.push_back(dom.empty() ? 0 : dom.lower());
    ub_.push_back(dom.empty() ? 0 : dom.upper());
    ignored_.push_back(0);
    cons_of_var_.emplace_back();
    order_dirty_.insert(v);
  }
}

void CspPropagator::set_ignored(VarId v, bool ignored) {
  sync_vars();
  ignored_[v] = ignored ? 1 : 0;
}

void CspPropagator::watch_atom(Var a, std::uint32_t con) {
  if (a >= cons_of_atom_.size()) cons_of_atom_.resize(a + 1);
  cons_of_atom_[a].push_back(con);
}

void CspPropagator::add_constraint(const LinearAtom& la) {
  sync_vars();
  const auto id = static_cast<std::uint32_t>(cons_.size());
  Con c{la.atom, {}};
  if (la.half != Half::FalseOnly) c.halves.push_back({Lit::pos(la.atom), la.con});
  if (la.half != Half::TrueOnly) c.halves.push_back({Lit::neg(la.atom), negate(la.con)});
  for (const Term& t : la.con.terms) {
    auto& list = cons_of_var_[t.var];
    if (list.empty() || list.back() != id) list.push_back(id);
  }
  watch_atom(la.atom, id);
  cons_.push_back(std::move(c));
  dirty_.insert(id);
}

void CspPropagator::mark_var(VarId v) {
  order_dirty_.insert(v);
  for (std::uint32_t c : cons_of_var_[v]) dirty_.insert(c);
}

void CspPropagator::catch_up(Engine& engine) {
  const auto& created = pool_.created();
  for (; pool_seen_ < created.size(); ++pool_seen_) {
    VarId v = atoms_[created[pool_seen_]].var;
    if (v < lb_.size()) order_dirty_.insert(v);
  }
  std::span<const Lit> trail = engine.trail();
  for (; cursor_ < trail.size(); ++cursor_) {
    const Lit l = trail[cursor_];
    const Var a = l.var();
    if (a < cons_of_atom_.size() && !cons_of_atom_[a].empty()) {
      sigma_log_.push_back({cursor_, a});
      for (std::uint32_t c : cons_of_atom_[a]) dirty_.insert(c);
    }
    if (a >= atoms_.size()) continue;
    const AtomInfo& info = atoms_[a];
    if (info.kind != AtomKind::Order || info.var >= lb_.size()) continue;
    const VarId v = info.var;
    const Int d = info.threshold;
    if (l.positive()) {
      if (d < ub_[v]) {
        changes_.push_back({cursor_, v, lb_[v], ub_[v]});
        ub_[v] = d;
        mark_var(v);
      }
    } else {
      std::optional<Int> nd = vars_.domain(v).next(d);
      Int nlb = nd ? *nd : d + 1;
      if (nlb > lb_[v]) {
        changes_.push_back({cursor_, v, lb_[v], ub_[v]});
        lb_[v] = nlb;
        mark_var(v);
      }
    }
  }
}

void CspPropagator::on_backtrack(Engine&, std::size_t trail_size) {
  cursor_ = std::min(cursor_, trail_size);
  while (!changes_.empty() && changes_.back().pos >= trail_size) {
    const BoundChange& ch = changes_.back();
    lb_[ch.var] = ch.lb;
    ub_[ch.var] = ch.ub;
    mark_var(ch.var);
    changes_.pop_back();
  }
  while (!sigma_log_.empty() && sigma_log_.back().first >= trail_size) {
    for (std::uint32_t c : cons_of_atom_[sigma_log_.back().second]) dirty_.insert(c);
    sigma_log_.pop_back();
  }
}

bool CspPropagator::emit(Engine& engine, std::vector<Nogood>& ngs, bool& conflict) {
  const std::size_t atoms_before = pool_.size();
  bool changed = false;
  for (Nogood& ng : ngs) {
    AddResult r = engine.add_nogood(std::move(ng), NogoodKind::Dynamic);
    if (r == AddResult::Conflict) {
      conflict = true;
      return true;
    }
    if (r == AddResult::Unit) changed = true;
  }
  return changed || pool_.size() != atoms_before;
}

bool CspPropagator::order_phase(Engine& engine, bool& conflict) {
  if (order_dirty_.empty()) return false;
  std::vector<Nogood> ngs;
  for (VarId v : order_dirty_) {
    const DomainSet& dom = vars_.domain(v);
    if (dom.empty()) continue;
    const auto& th = pool_.thresholds(v);
    if (th.empty()) continue;
    if (ub_[v] < dom.upper()) {
      if (auto u = pool_.find(v, ub_[v])) {
        for (auto it = th.upper_bound(ub_[v]); it != th.end(); ++it) {
          if (!engine.is_true(Lit::pos(it->second))) {
            ngs.push_back({Lit::pos(*u), Lit::neg(it->second)});
          }
        }
      }
    }
    if (lb_[v] > dom.lower()) {
      Int dl = *dom.prev(lb_[v]);
      if (auto l = pool_.find(v, dl)) {
        for (auto it = th.begin(); it != th.end() && it->first < dl; ++it) {
          if (!engine.is_false(Lit::pos(it->second))) {
            ngs.push_back({Lit::pos(it->second), Lit::neg(*l)});
          }
        }
      }
    }
  }
  order_dirty_.clear();
  if (ngs.empty()) return false;
  return emit(engine, ngs, conflict);
}

bool CspPropagator::propagate(Engine& engine) {
  sync_vars();
  catch_up(engine);
  bool conflict = false;
  if (order_phase(engine, conflict)) return true;
  BoundsView bounds{lb_, ub_};
  std::uint32_t start = last_producer_;
  while (!dirty_.empty()) {
    auto it = dirty_.upper_bound(start);
    if (it == dirty_.end()) it = dirty_.begin();
    const std::uint32_t id = *it;
    dirty_.erase(it);
    start = id;
    const Con& c = cons_[id];
    std::vector<Nogood> ngs;
    for (const HalfConstraint& h : c.halves) {
      Value sv = engine.value(h.sigma);
      std::vector<Nogood> part;
      if (sv == Value::True) {
        part = propagate_bounds(h, bounds, vars_, pool_, strength_);
      } else if (sv == Value::Free) {
        part = propagate_reification(h, bounds, vars_, pool_, strength_);
      }
      for (Nogood& ng : part) ngs.push_back(std::move(ng));
    }
    if (ngs.empty()) continue;
    last_producer_ = id;
    if (emit(engine, ngs, conflict)) return true;
  }
  return false;
}

std::optional<Lit> CspPropagator::split(Engine& engine) {
  catch_up(engine);
  std::optional<VarId> best;
  std::uint64_t best_count = 1;
  for (VarId v = 0; v < lb_.size(); ++v) {
    if (ignored_[v] || lb_[v] >= ub_[v]) continue;
    std::uint64_t cnt = vars_.domain(v).count(lb_[v], ub_[v]);
    if (cnt > best_count) {
      best = v;
      best_count = cnt;
    }
  }
  if (!best) return std::nullopt;
  const DomainSet& dom = vars_.domain(*best);
  Int m = dom.at(dom.rank(lb_[*best]) + (best_count - 1) / 2);
  return Lit::pos(pool_.atom(*best, m));
}

// ---------------------------------------------------------------------------

void UfsPropagator::add_component(std::vector<Var> atoms, std::vector<UfsRule> rules) {
  comps_.push_back({std::move(atoms), std::move(rules)});
}

bool UfsPropagator::propagate(Engine& engine) {
  bool added = false;
  for (const Component& comp : comps_) {
    Var max_atom = 0;
    for (Var a : comp.atoms) max_atom = std::max(max_atom, a);
    if (founded_.size() <= max_atom) {
      founded_.resize(max_atom + 1, 0);
      in_u_.resize(max_atom + 1, 0);
    }
    for (Var a : comp.atoms) founded_[a] = 0;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const UfsRule& r : comp.rules) {
        if (founded_[r.head] || engine.is_false(r.body)) continue;
        bool ok = std::all_of(r.pos.begin(), r.pos.end(), [&](Var p) { return founded_[p] != 0; });
        if (ok) {
          founded_[r.head] = 1;
          changed = true;
        }
      }
    }
    std::vector<Var> unfounded;
    for (Var a : comp.atoms) {
      if (!founded_[a] && !engine.is_false(Lit::pos(a))) unfounded.push_back(a);
    }
    if (unfounded.empty()) continue;
    for (Var a : unfounded) in_u_[a] = 1;
    Nogood external;
    for (const UfsRule& r : comp.rules) {
      if (!in_u_[r.head]) continue;
      bool internal = std::any_of(r.pos.begin(), r.pos.end(), [&](Var p) { return in_u_[p] != 0; });
      if (!internal) external.push_back(~r.body);
    }
    std::sort(external.begin(), external.end());
    external.erase(std::unique(external.begin(), external.end()), external.end());
    for (Var a : unfounded) in_u_[a] = 0;
    for (Var a : unfounded) {
      Nogood ng = external;
      ng.push_back(Lit::pos(a));
      AddResult r = engine.add_nogood(std::move(ng), NogoodKind::Dynamic);
      added = true;
      if (r == AddResult::Conflict) return true;
    }
  }
  return added;
}

}  // namespace lazycasp
