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

#include "lazycasp/optimize.hpp"

#include <map>

namespace lazycasp {

Objective build_objective(std::span<const ObjectiveTerm> terms, const VariableTable& vars,
                          OrderAtomPool& pool) {
  struct Acc {
    Int base = 0;
    std::map<Var, std::pair<Int, Int>> weights;  // atom -> (positive, negative)
  };
  std::map<int, Acc, std::greater<>> acc;
  for (const ObjectiveTerm& t : terms) {
    Acc& a = acc[t.level];
    const DomainSet& dom = vars.domain(t.view.var);
    auto [lo, hi] = view_bounds(t.view, dom);
    a.base = checked_add(a.base, lo);
    ExtInt prev = lo;
    for (ExtInt d = view_step(lo, t.view, dom, Step::Next); d.finite();
         d = view_step(d, t.view, dom, Step::Next)) {
      const Int w = checked_sub(d.value(), prev.value());
      prev = d;
      Lit l = pool.literal(tau_ge(t.view, d, dom));
      if (l == kTrueLit) {
        a.base = checked_add(a.base, w);
        continue;
      }
      if (l == kFalseLit) continue;
      auto& [wp, wn] = a.weights[l.var()];
      (l.positive() ? wp : wn) = checked_add(l.positive() ? wp : wn, w);
    }
    (void)hi;
  }
  Objective obj;
  for (auto& [level, a] : acc) {
    ObjectiveLevel ol{level, a.base, {}};
    for (const auto& [atom, w] : a.weights) {
      // wp*[a] + wn*[not a] = min + |wp - wn| * [the heavier literal]
      const auto [wp, wn] = w;
      ol.base = checked_add(ol.base, std::min(wp, wn));
      if (wp > wn) ol.lits.push_back({Lit::pos(atom), wp - wn});
      if (wn > wp) ol.lits.push_back({Lit::neg(atom), wn - wp});
    }
    obj.levels.push_back(std::move(ol));
  }
  return obj;
}

Cost evaluate_objective(const Objective& obj, const std::function<bool(Lit)>& is_true) {
  Cost c;
  for (const ObjectiveLevel& l : obj.levels) {
    Int v = l.base;
    for (const WeightedLit& wl : l.lits) {
      if (is_true(wl.lit)) v = checked_add(v, wl.weight);
    }
    c.levels.push_back(l.level);
    c.values.push_back(v);
  }
  return c;
}

std::vector<LevelSum> level_sums(std::span<const ObjectiveTerm> terms) {
  std::map<int, LevelSum, std::greater<>> by_level;
  for (const ObjectiveTerm& t : terms) {
    LevelSum& s = by_level[t.level];
    s.level = t.level;
    s.terms.push_back({t.view.coef, t.view.var});
    s.constant = checked_add(s.constant, t.view.offset);
  }
  std::vector<LevelSum> out;
  for (auto& [level, s] : by_level) out.push_back(std::move(s));
  return out;
}

Improvement improvement_constraint(std::span<const LevelSum> sums, const Cost& cost, Lit guard,
                                   AtomTable& atoms) {
  if (sums.size() != cost.values.size()) {
    throw ContractViolation("cost does not match the objective levels");
  }
  Improvement out;
  // le[i]: level i at most its current value; lt[i]: strictly below
  std::vector<Var> le(sums.size()), lt(sums.size());
  for (std::size_t i = 0; i < sums.size(); ++i) {
    if (sums[i].level != cost.levels[i]) {
      throw ContractViolation("cost does not match the objective levels");
    }
    const Int rest = checked_sub(cost.values[i], sums[i].constant);
    lt[i] = atoms.add(AtomKind::Auxiliary);
    out.linear.push_back(
        {lt[i], normalize_linear(sums[i].terms, checked_sub(rest, 1)), Half::TrueOnly});
    if (i + 1 < sums.size()) {
      le[i] = atoms.add(AtomKind::Auxiliary);
      out.linear.push_back({le[i], normalize_linear(sums[i].terms, rest), Half::TrueOnly});
    }
  }
  Nogood some{guard};
  for (std::size_t i = 0; i < sums.size(); ++i) {
    // better_i :- le_0, ..., le_{i-1}, lt_i
    Var b = atoms.add(AtomKind::Auxiliary);
    out.nogoods.push_back({Lit::pos(b), Lit::neg(lt[i])});
    for (std::size_t j = 0; j < i; ++j) out.nogoods.push_back({Lit::pos(b), Lit::neg(le[j])});
    some.push_back(Lit::neg(b));
  }
  out.nogoods.push_back(std::move(some));
  return out;
}

}  // namespace lazycasp
