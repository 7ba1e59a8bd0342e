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

#include "lazycasp/program.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace lazycasp {

AtomTable::AtomTable() { atoms_.push_back({AtomKind::Constant, "true", 0, 0}); }

Var AtomTable::add(AtomKind kind, std::string name) {
  if (!name.empty() && by_name_.count(name) != 0) {
    throw ContractViolation("atom registered twice: " + name);
  }
  Var id = static_cast<Var>(atoms_.size());
  if (!name.empty()) by_name_.emplace(name, id);
  atoms_.push_back({kind, std::move(name), 0, 0});
  return id;
}

Var AtomTable::add_order(VarId v, Int threshold) {
  Var id = static_cast<Var>(atoms_.size());
  atoms_.push_back({AtomKind::Order, {}, v, threshold});
  return id;
}

std::optional<Var> AtomTable::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::string AtomTable::label(Var a) const {
  const AtomInfo& info = atoms_.at(a);
  if (info.kind == AtomKind::Order) {
    return "(v" + std::to_string(info.var) + "<=" + std::to_string(info.threshold) + ")";
  }
  if (!info.name.empty()) return info.name;
  return "#" + std::to_string(a);
}

const char* relation_symbol(Relation rel) {
  switch (rel) {
    case Relation::Le:
      return "<=";
    case Relation::Lt:
      return "<";
    case Relation::Ge:
      return ">=";
    case Relation::Gt:
      return ">";
    case Relation::Eq:
      return "=";
    case Relation::Ne:
      return "!=";
  }
  return "?";
}

namespace {

bool compare(Int lhs, Relation rel, Int rhs) {
  switch (rel) {
    case Relation::Le:
      return lhs <= rhs;
    case Relation::Lt:
      return lhs < rhs;
    case Relation::Ge:
      return lhs >= rhs;
    case Relation::Gt:
      return lhs > rhs;
    case Relation::Eq:
      return lhs == rhs;
    case Relation::Ne:
      return lhs != rhs;
  }
  return false;
}

__int128 term_sum(std::span<const Term> terms, std::span<const Int> values) {
  __int128 sum = 0;
  for (const Term& t : terms) sum += __int128(t.coef) * values[t.var];
  return sum;
}

}  // namespace

bool evaluate(const ConstraintDef& def, std::span<const Int> values) {
  if (const auto* sum = std::get_if<SumConstraint>(&def)) {
    __int128 lhs = term_sum(sum->terms, values);
    __int128 rhs = sum->rhs;
    // compare() works on Int; the difference fits for checked inputs
    return compare(static_cast<Int>(lhs - rhs), sum->rel, 0);
  }
  if (const auto* dist = std::get_if<DistinctConstraint>(&def)) {
    std::set<Int> seen;
    for (const View& v : dist->views) {
      if (!seen.insert(view_value(v, values[v.var])).second) return false;
    }
    return true;
  }
  const auto& dom = std::get<DomainConstraint>(def);
  return dom.values.contains(view_value(dom.view, values[dom.view.var]));
}

bool evaluate(const LinearConstraint& c, std::span<const Int> values) {
  return term_sum(c.terms, values) <= c.bound;
}

const ConstraintDef* GroundProgram::constraint_of(Var atom) const {
  for (const ConstraintEntry& e : constraints) {
    if (e.atom == atom) return &e.def;
  }
  return nullptr;
}

Lit BodyTable::literal(std::vector<Lit> body, AtomTable& atoms, std::vector<Nogood>& out) {
  std::sort(body.begin(), body.end());
  body.erase(std::unique(body.begin(), body.end()), body.end());
  std::erase(body, kTrueLit);
  for (std::size_t i = 0; i + 1 < body.size(); ++i) {
    if (body[i + 1] == ~body[i]) return kFalseLit;
  }
  if (std::find(body.begin(), body.end(), kFalseLit) != body.end()) return kFalseLit;
  if (body.empty()) return kTrueLit;
  if (body.size() == 1) return body.front();
  auto it = bodies_.find(body);
  if (it != bodies_.end()) return Lit::pos(it->second);
  Var b = atoms.add(AtomKind::Body);
  bodies_.emplace(body, b);
  Nogood all_true{Lit::neg(b)};
  for (Lit l : body) {
    all_true.push_back(l);
    out.push_back({Lit::pos(b), ~l});
  }
  out.push_back(std::move(all_true));
  return Lit::pos(b);
}

std::vector<Nogood> completion_nogoods(std::span<const Rule> rules, std::span<const Var> complete,
                                       AtomTable& atoms, BodyTable& bodies) {
  std::vector<Nogood> out;
  std::unordered_map<Var, std::vector<Lit>> support;
  std::unordered_set<Var> wanted(complete.begin(), complete.end());
  for (const Rule& r : rules) {
    switch (r.kind) {
      case RuleKind::Integrity: {
        if (auto ng = make_nogood(r.body)) out.push_back(std::move(*ng));
        break;
      }
      case RuleKind::Normal: {
        if (r.head.size() != 1) throw ContractViolation("normal rule needs one head atom");
        Lit body = bodies.literal(r.body, atoms, out);
        support[r.head.front()].push_back(body);
        break;
      }
      case RuleKind::Choice:
        throw ContractViolation("choice rules must be desugared before completion");
    }
  }
  for (Var a : complete) {
    auto it = support.find(a);
    if (it == support.end()) {
      out.push_back({Lit::pos(a)});
      continue;
    }
    std::vector<Lit>& bs = it->second;
    std::sort(bs.begin(), bs.end());
    bs.erase(std::unique(bs.begin(), bs.end()), bs.end());
    if (std::find(bs.begin(), bs.end(), kTrueLit) != bs.end()) {
      out.push_back({Lit::neg(a)});
      continue;
    }
    Nogood unsupported{Lit::pos(a)};
    for (Lit b : bs) {
      if (b == kFalseLit) continue;
      unsupported.push_back(~b);
      out.push_back({Lit::neg(a), b});
    }
    out.push_back(std::move(unsupported));
  }
  for (const auto& [head, _] : support) {
    if (wanted.count(head) == 0 && atoms[head].kind == AtomKind::Constraint) {
      throw ContractViolation("constraint atom in a rule head");
    }
  }
  return out;
}

std::vector<Rule> desugar_choice(const Rule& rule, AtomTable& atoms) {
  if (rule.kind != RuleKind::Choice) return {rule};
  std::vector<Rule> out;
  for (Var h : rule.head) {
    Var shadow = atoms.add(AtomKind::Auxiliary);
    Rule pos{RuleKind::Normal, {h}, rule.body};
    pos.body.push_back(Lit::neg(shadow));
    Rule neg{RuleKind::Normal, {shadow}, rule.body};
    neg.body.push_back(Lit::neg(h));
    out.push_back(std::move(pos));
    out.push_back(std::move(neg));
  }
  return out;
}

DontCareResult detect_dont_care(std::span<const Rule> rules, std::span<const Var> candidates,
                                AtomTable& atoms, std::optional<Lit> activation) {
  struct Occurrence {
    bool positive = false;
    bool negative = false;
    bool blocked = false;
    std::vector<std::size_t> rules;
  };
  std::unordered_map<Var, Occurrence> occ;
  for (Var c : candidates) occ[c];
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule& r = rules[i];
    for (Var h : r.head) {
      if (auto it = occ.find(h); it != occ.end()) it->second.blocked = true;
    }
    for (Lit l : r.body) {
      auto it = occ.find(l.var());
      if (it == occ.end()) continue;
      if (r.kind != RuleKind::Integrity || r.body.size() < 2) {
        it->second.blocked = true;
        continue;
      }
      (l.positive() ? it->second.positive : it->second.negative) = true;
      it->second.rules.push_back(i);
    }
  }
  DontCareResult res;
  std::vector<bool> taken(rules.size(), false);
  std::map<std::vector<Lit>, Lit> helpers;
  for (Var c : candidates) {
    const Occurrence& o = occ[c];
    if (o.blocked || o.rules.empty() || (o.positive && o.negative)) continue;
    bool clash = std::any_of(o.rules.begin(), o.rules.end(),
                             [&](std::size_t i) { return taken[i]; });
    if (clash) continue;
    for (std::size_t i : o.rules) taken[i] = true;
    // `not c` in a constraint demands c: keep T c => gamma and fix c false
    // when nothing demands it; the other way round for `c`.
    Half half = o.negative ? Half::TrueOnly : Half::FalseOnly;
    res.atoms.push_back({c, half});
    Rule guard{RuleKind::Integrity, {}, {half == Half::TrueOnly ? Lit::pos(c) : Lit::neg(c)}};
    for (std::size_t i : o.rules) {
      std::vector<Lit> rest;
      for (Lit l : rules[i].body) {
        if (l.var() != c) rest.push_back(l);
      }
      std::sort(rest.begin(), rest.end());
      Lit active;
      if (rest.size() == 1) {
        active = rest.front();
      } else if (auto it = helpers.find(rest); it != helpers.end()) {
        active = it->second;
      } else {
        Var b = atoms.add(AtomKind::Auxiliary);
        res.rules.push_back({RuleKind::Normal, {b}, rest});
        active = Lit::pos(b);
        helpers.emplace(rest, active);
      }
      guard.body.push_back(~active);
    }
    if (activation) guard.body.push_back(*activation);
    res.rules.push_back(std::move(guard));
  }
  return res;
}

DependencyInfo tightness_check(std::span<const Rule> rules, std::size_t num_atoms) {
  std::vector<std::vector<Var>> succ(num_atoms);
  for (const Rule& r : rules) {
    if (r.kind != RuleKind::Normal) continue;
    for (Lit l : r.body) {
      if (l.positive() && l.var() != kTrueAtom) succ[r.head.front()].push_back(l.var());
    }
  }
  DependencyInfo info;
  info.component.assign(num_atoms, DependencyInfo::kNoComponent);
  // Iterative Tarjan.
  constexpr std::uint32_t kUnseen = ~std::uint32_t(0);
  std::vector<std::uint32_t> index(num_atoms, kUnseen);
  std::vector<std::uint32_t> low(num_atoms, 0);
  std::vector<bool> on_stack(num_atoms, false);
  std::vector<Var> stack;
  std::vector<std::pair<Var, std::size_t>> work;
  std::uint32_t counter = 0;
  for (Var root = 0; root < num_atoms; ++root) {
    if (index[root] != kUnseen || succ[root].empty()) continue;
    work.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!work.empty()) {
      auto& [v, pos] = work.back();
      if (pos < succ[v].size()) {
        Var w = succ[v][pos++];
        if (index[w] == kUnseen) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          work.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      Var done = v;
      work.pop_back();
      if (!work.empty()) {
        Var parent = work.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] != index[done]) continue;
      std::vector<Var> comp;
      Var w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != done);
      bool self_loop = std::find(succ[done].begin(), succ[done].end(), done) != succ[done].end();
      if (comp.size() > 1 || self_loop) {
        for (Var a : comp) info.component[a] = info.num_components;
        ++info.num_components;
        info.tight = false;
      }
    }
  }
  return info;
}

}  // namespace lazycasp
