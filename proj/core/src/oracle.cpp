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

#include "lazycasp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lazycasp {

Cost evaluate_objective(const GroundProgram& prog, std::span<const Int> values) {
  std::map<int, Int, std::greater<>> sums;
  for (const ObjectiveTerm& t : prog.objective) {
    sums[t.level] += view_value(t.view, values[t.view.var]);
  }
  Cost c;
  for (const auto& [level, v] : sums) {
    c.levels.push_back(level);
    c.values.push_back(v);
  }
  return c;
}

namespace {

class Checker {
 public:
  Checker(const GroundProgram& prog, const OracleOptions& opts) : prog_(prog) {
    std::size_t n = prog.atoms.size();
    candidate_index_.assign(n, -1);
    fixed_true_.assign(n, false);
    for (Var e : prog.externals) {
      auto it = opts.externals.find(e);
      if (it != opts.externals.end() && it->second) fixed_true_[e] = true;
    }
    std::set<Var> heads;
    for (const Rule& r : prog.rules) {
      for (Var h : r.head) heads.insert(h);
    }
    for (Var h : heads) {
      if (fixed_true_[h]) continue;
      candidate_index_[h] = static_cast<int>(candidates_.size());
      candidates_.push_back(h);
    }
    if (candidates_.size() > 30) throw OracleLimitExceeded("too many atoms for the oracle");
    constraint_value_.assign(n, false);
    in_x_.assign(n, false);
    derived_.assign(n, false);
  }

  std::size_t num_candidates() const { return candidates_.size(); }

  void set_assignment(std::span<const Int> values) {
    for (const ConstraintEntry& e : prog_.constraints) {
      constraint_value_[e.atom] = evaluate(e.def, values);
    }
  }

  // Whether the candidate set encoded by `mask` is a stable model.
  bool stable(std::uint64_t mask) {
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      in_x_[candidates_[i]] = ((mask >> i) & 1u) != 0;
    }
    for (std::size_t a = 0; a < fixed_true_.size(); ++a) {
      if (fixed_true_[a]) in_x_[a] = true;
    }
    for (const Rule& r : prog_.rules) {
      if (r.kind == RuleKind::Integrity && body_holds(r.body, in_x_)) return false;
    }
    // least model of the reduct
    std::fill(derived_.begin(), derived_.end(), false);
    for (std::size_t a = 0; a < fixed_true_.size(); ++a) derived_[a] = fixed_true_[a];
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Rule& r : prog_.rules) {
        if (r.kind == RuleKind::Integrity) continue;
        if (!reduct_body_holds(r.body)) continue;
        for (Var h : r.head) {
          if (derived_[h]) continue;
          if (r.kind == RuleKind::Choice && !in_x_[h]) continue;
          derived_[h] = true;
          changed = true;
        }
      }
    }
    for (Var c : candidates_) {
      if (derived_[c] != in_x_[c]) return false;
    }
    return true;
  }

  std::vector<Var> true_atoms() const {
    std::vector<Var> out;
    for (Var a = 0; a < in_x_.size(); ++a) {
      if (in_x_[a] && prog_.atoms[a].kind == AtomKind::Regular) out.push_back(a);
    }
    return out;
  }

 private:
  bool value(Lit l, const std::vector<bool>& x) const {
    Var a = l.var();
    bool v;
    if (a == kTrueAtom) {
      v = true;
    } else if (prog_.atoms[a].kind == AtomKind::Constraint) {
      v = constraint_value_[a];
    } else {
      v = x[a];
    }
    return v == l.positive();
  }

  bool body_holds(const std::vector<Lit>& body, const std::vector<bool>& x) const {
    return std::all_of(body.begin(), body.end(), [&](Lit l) { return value(l, x); });
  }

  // Negative literals and constraint literals are judged against the
  // candidate set; positive regular literals against the derived set.
  bool reduct_body_holds(const std::vector<Lit>& body) const {
    for (Lit l : body) {
      Var a = l.var();
      bool positive_regular = l.positive() && a != kTrueAtom &&
                              prog_.atoms[a].kind != AtomKind::Constraint;
      if (positive_regular ? !derived_[a] : !value(l, in_x_)) return false;
    }
    return true;
  }

  const GroundProgram& prog_;
  std::vector<Var> candidates_;
  std::vector<int> candidate_index_;
  std::vector<bool> fixed_true_;
  std::vector<bool> constraint_value_;
  std::vector<bool> in_x_;
  std::vector<bool> derived_;
};

}  // namespace

OracleResult oracle_solve(const GroundProgram& prog, const OracleOptions& opts) {
  Checker checker(prog, opts);
  const std::size_t nv = prog.vars.size();
  long double work = std::ldexp(1.0L, static_cast<int>(checker.num_candidates()));
  for (VarId v = 0; v < nv; ++v) work *= static_cast<long double>(prog.vars.domain(v).size());
  if (work > static_cast<long double>(opts.limit)) {
    throw OracleLimitExceeded("instance too large for the oracle");
  }
  OracleResult res;
  std::vector<std::uint64_t> rank(nv, 0);
  std::vector<Int> values(nv);
  for (VarId v = 0; v < nv; ++v) {
    if (prog.vars.domain(v).empty()) return res;
    values[v] = prog.vars.domain(v).lower();
  }
  const std::uint64_t subsets = std::uint64_t(1) << checker.num_candidates();
  for (;;) {
    checker.set_assignment(values);
    for (std::uint64_t mask = 0; mask < subsets; ++mask) {
      if (!checker.stable(mask)) continue;
      res.models.push_back({checker.true_atoms(), values});
      if (!prog.objective.empty()) {
        Cost c = evaluate_objective(prog, values);
        if (!res.optimum || c < *res.optimum) res.optimum = c;
      }
    }
    // next assignment, odometer style
    VarId v = 0;
    for (; v < nv; ++v) {
      const DomainSet& dom = prog.vars.domain(v);
      if (++rank[v] < dom.size()) {
        values[v] = dom.at(rank[v]);
        break;
      }
      rank[v] = 0;
      values[v] = dom.lower();
    }
    if (v == nv) break;
  }
  std::sort(res.models.begin(), res.models.end());
  return res;
}

NamedModel name_model(const GroundProgram& prog, const ProjectedModel& m) {
  NamedModel out;
  for (Var a : m.atoms) out.atoms.push_back(prog.atoms[a].name);
  std::sort(out.atoms.begin(), out.atoms.end());
  for (VarId v = 0; v < prog.vars.size() && v < m.values.size(); ++v) {
    if (!prog.vars[v].auxiliary) out.values.push_back(m.values[v]);
  }
  return out;
}

}  // namespace lazycasp
