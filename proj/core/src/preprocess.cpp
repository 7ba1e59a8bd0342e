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

#include "lazycasp/preprocess.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace lazycasp {

namespace {

Int abs_int(Int v) { return v < 0 ? -v : v; }

std::vector<Term> merge_terms(const std::vector<Term>& terms) {
  std::vector<Term> out;
  std::unordered_map<VarId, std::size_t> pos;
  for (const Term& t : terms) {
    auto it = pos.find(t.var);
    if (it == pos.end()) {
      pos.emplace(t.var, out.size());
      out.push_back(t);
    } else {
      out[it->second].coef = checked_add(out[it->second].coef, t.coef);
    }
  }
  std::erase_if(out, [](const Term& t) { return t.coef == 0; });
  return out;
}

std::vector<Term> negated(std::vector<Term> terms) {
  for (Term& t : terms) t.coef = -t.coef;
  return terms;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

std::uint64_t split_estimate(std::span<const Term> terms, const VariableTable& vars) {
  std::uint64_t est = 1;
  for (std::size_t i = 0; i + 1 < terms.size(); ++i) {
    est = saturating_mul(est, vars.domain(terms[i].var).size());
  }
  return est;
}

Var new_constraint_atom(AtomTable& atoms) { return atoms.add(AtomKind::Constraint); }
Var new_aux_atom(AtomTable& atoms) { return atoms.add(AtomKind::Auxiliary); }

// view <= d as a linear constraint over the view's variable.
LinearConstraint view_le(const View& v, Int d) {
  return normalize_linear({{v.coef, v.var}}, checked_sub(d, v.offset));
}

// view >= d
LinearConstraint view_ge(const View& v, Int d) {
  return normalize_linear({{-v.coef, v.var}}, checked_sub(v.offset, d));
}

// Lazily created eq(i, d) atoms of a distinct constraint.
class EqualityAtoms {
 public:
  EqualityAtoms(std::span<const View> views, AtomTable& atoms, Lowering& out)
      : views_(views), atoms_(atoms), out_(out) {}

  Lit get(std::size_t i, Int d) {
    auto key = std::make_pair(i, d);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    Var le = new_constraint_atom(atoms_);
    Var ge = new_constraint_atom(atoms_);
    out_.linear.push_back({le, view_le(views_[i], d), Half::Both});
    out_.linear.push_back({ge, view_ge(views_[i], d), Half::Both});
    Var eq = new_aux_atom(atoms_);
    out_.rules.push_back({RuleKind::Normal, {eq}, {Lit::pos(le), Lit::pos(ge)}});
    out_.defined.push_back(eq);
    cache_.emplace(key, Lit::pos(eq));
    return Lit::pos(eq);
  }

 private:
  std::span<const View> views_;
  AtomTable& atoms_;
  Lowering& out_;
  std::map<std::pair<std::size_t, Int>, Lit> cache_;
};

// Values of the union of images, if it has at most `cap` of them.
std::optional<std::vector<Int>> union_values(std::span<const View> views,
                                             const VariableTable& vars, std::size_t cap) {
  std::vector<Int> out;
  ExtInt cur = ExtInt::neg_inf();
  for (;;) {
    ExtInt best = ExtInt::pos_inf();
    for (const View& v : views) {
      ExtInt n = view_step(cur, v, vars.domain(v.var), Step::Next);
      if (n < best) best = n;
    }
    if (!best.finite()) return out;
    if (out.size() == cap) return std::nullopt;
    out.push_back(best.value());
    cur = best;
  }
}

bool image_contains(const View& v, const VariableTable& vars, Int d) {
  Int rel = d - v.offset;
  if (rel % v.coef != 0) return false;
  return vars.domain(v.var).contains(rel / v.coef);
}

}  // namespace

LinearConstraint normalize_linear(std::vector<Term> terms, Int bound) {
  LinearConstraint out;
  out.terms = merge_terms(terms);
  out.bound = bound;
  Int g = 0;
  for (const Term& t : out.terms) g = std::gcd(g, abs_int(t.coef));
  if (g > 1) {
    for (Term& t : out.terms) t.coef /= g;
    out.bound = floor_div(bound, g);
  }
  return out;
}

NormalizedSum normalize_constraint(const SumConstraint& sum) {
  NormalizedSum out;
  const Int rhs = sum.rhs;
  switch (sum.rel) {
    case Relation::Le:
      out.parts.push_back(normalize_linear(sum.terms, rhs));
      break;
    case Relation::Lt:
      out.parts.push_back(normalize_linear(sum.terms, checked_sub(rhs, 1)));
      break;
    case Relation::Ge:
      out.parts.push_back(normalize_linear(negated(sum.terms), -rhs));
      break;
    case Relation::Gt:
      out.parts.push_back(normalize_linear(negated(sum.terms), checked_sub(-rhs, 1)));
      break;
    case Relation::Eq:
    case Relation::Ne:
      out.glue = sum.rel == Relation::Eq ? NormalizedSum::Glue::Conjunction
                                         : NormalizedSum::Glue::NegatedConjunction;
      out.parts.push_back(normalize_linear(sum.terms, rhs));
      out.parts.push_back(normalize_linear(negated(sum.terms), -rhs));
      break;
  }
  return out;
}

void sort_terms(LinearConstraint& c, const VariableTable& vars, const PreprocessConfig& cfg) {
  auto dom_key = [&](const Term& t) { return vars.domain(t.var).size(); };
  auto coef_key = [](const Term& t) { return abs_int(t.coef); };
  auto by_dom = [&](const Term& a, const Term& b) {
    if (dom_key(a) == dom_key(b)) return false;
    return cfg.sort_descend_domain ? dom_key(a) > dom_key(b) : dom_key(a) < dom_key(b);
  };
  auto by_coef = [&](const Term& a, const Term& b) {
    if (coef_key(a) == coef_key(b)) return false;
    return cfg.sort_descend_coefficient ? coef_key(a) > coef_key(b) : coef_key(a) < coef_key(b);
  };
  std::stable_sort(c.terms.begin(), c.terms.end(), [&](const Term& a, const Term& b) {
    if (cfg.sort_coefficient) {
      if (by_coef(a, b) || by_coef(b, a)) return by_coef(a, b);
      return by_dom(a, b);
    }
    if (by_dom(a, b) || by_dom(b, a)) return by_dom(a, b);
    return by_coef(a, b);
  });
}

DomainSet propagate_domains(std::span<const Term> terms, const VariableTable& vars,
                            std::int64_t threshold) {
  Int lo = 0;
  Int hi = 0;
  for (const Term& t : terms) {
    auto [l, h] = view_bounds({t.coef, t.var, 0}, vars.domain(t.var));
    lo = checked_add(lo, l);
    hi = checked_add(hi, h);
  }
  DomainSet bounds(lo, hi);
  if (threshold == 0) return bounds;
  const std::uint64_t limit = threshold < 0 ? (std::uint64_t(1) << 24)
                                            : static_cast<std::uint64_t>(threshold);
  DomainSet acc(0, 0);
  for (const Term& t : terms) {
    const DomainSet& dom = vars.domain(t.var);
    if (abs_int(t.coef) > 1 && dom.size() > limit) return bounds;
    DomainSet img = view_image({t.coef, t.var, 0}, dom);
    const std::uint64_t pairs = saturating_mul(acc.ranges().size(), img.ranges().size());
    if (pairs > (std::uint64_t(1) << 22)) return bounds;
    std::vector<Range> sums;
    sums.reserve(pairs);
    for (const Range& a : acc.ranges()) {
      for (const Range& b : img.ranges()) sums.push_back({a.lo + b.lo, a.hi + b.hi});
    }
    acc = DomainSet::from_ranges(std::move(sums));
    if (threshold > 0 && acc.size() > limit) return bounds;
  }
  return acc;
}

std::optional<Int> nth_smallest_in_union(std::span<const View> views, const VariableTable& vars,
                                         std::size_t n) {
  ExtInt cur = ExtInt::neg_inf();
  for (std::size_t k = 0; k < n; ++k) {
    ExtInt best = ExtInt::pos_inf();
    for (const View& v : views) {
      ExtInt s = view_step(cur, v, vars.domain(v.var), Step::Next);
      if (s < best) best = s;
    }
    if (!best.finite()) return std::nullopt;
    cur = best;
  }
  if (!cur.finite()) return std::nullopt;
  return cur.value();
}

std::optional<Int> nth_largest_in_union(std::span<const View> views, const VariableTable& vars,
                                        std::size_t n) {
  ExtInt cur = ExtInt::pos_inf();
  for (std::size_t k = 0; k < n; ++k) {
    ExtInt best = ExtInt::neg_inf();
    for (const View& v : views) {
      ExtInt s = view_step(cur, v, vars.domain(v.var), Step::Prev);
      if (best < s) best = s;
    }
    if (!best.finite()) return std::nullopt;
    cur = best;
  }
  if (!cur.finite()) return std::nullopt;
  return cur.value();
}

Lowering strengthen_distinct(Var atom, const DistinctConstraint& dist, const VariableTable& vars,
                             AtomTable& atoms, const PreprocessConfig& cfg) {
  Lowering out;
  const auto& views = dist.views;
  const std::size_t n = views.size();
  if (n < 2) return out;
  if (cfg.distinct_pigeon) {
    auto u = nth_largest_in_union(views, vars, n);
    auto l = nth_smallest_in_union(views, vars, n);
    if (!u || !l) {
      out.rules.push_back({RuleKind::Integrity, {}, {Lit::pos(atom)}});
      return out;
    }
    // :- c, w1 > u, ..., wn > u   unless some wi can never exceed u
    Rule above{RuleKind::Integrity, {}, {Lit::pos(atom)}};
    Rule below{RuleKind::Integrity, {}, {Lit::pos(atom)}};
    bool above_possible = true;
    bool below_possible = true;
    for (const View& v : views) {
      auto [lo, hi] = view_bounds(v, vars.domain(v.var));
      above_possible = above_possible && hi > *u;
      below_possible = below_possible && lo < *l;
    }
    if (above_possible) {
      for (const View& v : views) {
        Var gt = new_constraint_atom(atoms);
        out.linear.push_back({gt, view_ge(v, checked_add(*u, 1)), Half::Both});
        above.body.push_back(Lit::pos(gt));
      }
      out.rules.push_back(std::move(above));
    }
    if (below_possible) {
      for (const View& v : views) {
        Var lt = new_constraint_atom(atoms);
        out.linear.push_back({lt, view_le(v, checked_sub(*l, 1)), Half::Both});
        below.body.push_back(Lit::pos(lt));
      }
      out.rules.push_back(std::move(below));
    }
  }
  if (cfg.distinct_permutation) {
    auto values = union_values(views, vars, n);
    if (values && values->size() == n) {
      EqualityAtoms eq(views, atoms, out);
      for (Int d : *values) {
        Rule r{RuleKind::Integrity, {}, {Lit::pos(atom)}};
        for (std::size_t i = 0; i < n; ++i) {
          if (image_contains(views[i], vars, d)) r.body.push_back(~eq.get(i, d));
        }
        out.rules.push_back(std::move(r));
      }
    }
  }
  return out;
}

Lowering lower_distinct(Var atom, const DistinctConstraint& dist, const VariableTable& vars,
                        AtomTable& atoms, const PreprocessConfig& cfg) {
  Lowering out;
  out.defined.push_back(atom);
  const auto& views = dist.views;
  const std::size_t n = views.size();
  std::optional<std::vector<Int>> values;
  if (cfg.distinct_to_card) values = union_values(views, vars, 100000);
  if (values) {
    // c :- not c'.  c' :- eq(i,d), eq(j,d).
    EqualityAtoms eq(views, atoms, out);
    Var clash = new_aux_atom(atoms);
    out.defined.push_back(clash);
    for (Int d : *values) {
      std::vector<std::size_t> holders;
      for (std::size_t i = 0; i < n; ++i) {
        if (image_contains(views[i], vars, d)) holders.push_back(i);
      }
      for (std::size_t a = 0; a < holders.size(); ++a) {
        for (std::size_t b = a + 1; b < holders.size(); ++b) {
          out.rules.push_back(
              {RuleKind::Normal, {clash}, {eq.get(holders[a], d), eq.get(holders[b], d)}});
        }
      }
    }
    out.rules.push_back({RuleKind::Normal, {atom}, {Lit::neg(clash)}});
  } else {
    Rule all{RuleKind::Normal, {atom}, {}};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const View& wi = views[i];
        const View& wj = views[j];
        Var lt = new_constraint_atom(atoms);
        Var gt = new_constraint_atom(atoms);
        // wi - wj <= -1 and wj - wi <= -1
        out.linear.push_back(
            {lt,
             normalize_linear({{wi.coef, wi.var}, {-wj.coef, wj.var}},
                              checked_add(checked_sub(-1, wi.offset), wj.offset)),
             Half::Both});
        out.linear.push_back(
            {gt,
             normalize_linear({{wj.coef, wj.var}, {-wi.coef, wi.var}},
                              checked_add(checked_sub(-1, wj.offset), wi.offset)),
             Half::Both});
        Var neq = new_aux_atom(atoms);
        out.rules.push_back({RuleKind::Normal, {neq}, {Lit::pos(lt)}});
        out.rules.push_back({RuleKind::Normal, {neq}, {Lit::pos(gt)}});
        out.defined.push_back(neq);
        all.body.push_back(Lit::pos(neq));
      }
    }
    out.rules.push_back(std::move(all));
  }
  Lowering extra = strengthen_distinct(atom, dist, vars, atoms, cfg);
  out.rules.insert(out.rules.end(), extra.rules.begin(), extra.rules.end());
  out.linear.insert(out.linear.end(), extra.linear.begin(), extra.linear.end());
  out.defined.insert(out.defined.end(), extra.defined.begin(), extra.defined.end());
  return out;
}

Lowering lower_distinct_demanded(Var atom, const DistinctConstraint& dist,
                                 const VariableTable& vars, AtomTable& atoms,
                                 const PreprocessConfig& cfg) {
  Lowering out;
  const auto& views = dist.views;
  for (std::size_t i = 0; i < views.size(); ++i) {
    for (std::size_t j = i + 1; j < views.size(); ++j) {
      const View& wi = views[i];
      const View& wj = views[j];
      Var lt = new_constraint_atom(atoms);
      Var gt = new_constraint_atom(atoms);
      out.linear.push_back(
          {lt,
           normalize_linear({{wi.coef, wi.var}, {-wj.coef, wj.var}},
                            checked_add(checked_sub(-1, wi.offset), wj.offset)),
           Half::TrueOnly});
      out.linear.push_back(
          {gt,
           normalize_linear({{wj.coef, wj.var}, {-wi.coef, wi.var}},
                            checked_add(checked_sub(-1, wj.offset), wi.offset)),
           Half::TrueOnly});
      // :- c, not wi < wj, not wi > wj; both atoms only need T => constraint
      out.rules.push_back({RuleKind::Integrity, {}, {Lit::pos(atom), Lit::neg(lt), Lit::neg(gt)}});
      // and are fixed false with the distinct atom
      out.rules.push_back({RuleKind::Integrity, {}, {Lit::pos(lt), Lit::neg(atom)}});
      out.rules.push_back({RuleKind::Integrity, {}, {Lit::pos(gt), Lit::neg(atom)}});
    }
  }
  Lowering extra = strengthen_distinct(atom, dist, vars, atoms, cfg);
  out.rules.insert(out.rules.end(), extra.rules.begin(), extra.rules.end());
  out.linear.insert(out.linear.end(), extra.linear.begin(), extra.linear.end());
  out.defined.insert(out.defined.end(), extra.defined.begin(), extra.defined.end());
  return out;
}

namespace {

struct Splitter {
  int alpha;
  std::int64_t beta;
  bool break_symmetries;
  std::int64_t domain_size;
  VariableTable& vars;
  SplitResult& res;

  std::vector<Term> run(std::vector<Term> terms) {
    if (static_cast<int>(terms.size()) <= alpha) return terms;
    if (beta >= 0 && split_estimate(terms, vars) <= static_cast<std::uint64_t>(beta)) {
      return terms;
    }
    const std::size_t n = terms.size();
    const std::size_t groups = static_cast<std::size_t>(alpha);
    std::vector<Term> out;
    std::size_t start = 0;
    for (std::size_t g = 0; g < groups; ++g) {
      std::size_t len = n / groups + (g < n % groups ? 1 : 0);
      std::vector<Term> chunk(terms.begin() + static_cast<std::ptrdiff_t>(start),
                              terms.begin() + static_cast<std::ptrdiff_t>(start + len));
      start += len;
      if (chunk.size() == 1) {
        out.push_back(chunk.front());
        continue;
      }
      std::vector<Term> inner = run(chunk);
      DomainSet dom = propagate_domains(inner, vars, domain_size);
      VarId aux = vars.add({}, dom, true);
      res.aux_vars.push_back(aux);
      // sum(inner) <= aux, and aux <= sum(inner) when breaking symmetries
      std::vector<Term> def = inner;
      def.push_back({-1, aux});
      res.definitions.push_back({def, 0});
      if (break_symmetries) res.definitions.push_back({negated(def), 0});
      out.push_back({1, aux});
    }
    return out;
  }
};

}  // namespace

SplitResult split_constraint(const LinearConstraint& c, int alpha, std::int64_t beta,
                             bool break_symmetries, std::int64_t domain_size,
                             VariableTable& vars) {
  SplitResult res;
  res.top = c;
  if (alpha < 2) return res;
  Splitter s{alpha, beta, break_symmetries, domain_size, vars, res};
  res.top.terms = s.run(c.terms);
  return res;
}

Int apply_substitutions(std::vector<Term>& terms, Int& rhs, const PreprocessState& state) {
  Int total = 1;
  for (const Substitution& s : state.substitutions) {
    terms = merge_terms(terms);
    auto it = std::find_if(terms.begin(), terms.end(), [&](const Term& t) { return t.var == s.y; });
    if (it == terms.end()) continue;
    const Int k = it->coef;
    terms.erase(it);
    const Int g = std::gcd(abs_int(s.b), abs_int(k));
    const Int m = abs_int(s.b) / g;
    for (Term& t : terms) t.coef = checked_mul(t.coef, m);
    rhs = checked_mul(rhs, m);
    // k*m*y = q * (a*x - c) with q = k*m/b
    const Int q = checked_mul(k, m) / s.b;
    terms.push_back({checked_mul(q, s.a), s.x});
    rhs = checked_add(rhs, checked_mul(q, s.c));
    total = checked_mul(total, m);
  }
  terms = merge_terms(terms);
  return total;
}

Int PreprocessState::reconstruct(VarId v, const std::vector<Int>& values) const {
  for (const Substitution& s : substitutions) {
    if (s.y != v) continue;
    Int x = is_eliminated(s.x) ? reconstruct(s.x, values) : values[s.x];
    return (checked_sub(checked_mul(s.a, x), s.c)) / s.b;
  }
  return values[v];
}

std::vector<ObjectiveTerm> flatten_objective(std::span<const ObjectiveTerm> objective,
                                             const PreprocessState& state, bool flatten) {
  std::vector<ObjectiveTerm> out;
  for (const ObjectiveTerm& t : objective) {
    std::vector<Term> terms{{t.view.coef, t.view.var}};
    Int offset = t.view.offset;
    for (const Substitution& s : state.substitutions) {
      std::vector<Term> next;
      for (const Term& term : terms) {
        if (term.var != s.y) {
          next.push_back(term);
          continue;
        }
        // k*y = (k*a/b) x - k*c/b
        const Int ka = checked_mul(term.coef, s.a);
        const Int kc = checked_mul(term.coef, s.c);
        if (ka % s.b != 0 || kc % s.b != 0) {
          throw Error("objective term over an eliminated variable has no integral form");
        }
        next.push_back({ka / s.b, s.x});
        offset = checked_sub(offset, kc / s.b);
      }
      terms = merge_terms(next);
    }
    if (flatten) {
      std::vector<Term> next;
      for (const Term& term : terms) {
        bool replaced = false;
        for (const DecidedEquality& eq : state.equalities) {
          auto it = std::find_if(eq.terms.begin(), eq.terms.end(),
                                 [&](const Term& e) { return e.var == term.var; });
          if (it == eq.terms.end() || eq.terms.size() < 2 || abs_int(it->coef) != 1) continue;
          // y = e * (rhs - sum of the others)
          const Int e = it->coef;
          const Int k = checked_mul(term.coef, e);
          offset = checked_add(offset, checked_mul(k, eq.rhs));
          for (const Term& o : eq.terms) {
            if (o.var != term.var) next.push_back({checked_mul(-k, o.coef), o.var});
          }
          replaced = true;
          break;
        }
        if (!replaced) next.push_back(term);
      }
      terms = merge_terms(next);
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      out.push_back({{terms[i].coef, terms[i].var, i == 0 ? offset : 0}, t.level});
    }
    if (terms.empty() && offset != 0) {
      // constant objective contribution needs a carrier view
      throw Error("constant objective terms are not supported");
    }
  }
  return out;
}

namespace {

struct Item {
  Var atom;
  std::vector<Term> terms;
  Relation rel;
  Int rhs;
  int decided;  // +1 true, -1 false, 0 open
  bool removed = false;
};

// {d in dom(x) | a*d - c = b*e for some e in dom(y)}, or nullopt if too
// expensive to compute.
std::optional<DomainSet> restrict_domain(const DomainSet& dx, const DomainSet& dy, Int a, Int b,
                                         Int c) {
  constexpr std::uint64_t kMaxEnum = 1u << 20;
  if (abs_int(b) == 1) {
    // a*d in b*dom(y) + c
    DomainSet target = dy.scale(b).shift(c);
    std::vector<Range> ranges;
    for (const Range& r : target.ranges()) ranges.push_back({ceil_div(r.lo, a), floor_div(r.hi, a)});
    return dx.intersect(DomainSet::from_ranges(std::move(ranges)));
  }
  std::vector<Int> values;
  auto accept = [&](Int d) {
    Int rel = checked_sub(checked_mul(a, d), c);
    if (rel % b == 0 && dy.contains(rel / b)) values.push_back(d);
  };
  if (dx.size() <= kMaxEnum) {
    for (const Range& r : dx.ranges()) {
      for (Int d = r.lo;; ++d) {
        accept(d);
        if (d == r.hi) break;
      }
    }
    return DomainSet::from_values(std::move(values));
  }
  if (dy.size() <= kMaxEnum) {
    for (const Range& r : dy.ranges()) {
      for (Int e = r.lo;; ++e) {
        Int num = checked_add(checked_mul(b, e), c);
        if (num % a == 0 && dx.contains(num / a)) values.push_back(num / a);
        if (e == r.hi) break;
      }
    }
    return DomainSet::from_values(std::move(values));
  }
  return std::nullopt;
}

class PartProcessor {
 public:
  PartProcessor(GroundProgram& prog, const PartDelta& delta, const PreprocessConfig& cfg,
                PreprocessState& state)
      : prog_(prog), delta_(delta), cfg_(cfg), state_(state) {}

  PreprocessedPart run(std::optional<Lit> activation) {
    activation_ = activation;
    state_.eliminated.resize(prog_.vars.size(), false);
    collect_rules();
    find_decided();
    collect_items();
    if (res_.unsat) return std::move(res_);
    if (cfg_.equality_processing) eliminate_equalities();
    if (res_.unsat) return std::move(res_);
    record_equalities();
    emit_items();
    if (cfg_.split_size > 0) split_all();
    for (LinearAtom& la : res_.linear) sort_terms(la.con, prog_.vars, cfg_);
    if (cfg_.dont_care_propagation) dont_care(activation);
    return std::move(res_);
  }

 private:
  bool fresh(VarId v) const { return v >= delta_.first_var && !prog_.vars[v].auxiliary; }

  void collect_rules() {
    for (std::size_t i = delta_.first_rule; i < prog_.rules.size(); ++i) {
      for (Rule& r : desugar_choice(prog_.rules[i], prog_.atoms)) {
        res_.rules.push_back(std::move(r));
      }
    }
    for (const Rule& r : res_.rules) {
      for (Var h : r.head) {
        if (prog_.atoms[h].kind == AtomKind::Auxiliary) res_.defined.push_back(h);
      }
    }
    std::sort(res_.defined.begin(), res_.defined.end());
    res_.defined.erase(std::unique(res_.defined.begin(), res_.defined.end()), res_.defined.end());
  }

  void find_decided() {
    for (const Rule& r : res_.rules) {
      if (r.kind != RuleKind::Integrity || r.body.size() != 1) continue;
      Lit l = r.body.front();
      if (prog_.atoms[l.var()].kind != AtomKind::Constraint) continue;
      int v = l.positive() ? -1 : +1;
      auto [it, inserted] = decided_.emplace(l.var(), v);
      if (!inserted && it->second != v) it->second = 2;  // both: contradictory, keep open
    }
    for (auto& [atom, v] : decided_) {
      if (v == 2) v = 0;
    }
  }

  int decided(Var a) const {
    auto it = decided_.find(a);
    return it == decided_.end() ? 0 : it->second;
  }

  void add_lowering(Lowering&& low) {
    res_.rules.insert(res_.rules.end(), low.rules.begin(), low.rules.end());
    res_.defined.insert(res_.defined.end(), low.defined.begin(), low.defined.end());
    for (LinearAtom& la : low.linear) {
      const int half = la.half == Half::TrueOnly ? 1 : la.half == Half::FalseOnly ? -1 : 0;
      items_.push_back({la.atom, la.con.terms, Relation::Le, la.con.bound, half});
    }
  }

  void collect_items() {
    for (std::size_t i = delta_.first_constraint; i < prog_.constraints.size(); ++i) {
      const ConstraintEntry& e = prog_.constraints[i];
      if (const auto* sum = std::get_if<SumConstraint>(&e.def)) {
        items_.push_back({e.atom, sum->terms, sum->rel, sum->rhs, decided(e.atom)});
        user_items_.insert(e.atom);
      } else if (const auto* dom = std::get_if<DomainConstraint>(&e.def)) {
        lower_domain(e.atom, *dom);
      } else {
        const auto& dist = std::get<DistinctConstraint>(e.def);
        if (demanded_only(e.atom)) {
          add_lowering(lower_distinct_demanded(e.atom, dist, prog_.vars, prog_.atoms, cfg_));
        } else {
          add_lowering(lower_distinct(e.atom, dist, prog_.vars, prog_.atoms, cfg_));
        }
      }
      if (res_.unsat) return;
    }
  }

  // A distinct atom that user rules only demand (`not c` in integrity
  // constraints) needs T c => distinct alone; c is then fixed false by a
  // guard while none of those constraints is active.
  bool demanded_only(Var atom) {
    if (!cfg_.dont_care_propagation || cfg_.distinct_to_card || decided(atom) != 0) return false;
    const Var cand[] = {atom};
    DontCareResult dc = detect_dont_care(res_.rules, cand, prog_.atoms, activation_);
    if (dc.atoms.empty() || dc.atoms.front().half != Half::TrueOnly) return false;
    for (const Rule& r : dc.rules) {
      for (Var h : r.head) res_.defined.push_back(h);
    }
    res_.rules.insert(res_.rules.end(), dc.rules.begin(), dc.rules.end());
    res_.dont_care_distinct.push_back(atom);
    return true;
  }

  void lower_domain(Var atom, const DomainConstraint& dc) {
    const View& v = dc.view;
    const DomainSet& dom = prog_.vars.domain(v.var);
    if (decided(atom) > 0 && fresh(v.var) && !state_.is_eliminated(v.var)) {
      // x in (values - offset) / coef
      std::vector<Range> pre;
      for (const Range& r : dc.values.ranges()) {
        Int lo = checked_sub(r.lo, v.offset);
        Int hi = checked_sub(r.hi, v.offset);
        if (v.coef > 0) {
          pre.push_back({ceil_div(lo, v.coef), floor_div(hi, v.coef)});
        } else {
          pre.push_back({ceil_div(hi, v.coef), floor_div(lo, v.coef)});
        }
      }
      DomainSet narrowed = dom.intersect(DomainSet::from_ranges(std::move(pre)));
      if (narrowed.empty()) res_.unsat = true;
      prog_.vars.set_domain(v.var, std::move(narrowed));
      return;
    }
    // atom :- view >= lo, view <= hi   for each range, merging ranges whose
    // gaps contain no image value
    res_.defined.push_back(atom);
    auto [ilo, ihi] = view_bounds(v, dom);
    std::vector<Range> ranges;
    const DomainSet clamped = dc.values.clamp(ilo, ihi);
    for (const Range& r : clamped.ranges()) {
      if (!ranges.empty()) {
        ExtInt nxt = view_step(ranges.back().hi, v, dom, Step::Next);
        if (!nxt.finite() || nxt.value() >= r.lo) {
          ranges.back().hi = r.hi;
          continue;
        }
      }
      ranges.push_back(r);
    }
    for (const Range& r : ranges) {
      Rule rule{RuleKind::Normal, {atom}, {}};
      if (r.lo > ilo) {
        Var ge = new_constraint_atom(prog_.atoms);
        items_.push_back({ge, {{-v.coef, v.var}}, Relation::Le, checked_sub(v.offset, r.lo), 0});
        rule.body.push_back(Lit::pos(ge));
      }
      if (r.hi < ihi) {
        Var le = new_constraint_atom(prog_.atoms);
        items_.push_back({le, {{v.coef, v.var}}, Relation::Le, checked_sub(r.hi, v.offset), 0});
        rule.body.push_back(Lit::pos(le));
      }
      res_.rules.push_back(std::move(rule));
    }
  }

  bool in_objective(VarId v) const {
    return std::any_of(prog_.objective.begin(), prog_.objective.end(),
                       [&](const ObjectiveTerm& t) { return t.view.var == v; });
  }

  void eliminate_equalities() {
    for (Item& it : items_) {
      apply_substitutions(it.terms, it.rhs, state_);
    }
    std::set<Var> rejected;
    bool changed = true;
    while (changed) {
      changed = false;
      for (Item& eq : items_) {
        if (eq.removed || rejected.count(eq.atom)) continue;
        bool equality = (eq.rel == Relation::Eq && eq.decided > 0) ||
                        (eq.rel == Relation::Ne && eq.decided < 0);
        if (!equality) continue;
        std::vector<Term> terms = merge_terms(eq.terms);
        if (terms.size() != 2) continue;
        if (terms[0].var > terms[1].var) std::swap(terms[0], terms[1]);
        const VarId x = terms[0].var;
        const VarId y = terms[1].var;
        if (!fresh(x) || !fresh(y) || in_objective(y)) {
          rejected.insert(eq.atom);
          continue;
        }
        // kx*x + ky*y = rhs  =>  a*x = b*y + c
        Int a = terms[0].coef;
        Int b = -terms[1].coef;
        Int c = eq.rhs;
        if (a < 0) {
          a = -a;
          b = -b;
          c = -c;
        }
        if (!try_eliminate(eq, x, y, a, b, c)) {
          rejected.insert(eq.atom);
          continue;
        }
        changed = true;
        if (res_.unsat) return;
      }
    }
  }

  bool try_eliminate(Item& eq, VarId x, VarId y, Int a, Int b, Int c) {
    std::optional<DomainSet> dom;
    std::vector<Item> rewritten = items_;
    PreprocessState single;
    single.substitutions.push_back({y, x, a, b, c});
    try {
      dom = restrict_domain(prog_.vars.domain(x), prog_.vars.domain(y), a, b, c);
      if (!dom) return false;
      for (Item& it : rewritten) {
        if (it.removed || it.atom == eq.atom) continue;
        apply_substitutions(it.terms, it.rhs, single);
      }
    } catch (const OverflowError&) {
      return false;
    }
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (items_[i].atom != eq.atom) {
        items_[i].terms = std::move(rewritten[i].terms);
        items_[i].rhs = rewritten[i].rhs;
      }
    }
    eq.removed = true;
    state_.substitutions.push_back({y, x, a, b, c});
    state_.eliminated[y] = true;
    ++res_.stats.eliminated_vars;
    if (dom->empty()) res_.unsat = true;
    prog_.vars.set_domain(x, std::move(*dom));
    return true;
  }

  void record_equalities() {
    for (const Item& it : items_) {
      if (it.removed) continue;
      bool equality = (it.rel == Relation::Eq && it.decided > 0) ||
                      (it.rel == Relation::Ne && it.decided < 0);
      if (equality) state_.equalities.push_back({merge_terms(it.terms), it.rhs});
    }
  }

  void emit(Var atom, LinearConstraint con, Half half) {
    res_.linear.push_back({atom, std::move(con), half});
    if (atom != kTrueAtom) linear_atoms_.push_back(atom);
  }

  void emit_items() {
    for (Item& it : items_) {
      if (it.removed) continue;
      NormalizedSum ns = normalize_constraint({it.terms, it.rel, it.rhs});
      const bool equality = (it.rel == Relation::Eq && it.decided > 0) ||
                            (it.rel == Relation::Ne && it.decided < 0);
      if (ns.glue == NormalizedSum::Glue::Single) {
        Half half = it.decided > 0 ? Half::TrueOnly : it.decided < 0 ? Half::FalseOnly : Half::Both;
        emit(it.atom, std::move(ns.parts.front()), half);
        continue;
      }
      if (equality) {
        // both parts hold; the atom itself is fixed by its integrity rule
        for (LinearConstraint& p : ns.parts) emit(kTrueAtom, std::move(p), Half::TrueOnly);
        continue;
      }
      Var c1 = new_constraint_atom(prog_.atoms);
      Var c2 = new_constraint_atom(prog_.atoms);
      emit(c1, std::move(ns.parts[0]), Half::Both);
      emit(c2, std::move(ns.parts[1]), Half::Both);
      res_.defined.push_back(it.atom);
      if (ns.glue == NormalizedSum::Glue::Conjunction) {
        res_.rules.push_back({RuleKind::Normal, {it.atom}, {Lit::pos(c1), Lit::pos(c2)}});
      } else {
        Var both = new_aux_atom(prog_.atoms);
        res_.defined.push_back(both);
        res_.rules.push_back({RuleKind::Normal, {both}, {Lit::pos(c1), Lit::pos(c2)}});
        res_.rules.push_back({RuleKind::Normal, {it.atom}, {Lit::neg(both)}});
      }
    }
  }

  void split_all() {
    std::vector<LinearAtom> out;
    auto push_split = [&](Var atom, const LinearConstraint& con, Half half) {
      LinearConstraint sorted = con;
      sort_terms(sorted, prog_.vars, cfg_);
      SplitResult s = split_constraint(sorted, cfg_.split_size, cfg_.max_nogoods_size,
                                       cfg_.break_symmetries, cfg_.domain_size, prog_.vars);
      res_.stats.split_aux_vars += s.aux_vars.size();
      for (LinearConstraint& d : s.definitions) {
        out.push_back({kTrueAtom, normalize_linear(d.terms, d.bound), Half::TrueOnly});
      }
      out.push_back({atom, std::move(s.top), half});
    };
    for (const LinearAtom& la : res_.linear) {
      if (cfg_.break_symmetries || la.half == Half::TrueOnly) {
        push_split(la.atom, la.con, la.half);
        continue;
      }
      // One chain per needed direction: the negation of c is split as its
      // own <= constraint and stored as the negation of the result.
      if (la.half == Half::Both) push_split(la.atom, la.con, Half::TrueOnly);
      LinearConstraint neg{negated(la.con.terms), checked_sub(-la.con.bound, 1)};
      push_split(la.atom, neg, Half::TrueOnly);
      LinearAtom& top = out.back();
      top.con = LinearConstraint{negated(top.con.terms), checked_sub(-top.con.bound, 1)};
      top.half = Half::FalseOnly;
    }
    res_.linear = std::move(out);
  }

  void dont_care(std::optional<Lit> activation) {
    std::vector<Var> candidates;
    std::set<Var> seen;
    for (const LinearAtom& la : res_.linear) {
      if (la.atom == kTrueAtom || la.half != Half::Both) continue;
      if (decided(la.atom) != 0) continue;
      if (!seen.insert(la.atom).second) continue;
      candidates.push_back(la.atom);
    }
    // atoms next to a demanded distinct atom keep both halves so that no
    // two guards depend on each other
    std::set<Var> blocked;
    const std::set<Var> demanded(res_.dont_care_distinct.begin(), res_.dont_care_distinct.end());
    for (const Rule& r : res_.rules) {
      bool near = std::any_of(r.body.begin(), r.body.end(),
                              [&](Lit l) { return !l.positive() && demanded.count(l.var()); });
      if (!near) continue;
      for (Lit l : r.body) blocked.insert(l.var());
    }
    std::erase_if(candidates, [&](Var c) { return blocked.count(c) > 0; });
    // atoms with more than one linear entry (split halves) are skipped
    DontCareResult dc = detect_dont_care(res_.rules, candidates, prog_.atoms, activation);
    std::map<Var, Half> halves;
    for (const DontCareAtom& d : dc.atoms) halves[d.atom] = d.half;
    for (LinearAtom& la : res_.linear) {
      if (auto it = halves.find(la.atom); it != halves.end()) la.half = it->second;
    }
    for (const Rule& r : dc.rules) {
      for (Var h : r.head) res_.defined.push_back(h);
    }
    res_.rules.insert(res_.rules.end(), dc.rules.begin(), dc.rules.end());
    res_.dont_care = std::move(dc.atoms);
    res_.stats.dont_care_atoms = res_.dont_care.size() + res_.dont_care_distinct.size();
  }

  GroundProgram& prog_;
  const PartDelta& delta_;
  const PreprocessConfig& cfg_;
  PreprocessState& state_;
  PreprocessedPart res_;
  std::map<Var, int> decided_;
  std::optional<Lit> activation_;
  std::vector<Item> items_;
  std::set<Var> user_items_;
  std::vector<Var> linear_atoms_;
};

}  // namespace

PreprocessedPart preprocess_part(GroundProgram& prog, const PartDelta& delta,
                                 const PreprocessConfig& cfg, PreprocessState& state,
                                 std::optional<Lit> activation) {
  PartProcessor proc(prog, delta, cfg, state);
  return proc.run(activation);
}

}  // namespace lazycasp
