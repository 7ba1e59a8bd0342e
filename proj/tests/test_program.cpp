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

#include <algorithm>
#include <random>
#include <set>

#include "catch_amalgamated.hpp"
#include "lazycasp/program.hpp"

using namespace lazycasp;

namespace {

bool violated(const Nogood& ng, const std::vector<bool>& value) {
  return std::all_of(ng.begin(), ng.end(), [&](Lit l) {
    bool v = l.var() == kTrueAtom ? true : value[l.var()];
    return v == l.positive();
  });
}

bool lit_true(Lit l, const std::vector<bool>& value) {
  bool v = l.var() == kTrueAtom ? true : value[l.var()];
  return v == l.positive();
}

// Projections onto atoms 1..n of all total assignments satisfying `ngs`.
std::set<std::vector<bool>> solutions(const std::vector<Nogood>& ngs, std::size_t total,
                                      std::size_t n) {
  std::set<std::vector<bool>> out;
  std::vector<bool> value(total, false);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << (total - 1)); ++m) {
    for (std::size_t i = 1; i < total; ++i) value[i] = (m >> (i - 1)) & 1;
    bool ok = std::none_of(ngs.begin(), ngs.end(), [&](const Nogood& ng) { return violated(ng, value); });
    if (ok) out.insert(std::vector<bool>(value.begin() + 1, value.begin() + 1 + n));
  }
  return out;
}

// Supported models straight from the definition.
std::set<std::vector<bool>> supported(const std::vector<Rule>& rules, std::size_t n) {
  std::set<std::vector<bool>> out;
  std::vector<bool> value(n + 1, false);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    for (std::size_t i = 1; i <= n; ++i) value[i] = (m >> (i - 1)) & 1;
    bool ok = true;
    std::vector<bool> has_support(n + 1, false);
    for (const Rule& r : rules) {
      bool body = std::all_of(r.body.begin(), r.body.end(), [&](Lit l) { return lit_true(l, value); });
      if (r.kind == RuleKind::Integrity && body) ok = false;
      if (r.kind == RuleKind::Normal && body) {
        if (!value[r.head.front()]) ok = false;
        has_support[r.head.front()] = true;
      }
      if (r.kind == RuleKind::Choice && body) {
        for (Var h : r.head) has_support[h] = true;
      }
    }
    for (std::size_t i = 1; i <= n && ok; ++i) {
      if (value[i] && !has_support[i]) ok = false;
    }
    if (ok) out.insert(std::vector<bool>(value.begin() + 1, value.end()));
  }
  return out;
}

bool contains(const std::vector<Nogood>& ngs, Nogood want) {
  std::sort(want.begin(), want.end());
  return std::any_of(ngs.begin(), ngs.end(), [&](Nogood ng) {
    std::sort(ng.begin(), ng.end());
    return ng == want;
  });
}

}  // namespace

TEST_CASE("atom table names and kinds", "[program]") {
  AtomTable atoms;
  CHECK(atoms.size() == 1);
  Var a = atoms.add(AtomKind::Regular, "a");
  Var b = atoms.add(AtomKind::Constraint, "x>7");
  CHECK(atoms.find("a") == a);
  CHECK(atoms.find("x>7") == b);
  CHECK_FALSE(atoms.find("zz").has_value());
  CHECK(atoms[b].kind == AtomKind::Constraint);
  Var o = atoms.add_order(3, 5);
  CHECK(atoms[o].kind == AtomKind::Order);
  CHECK(atoms[o].var == 3);
  CHECK(atoms[o].threshold == 5);
}

TEST_CASE("completion of a :- not b", "[program]") {
  AtomTable atoms;
  Var a = atoms.add(AtomKind::Regular, "a");
  Var b = atoms.add(AtomKind::Regular, "b");
  BodyTable bodies;
  std::vector<Rule> rules{{RuleKind::Normal, {a}, {Lit::neg(b)}}};
  std::vector<Var> complete{a, b};
  auto ngs = completion_nogoods(rules, complete, atoms, bodies);
  // a holds iff b does not; b has no rule.
  CHECK(contains(ngs, {Lit::pos(a), Lit::pos(b)}));
  CHECK(contains(ngs, {Lit::neg(a), Lit::neg(b)}));
  CHECK(contains(ngs, {Lit::pos(b)}));
  CHECK(ngs.size() == 3);
  CHECK(bodies.size() == 0);
}

TEST_CASE("constraint atoms get no support nogood", "[program]") {
  AtomTable atoms;
  Var a = atoms.add(AtomKind::Regular, "a");
  Var c = atoms.add(AtomKind::Constraint, "x<=3");
  BodyTable bodies;
  std::vector<Rule> rules{{RuleKind::Normal, {a}, {Lit::pos(c)}},
                          {RuleKind::Integrity, {}, {Lit::neg(a)}}};
  std::vector<Var> complete{a};
  auto ngs = completion_nogoods(rules, complete, atoms, bodies);
  for (const Nogood& ng : ngs) {
    CHECK(ng != Nogood{Lit::pos(c)});
  }
  CHECK(contains(ngs, {Lit::neg(a)}));
  CHECK(contains(ngs, {Lit::neg(a), Lit::pos(c)}));
  CHECK(contains(ngs, {Lit::pos(a), Lit::neg(c)}));

  std::vector<Rule> bad{{RuleKind::Normal, {c}, {Lit::pos(a)}}};
  std::vector<Var> none;
  CHECK_THROWS_AS(completion_nogoods(bad, none, atoms, bodies), ContractViolation);
}

TEST_CASE("bodies are hash-consed", "[program]") {
  AtomTable atoms;
  Var a = atoms.add(AtomKind::Regular, "a");
  Var b = atoms.add(AtomKind::Regular, "b");
  Var c = atoms.add(AtomKind::Regular, "c");
  BodyTable bodies;
  std::vector<Nogood> out;
  Lit l1 = bodies.literal({Lit::pos(a), Lit::neg(b)}, atoms, out);
  std::size_t defining = out.size();
  CHECK(defining == 3);
  Lit l2 = bodies.literal({Lit::neg(b), Lit::pos(a), Lit::pos(a)}, atoms, out);
  CHECK(l1 == l2);
  CHECK(out.size() == defining);
  CHECK(bodies.literal({Lit::pos(c)}, atoms, out) == Lit::pos(c));
  CHECK(bodies.literal({}, atoms, out) == kTrueLit);
  CHECK(bodies.literal({Lit::pos(c), Lit::neg(c)}, atoms, out) == kFalseLit);
  CHECK(atoms[l1.var()].kind == AtomKind::Body);
}

TEST_CASE("choice desugaring keeps the supported models", "[program]") {
  AtomTable atoms;
  Var a = atoms.add(AtomKind::Regular, "a");
  Var b = atoms.add(AtomKind::Regular, "b");
  Var c = atoms.add(AtomKind::Regular, "c");
  Rule choice{RuleKind::Choice, {a, b}, {Lit::pos(c)}};
  Rule fact{RuleKind::Normal, {c}, {}};
  auto rules = desugar_choice(choice, atoms);
  CHECK(rules.size() == 4);
  rules.push_back(fact);
  std::vector<Var> complete;
  for (Var v = 1; v < atoms.size(); ++v) complete.push_back(v);
  BodyTable bodies;
  auto ngs = completion_nogoods(rules, complete, atoms, bodies);
  auto got = solutions(ngs, atoms.size(), 3);
  auto want = supported({choice, fact}, 3);
  CHECK(got == want);
  CHECK(got.size() == 4);
  CHECK(desugar_choice(fact, atoms) == std::vector<Rule>{fact});
}

TEST_CASE("completion matches supported models on random programs", "[program]") {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 300; ++round) {
    const std::size_t n = 1 + rng() % 4;
    AtomTable atoms;
    std::vector<Var> user;
    for (std::size_t i = 0; i < n; ++i) user.push_back(atoms.add(AtomKind::Regular, "a" + std::to_string(i)));
    auto random_lit = [&] {
      Var v = user[rng() % n];
      return rng() % 2 ? Lit::pos(v) : Lit::neg(v);
    };
    std::vector<Rule> source;
    for (int r = static_cast<int>(rng() % 5); r >= 0; --r) {
      Rule rule;
      int kind = static_cast<int>(rng() % 5);
      rule.kind = kind < 3 ? RuleKind::Normal : kind == 3 ? RuleKind::Choice : RuleKind::Integrity;
      if (rule.kind != RuleKind::Integrity) rule.head.push_back(user[rng() % n]);
      if (rule.kind == RuleKind::Choice && rng() % 2) rule.head.push_back(user[rng() % n]);
      for (int k = static_cast<int>(rng() % 3); k > 0; --k) rule.body.push_back(random_lit());
      if (rule.kind == RuleKind::Integrity && rule.body.empty()) rule.body.push_back(random_lit());
      if (rule.kind == RuleKind::Choice) {
        std::sort(rule.head.begin(), rule.head.end());
        rule.head.erase(std::unique(rule.head.begin(), rule.head.end()), rule.head.end());
      }
      source.push_back(rule);
    }
    std::vector<Rule> desugared;
    for (const Rule& r : source) {
      for (Rule d : desugar_choice(r, atoms)) desugared.push_back(std::move(d));
    }
    std::vector<Var> complete;
    for (Var v = 1; v < atoms.size(); ++v) complete.push_back(v);
    BodyTable bodies;
    auto ngs = completion_nogoods(desugared, complete, atoms, bodies);
    if (atoms.size() > 16) continue;
    INFO("round " << round);
    CHECK(solutions(ngs, atoms.size(), n) == supported(source, n));
  }
}

TEST_CASE("don't-care detection on a negated constraint atom", "[program]") {
  // {a}. :- a, not (x>7).
  AtomTable atoms;
  Var a = atoms.add(AtomKind::Regular, "a");
  Var c = atoms.add(AtomKind::Constraint, "x>7");
  std::vector<Rule> rules{{RuleKind::Choice, {a}, {}},
                          {RuleKind::Integrity, {}, {Lit::pos(a), Lit::neg(c)}}};
  std::vector<Var> cand{c};
  auto res = detect_dont_care(rules, cand, atoms);
  REQUIRE(res.atoms.size() == 1);
  CHECK(res.atoms[0].atom == c);
  CHECK(res.atoms[0].half == Half::TrueOnly);
  // c is fixed false once a is false.
  REQUIRE(res.rules.size() == 1);
  CHECK(res.rules[0].kind == RuleKind::Integrity);
  std::vector<Lit> body = res.rules[0].body;
  std::sort(body.begin(), body.end());
  std::vector<Lit> want{Lit::pos(c), Lit::neg(a)};
  std::sort(want.begin(), want.end());
  CHECK(body == want);

  SECTION("activation literal joins the guard") {
    Var act = atoms.add(AtomKind::Auxiliary);
    auto with = detect_dont_care(rules, cand, atoms, Lit::pos(act));
    REQUIRE(with.rules.size() == 1);
    CHECK(std::count(with.rules[0].body.begin(), with.rules[0].body.end(), Lit::pos(act)) == 1);
  }
}

TEST_CASE("don't-care detection leaves other uses alone", "[program]") {
  AtomTable atoms;
  Var a = atoms.add(AtomKind::Regular, "a");
  Var b = atoms.add(AtomKind::Regular, "b");
  Var c = atoms.add(AtomKind::Constraint, "x>7");
  Var d = atoms.add(AtomKind::Constraint, "y>7");
  std::vector<Var> cand{c, d};

  // used in a normal rule
  std::vector<Rule> normal{{RuleKind::Normal, {a}, {Lit::pos(c)}}};
  CHECK(detect_dont_care(normal, cand, atoms).atoms.empty());

  // both signs
  std::vector<Rule> mixed{{RuleKind::Integrity, {}, {Lit::pos(a), Lit::neg(c)}},
                          {RuleKind::Integrity, {}, {Lit::pos(b), Lit::pos(c)}}};
  auto res = detect_dont_care(mixed, cand, atoms);
  CHECK(res.atoms.empty());

  // unary constraint: the atom is forced, not a don't care
  std::vector<Rule> unary{{RuleKind::Integrity, {}, {Lit::neg(c)}}};
  CHECK(detect_dont_care(unary, cand, atoms).atoms.empty());

  // two candidates in one constraint: only the first is selected
  std::vector<Rule> shared{{RuleKind::Integrity, {}, {Lit::pos(a), Lit::pos(c), Lit::pos(d)}}};
  auto one = detect_dont_care(shared, cand, atoms);
  REQUIRE(one.atoms.size() == 1);
  CHECK(one.atoms[0].atom == c);
  CHECK(one.atoms[0].half == Half::FalseOnly);
  // guard: F c when the rest {a, d} is not all true, via a helper atom
  CHECK(one.rules.size() == 2);
}

TEST_CASE("tightness of simple programs", "[program]") {
  AtomTable atoms;
  Var a = atoms.add(AtomKind::Regular, "a");
  Var b = atoms.add(AtomKind::Regular, "b");
  Var c = atoms.add(AtomKind::Regular, "c");
  std::vector<Rule> tight{{RuleKind::Normal, {a}, {Lit::neg(b)}},
                          {RuleKind::Normal, {b}, {Lit::neg(a)}},
                          {RuleKind::Normal, {c}, {Lit::pos(a)}}};
  CHECK(tightness_check(tight, atoms.size()).tight);

  std::vector<Rule> loop{{RuleKind::Normal, {a}, {Lit::pos(b)}},
                         {RuleKind::Normal, {b}, {Lit::pos(a)}},
                         {RuleKind::Normal, {c}, {Lit::pos(a)}}};
  auto info = tightness_check(loop, atoms.size());
  CHECK_FALSE(info.tight);
  CHECK(info.num_components == 1);
  CHECK(info.component[a] == info.component[b]);
  CHECK(info.component[c] == DependencyInfo::kNoComponent);

  std::vector<Rule> self{{RuleKind::Normal, {c}, {Lit::pos(c)}}};
  auto s = tightness_check(self, atoms.size());
  CHECK_FALSE(s.tight);
  CHECK(s.component[c] != DependencyInfo::kNoComponent);
}

TEST_CASE("components agree with transitive closure", "[program]") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 2 + rng() % 8;
    std::vector<Rule> rules;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int e = static_cast<int>(rng() % (2 * n)); e > 0; --e) {
      Var h = 1 + rng() % (n - 1);
      Var t = 1 + rng() % (n - 1);
      rules.push_back({RuleKind::Normal, {h}, {Lit::pos(t)}});
      reach[h][t] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    auto info = tightness_check(rules, n);
    bool tight = true;
    for (std::size_t i = 1; i < n; ++i) {
      bool cyclic = reach[i][i];
      tight = tight && !cyclic;
      CHECK((info.component[i] != DependencyInfo::kNoComponent) == cyclic);
      for (std::size_t j = 1; j < n; ++j) {
        if (!cyclic || !reach[j][j]) continue;
        bool same = reach[i][j] && reach[j][i];
        CHECK((info.component[i] == info.component[j]) == same);
      }
    }
    CHECK(info.tight == tight);
  }
}

TEST_CASE("constraint definitions evaluate", "[program]") {
  SumConstraint s{{{2, 0}, {-1, 1}}, Relation::Ne, 3};
  std::vector<Int> v{2, 1};
  CHECK_FALSE(evaluate(ConstraintDef{s}, v));
  v = {2, 2};
  CHECK(evaluate(ConstraintDef{s}, v));
  DistinctConstraint d{{View{1, 0, 0}, View{1, 1, 1}}};
  v = {3, 2};
  CHECK_FALSE(evaluate(ConstraintDef{d}, v));
  v = {3, 3};
  CHECK(evaluate(ConstraintDef{d}, v));
  DomainConstraint dom{View{-1, 0, 0}, DomainSet::from_ranges({{-5, -3}})};
  v = {4, 0};
  CHECK(evaluate(ConstraintDef{dom}, v));
  v = {6, 0};
  CHECK_FALSE(evaluate(ConstraintDef{dom}, v));
}
