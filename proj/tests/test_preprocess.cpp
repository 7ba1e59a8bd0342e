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

#include "catch_amalgamated.hpp"
#include "lazycasp/preprocess.hpp"
#include "support/test_support.hpp"

using namespace lazycasp;

namespace {

VariableTable table(std::initializer_list<DomainSet> doms) {
  VariableTable vars;
  int i = 0;
  for (const DomainSet& d : doms) vars.add("v" + std::to_string(i++), d);
  return vars;
}

DomainSet iv(Int lo, Int hi) { return DomainSet::from_ranges({{lo, hi}}); }

struct Preprocessed {
  GroundProgram prog;
  PreprocessState state;
  PreprocessedPart part;
};

Preprocessed run(const std::string& text, const PreprocessConfig& cfg = {}) {
  Preprocessed p;
  Instance inst = parse_instance(text);
  PartDelta delta = add_part(p.prog, inst.parts.at(0));
  p.part = preprocess_part(p.prog, delta, cfg, p.state);
  return p;
}

VarId var_of(const GroundProgram& prog, const std::string& name) { return *prog.vars.find(name); }

}  // namespace

TEST_CASE("normalization of relations", "[preprocess]") {
  // x + y < 10  ->  x + y <= 9
  auto lt = normalize_constraint({{{1, 0}, {1, 1}}, Relation::Lt, 10});
  REQUIRE(lt.glue == NormalizedSum::Glue::Single);
  REQUIRE(lt.parts.size() == 1);
  CHECK(lt.parts[0] == LinearConstraint{{{1, 0}, {1, 1}}, 9});

  // 2x - 2x <= 2 (constant already folded): no terms, trivially true
  auto cancel = normalize_constraint({{{2, 0}, {-2, 0}}, Relation::Le, 2});
  REQUIRE(cancel.parts.size() == 1);
  CHECK(cancel.parts[0].terms.empty());
  CHECK(cancel.parts[0].bound >= 0);

  // x = 3  ->  x <= 3 and -x <= -3
  auto eq = normalize_constraint({{{1, 0}}, Relation::Eq, 3});
  CHECK(eq.glue == NormalizedSum::Glue::Conjunction);
  REQUIRE(eq.parts.size() == 2);
  CHECK(eq.parts[0] == LinearConstraint{{{1, 0}}, 3});
  CHECK(eq.parts[1] == LinearConstraint{{{-1, 0}}, -3});

  auto ne = normalize_constraint({{{1, 0}}, Relation::Ne, 3});
  CHECK(ne.glue == NormalizedSum::Glue::NegatedConjunction);

  // x >= 2  ->  -x <= -2;  x > 2  ->  -x <= -3
  CHECK(normalize_constraint({{{1, 0}}, Relation::Ge, 2}).parts[0] == LinearConstraint{{{-1, 0}}, -2});
  CHECK(normalize_constraint({{{1, 0}}, Relation::Gt, 2}).parts[0] == LinearConstraint{{{-1, 0}}, -3});

  // gcd division rounds the bound down: 2x + 4y <= 5  ->  x + 2y <= 2
  CHECK(normalize_linear({{2, 0}, {4, 1}}, 5) == LinearConstraint{{{1, 0}, {2, 1}}, 2});
}

TEST_CASE("normalized relations agree with evaluation", "[preprocess]") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 300; ++round) {
    SumConstraint s;
    for (int i = static_cast<int>(rng() % 3); i >= 0; --i) {
      s.terms.push_back({static_cast<Int>(rng() % 7) - 3, static_cast<VarId>(rng() % 2)});
    }
    s.rel = static_cast<Relation>(rng() % 6);
    s.rhs = static_cast<Int>(rng() % 9) - 4;
    NormalizedSum n = normalize_constraint(s);
    for (Int x = -3; x <= 3; ++x) {
      for (Int y = -3; y <= 3; ++y) {
        std::vector<Int> v{x, y};
        bool all = std::all_of(n.parts.begin(), n.parts.end(),
                               [&](const LinearConstraint& c) { return evaluate(c, v); });
        bool got = n.glue == NormalizedSum::Glue::NegatedConjunction ? !all : all;
        CHECK(got == evaluate(ConstraintDef{s}, v));
      }
    }
  }
}

TEST_CASE("term sorting", "[preprocess]") {
  // v0 = x with 10 values, v1 = y with 3 values
  VariableTable vars = table({iv(1, 10), iv(1, 3)});
  PreprocessConfig cfg;
  LinearConstraint c{{{2, 0}, {5, 1}}, 7};
  sort_terms(c, vars, cfg);
  CHECK(c.terms == std::vector<Term>{{5, 1}, {2, 0}});

  cfg.sort_coefficient = true;
  LinearConstraint d{{{2, 0}, {5, 1}}, 7};
  sort_terms(d, vars, cfg);
  CHECK(d.terms == std::vector<Term>{{5, 1}, {2, 0}});

  // tie on size: larger coefficient first
  VariableTable same = table({iv(1, 3), iv(1, 3)});
  LinearConstraint e{{{2, 0}, {5, 1}}, 7};
  sort_terms(e, same, PreprocessConfig{});
  CHECK(e.terms == std::vector<Term>{{5, 1}, {2, 0}});

  // descending domains puts the larger image first
  PreprocessConfig desc;
  desc.sort_descend_domain = true;
  LinearConstraint f{{{5, 1}, {2, 0}}, 7};
  sort_terms(f, vars, desc);
  CHECK(f.terms == std::vector<Term>{{2, 0}, {5, 1}});
}

TEST_CASE("domain propagation for sums", "[preprocess]") {
  VariableTable vars = table({iv(0, 1), iv(0, 1), iv(1, 2)});
  std::vector<Term> t{{42, 0}, {1337, 1}};
  CHECK(propagate_domains(t, vars, 10000) ==
        DomainSet::from_ranges({{0, 0}, {42, 42}, {1337, 1337}, {1379, 1379}}));
  CHECK(propagate_domains(t, vars, 0) == iv(0, 1379));
  std::vector<Term> single{{3, 2}};
  CHECK(propagate_domains(single, vars, 10000) == DomainSet::from_ranges({{3, 3}, {6, 6}}));
}

TEST_CASE("n-th values of a union of images", "[preprocess]") {
  VariableTable vars = table({iv(1, 10), iv(1, 10), iv(1, 10)});
  std::vector<View> views{{1, 0, 0}, {1, 1, 0}, {1, 2, 0}};
  CHECK(nth_largest_in_union(views, vars, 3) == 8);
  CHECK(nth_smallest_in_union(views, vars, 3) == 3);
  VariableTable tiny = table({iv(1, 2), iv(1, 2), iv(1, 2)});
  CHECK_FALSE(nth_largest_in_union(views, tiny, 3).has_value());
}

TEST_CASE("pigeon-hole and permutation strengthening", "[preprocess]") {
  AtomTable atoms;
  Var c = atoms.add(AtomKind::Constraint, "c");
  std::vector<View> views{{1, 0, 0}, {1, 1, 0}, {1, 2, 0}};
  DistinctConstraint dist{views};
  PreprocessConfig cfg;
  VariableTable wide = table({iv(1, 10), iv(1, 10), iv(1, 10)});
  Lowering pigeon = strengthen_distinct(c, dist, wide, atoms, cfg);
  REQUIRE(pigeon.rules.size() == 2);
  REQUIRE(pigeon.linear.size() == 6);
  // :- c, v1 > 8, v2 > 8, v3 > 8  with  -vi <= -9
  CHECK(pigeon.linear[0].con == LinearConstraint{{{-1, 0}}, -9});
  // :- c, v1 < 3, ...  with  vi <= 2
  CHECK(pigeon.linear[3].con == LinearConstraint{{{1, 0}}, 2});

  VariableTable narrow = table({iv(1, 3), iv(1, 3), iv(1, 3)});
  PreprocessConfig perm;
  perm.distinct_pigeon = false;
  perm.distinct_permutation = true;
  Lowering p = strengthen_distinct(c, dist, narrow, atoms, perm);
  std::size_t per_value = std::count_if(p.rules.begin(), p.rules.end(), [&](const Rule& r) {
    return r.kind == RuleKind::Integrity && r.body.size() == 4 && r.body[0] == Lit::pos(c);
  });
  CHECK(per_value == 3);
}

TEST_CASE("splitting into chunks", "[preprocess]") {
  VariableTable vars = table({iv(0, 3), iv(0, 3), iv(0, 3)});
  LinearConstraint c{{{1, 0}, {2, 1}, {3, 2}}, 5};
  SplitResult s = split_constraint(c, 2, 0, true, 10000, vars);
  REQUIRE(s.aux_vars.size() == 1);
  VarId aux = s.aux_vars[0];
  CHECK(s.top.terms == std::vector<Term>{{1, aux}, {3, 2}});
  CHECK(s.top.bound == 5);
  REQUIRE(s.definitions.size() == 2);
  CHECK(s.definitions[0].terms == std::vector<Term>{{1, 0}, {2, 1}, {-1, aux}});
  CHECK(vars.domain(aux) == iv(0, 9));

  VariableTable v2 = table({iv(0, 3), iv(0, 3), iv(0, 3)});
  SplitResult weak = split_constraint(c, 2, 0, false, 10000, v2);
  CHECK(weak.definitions.size() == 1);

  VariableTable v3 = table({iv(0, 3), iv(0, 3)});
  LinearConstraint two{{{1, 0}, {2, 1}}, 5};
  SplitResult none = split_constraint(two, 3, 0, true, 10000, v3);
  CHECK(none.aux_vars.empty());
  CHECK(none.top == two);

  // below the nogood estimate gate nothing happens
  VariableTable v4 = table({iv(0, 3), iv(0, 3), iv(0, 3)});
  CHECK(split_constraint(c, 2, 1024, true, 10000, v4).aux_vars.empty());
}

TEST_CASE("equality chain collapses to one constraint", "[preprocess]") {
  Preprocessed p = run(testing::read_data("equality_chain.lp"));
  REQUIRE_FALSE(p.part.unsat);
  const VarId a = var_of(p.prog, "a");
  const VarId g = var_of(p.prog, "g");
  for (const char* y : {"b", "c", "d", "e", "f"}) {
    CHECK(p.state.is_eliminated(var_of(p.prog, y)));
  }
  CHECK_FALSE(p.state.is_eliminated(a));
  CHECK_FALSE(p.state.is_eliminated(g));
  std::vector<LinearConstraint> remaining;
  for (const LinearAtom& la : p.part.linear) {
    LinearConstraint con = la.con;
    std::sort(con.terms.begin(), con.terms.end(), [](const Term& l, const Term& r) { return l.var < r.var; });
    remaining.push_back(con);
  }
  REQUIRE(remaining.size() == 1);
  CHECK(remaining[0] == LinearConstraint{{{101, a}, {32, g}}, 0});
  // a = 32 f with f in +-4096/... leaves 257 multiples of 32
  const DomainSet& da = p.prog.vars.domain(a);
  CHECK(da.size() == 257);
  CHECK(da.lower() == -4096);
  CHECK(da.upper() == 4096);
  CHECK(da.contains(32));
  CHECK_FALSE(da.contains(16));
  CHECK(p.prog.vars.domain(g) == iv(-4096, 4096));
  CHECK(p.part.stats.eliminated_vars == 5);
  // reconstruction of the eliminated variables
  std::vector<Int> values(p.prog.vars.size(), 0);
  values[a] = 64;
  CHECK(p.state.reconstruct(var_of(p.prog, "b"), values) == 32);
  CHECK(p.state.reconstruct(var_of(p.prog, "f"), values) == 2);
}

TEST_CASE("a = 2b keeps the even values of a", "[preprocess]") {
  const std::string text =
      "var a -4..4\nvar b -4..4\ncon sum e := 1*a + -2*b = 0\nrule :- not e.\nshow a\nshow b\n";
  Preprocessed p = run(text);
  CHECK(p.state.is_eliminated(var_of(p.prog, "b")));
  CHECK(p.prog.vars.domain(var_of(p.prog, "a")) ==
        DomainSet::from_ranges({{-4, -4}, {-2, -2}, {0, 0}, {2, 2}, {4, 4}}));
  Instance inst = parse_instance(text);
  auto want = testing::oracle_models(inst);
  CHECK(want.size() == 5);
  CHECK(testing::session_models(inst, SolverConfig{}) == want);
}

TEST_CASE("equalities under an undecided atom stay", "[preprocess]") {
  Preprocessed p = run("var a 0..4\nvar b 0..4\ncon sum e := 1*a + -1*b = 0\nrule {x}.\nrule :- x, not e.\n");
  CHECK_FALSE(p.state.is_eliminated(1));
  CHECK(p.part.stats.eliminated_vars == 0);
}

TEST_CASE("an empty domain after substitution is unsatisfiable", "[preprocess]") {
  Preprocessed p = run("var a 1..1\nvar b 1..3\ncon sum e := 1*a + -2*b = 0\nrule :- not e.\n");
  CHECK(p.part.unsat);
}

TEST_CASE("distinct over scaled views uses no auxiliary variables", "[preprocess]") {
  std::string plain = "var v1 1..5\nvar v2 1..5\nvar v3 1..5\ncon distinct d := v1, v2, v3\nrule :- not d.\n";
  std::string scaled =
      "var v1 1..5\nvar v2 1..5\nvar v3 1..5\ncon distinct d := 1000*v1, 1000*v2, 1000*v3\nrule :- not d.\n";
  Preprocessed a = run(plain);
  Preprocessed b = run(scaled);
  CHECK(a.prog.vars.size() == 3);
  CHECK(b.prog.vars.size() == 3);
  CHECK(a.part.linear.size() == b.part.linear.size());
  for (std::size_t i = 0; i < a.part.linear.size(); ++i) CHECK(a.part.linear[i].con == b.part.linear[i].con);
}

TEST_CASE("distinct lowerings agree on two variables", "[preprocess]") {
  const std::string text = "var x 1..2\nvar y 1..2\ncon distinct d := x, y\nrule :- not d.\nshow x\nshow y\n";
  Instance inst = parse_instance(text);
  auto want = testing::oracle_models(inst);
  CHECK(want.size() == 2);
  SolverConfig neq;
  SolverConfig card;
  card.preprocess.distinct_to_card = true;
  CHECK(testing::session_models(inst, neq) == want);
  CHECK(testing::session_models(inst, card) == want);

  const std::string single = "var x 1..2\ncon distinct d := x\nshow x\nshow d\nrule a :- d.\nshow a\n";
  Instance one = parse_instance(single);
  auto models = testing::session_models(one, SolverConfig{});
  CHECK(models == testing::oracle_models(one));
  CHECK(models.size() == 2);
}

TEST_CASE("objective flattening uses the defining sum", "[preprocess]") {
  const std::string text =
      "var x1 0..3\nvar x2 0..3\nvar y 0..6\ncon sum e := 1*x1 + 1*x2 + -1*y = 0\n"
      "rule :- not e.\ncon sum lo := 1*x1 + 1*x2 >= 2\nrule :- not lo.\nminimize y @ 0\n";
  Preprocessed p = run(text);
  auto flat = flatten_objective(p.prog.objective, p.state, true);
  std::vector<VarId> used;
  for (const ObjectiveTerm& t : flat) {
    if (t.view.coef != 0) used.push_back(t.view.var);
  }
  std::sort(used.begin(), used.end());
  CHECK(std::find(used.begin(), used.end(), var_of(p.prog, "y")) == used.end());
  Instance inst = parse_instance(text);
  SolverConfig on;
  SolverConfig off;
  off.flatten_optimization = false;
  auto want = testing::oracle_optimum(inst);
  REQUIRE(want);
  CHECK(want->values == std::vector<Int>{2});
  CHECK(testing::session_optimum(inst, on) == want);
  CHECK(testing::session_optimum(inst, off) == want);
}

TEST_CASE("every preprocessing switch preserves the model set", "[preprocess]") {
  std::vector<std::pair<std::string, SolverConfig>> configs;
  auto add = [&](std::string name, auto edit) {
    SolverConfig c;
    edit(c.preprocess);
    configs.emplace_back(std::move(name), c);
  };
  add("defaults", [](PreprocessConfig&) {});
  add("no equality", [](PreprocessConfig& p) { p.equality_processing = false; });
  add("distinct to card", [](PreprocessConfig& p) { p.distinct_to_card = true; });
  add("no pigeon", [](PreprocessConfig& p) { p.distinct_pigeon = false; });
  add("permutation", [](PreprocessConfig& p) { p.distinct_permutation = true; });
  add("split 2", [](PreprocessConfig& p) {
    p.split_size = 2;
    p.max_nogoods_size = 0;
  });
  add("split 2 no symmetry", [](PreprocessConfig& p) {
    p.split_size = 2;
    p.max_nogoods_size = 0;
    p.break_symmetries = false;
  });
  add("bounds only", [](PreprocessConfig& p) {
    p.split_size = 2;
    p.max_nogoods_size = 0;
    p.domain_size = 0;
  });
  add("no dont care", [](PreprocessConfig& p) { p.dont_care_propagation = false; });
  add("sort coefficient", [](PreprocessConfig& p) { p.sort_coefficient = true; });

  std::mt19937_64 rng(17);
  testing::RandomSpec shape;
  for (int i = 0; i < 60; ++i) {
    std::string text = testing::random_instance(rng, shape);
    Instance inst = parse_instance(text);
    auto want = testing::oracle_models(inst);
    for (const auto& [name, cfg] : configs) {
      INFO(name << "\n" << text);
      CHECK(testing::session_models(inst, cfg) == want);
    }
  }
}
