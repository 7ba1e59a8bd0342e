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

// Ground programs with constraint atoms, and the Boolean nogoods (Clark
// completion, body definitions) derived from their rules.

#ifndef LAZYCASP_PROGRAM_HPP_
#define LAZYCASP_PROGRAM_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lazycasp/model.hpp"

namespace lazycasp {

enum class AtomKind : std::uint8_t {
  Constant,    // the truth constant, atom 0
  Regular,     // user atom
  Constraint,  // user atom associated with a constraint
  Order,       // (v <= threshold)
  Body,        // conjunction of a rule body
  Auxiliary,   // introduced by rewriting
};

struct AtomInfo {
  AtomKind kind = AtomKind::Regular;
  std::string name;
  VarId var = 0;
  Int threshold = 0;
};

// Owns the Boolean atom namespace. Ids are dense and stable.
class AtomTable {
 public:
  AtomTable();
  Var add(AtomKind kind, std::string name = {});
  Var add_order(VarId v, Int threshold);
  std::optional<Var> find(const std::string& name) const;
  const AtomInfo& operator[](Var a) const { return atoms_.at(a); }
  AtomInfo& operator[](Var a) { return atoms_.at(a); }
  std::size_t size() const { return atoms_.size(); }
  // Changes the kind of an existing atom (constraint atoms defined by rules
  // after lowering become regular).
  void set_kind(Var a, AtomKind kind) { atoms_.at(a).kind = kind; }
  std::string label(Var a) const;

 private:
  std::vector<AtomInfo> atoms_;
  std::unordered_map<std::string, Var> by_name_;
};

enum class RuleKind : std::uint8_t { Normal, Choice, Integrity };

// Normal: head[0] :- body. Choice: {head...} :- body. Integrity: :- body.
struct Rule {
  RuleKind kind = RuleKind::Normal;
  std::vector<Var> head;
  std::vector<Lit> body;
  friend bool operator==(const Rule&, const Rule&) = default;
};

enum class Relation : std::uint8_t { Le, Lt, Ge, Gt, Eq, Ne };
const char* relation_symbol(Relation rel);

struct Term {
  Int coef = 1;
  VarId var = 0;
  friend bool operator==(const Term&, const Term&) = default;
};

// sum(terms) rel rhs
struct SumConstraint {
  std::vector<Term> terms;
  Relation rel = Relation::Le;
  Int rhs = 0;
};

// Pairwise distinct values of the views.
struct DistinctConstraint {
  std::vector<View> views;
};

// view in values
struct DomainConstraint {
  View view;
  DomainSet values;
};

using ConstraintDef = std::variant<SumConstraint, DistinctConstraint, DomainConstraint>;

// sum(terms) <= bound; the normal form consumed by translation and
// propagation.
struct LinearConstraint {
  std::vector<Term> terms;
  Int bound = 0;
  friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

bool evaluate(const ConstraintDef& def, std::span<const Int> values);
bool evaluate(const LinearConstraint& c, std::span<const Int> values);

struct ObjectiveTerm {
  View view;
  int level = 0;
};

struct ConstraintEntry {
  Var atom;
  ConstraintDef def;
};

struct GroundProgram {
  AtomTable atoms;
  VariableTable vars;
  std::vector<Rule> rules;
  std::vector<ConstraintEntry> constraints;
  std::vector<ObjectiveTerm> objective;
  // Names of atoms or variables to print; empty means everything.
  std::vector<std::string> show;
  std::vector<Var> externals;

  const ConstraintDef* constraint_of(Var atom) const;
};

// Hash-consed rule bodies. A body with one literal is represented by that
// literal, the empty body by the true constant; longer bodies get a body
// atom whose defining nogoods are emitted once, on creation.
class BodyTable {
 public:
  Lit literal(std::vector<Lit> body, AtomTable& atoms, std::vector<Nogood>& out);
  std::size_t size() const { return bodies_.size(); }

 private:
  std::map<std::vector<Lit>, Var> bodies_;
};

// Completion nogoods for `rules` (normal and integrity rules only) over the
// atoms in `complete`: every listed atom is true iff one of its bodies is.
// Atoms in `complete` without rules become false. Constraint and external
// atoms must not be listed.
std::vector<Nogood> completion_nogoods(std::span<const Rule> rules, std::span<const Var> complete,
                                       AtomTable& atoms, BodyTable& bodies);

// {h1..hk} :- B  becomes  hi :- B, not hi'  and  hi' :- B, not hi.
std::vector<Rule> desugar_choice(const Rule& rule, AtomTable& atoms);

enum class Half : std::uint8_t { Both, TrueOnly, FalseOnly };

struct DontCareAtom {
  Var atom;
  // TrueOnly keeps  T c => constraint;  FalseOnly keeps  F c => negation.
  Half half;
};

struct DontCareResult {
  std::vector<DontCareAtom> atoms;
  // Guard rules (plus their helper definitions) fixing each atom once all
  // integrity constraints mentioning it are inactive.
  std::vector<Rule> rules;
};

// Constraint atoms from `candidates` that occur only in integrity
// constraints of `rules`, always with the same sign, and never next to an
// already selected atom. `activation`, if given, is added to each guard body.
DontCareResult detect_dont_care(std::span<const Rule> rules, std::span<const Var> candidates,
                                AtomTable& atoms, std::optional<Lit> activation = std::nullopt);

// Positive dependency graph over the heads of normal rules.
struct DependencyInfo {
  bool tight = true;
  // Component id per atom (indexed by Var); atoms in trivial components get
  // kNoComponent.
  std::vector<std::uint32_t> component;
  std::uint32_t num_components = 0;
  static constexpr std::uint32_t kNoComponent = ~std::uint32_t(0);
};

DependencyInfo tightness_check(std::span<const Rule> rules, std::size_t num_atoms);

}  // namespace lazycasp

#endif  // LAZYCASP_PROGRAM_HPP_
