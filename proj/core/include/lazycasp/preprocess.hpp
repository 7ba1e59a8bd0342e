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

// Rewrites a part of a ground program into rules plus linear constraint
// atoms of the form sum <= bound.

#ifndef LAZYCASP_PREPROCESS_HPP_
#define LAZYCASP_PREPROCESS_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "lazycasp/instance.hpp"
#include "lazycasp/program.hpp"

namespace lazycasp {

struct PreprocessConfig {
  bool equality_processing = true;
  bool distinct_to_card = false;
  bool distinct_pigeon = true;
  bool distinct_permutation = false;
  bool sort_coefficient = false;
  bool sort_descend_coefficient = true;
  bool sort_descend_domain = false;
  // Maximum number of terms before splitting; negative disables splitting.
  int split_size = -1;
  // Splitting only applies when the nogood estimate exceeds this.
  std::int64_t max_nogoods_size = 1024;
  bool break_symmetries = true;
  // Largest exact value set computed for auxiliary variables; 0 means
  // bounds only, negative means unlimited.
  std::int64_t domain_size = 10000;
  bool dont_care_propagation = true;
};

// A constraint atom c whose constraint is sum <= bound. `half` says which
// implications (T c => constraint, F c => negation) are required.
struct LinearAtom {
  Var atom = 0;
  LinearConstraint con;
  Half half = Half::Both;
};

// sum rel rhs as one or two <= constraints and how they combine into the
// original truth value.
struct NormalizedSum {
  enum class Glue : std::uint8_t { Single, Conjunction, NegatedConjunction };
  Glue glue = Glue::Single;
  std::vector<LinearConstraint> parts;
};

// Merges repeated variables, drops zero coefficients, turns the relation
// into <= and divides by the gcd of the coefficients.
NormalizedSum normalize_constraint(const SumConstraint& sum);
LinearConstraint normalize_linear(std::vector<Term> terms, Int bound);

// Orders terms for translation: by image size, then coefficient magnitude,
// as selected by the configuration. Stable.
void sort_terms(LinearConstraint& c, const VariableTable& vars, const PreprocessConfig& cfg);

// Value set of sum(terms): exact if it has at most `threshold` values
// (threshold < 0: unlimited), otherwise the interval between the bounds.
DomainSet propagate_domains(std::span<const Term> terms, const VariableTable& vars,
                            std::int64_t threshold);

// The n-th smallest / n-th largest value (1-based) of the union of the
// view images, or nullopt if the union has fewer than n values.
std::optional<Int> nth_smallest_in_union(std::span<const View> views, const VariableTable& vars,
                                         std::size_t n);
std::optional<Int> nth_largest_in_union(std::span<const View> views, const VariableTable& vars,
                                        std::size_t n);

// Output of one rewriting step: rules, new linear atoms, and atoms whose
// definition is given by the rules (to be completed).
struct Lowering {
  std::vector<Rule> rules;
  std::vector<LinearAtom> linear;
  std::vector<Var> defined;
};

// Rewrites `atom` <=> distinct(views) into rules over linear atoms; the atom
// becomes defined by the rules. Strengthening rules are included as
// configured.
Lowering lower_distinct(Var atom, const DistinctConstraint& dist, const VariableTable& vars,
                        AtomTable& atoms, const PreprocessConfig& cfg);

// Lowering for a distinct atom that only has to imply the constraint
// (T c => distinct): per pair `:- c, not wi < wj, not wi > wj`. The atom
// stays undefined.
Lowering lower_distinct_demanded(Var atom, const DistinctConstraint& dist,
                                 const VariableTable& vars, AtomTable& atoms,
                                 const PreprocessConfig& cfg);

// Redundant pigeon-hole and permutation rules for a lowered distinct atom.
Lowering strengthen_distinct(Var atom, const DistinctConstraint& dist, const VariableTable& vars,
                             AtomTable& atoms, const PreprocessConfig& cfg);

struct SplitResult {
  LinearConstraint top;
  // Decided constraints defining the auxiliary variables.
  std::vector<LinearConstraint> definitions;
  std::vector<VarId> aux_vars;
};

// Splits c into chunks of at most `alpha` terms while the term count exceeds
// alpha and the nogood estimate exceeds `beta`. Auxiliary variables are
// added to `vars`. Without symmetry breaking only sum <= aux is kept.
SplitResult split_constraint(const LinearConstraint& c, int alpha, std::int64_t beta,
                             bool break_symmetries, std::int64_t domain_size, VariableTable& vars);

// a * x = b * y + c, recorded when y is eliminated.
struct Substitution {
  VarId y;
  VarId x;
  Int a;
  Int b;
  Int c;
};

// A decided constraint sum(terms) = rhs kept for flattening objectives.
struct DecidedEquality {
  std::vector<Term> terms;
  Int rhs;
};

// Preprocessing facts that outlive a single part.
struct PreprocessState {
  std::vector<Substitution> substitutions;
  std::vector<DecidedEquality> equalities;
  std::vector<bool> eliminated;  // indexed by VarId

  bool is_eliminated(VarId v) const { return v < eliminated.size() && eliminated[v]; }
  // Value of an eliminated variable from the values of the others.
  Int reconstruct(VarId v, const std::vector<Int>& values) const;
};

struct PreprocessStats {
  std::size_t eliminated_vars = 0;
  std::size_t split_aux_vars = 0;
  std::size_t dont_care_atoms = 0;
};

struct PreprocessedPart {
  std::vector<Rule> rules;  // normal and integrity rules
  std::vector<LinearAtom> linear;
  std::vector<Var> defined;  // auxiliary atoms and rule-defined constraint atoms
  std::vector<DontCareAtom> dont_care;
  // Distinct atoms lowered with lower_distinct_demanded.
  std::vector<Var> dont_care_distinct;
  bool unsat = false;
  PreprocessStats stats;
};

// Rewrites the items of `delta`. Domains of variables declared by the part
// may be narrowed and auxiliary variables and atoms are added to `prog`.
// `activation`, if set, is added to every don't-care guard.
PreprocessedPart preprocess_part(GroundProgram& prog, const PartDelta& delta,
                                 const PreprocessConfig& cfg, PreprocessState& state,
                                 std::optional<Lit> activation = std::nullopt);

// Rewrites terms of eliminated variables through the recorded
// substitutions. Returns the multiplier applied to the whole constraint.
Int apply_substitutions(std::vector<Term>& terms, Int& rhs, const PreprocessState& state);

// Objective over non-eliminated variables; a variable defined by a decided
// equality sum = y is replaced by the sum when `flatten` is set.
std::vector<ObjectiveTerm> flatten_objective(std::span<const ObjectiveTerm> objective,
                                             const PreprocessState& state, bool flatten);

}  // namespace lazycasp

#endif  // LAZYCASP_PREPROCESS_HPP_
