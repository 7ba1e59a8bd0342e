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

// Objectives as weighted order literals, and the constraints that ask for a
// lexicographically better solution during branch and bound.

#ifndef LAZYCASP_OPTIMIZE_HPP_
#define LAZYCASP_OPTIMIZE_HPP_

#include <functional>
#include <span>
#include <vector>

#include "lazycasp/oracle.hpp"
#include "lazycasp/preprocess.hpp"
#include "lazycasp/translate.hpp"

namespace lazycasp {

struct WeightedLit {
  Lit lit;
  Int weight;  // > 0
  friend bool operator==(const WeightedLit&, const WeightedLit&) = default;
};

// value = base + sum of the weights of the true literals
struct ObjectiveLevel {
  int level = 0;
  Int base = 0;
  std::vector<WeightedLit> lits;
};

struct Objective {
  // most significant (highest) level first
  std::vector<ObjectiveLevel> levels;
};

// One literal tau[view >= d] with weight d - prev(d) per image value above
// the lower bound. Literals over the same atom are merged.
Objective build_objective(std::span<const ObjectiveTerm> terms, const VariableTable& vars,
                          OrderAtomPool& pool);

// Level values given the truth of the literals.
Cost evaluate_objective(const Objective& obj, const std::function<bool(Lit)>& is_true);

// sum per level, as linear terms plus a constant, most significant first
struct LevelSum {
  int level = 0;
  std::vector<Term> terms;
  Int constant = 0;
};
std::vector<LevelSum> level_sums(std::span<const ObjectiveTerm> terms);

// Constraints forcing a solution strictly better than `cost` whenever
// `guard` is true: some level below its current value and no more
// significant level above it.
struct Improvement {
  std::vector<LinearAtom> linear;  // TrueOnly
  std::vector<Nogood> nogoods;
};
Improvement improvement_constraint(std::span<const LevelSum> sums, const Cost& cost, Lit guard,
                                   AtomTable& atoms);

}  // namespace lazycasp

#endif  // LAZYCASP_OPTIMIZE_HPP_
