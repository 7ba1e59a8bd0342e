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

// Eager order encoding of linear constraints and order atom management.

#ifndef LAZYCASP_TRANSLATE_HPP_
#define LAZYCASP_TRANSLATE_HPP_

#include <cstdint>
#include <map>
#include <vector>

#include "lazycasp/program.hpp"

namespace lazycasp {

// The order atoms created so far, per variable and threshold. Thresholds
// are domain values below the upper bound of the domain.
class OrderAtomPool {
 public:
  explicit OrderAtomPool(AtomTable& atoms) : atoms_(&atoms) {}

  // Literal for `l`, creating the order atom if needed. Constant literals
  // map to kTrueLit / kFalseLit.
  Lit literal(const OrderLiteral& l);
  // The atom (v <= d), created if needed.
  Var atom(VarId v, Int d);
  std::optional<Var> find(VarId v, Int d) const;

  // Thresholds of v in increasing order.
  const std::map<Int, Var>& thresholds(VarId v) const;
  std::size_t num_vars() const { return by_var_.size(); }
  std::size_t size() const { return created_.size(); }
  // Atoms in creation order.
  const std::vector<Var>& created() const { return created_; }

 private:
  AtomTable* atoms_;
  std::vector<std::map<Int, Var>> by_var_;
  std::vector<Var> created_;
};

struct TranslateConfig {
  // Translate constraints whose estimate is below this; negative means all.
  std::int64_t translate_threshold = 10000;
  std::int64_t min_lits_per_var = 1000;
  bool explicit_binary_order = false;
  bool redundant_nogood_check = true;
};

// Product of the image sizes of all but the last term, saturating.
std::uint64_t estimate_nogoods(const LinearConstraint& c, const VariableTable& vars);

bool should_translate(const LinearConstraint& c, const VariableTable& vars,
                      const TranslateConfig& cfg);

// term i >= d, for an emitted nogood a_1 v_1 >= d_1, ..., a_k v_k >= d_k.
struct ViewBound {
  std::size_t term;
  Int d;
  friend bool operator==(const ViewBound&, const ViewBound&) = default;
};
using BoundNogood = std::vector<ViewBound>;

// Nogoods of sum <= bound in emission order, without the seed. Bounds that
// every value satisfies are left out.
std::vector<BoundNogood> translate_bounds(const LinearConstraint& c, const VariableTable& vars);

// Whether every bound of `a` is implied by a bound of `b` over the same term.
bool stronger(const BoundNogood& a, const BoundNogood& b);

// Drops each nogood comparable to the previously kept one, keeping the
// stronger of the two. Returns the kept nogoods; `removed` counts the rest.
std::vector<BoundNogood> prune_redundant(std::vector<BoundNogood> stream, std::size_t* removed);

struct TranslateStats {
  std::size_t emitted = 0;
  std::size_t removed = 0;
};

// Nogoods {seed} u {tau(a_i v_i >= d_i)} encoding seed => sum <= bound.
std::vector<Nogood> translate_constraint(Lit seed, const LinearConstraint& c,
                                         const VariableTable& vars, OrderAtomPool& pool,
                                         bool redundant_check, TranslateStats* stats = nullptr);

// Creates up to n order atoms for v at evenly spaced ranks.
std::vector<Var> seed_order_atoms(VarId v, std::int64_t n, const VariableTable& vars,
                                  OrderAtomPool& pool);

// {T(v <= x_i), F(v <= x_{i+1})} for consecutive created thresholds.
std::vector<Nogood> emit_binary_order_nogoods(const OrderAtomPool& pool);

}  // namespace lazycasp

#endif  // LAZYCASP_TRANSLATE_HPP_
