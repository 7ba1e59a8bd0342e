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

// Lazy nogood generation: order consistency between created order atoms,
// bound propagation of untranslated linear constraints, and unfounded sets.

#ifndef LAZYCASP_PROPAGATORS_HPP_
#define LAZYCASP_PROPAGATORS_HPP_

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "lazycasp/engine.hpp"
#include "lazycasp/preprocess.hpp"
#include "lazycasp/translate.hpp"

namespace lazycasp {

// sigma => sum <= bound
struct HalfConstraint {
  Lit sigma;
  LinearConstraint con;
};

// The complement of sum <= b as a <= constraint: -sum <= -b - 1.
LinearConstraint negate(const LinearConstraint& c);

// Bounds of the CSP variables derived from the assigned order literals.
struct BoundsView {
  std::span<const Int> lb;
  std::span<const Int> ub;
};

// Nogoods for sigma true (Algorithm "propagate bounds"); strength 1..4.
std::vector<Nogood> propagate_bounds(const HalfConstraint& h, BoundsView b,
                                     const VariableTable& vars, OrderAtomPool& pool, int strength);
// Nogoods for sigma unassigned (Algorithm "propagate reification").
std::vector<Nogood> propagate_reification(const HalfConstraint& h, BoundsView b,
                                          const VariableTable& vars, OrderAtomPool& pool,
                                          int strength);

class CspPropagator final : public Propagator {
 public:
  CspPropagator(AtomTable& atoms, const VariableTable& vars, OrderAtomPool& pool, int strength);

  // Registers variables [0, vars.size()) not seen yet.
  void sync_vars();
  // Variables that must be assigned in a model (eliminated ones are not).
  void set_ignored(VarId v, bool ignored);
  // Lazily propagated constraint atom; halves as in `la.half`.
  void add_constraint(const LinearAtom& la);

  bool propagate(Engine& engine) override;
  void on_backtrack(Engine& engine, std::size_t trail_size) override;
  std::optional<Lit> split(Engine& engine) override;

  Int lb(VarId v) const { return lb_[v]; }
  Int ub(VarId v) const { return ub_[v]; }
  std::size_t num_constraints() const { return cons_.size(); }

 private:
  struct Con {
    Var atom;
    std::vector<HalfConstraint> halves;
  };
  struct BoundChange {
    std::size_t pos;
    VarId var;
    Int lb;
    Int ub;
  };

  void catch_up(Engine& engine);
  void mark_var(VarId v);
  void watch_atom(Var a, std::uint32_t con);
  bool order_phase(Engine& engine, bool& conflict);
  // Adds nogoods; returns whether any changed the assignment or created
  // atoms. `conflict` is set when the engine reported one.
  bool emit(Engine& engine, std::vector<Nogood>& ngs, bool& conflict);

  AtomTable& atoms_;
  const VariableTable& vars_;
  OrderAtomPool& pool_;
  int strength_;

  std::vector<Int> lb_;
  std::vector<Int> ub_;
  std::vector<std::uint8_t> ignored_;
  std::vector<std::vector<std::uint32_t>> cons_of_var_;
  std::vector<std::vector<std::uint32_t>> cons_of_atom_;
  std::vector<Con> cons_;

  std::size_t cursor_ = 0;
  std::size_t pool_seen_ = 0;
  std::vector<BoundChange> changes_;
  std::vector<std::pair<std::size_t, Var>> sigma_log_;
  std::set<std::uint32_t> dirty_;
  std::set<VarId> order_dirty_;
  std::uint32_t last_producer_ = 0;
};

// Loop nogoods for non-tight programs, one naive fixpoint per component.
class UfsPropagator final : public Propagator {
 public:
  struct UfsRule {
    Var head;
    Lit body;
    std::vector<Var> pos;  // positive body atoms in the head's component
  };

  // Adds a component: its atoms and the rules with heads in it.
  void add_component(std::vector<Var> atoms, std::vector<UfsRule> rules);
  void clear() { comps_.clear(); }
  bool empty() const { return comps_.empty(); }

  bool propagate(Engine& engine) override;
  void on_backtrack(Engine&, std::size_t) override {}

 private:
  struct Component {
    std::vector<Var> atoms;
    std::vector<UfsRule> rules;
  };
  std::vector<Component> comps_;
  std::vector<std::uint8_t> founded_;
  std::vector<std::uint8_t> in_u_;
};

}  // namespace lazycasp

#endif  // LAZYCASP_PROPAGATORS_HPP_
