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

// CDCL search over nogoods with a growing atom set and pluggable
// propagators that may add nogoods (and atoms) at any time.

#ifndef LAZYCASP_ENGINE_HPP_
#define LAZYCASP_ENGINE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lazycasp/model.hpp"

namespace lazycasp {

class Engine;

enum class Value : std::uint8_t { Free, True, False };

// Propagators see the trail through their own cursor and must undo their
// state in on_backtrack.
class Propagator {
 public:
  virtual ~Propagator() = default;
  // Adds nogoods through Engine::add_nogood. Must stop as soon as that
  // reports a conflict. Returns whether any nogood was added.
  virtual bool propagate(Engine& engine) = 0;
  // The trail was shrunk to `trail_size` literals.
  virtual void on_backtrack(Engine& engine, std::size_t trail_size) = 0;
  // Called on a conflict-free total assignment. May create an atom to
  // branch on and return a literal over it.
  virtual std::optional<Lit> split(Engine&) { return std::nullopt; }
};

enum class NogoodKind : std::uint8_t {
  Static,    // program and translation; never deleted
  Learnt,    // conflict analysis
  Dynamic,   // propagator output
  Implicit,  // propagator output kept only as a reason
};

enum class AddResult : std::uint8_t { Ok, Unit, Conflict, Satisfied };

enum class SolveStatus : std::uint8_t { Sat, Unsat, Interrupted };

struct EngineConfig {
  // Propagator nogoods go to the store immediately; otherwise they are kept
  // as reasons and promoted only when used in conflict analysis.
  bool learn_nogoods = true;
  std::uint64_t restart_unit = 64;
  double var_decay = 0.95;
  // Conflict budget per solve call; 0 means unlimited.
  std::uint64_t conflict_limit = 0;
};

struct EngineStats {
  std::uint64_t choices = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t static_nogoods = 0;
  std::uint64_t learnt_nogoods = 0;
  // Nogoods emitted by propagators, whether stored or implicit.
  std::uint64_t dynamic_nogoods = 0;
  std::uint64_t deleted_nogoods = 0;
  std::uint64_t splits = 0;
};

class Engine {
 public:
  explicit Engine(EngineConfig cfg = {});

  // Makes atoms [0, n) known. Atom 0 is fixed true at level 0.
  void ensure_atoms(std::size_t n);
  std::size_t num_atoms() const { return value_.size(); }

  void add_propagator(Propagator* p) { propagators_.push_back(p); }

  // Adds a nogood in the current state. Atoms are registered on demand.
  // Static nogoods may only be added at level 0 (between solve calls).
  AddResult add_nogood(Nogood lits, NogoodKind kind);

  // Searches for a total assignment under the assumptions. On Sat the
  // assignment stays in place until the next call or backtrack().
  SolveStatus solve(std::span<const Lit> assumptions);

  // Assigns the assumptions (one level each) and propagates to a fixpoint
  // without deciding anything else. Returns false on a conflict, after
  // which the engine is reset; otherwise the assignment stays in place.
  bool propagate_fixpoint(std::span<const Lit> assumptions);

  // Undo everything above level 0.
  void reset() { backtrack(0); }

  Value value(Lit l) const {
    Value v = value_[l.var()];
    if (v == Value::Free || l.positive()) return v;
    return v == Value::True ? Value::False : Value::True;
  }
  bool is_true(Lit l) const { return value(l) == Value::True; }
  bool is_false(Lit l) const { return value(l) == Value::False; }
  Value value(Var v) const { return value_[v]; }
  int level(Var v) const { return level_[v]; }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }
  std::span<const Lit> trail() const { return trail_; }
  bool inconsistent() const { return unsat_; }

  void set_phase(Var v, bool positive) { phase_[v] = positive ? 1 : 0; }
  void bump(Var v, double amount = 1.0);

  const EngineStats& stats() const { return stats_; }
  EngineStats& mutable_stats() { return stats_; }
  const EngineConfig& config() const { return cfg_; }
  std::size_t num_stored_nogoods() const { return live_; }

 private:
  using Handle = std::uint32_t;
  static constexpr Handle kNoReason = ~Handle(0);

  struct Stored {
    std::vector<Lit> lits;
    NogoodKind kind = NogoodKind::Static;
    bool watched = false;
    bool deleted = false;
    double activity = 0.0;
  };

  Handle alloc(Nogood lits, NogoodKind kind);
  void release(Handle h);
  void attach(Handle h);
  void assign(Lit l, Handle reason);
  std::optional<Handle> unit_propagate();
  std::optional<Handle> propagate_all();
  void backtrack(int level);
  void analyze(Handle conflict, Nogood& learnt, int& back_level);
  bool locked(Handle h) const;
  void reduce_db();
  void drop_implicit();
  std::optional<Var> pick_branch();
  void restart();
  static std::uint64_t luby(std::uint64_t i);

  // heap over atoms by activity
  void heap_insert(Var v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  Var heap_pop();
  bool heap_less(Var a, Var b) const { return activity_[a] > activity_[b]; }

  EngineConfig cfg_;
  EngineStats stats_;
  std::vector<Propagator*> propagators_;

  std::vector<Value> value_;
  std::vector<int> level_;
  std::vector<Handle> reason_;
  std::vector<std::uint8_t> phase_;
  std::vector<double> activity_;
  std::vector<std::vector<Handle>> watches_;  // by literal index
  std::vector<Lit> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;

  std::vector<Stored> store_;
  std::vector<Handle> free_;
  std::vector<Handle> implicit_;
  // singleton nogoods added above level 0, asserted again at the root
  std::vector<Handle> root_units_;
  std::size_t live_ = 0;
  std::size_t num_static_ = 0;
  std::size_t num_deletable_ = 0;
  std::size_t reduce_limit_ = 0;
  double var_inc_ = 1.0;
  double nogood_inc_ = 1.0;

  std::vector<Var> heap_;
  std::vector<std::int64_t> heap_pos_;

  std::vector<std::uint8_t> seen_;
  std::optional<Handle> pending_conflict_;
  bool unsat_ = false;
};

}  // namespace lazycasp

#endif  // LAZYCASP_ENGINE_HPP_
