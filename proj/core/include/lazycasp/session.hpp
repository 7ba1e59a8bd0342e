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

// Multi-shot solving: program parts accumulate in one engine that keeps
// its nogoods, heuristic and order atoms between solve calls.

#ifndef LAZYCASP_SESSION_HPP_
#define LAZYCASP_SESSION_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lazycasp/engine.hpp"
#include "lazycasp/instance.hpp"
#include "lazycasp/optimize.hpp"
#include "lazycasp/oracle.hpp"
#include "lazycasp/preprocess.hpp"
#include "lazycasp/propagators.hpp"
#include "lazycasp/translate.hpp"

namespace lazycasp {

struct SolverConfig {
  PreprocessConfig preprocess;
  TranslateConfig translate;
  int prop_strength = 4;
  bool learn_nogoods = true;
  bool flatten_optimization = true;
  // Per solve call; 0 means unlimited.
  std::uint64_t conflict_limit = 0;
  // Create the weighted order literals of the objective and report their
  // evaluation with every model (one atom per image value: small domains only).
  bool objective_literals = false;
};

struct Statistics {
  std::uint64_t calls = 0;
  std::uint64_t choices = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t static_nogoods = 0;
  std::uint64_t dynamic_nogoods = 0;
  std::uint64_t learnt_nogoods = 0;
  std::uint64_t order_atoms = 0;
  // all Boolean atoms, including order and body atoms
  std::uint64_t atoms = 0;
  std::uint64_t variables = 0;
  std::uint64_t translated_constraints = 0;
  std::uint64_t lazy_constraints = 0;
  std::uint64_t translate_emitted = 0;
  std::uint64_t translate_removed = 0;
  std::uint64_t eliminated_vars = 0;
  std::uint64_t dont_care_atoms = 0;
  double last_call_seconds = 0.0;
  double total_seconds = 0.0;
};

struct Model {
  std::vector<Var> atoms;   // true user atoms, ascending
  std::vector<Int> values;  // indexed by VarId; auxiliary variables included
  std::optional<Cost> cost;
  // Objective evaluated on the weighted order literals (objective_literals).
  std::optional<Cost> literal_cost;
};

enum class SolveMode : std::uint8_t { Enumerate, Optimize };

enum class SolveResult : std::uint8_t { Sat, Unsat, Optimum, Interrupted };

struct SolveOptions {
  SolveMode mode = SolveMode::Enumerate;
  // Models to enumerate; 0 means all. Ignored when optimizing.
  std::uint64_t models = 1;
  // Atom names and truth values that hold for this call only.
  std::vector<std::pair<std::string, bool>> assumptions;
};

// Returning false stops the search.
using ModelCallback = std::function<bool(const Model&)>;

class Session {
 public:
  explicit Session(SolverConfig cfg = {});
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;
  ~Session();

  // Adds a program part. The empty part is a no-op.
  void add_part(const Part& part);
  // Parses `text` and adds each of its parts.
  void add_text(std::string_view text);
  void set_external(const std::string& name, ExternalValue value);

  SolveResult solve(const SolveOptions& opts, const ModelCallback& on_model = {});

  const GroundProgram& program() const { return prog_; }
  Statistics statistics() const;
  const SolverConfig& config() const { return cfg_; }
  bool has_objective() const { return !prog_.objective.empty(); }
  // Truth values of externals as used by the next call (released ones are false).
  std::map<Var, bool> external_values() const;

  // "a b x=3 y=1": shown atoms sorted by name, then shown variables in
  // declaration order.
  std::string format_model(const Model& m) const;
  // The part of a model the oracle reports, by names.
  NamedModel named(const Model& m) const;

 private:
  struct DontCareEntry {
    LinearAtom kept;
    Var activation;
  };

  void add_static(Nogood ng);
  void add_linear(const LinearAtom& la);
  void seed_new_vars();
  void rebuild_ufs();
  void check_heads(const PartDelta& delta);
  void restore_dont_care(const PreprocessedPart& pp);
  void complete_distinct(Var atom);
  void integrate(const PartDelta& delta, PreprocessedPart& pp, std::optional<Lit> activation);
  std::vector<Lit> base_assumptions(const SolveOptions& opts);
  Model extract_model();
  Nogood blocking_nogood(const Model& m);
  void release_guard(Var g);

  SolverConfig cfg_;
  GroundProgram prog_;
  PreprocessState state_;
  OrderAtomPool pool_;
  BodyTable bodies_;
  Engine engine_;
  std::unique_ptr<UfsPropagator> ufs_;
  std::unique_ptr<CspPropagator> csp_;

  std::vector<Var> user_atoms_;
  std::vector<bool> is_user_atom_;
  std::set<Var> completed_;
  std::map<Var, ExternalValue> externals_;
  std::vector<Rule> normal_rules_;
  std::map<Var, DontCareEntry> dont_care_;
  std::map<Var, Var> dont_care_distinct_;  // atom -> activation
  std::set<Var> active_activations_;
  VarId seeded_vars_ = 0;
  std::set<std::pair<Var, Var>> binary_emitted_;
  std::optional<Objective> objective_;
  std::size_t objective_terms_ = 0;
  Statistics extra_;
};

}  // namespace lazycasp

#endif  // LAZYCASP_SESSION_HPP_
