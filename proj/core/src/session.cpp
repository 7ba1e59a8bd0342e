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

#include "lazycasp/session.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace lazycasp {

namespace {

EngineConfig engine_config(const SolverConfig& cfg) {
  EngineConfig ec;
  ec.learn_nogoods = cfg.learn_nogoods;
  ec.conflict_limit = cfg.conflict_limit;
  return ec;
}

}  // namespace

Session::Session(SolverConfig cfg)
    : cfg_(std::move(cfg)),
      pool_(prog_.atoms),
      engine_(engine_config(cfg_)),
      ufs_(std::make_unique<UfsPropagator>()),
      csp_(std::make_unique<CspPropagator>(prog_.atoms, prog_.vars, pool_, cfg_.prop_strength)) {
  if (cfg_.prop_strength < 1 || cfg_.prop_strength > 4) {
    throw Error("propagation strength must be between 1 and 4");
  }
  engine_.ensure_atoms(prog_.atoms.size());
  engine_.add_propagator(ufs_.get());
  engine_.add_propagator(csp_.get());
}

Session::~Session() = default;

void Session::add_static(Nogood ng) {
  engine_.add_nogood(std::move(ng), NogoodKind::Static);
}

void Session::add_linear(const LinearAtom& la) {
  const VariableTable& vars = prog_.vars;
  if (should_translate(la.con, vars, cfg_.translate)) {
    TranslateStats ts;
    const bool check = cfg_.translate.redundant_nogood_check;
    if (la.half != Half::FalseOnly) {
      for (Nogood& ng : translate_constraint(Lit::pos(la.atom), la.con, vars, pool_, check, &ts)) {
        add_static(std::move(ng));
      }
    }
    if (la.half != Half::TrueOnly) {
      for (Nogood& ng :
           translate_constraint(Lit::neg(la.atom), negate(la.con), vars, pool_, check, &ts)) {
        add_static(std::move(ng));
      }
    }
    ++extra_.translated_constraints;
    extra_.translate_emitted += ts.emitted;
    extra_.translate_removed += ts.removed;
  } else {
    csp_->add_constraint(la);
    ++extra_.lazy_constraints;
  }
}

void Session::seed_new_vars() {
  for (VarId v = seeded_vars_; v < prog_.vars.size(); ++v) {
    if (state_.is_eliminated(v)) continue;
    seed_order_atoms(v, cfg_.translate.min_lits_per_var, prog_.vars, pool_);
  }
  seeded_vars_ = static_cast<VarId>(prog_.vars.size());
}

void Session::rebuild_ufs() {
  ufs_->clear();
  DependencyInfo dep = tightness_check(normal_rules_, prog_.atoms.size());
  if (dep.tight) return;
  std::vector<std::vector<Var>> comp_atoms(dep.num_components);
  std::vector<std::vector<UfsPropagator::UfsRule>> comp_rules(dep.num_components);
  for (Var a = 0; a < dep.component.size(); ++a) {
    if (dep.component[a] != DependencyInfo::kNoComponent) comp_atoms[dep.component[a]].push_back(a);
  }
  for (const Rule& r : normal_rules_) {
    const Var h = r.head.front();
    if (h >= dep.component.size()) continue;
    const std::uint32_t c = dep.component[h];
    if (c == DependencyInfo::kNoComponent) continue;
    std::vector<Nogood> fresh;
    Lit body = bodies_.literal(r.body, prog_.atoms, fresh);
    for (Nogood& ng : fresh) add_static(std::move(ng));
    std::vector<Var> pos;
    for (Lit l : r.body) {
      if (l.positive() && l.var() < dep.component.size() && dep.component[l.var()] == c) {
        pos.push_back(l.var());
      }
    }
    comp_rules[c].push_back({h, body, std::move(pos)});
  }
  for (std::uint32_t c = 0; c < dep.num_components; ++c) {
    ufs_->add_component(std::move(comp_atoms[c]), std::move(comp_rules[c]));
  }
}

void Session::check_heads(const PartDelta& delta) {
  for (std::size_t i = delta.first_rule; i < prog_.rules.size(); ++i) {
    for (Var h : prog_.rules[i].head) {
      if (completed_.count(h)) throw Error("redefinition of atom: " + prog_.atoms[h].name);
      auto it = externals_.find(h);
      if (it == externals_.end()) continue;
      if (it->second == ExternalValue::Release) {
        throw Error("redefinition of released external: " + prog_.atoms[h].name);
      }
      // defined from now on
      externals_.erase(it);
    }
  }
}

void Session::restore_dont_care(const PreprocessedPart& pp) {
  std::set<Var> mentioned;
  for (const Rule& r : pp.rules) {
    for (Lit l : r.body) {
      if (dont_care_.count(l.var()) || dont_care_distinct_.count(l.var())) mentioned.insert(l.var());
    }
  }
  for (Var a : mentioned) {
    Var activation = 0;
    if (auto it = dont_care_.find(a); it != dont_care_.end()) {
      DontCareEntry e = it->second;
      dont_care_.erase(it);
      LinearAtom other = e.kept;
      other.half = e.kept.half == Half::TrueOnly ? Half::FalseOnly : Half::TrueOnly;
      add_linear(other);
      activation = e.activation;
    } else {
      activation = dont_care_distinct_.at(a);
      dont_care_distinct_.erase(a);
      complete_distinct(a);
    }
    if (active_activations_.erase(activation)) add_static({Lit::pos(activation)});
  }
}

// F c => not distinct, through a fully lowered copy c' and `:- not c, c'`.
void Session::complete_distinct(Var atom) {
  auto entry = std::find_if(prog_.constraints.begin(), prog_.constraints.end(),
                            [&](const ConstraintEntry& e) { return e.atom == atom; });
  ConstraintDef def = entry->def;
  PartDelta delta;
  delta.first_rule = prog_.rules.size();
  delta.first_constraint = prog_.constraints.size();
  delta.first_objective = prog_.objective.size();
  delta.first_var = static_cast<VarId>(prog_.vars.size());
  Var copy = prog_.atoms.add(AtomKind::Constraint);
  prog_.constraints.push_back({copy, std::move(def)});
  prog_.rules.push_back({RuleKind::Integrity, {}, {Lit::neg(atom), Lit::pos(copy)}});
  PreprocessedPart pp = preprocess_part(prog_, delta, cfg_.preprocess, state_);
  engine_.ensure_atoms(prog_.atoms.size());
  integrate(delta, pp, std::nullopt);
}

void Session::add_part(const Part& part) {
  if (part.statements.empty()) return;
  engine_.reset();
  PartDelta delta = lazycasp::add_part(prog_, part);
  for (Var a : delta.new_atoms) {
    user_atoms_.push_back(a);
    if (is_user_atom_.size() <= a) is_user_atom_.resize(a + 1, false);
    is_user_atom_[a] = true;
  }
  for (Var e : delta.new_externals) {
    if (completed_.count(e)) throw Error("external atom already defined: " + prog_.atoms[e].name);
    externals_.emplace(e, ExternalValue::False);
  }
  check_heads(delta);

  std::optional<Lit> activation;
  if (cfg_.preprocess.dont_care_propagation) {
    activation = Lit::pos(prog_.atoms.add(AtomKind::Auxiliary));
  }
  PreprocessedPart pp = preprocess_part(prog_, delta, cfg_.preprocess, state_, activation);
  engine_.ensure_atoms(prog_.atoms.size());
  restore_dont_care(pp);
  integrate(delta, pp, activation);
  for (const auto& [a, value] : delta.settings) {
    set_external(prog_.atoms[a].name, value);
  }
  engine_.ensure_atoms(prog_.atoms.size());
}

void Session::integrate(const PartDelta& delta, PreprocessedPart& pp,
                        std::optional<Lit> activation) {
  extra_.eliminated_vars += pp.stats.eliminated_vars;
  extra_.dont_care_atoms += pp.stats.dont_care_atoms;
  if (pp.unsat) {
    add_static({});
    return;
  }
  if (activation) {
    if (pp.dont_care.empty() && pp.dont_care_distinct.empty()) {
      add_static({*activation});
    } else {
      active_activations_.insert(activation->var());
      for (const DontCareAtom& d : pp.dont_care) {
        for (const LinearAtom& la : pp.linear) {
          if (la.atom == d.atom) {
            dont_care_.emplace(d.atom, DontCareEntry{la, activation->var()});
            break;
          }
        }
      }
      for (Var d : pp.dont_care_distinct) dont_care_distinct_.emplace(d, activation->var());
    }
  }

  // completion of everything this part defines or first mentions
  std::set<Var> complete(delta.new_atoms.begin(), delta.new_atoms.end());
  complete.insert(pp.defined.begin(), pp.defined.end());
  for (const Rule& r : pp.rules) {
    if (r.kind == RuleKind::Normal) complete.insert(r.head.begin(), r.head.end());
  }
  complete.erase(kTrueAtom);
  for (const auto& [e, value] : externals_) complete.erase(e);
  for (Var a : complete) {
    if (completed_.count(a)) throw Error("redefinition of atom: " + prog_.atoms[a].name);
  }
  std::vector<Var> complete_list(complete.begin(), complete.end());
  for (Nogood& ng : completion_nogoods(pp.rules, complete_list, prog_.atoms, bodies_)) {
    add_static(std::move(ng));
  }
  completed_.insert(complete.begin(), complete.end());

  bool new_normal = false;
  for (Rule& r : pp.rules) {
    if (r.kind == RuleKind::Normal) {
      normal_rules_.push_back(std::move(r));
      new_normal = true;
    }
  }
  if (new_normal) rebuild_ufs();

  for (const LinearAtom& la : pp.linear) add_linear(la);
  csp_->sync_vars();
  for (VarId v = 0; v < prog_.vars.size(); ++v) {
    if (state_.is_eliminated(v)) csp_->set_ignored(v, true);
  }
  seed_new_vars();
  if (cfg_.translate.explicit_binary_order) {
    for (Nogood& ng : emit_binary_order_nogoods(pool_)) {
      if (binary_emitted_.emplace(ng[0].var(), ng[1].var()).second) add_static(std::move(ng));
    }
  }
  if (cfg_.objective_literals && prog_.objective.size() != objective_terms_) {
    std::vector<ObjectiveTerm> flat =
        flatten_objective(prog_.objective, state_, cfg_.flatten_optimization);
    objective_ = build_objective(flat, prog_.vars, pool_);
    objective_terms_ = prog_.objective.size();
  }
}

void Session::add_text(std::string_view text) {
  Instance inst = parse_instance(text);
  for (const Part& p : inst.parts) add_part(p);
}

void Session::set_external(const std::string& name, ExternalValue value) {
  std::optional<Var> a = prog_.atoms.find(name);
  auto it = a ? externals_.find(*a) : externals_.end();
  if (it == externals_.end()) throw Error("unknown external atom: " + name);
  if (it->second == ExternalValue::Release) {
    if (value == ExternalValue::Release) return;
    throw Error("external atom was released: " + name);
  }
  it->second = value;
  if (value == ExternalValue::Release) {
    engine_.reset();
    add_static({Lit::pos(*a)});
  }
}

std::map<Var, bool> Session::external_values() const {
  std::map<Var, bool> out;
  for (const auto& [a, v] : externals_) out[a] = v == ExternalValue::True;
  return out;
}

std::vector<Lit> Session::base_assumptions(const SolveOptions& opts) {
  std::vector<Lit> out;
  for (const auto& [a, v] : externals_) {
    if (v == ExternalValue::True) out.push_back(Lit::pos(a));
    if (v == ExternalValue::False) out.push_back(Lit::neg(a));
  }
  for (Var act : active_activations_) out.push_back(Lit::pos(act));
  for (const auto& [name, value] : opts.assumptions) {
    std::optional<Var> a = prog_.atoms.find(name);
    if (!a) throw Error("unknown atom in assumption: " + name);
    out.push_back(Lit(*a, value));
  }
  return out;
}

Model Session::extract_model() {
  Model m;
  for (Var a : user_atoms_) {
    if (engine_.value(a) == Value::True) m.atoms.push_back(a);
  }
  m.values.assign(prog_.vars.size(), 0);
  for (VarId v = 0; v < prog_.vars.size(); ++v) {
    if (!state_.is_eliminated(v)) m.values[v] = csp_->lb(v);
  }
  for (VarId v = 0; v < prog_.vars.size(); ++v) {
    if (state_.is_eliminated(v)) m.values[v] = state_.reconstruct(v, m.values);
  }
  if (!prog_.objective.empty()) m.cost = evaluate_objective(prog_, m.values);
  if (objective_) {
    m.literal_cost =
        evaluate_objective(*objective_, [&](Lit l) { return engine_.value(l) == Value::True; });
  }
  return m;
}

Nogood Session::blocking_nogood(const Model& m) {
  Nogood ng;
  std::size_t next = 0;
  for (Var a : user_atoms_) {
    bool t = next < m.atoms.size() && m.atoms[next] == a;
    if (t) ++next;
    ng.push_back(Lit(a, t));
  }
  for (VarId v = 0; v < prog_.vars.size(); ++v) {
    if (prog_.vars[v].auxiliary || state_.is_eliminated(v)) continue;
    const DomainSet& dom = prog_.vars.domain(v);
    const Int d = m.values[v];
    if (d < dom.upper()) ng.push_back(Lit::pos(pool_.atom(v, d)));
    if (d > dom.lower()) ng.push_back(Lit::neg(pool_.atom(v, *dom.prev(d))));
  }
  return ng;
}

void Session::release_guard(Var g) {
  engine_.reset();
  add_static({Lit::pos(g)});
}

SolveResult Session::solve(const SolveOptions& opts, const ModelCallback& on_model) {
  const auto start = std::chrono::steady_clock::now();
  ++extra_.calls;
  std::vector<Lit> assumptions = base_assumptions(opts);
  // call-scoped guard for blocking and bounding nogoods
  const Var guard = prog_.atoms.add(AtomKind::Auxiliary);
  assumptions.push_back(Lit::pos(guard));
  engine_.ensure_atoms(prog_.atoms.size());

  SolveResult result = SolveResult::Unsat;
  if (opts.mode == SolveMode::Optimize && !prog_.objective.empty()) {
    const std::vector<LevelSum> sums =
        level_sums(flatten_objective(prog_.objective, state_, cfg_.flatten_optimization));
    bool found = false;
    for (;;) {
      SolveStatus st = engine_.solve(assumptions);
      if (st == SolveStatus::Interrupted) {
        result = SolveResult::Interrupted;
        break;
      }
      if (st == SolveStatus::Unsat) {
        result = found ? SolveResult::Optimum : SolveResult::Unsat;
        break;
      }
      found = true;
      Model m = extract_model();
      const bool go = !on_model || on_model(m);
      engine_.reset();
      if (!go) {
        result = SolveResult::Sat;
        break;
      }
      Improvement imp = improvement_constraint(sums, *m.cost, Lit::pos(guard), prog_.atoms);
      engine_.ensure_atoms(prog_.atoms.size());
      for (const LinearAtom& la : imp.linear) add_linear(la);
      for (Nogood& ng : imp.nogoods) add_static(std::move(ng));
      csp_->sync_vars();
    }
  } else {
    std::uint64_t count = 0;
    for (;;) {
      SolveStatus st = engine_.solve(assumptions);
      if (st == SolveStatus::Interrupted) {
        result = SolveResult::Interrupted;
        break;
      }
      if (st == SolveStatus::Unsat) {
        result = count > 0 ? SolveResult::Sat : SolveResult::Unsat;
        break;
      }
      ++count;
      Model m = extract_model();
      const bool go = !on_model || on_model(m);
      Nogood block = blocking_nogood(m);
      block.push_back(Lit::pos(guard));
      engine_.reset();
      engine_.ensure_atoms(prog_.atoms.size());
      add_static(std::move(block));
      if (!go || (opts.models != 0 && count >= opts.models)) {
        result = SolveResult::Sat;
        break;
      }
    }
  }
  release_guard(guard);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  extra_.last_call_seconds = secs;
  extra_.total_seconds += secs;
  return result;
}

Statistics Session::statistics() const {
  Statistics s = extra_;
  const EngineStats& es = engine_.stats();
  s.choices = es.choices;
  s.conflicts = es.conflicts;
  s.restarts = es.restarts;
  s.static_nogoods = es.static_nogoods;
  s.dynamic_nogoods = es.dynamic_nogoods;
  s.learnt_nogoods = es.learnt_nogoods;
  s.order_atoms = pool_.size();
  s.atoms = prog_.atoms.size();
  s.variables = prog_.vars.size();
  return s;
}

namespace {

bool shown(const std::vector<std::string>& show, const std::string& name) {
  return show.empty() || std::find(show.begin(), show.end(), name) != show.end();
}

}  // namespace

std::string Session::format_model(const Model& m) const {
  std::vector<std::string> atoms;
  for (Var a : m.atoms) {
    if (shown(prog_.show, prog_.atoms[a].name)) atoms.push_back(prog_.atoms[a].name);
  }
  std::sort(atoms.begin(), atoms.end());
  std::ostringstream out;
  const char* sep = "";
  for (const std::string& a : atoms) {
    out << sep << a;
    sep = " ";
  }
  for (VarId v = 0; v < prog_.vars.size(); ++v) {
    const Variable& var = prog_.vars[v];
    if (var.auxiliary || !shown(prog_.show, var.name)) continue;
    out << sep << var.name << "=" << m.values[v];
    sep = " ";
  }
  return out.str();
}

NamedModel Session::named(const Model& m) const {
  NamedModel out;
  for (Var a : m.atoms) out.atoms.push_back(prog_.atoms[a].name);
  std::sort(out.atoms.begin(), out.atoms.end());
  for (VarId v = 0; v < prog_.vars.size(); ++v) {
    if (!prog_.vars[v].auxiliary) out.values.push_back(m.values[v]);
  }
  return out;
}

}  // namespace lazycasp
