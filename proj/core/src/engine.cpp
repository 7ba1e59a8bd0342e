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

#include "lazycasp/engine.hpp"

#include <algorithm>
#include <utility>

namespace lazycasp {

Engine::Engine(EngineConfig cfg) : cfg_(cfg) {
  ensure_atoms(1);
  assign(kTrueLit, kNoReason);
}

void Engine::ensure_atoms(std::size_t n) {
  const std::size_t old = value_.size();
  if (n <= old) return;
  value_.resize(n, Value::Free);
  level_.resize(n, -1);
  reason_.resize(n, kNoReason);
  phase_.resize(n, 0);
  activity_.resize(n, 0.0);
  watches_.resize(2 * n);
  seen_.resize(n, 0);
  heap_pos_.resize(n, -1);
  for (Var v = static_cast<Var>(old); v < n; ++v) {
    if (v != kTrueAtom) heap_insert(v);
  }
}

// ---------------------------------------------------------------------------
// nogood store

Engine::Handle Engine::alloc(Nogood lits, NogoodKind kind) {
  Handle h;
  if (!free_.empty()) {
    h = free_.back();
    free_.pop_back();
  } else {
    h = static_cast<Handle>(store_.size());
    store_.emplace_back();
  }
  Stored& s = store_[h];
  s.lits = std::move(lits);
  s.kind = kind;
  s.watched = false;
  s.deleted = false;
  s.activity = 0.0;
  ++live_;
  if (kind == NogoodKind::Static) {
    ++num_static_;
  } else if (kind != NogoodKind::Implicit) {
    ++num_deletable_;
  } else {
    implicit_.push_back(h);
  }
  return h;
}

void Engine::release(Handle h) {
  Stored& s = store_[h];
  if (s.deleted) return;
  s.deleted = true;
  --live_;
  if (s.kind == NogoodKind::Static) {
    --num_static_;
  } else if (s.kind != NogoodKind::Implicit) {
    --num_deletable_;
  }
  s.lits.clear();
  s.lits.shrink_to_fit();
  // watched slots are recycled after the watch lists have been swept
  if (!s.watched) free_.push_back(h);
}

void Engine::attach(Handle h) {
  Stored& s = store_[h];
  if (s.lits.size() < 2) return;
  // non-true literals first, then true ones by decreasing level
  auto key = [&](Lit l) -> std::pair<int, int> {
    switch (value(l)) {
      case Value::False:
        return {2, level_[l.var()]};
      case Value::Free:
        return {1, 0};
      case Value::True:
        break;
    }
    return {0, level_[l.var()]};
  };
  for (int w = 0; w < 2; ++w) {
    auto best = s.lits.begin() + w;
    for (auto it = best + 1; it != s.lits.end(); ++it) {
      if (key(*it) > key(*best)) best = it;
    }
    std::iter_swap(s.lits.begin() + w, best);
  }
  s.watched = true;
  watches_[s.lits[0].index()].push_back(h);
  watches_[s.lits[1].index()].push_back(h);
}

bool Engine::locked(Handle h) const {
  const Stored& s = store_[h];
  if (s.deleted || s.lits.empty()) return false;
  Var v = s.lits[0].var();
  return value_[v] != Value::Free && reason_[v] == h;
}

AddResult Engine::add_nogood(Nogood lits, NogoodKind kind) {
  std::optional<Nogood> made = make_nogood(std::move(lits));
  if (kind == NogoodKind::Dynamic || kind == NogoodKind::Implicit) ++stats_.dynamic_nogoods;
  if (kind == NogoodKind::Static) ++stats_.static_nogoods;
  if (!made) return AddResult::Satisfied;
  Nogood ng = std::move(*made);
  if (kind == NogoodKind::Dynamic && !cfg_.learn_nogoods) kind = NogoodKind::Implicit;
  Var max_var = 0;
  for (Lit l : ng) max_var = std::max(max_var, l.var());
  ensure_atoms(static_cast<std::size_t>(max_var) + 1);

  if (decision_level() == 0) {
    // simplify against permanent assignments
    Nogood kept;
    for (Lit l : ng) {
      if (value(l) == Value::False) return AddResult::Satisfied;
      if (value(l) == Value::Free) kept.push_back(l);
    }
    ng = std::move(kept);
    if (ng.empty()) {
      unsat_ = true;
      return AddResult::Conflict;
    }
  }

  // classify
  int nontrue = 0;
  bool satisfied = false;
  int max_true_level = 0;
  Lit free_lit;
  for (Lit l : ng) {
    Value v = value(l);
    if (v == Value::True) {
      max_true_level = std::max(max_true_level, level_[l.var()]);
    } else {
      ++nontrue;
      if (v == Value::False) {
        satisfied = true;
      } else {
        free_lit = l;
      }
    }
  }

  if (ng.size() == 1) {
    if (kind == NogoodKind::Implicit) kind = NogoodKind::Dynamic;
    Handle h = alloc(ng, kind);
    if (decision_level() > 0) root_units_.push_back(h);
    if (value(ng[0]) == Value::Free) {
      assign(~ng[0], h);
      return AddResult::Unit;
    }
    if (value(ng[0]) == Value::False) return AddResult::Satisfied;
    backtrack(level_[ng[0].var()]);
    pending_conflict_ = h;
    return AddResult::Conflict;
  }

  if (nontrue >= 2 || satisfied) {
    if (kind == NogoodKind::Implicit) {
      ++stats_.deleted_nogoods;
      return satisfied ? AddResult::Satisfied : AddResult::Ok;
    }
    Handle h = alloc(std::move(ng), kind);
    attach(h);
    return satisfied ? AddResult::Satisfied : AddResult::Ok;
  }

  Handle h = alloc(std::move(ng), kind);
  Stored& s = store_[h];
  if (nontrue == 1) {
    auto it = std::find(s.lits.begin(), s.lits.end(), free_lit);
    std::iter_swap(s.lits.begin(), it);
    if (kind != NogoodKind::Implicit) attach(h);
    // attach keeps a free literal in front
    assign(~store_[h].lits[0], h);
    return AddResult::Unit;
  }
  // violated
  if (kind != NogoodKind::Implicit) attach(h);
  if (max_true_level < decision_level()) backtrack(max_true_level);
  pending_conflict_ = h;
  return AddResult::Conflict;
}

// ---------------------------------------------------------------------------
// assignment

void Engine::assign(Lit l, Handle reason) {
  Var v = l.var();
  value_[v] = l.positive() ? Value::True : Value::False;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

std::optional<Engine::Handle> Engine::unit_propagate() {
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    ++stats_.propagations;
    std::vector<Handle>& ws = watches_[p.index()];
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < ws.size()) {
      const Handle h = ws[i++];
      Stored& s = store_[h];
      if (s.deleted) continue;
      std::vector<Lit>& lits = s.lits;
      if (lits[0] == p) std::swap(lits[0], lits[1]);
      if (value(lits[0]) == Value::False) {
        ws[j++] = h;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < lits.size(); ++k) {
        if (value(lits[k]) != Value::True) {
          std::swap(lits[1], lits[k]);
          watches_[lits[1].index()].push_back(h);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = h;
      if (value(lits[0]) == Value::True) {
        while (i < ws.size()) ws[j++] = ws[i++];
        ws.resize(j);
        qhead_ = trail_.size();
        return h;
      }
      assign(~lits[0], h);
    }
    ws.resize(j);
  }
  return std::nullopt;
}

std::optional<Engine::Handle> Engine::propagate_all() {
  for (;;) {
    if (pending_conflict_) {
      Handle h = *pending_conflict_;
      pending_conflict_.reset();
      return h;
    }
    if (auto c = unit_propagate()) return c;
    bool added = false;
    for (Propagator* p : propagators_) {
      added = p->propagate(*this);
      if (pending_conflict_ || unsat_) break;
      if (added) break;
    }
    if (unsat_) return std::nullopt;
    if (!added && !pending_conflict_ && qhead_ == trail_.size()) return std::nullopt;
  }
}

void Engine::backtrack(int level) {
  if (decision_level() <= level) return;
  const std::size_t target = trail_lim_[static_cast<std::size_t>(level)];
  for (std::size_t i = trail_.size(); i-- > target;) {
    Var v = trail_[i].var();
    phase_[v] = value_[v] == Value::True ? 1 : 0;
    value_[v] = Value::Free;
    reason_[v] = kNoReason;
    level_[v] = -1;
    heap_insert(v);
  }
  trail_.resize(target);
  trail_lim_.resize(static_cast<std::size_t>(level));
  qhead_ = std::min(qhead_, target);
  for (Propagator* p : propagators_) p->on_backtrack(*this, target);
  if (level == 0) {
    for (Handle h : root_units_) {
      if (store_[h].deleted) continue;
      Lit l = store_[h].lits[0];
      if (value(l) == Value::Free) {
        assign(~l, h);
      } else if (value(l) == Value::True) {
        unsat_ = true;
      }
    }
    root_units_.clear();
  }
}

// ---------------------------------------------------------------------------
// conflict analysis

void Engine::analyze(Handle conflict, Nogood& learnt, int& back_level) {
  learnt.clear();
  learnt.push_back(Lit());
  int path = 0;
  std::optional<Var> skip;
  std::size_t idx = trail_.size();
  Handle h = conflict;
  Lit p;
  for (;;) {
    Stored& s = store_[h];
    if (s.kind == NogoodKind::Implicit) {
      // needed after all: make it a regular stored nogood
      s.kind = NogoodKind::Dynamic;
      ++num_deletable_;
      attach(h);
    }
    if (s.kind != NogoodKind::Static) s.activity += nogood_inc_;
    for (Lit q : store_[h].lits) {
      Var v = q.var();
      if (skip && v == *skip) continue;
      if (seen_[v] || level_[v] <= 0) continue;
      seen_[v] = 1;
      bump(v);
      if (level_[v] >= decision_level()) {
        ++path;
      } else {
        learnt.push_back(q);
      }
    }
    do {
      --idx;
    } while (!seen_[trail_[idx].var()]);
    p = trail_[idx];
    seen_[p.var()] = 0;
    --path;
    if (path <= 0) break;
    h = reason_[p.var()];
    skip = p.var();
  }
  learnt[0] = p;
  for (std::size_t i = 1; i < learnt.size(); ++i) seen_[learnt[i].var()] = 0;
  back_level = 0;
  if (learnt.size() > 1) {
    std::size_t best = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i) {
      if (level_[learnt[i].var()] > level_[learnt[best].var()]) best = i;
    }
    std::swap(learnt[1], learnt[best]);
    back_level = level_[learnt[1].var()];
  }
}

void Engine::bump(Var v, double amount) {
  activity_[v] += var_inc_ * amount;
  if (activity_[v] > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v]));
}

// ---------------------------------------------------------------------------
// store maintenance

void Engine::drop_implicit() {
  std::vector<Handle> keep;
  for (Handle h : implicit_) {
    Stored& s = store_[h];
    if (s.deleted || s.kind != NogoodKind::Implicit) continue;
    if (locked(h)) {
      keep.push_back(h);
    } else {
      release(h);
      ++stats_.deleted_nogoods;
    }
  }
  implicit_ = std::move(keep);
}

void Engine::reduce_db() {
  std::vector<Handle> cand;
  for (Handle h = 0; h < store_.size(); ++h) {
    const Stored& s = store_[h];
    if (s.deleted || s.kind == NogoodKind::Static || s.kind == NogoodKind::Implicit) continue;
    if ((s.kind == NogoodKind::Learnt && s.lits.size() <= 2) || locked(h)) continue;
    cand.push_back(h);
  }
  std::sort(cand.begin(), cand.end(),
            [&](Handle a, Handle b) { return store_[a].activity < store_[b].activity; });
  const std::size_t n = cand.size() / 2;
  for (std::size_t i = 0; i < n; ++i) {
    release(cand[i]);
    ++stats_.deleted_nogoods;
  }
  for (auto& ws : watches_) {
    std::erase_if(ws, [&](Handle h) { return store_[h].deleted; });
  }
  for (Handle h = 0; h < store_.size(); ++h) {
    Stored& s = store_[h];
    if (s.deleted && s.watched) {
      s.watched = false;
      free_.push_back(h);
    }
  }
  for (Handle h = 0; h < store_.size(); ++h) store_[h].activity *= 0.5;
  nogood_inc_ = 1.0;
  reduce_limit_ = reduce_limit_ + reduce_limit_ / 10;
}

std::uint64_t Engine::luby(std::uint64_t i) {
  // i-th element (0-based) of 1 1 2 1 1 2 4 ...
  std::uint64_t size = 1;
  std::uint64_t seq = 0;
  while (size < i + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  std::uint64_t x = i;
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::uint64_t(1) << seq;
}

// ---------------------------------------------------------------------------
// heuristic

void Engine::heap_insert(Var v) {
  if (heap_pos_[v] >= 0) return;
  heap_pos_[v] = static_cast<std::int64_t>(heap_.size());
  heap_.push_back(v);
  heap_up(heap_.size() - 1);
}

void Engine::heap_up(std::size_t i) {
  Var v = heap_[i];
  while (i > 0) {
    std::size_t parent = (i - 1) / 2;
    if (!heap_less(v, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = parent;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<std::int64_t>(i);
}

void Engine::heap_down(std::size_t i) {
  Var v = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], v)) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = child;
  }
  heap_[i] = v;
  heap_pos_[v] = static_cast<std::int64_t>(i);
}

Var Engine::heap_pop() {
  Var top = heap_.front();
  heap_pos_[top] = -1;
  Var last = heap_.back();
  heap_.pop_back();
  if (!heap_.empty()) {
    heap_[0] = last;
    heap_pos_[last] = 0;
    heap_down(0);
  }
  return top;
}

std::optional<Var> Engine::pick_branch() {
  while (!heap_.empty()) {
    Var v = heap_pop();
    if (value_[v] == Value::Free) return v;
  }
  return std::nullopt;
}

void Engine::restart() {
  ++stats_.restarts;
  backtrack(0);
  drop_implicit();
}

// ---------------------------------------------------------------------------
// search

bool Engine::propagate_fixpoint(std::span<const Lit> assumptions) {
  backtrack(0);
  if (unsat_) return false;
  for (Lit a : assumptions) ensure_atoms(static_cast<std::size_t>(a.var()) + 1);
  std::size_t next = 0;
  for (;;) {
    std::optional<Handle> conflict = propagate_all();
    if (unsat_ || conflict) {
      if (conflict && decision_level() == 0) unsat_ = true;
      backtrack(0);
      return false;
    }
    if (next == assumptions.size()) return true;
    Lit a = assumptions[next++];
    if (is_false(a)) {
      backtrack(0);
      return false;
    }
    trail_lim_.push_back(trail_.size());
    if (!is_true(a)) assign(a, kNoReason);
  }
}

SolveStatus Engine::solve(std::span<const Lit> assumptions) {
  backtrack(0);
  if (unsat_) return SolveStatus::Unsat;
  for (Lit a : assumptions) ensure_atoms(static_cast<std::size_t>(a.var()) + 1);
  reduce_limit_ = std::max<std::size_t>({reduce_limit_, 4 * num_static_, 1000});
  const int root = static_cast<int>(assumptions.size());
  std::uint64_t call_conflicts = 0;
  std::uint64_t restart_index = 0;
  std::uint64_t since_restart = 0;
  std::uint64_t restart_limit = luby(restart_index) * cfg_.restart_unit;
  Nogood learnt;
  auto finish = [&](SolveStatus st) {
    if (st != SolveStatus::Sat) backtrack(0);
    return st;
  };
  for (;;) {
    std::optional<Handle> conflict = propagate_all();
    if (unsat_) return finish(SolveStatus::Unsat);
    if (conflict) {
      ++stats_.conflicts;
      ++call_conflicts;
      ++since_restart;
      if (decision_level() == 0) {
        unsat_ = true;
        return finish(SolveStatus::Unsat);
      }
      int conflict_level = 0;
      for (Lit l : store_[*conflict].lits) conflict_level = std::max(conflict_level, level_[l.var()]);
      if (conflict_level < decision_level()) backtrack(conflict_level);
      if (decision_level() == 0) {
        unsat_ = true;
        return finish(SolveStatus::Unsat);
      }
      if (decision_level() <= root) return finish(SolveStatus::Unsat);
      int back_level = 0;
      analyze(*conflict, learnt, back_level);
      backtrack(back_level);
      Handle h = alloc(learnt, NogoodKind::Learnt);
      ++stats_.learnt_nogoods;
      if (learnt.size() == 1) {
        // backtrack(0) already happened; the unit holds at the root
        if (is_true(learnt[0])) {
          unsat_ = true;
          return finish(SolveStatus::Unsat);
        }
        if (!is_false(learnt[0])) assign(~learnt[0], h);
      } else {
        attach(h);
        assign(~store_[h].lits[0], h);
      }
      var_inc_ /= cfg_.var_decay;
      nogood_inc_ *= 1.001;
      if (cfg_.conflict_limit != 0 && call_conflicts >= cfg_.conflict_limit) {
        return finish(SolveStatus::Interrupted);
      }
      if (since_restart >= restart_limit) {
        since_restart = 0;
        restart_limit = luby(++restart_index) * cfg_.restart_unit;
        restart();
      }
      if (num_deletable_ > reduce_limit_) reduce_db();
      if (implicit_.size() > 4 * reduce_limit_) drop_implicit();
      continue;
    }
    if (decision_level() < root) {
      Lit a = assumptions[static_cast<std::size_t>(decision_level())];
      if (is_false(a)) return finish(SolveStatus::Unsat);
      trail_lim_.push_back(trail_.size());
      if (!is_true(a)) assign(a, kNoReason);
      continue;
    }
    std::optional<Var> v = pick_branch();
    if (!v) {
      bool split = false;
      for (Propagator* p : propagators_) {
        if (auto l = p->split(*this)) {
          ensure_atoms(static_cast<std::size_t>(l->var()) + 1);
          ++stats_.splits;
          split = true;
          break;
        }
      }
      if (split) continue;
      return SolveStatus::Sat;
    }
    ++stats_.choices;
    trail_lim_.push_back(trail_.size());
    assign(Lit(*v, phase_[*v] != 0), kNoReason);
  }
}

}  // namespace lazycasp
