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

#include "lazycasp/translate.hpp"

#include <algorithm>
#include <limits>

namespace lazycasp {

Lit OrderAtomPool::literal(const OrderLiteral& l) {
  switch (l.kind) {
    case OrderLiteral::Kind::True:
      return kTrueLit;
    case OrderLiteral::Kind::False:
      return kFalseLit;
    case OrderLiteral::Kind::Atom:
      break;
  }
  return Lit(atom(l.var, l.threshold), l.positive);
}

Var OrderAtomPool::atom(VarId v, Int d) {
  if (v >= by_var_.size()) by_var_.resize(v + 1);
  auto& m = by_var_[v];
  auto it = m.find(d);
  if (it != m.end()) return it->second;
  Var a = atoms_->add_order(v, d);
  m.emplace(d, a);
  created_.push_back(a);
  return a;
}

std::optional<Var> OrderAtomPool::find(VarId v, Int d) const {
  if (v >= by_var_.size()) return std::nullopt;
  auto it = by_var_[v].find(d);
  if (it == by_var_[v].end()) return std::nullopt;
  return it->second;
}

const std::map<Int, Var>& OrderAtomPool::thresholds(VarId v) const {
  static const std::map<Int, Var> kEmpty;
  return v < by_var_.size() ? by_var_[v] : kEmpty;
}

std::uint64_t estimate_nogoods(const LinearConstraint& c, const VariableTable& vars) {
  std::uint64_t est = 1;
  for (std::size_t i = 0; i + 1 < c.terms.size(); ++i) {
    std::uint64_t s = vars.domain(c.terms[i].var).size();
    if (s != 0 && est > std::numeric_limits<std::uint64_t>::max() / s) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    est *= s;
  }
  return est;
}

bool should_translate(const LinearConstraint& c, const VariableTable& vars,
                      const TranslateConfig& cfg) {
  if (cfg.translate_threshold < 0) return true;
  return estimate_nogoods(c, vars) < static_cast<std::uint64_t>(cfg.translate_threshold);
}

namespace {

struct Translator {
  const LinearConstraint& c;
  const VariableTable& vars;
  std::vector<Int> lb, ub;
  std::vector<Int> rest_lb, rest_ub;  // sums over terms after i
  std::vector<BoundNogood> out;
  BoundNogood delta;

  Translator(const LinearConstraint& con, const VariableTable& vt) : c(con), vars(vt) {
    const std::size_t n = c.terms.size();
    lb.resize(n);
    ub.resize(n);
    rest_lb.assign(n + 1, 0);
    rest_ub.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::tie(lb[i], ub[i]) = view_bounds(view(i), vars.domain(c.terms[i].var));
    }
    for (std::size_t i = n; i-- > 0;) {
      rest_lb[i] = checked_add(rest_lb[i + 1], lb[i]);
      rest_ub[i] = checked_add(rest_ub[i + 1], ub[i]);
    }
  }

  View view(std::size_t i) const { return {c.terms[i].coef, c.terms[i].var, 0}; }

  void run(std::size_t i, Int b) {
    const View w = view(i);
    const DomainSet& dom = vars.domain(w.var);
    ExtInt d = view_step(checked_sub(b, rest_ub[i + 1]), w, dom, Step::Next);
    while (d.finite()) {
      const Int dv = d.value();
      const bool keep = dv > lb[i];
      if (keep) delta.push_back({i, dv});
      if (checked_add(dv, rest_lb[i + 1]) <= b) {
        run(i + 1, checked_sub(b, dv));
        if (keep) delta.pop_back();
      } else {
        out.push_back(delta);
        if (keep) delta.pop_back();
        return;
      }
      d = view_step(d, w, dom, Step::Next);
    }
  }
};

}  // namespace

std::vector<BoundNogood> translate_bounds(const LinearConstraint& c, const VariableTable& vars) {
  if (c.terms.empty()) {
    if (c.bound < 0) return {BoundNogood{}};
    return {};
  }
  Translator t(c, vars);
  t.run(0, c.bound);
  return std::move(t.out);
}

bool stronger(const BoundNogood& a, const BoundNogood& b) {
  for (const ViewBound& x : a) {
    auto it = std::find_if(b.begin(), b.end(), [&](const ViewBound& y) { return y.term == x.term; });
    if (it == b.end() || x.d > it->d) return false;
  }
  return true;
}

std::vector<BoundNogood> prune_redundant(std::vector<BoundNogood> stream, std::size_t* removed) {
  std::vector<BoundNogood> kept;
  std::size_t dropped = 0;
  for (BoundNogood& n : stream) {
    if (!kept.empty()) {
      if (stronger(kept.back(), n)) {
        ++dropped;
        continue;
      }
      if (stronger(n, kept.back())) {
        kept.back() = std::move(n);
        ++dropped;
        continue;
      }
    }
    kept.push_back(std::move(n));
  }
  if (removed) *removed = dropped;
  return kept;
}

std::vector<Nogood> translate_constraint(Lit seed, const LinearConstraint& c,
                                         const VariableTable& vars, OrderAtomPool& pool,
                                         bool redundant_check, TranslateStats* stats) {
  std::vector<BoundNogood> stream = translate_bounds(c, vars);
  std::size_t removed = 0;
  const std::size_t emitted = stream.size();
  if (redundant_check) stream = prune_redundant(std::move(stream), &removed);
  if (stats) {
    stats->emitted += emitted;
    stats->removed += removed;
  }
  std::vector<Nogood> out;
  out.reserve(stream.size());
  for (const BoundNogood& bn : stream) {
    Nogood ng{seed};
    for (const ViewBound& vb : bn) {
      const Term& t = c.terms[vb.term];
      ng.push_back(pool.literal(tau_ge({t.coef, t.var, 0}, vb.d, vars.domain(t.var))));
    }
    if (auto made = make_nogood(std::move(ng))) out.push_back(std::move(*made));
  }
  return out;
}

std::vector<Var> seed_order_atoms(VarId v, std::int64_t n, const VariableTable& vars,
                                  OrderAtomPool& pool) {
  const DomainSet& dom = vars.domain(v);
  const std::uint64_t size = dom.size();
  std::vector<Var> out;
  if (n <= 0 || size < 2) return out;
  const std::uint64_t k = std::min<std::uint64_t>(static_cast<std::uint64_t>(n), size - 1);
  const std::uint64_t step = size / k;
  std::uint64_t last = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t i = 0; i < k; ++i) {
    std::uint64_t rank = std::min(step / 2 + i * step, size - 2);
    if (rank == last) continue;
    last = rank;
    out.push_back(pool.atom(v, dom.at(rank)));
  }
  return out;
}

std::vector<Nogood> emit_binary_order_nogoods(const OrderAtomPool& pool) {
  std::vector<Nogood> out;
  for (VarId v = 0; v < pool.num_vars(); ++v) {
    const auto& m = pool.thresholds(v);
    for (auto it = m.begin(); it != m.end() && std::next(it) != m.end(); ++it) {
      out.push_back({Lit::pos(it->second), Lit::neg(std::next(it)->second)});
    }
  }
  return out;
}

}  // namespace lazycasp
