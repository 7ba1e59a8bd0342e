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

#include "lazycasp/model.hpp"

#include <algorithm>
#include <ostream>

namespace lazycasp {

namespace {

using Wide = __int128;

Wide wide_floor_div(Wide a, Wide b) {
  Wide q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Wide wide_ceil_div(Wide a, Wide b) {
  Wide q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

// Domain values lie in [-kMaxValue, kMaxValue]; anything outside can be
// clamped to one past that interval without changing a comparison.
Int clamp_wide(Wide v) {
  if (v > kMaxValue) return kMaxValue + 1;
  if (v < -kMaxValue) return -kMaxValue - 1;
  return static_cast<Int>(v);
}

OrderLiteral order_atom_wide(VarId v, Wide d, const DomainSet& dom) {
  if (dom.empty() || d >= dom.upper()) return OrderLiteral::top();
  if (d < dom.lower()) return OrderLiteral::bottom();
  Int snapped = *dom.floor(static_cast<Int>(d));
  return {OrderLiteral::Kind::Atom, v, snapped, true};
}

OrderLiteral tau_wide(Int a, VarId v, Wide b, const DomainSet& dom) {
  if (a == 0) throw ContractViolation("view with zero coefficient");
  if (a > 0) return order_atom_wide(v, wide_floor_div(-b, a), dom);
  return complement(order_atom_wide(v, wide_ceil_div(-b, a) - 1, dom));
}

}  // namespace

std::ostream& operator<<(std::ostream& out, Lit l) {
  return out << (l.positive() ? "T" : "F") << l.var();
}

std::optional<Nogood> make_nogood(Nogood lits) {
  std::erase(lits, kTrueLit);
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (lits[i] == kFalseLit) return std::nullopt;
    if (i + 1 < lits.size() && lits[i + 1] == ~lits[i]) return std::nullopt;
  }
  return lits;
}

VarId VariableTable::add(std::string name, DomainSet domain, bool auxiliary) {
  if (!name.empty() && by_name_.count(name) != 0) {
    throw Error("variable declared twice: " + name);
  }
  VarId id = static_cast<VarId>(vars_.size());
  if (!name.empty()) by_name_.emplace(name, id);
  vars_.push_back({std::move(name), std::move(domain), auxiliary});
  return id;
}

std::optional<VarId> VariableTable::find(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

Int view_value(const View& view, Int d) {
  return checked_add(checked_mul(view.coef, d), view.offset);
}

std::pair<Int, Int> view_bounds(const View& view, const DomainSet& dom) {
  Int lo = view_value(view, dom.lower());
  Int hi = view_value(view, dom.upper());
  if (view.coef < 0) std::swap(lo, hi);
  return {lo, hi};
}

DomainSet view_image(const View& view, const DomainSet& dom) {
  return dom.scale(view.coef).shift(view.offset);
}

ExtInt view_step(ExtInt d, const View& view, const DomainSet& dom, Step dir) {
  if (dom.empty()) return dir == Step::Next ? ExtInt::pos_inf() : ExtInt::neg_inf();
  if (!d.finite()) {
    if (dir == Step::Next) {
      if (d.is_pos_inf()) return ExtInt::pos_inf();
      return view_bounds(view, dom).first;
    }
    if (d.is_neg_inf()) return ExtInt::neg_inf();
    return view_bounds(view, dom).second;
  }
  const Int a = view.coef;
  const Wide rel = Wide(d.value()) - view.offset;
  std::optional<Int> x;
  if (dir == Step::Next) {
    // smallest a*x + b > d
    if (a > 0) {
      x = dom.ceil(clamp_wide(wide_floor_div(rel, a) + 1));
    } else {
      x = dom.floor(clamp_wide(wide_ceil_div(rel, a) - 1));
    }
    if (!x) return ExtInt::pos_inf();
  } else {
    // largest a*x + b < d
    if (a > 0) {
      x = dom.floor(clamp_wide(wide_ceil_div(rel, a) - 1));
    } else {
      x = dom.ceil(clamp_wide(wide_floor_div(rel, a) + 1));
    }
    if (!x) return ExtInt::neg_inf();
  }
  return view_value(view, *x);
}

OrderLiteral complement(const OrderLiteral& l) {
  switch (l.kind) {
    case OrderLiteral::Kind::True:
      return OrderLiteral::bottom();
    case OrderLiteral::Kind::False:
      return OrderLiteral::top();
    case OrderLiteral::Kind::Atom:
      break;
  }
  OrderLiteral out = l;
  out.positive = !l.positive;
  return out;
}

std::ostream& operator<<(std::ostream& out, const OrderLiteral& l) {
  if (l.is_true()) return out << "T{}";
  if (l.is_false()) return out << "F{}";
  return out << (l.positive ? "T" : "F") << "(v" << l.var << "<=" << l.threshold << ")";
}

OrderLiteral order_atom_literal(VarId v, Int d, const DomainSet& dom) {
  return order_atom_wide(v, d, dom);
}

OrderLiteral tau(Int a, VarId v, Int b, const DomainSet& dom) { return tau_wide(a, v, b, dom); }

OrderLiteral tau_le(const View& view, ExtInt d, const DomainSet& dom) {
  if (d.is_pos_inf()) return OrderLiteral::top();
  if (d.is_neg_inf()) return OrderLiteral::bottom();
  return tau_wide(view.coef, view.var, Wide(view.offset) - d.value(), dom);
}

OrderLiteral tau_ge(const View& view, ExtInt d, const DomainSet& dom) {
  if (d.is_neg_inf()) return OrderLiteral::top();
  if (d.is_pos_inf()) return OrderLiteral::bottom();
  return tau_wide(-view.coef, view.var, Wide(d.value()) - view.offset, dom);
}

OrderLiteral tau_gt(const View& view, ExtInt d, const DomainSet& dom) {
  if (d.is_neg_inf()) return OrderLiteral::top();
  if (d.is_pos_inf()) return OrderLiteral::bottom();
  return tau_wide(-view.coef, view.var, Wide(d.value()) + 1 - view.offset, dom);
}

std::pair<Int, Int> assigned_bounds(std::span<const OrderLiteral> lits, VarId v,
                                    const DomainSet& dom) {
  if (dom.empty()) throw ContractViolation("bounds of an empty domain");
  Int lb = dom.lower();
  Int ub = dom.upper();
  bool empty = false;
  for (const OrderLiteral& l : lits) {
    if (l.is_false()) empty = true;
    if (l.kind != OrderLiteral::Kind::Atom || l.var != v) continue;
    if (l.positive) {
      ub = std::min(ub, l.threshold);
    } else {
      auto n = dom.next(l.threshold);
      if (!n) {
        empty = true;
      } else {
        lb = std::max(lb, *n);
      }
    }
  }
  if (empty || lb > ub) throw ContractViolation("inconsistent order literals");
  return {lb, ub};
}

}  // namespace lazycasp
