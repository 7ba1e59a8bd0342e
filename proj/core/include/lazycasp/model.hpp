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

// Integer variables, linear views, Boolean literals and the mapping from
// view comparisons to order-atom literals.

#ifndef LAZYCASP_MODEL_HPP_
#define LAZYCASP_MODEL_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lazycasp/domain.hpp"

namespace lazycasp {

// Index of an integer variable.
using VarId = std::uint32_t;
// Index of a Boolean atom. Atom 0 is the constant "true".
using Var = std::uint32_t;

inline constexpr Var kTrueAtom = 0;

// A signed Boolean atom. positive() means the literal "T a".
class Lit {
 public:
  constexpr Lit() : rep_(0) {}
  constexpr Lit(Var v, bool positive) : rep_((v << 1) | (positive ? 0u : 1u)) {}
  static constexpr Lit pos(Var v) { return Lit(v, true); }
  static constexpr Lit neg(Var v) { return Lit(v, false); }
  static constexpr Lit from_index(std::uint32_t i) {
    Lit l;
    l.rep_ = i;
    return l;
  }

  constexpr Var var() const { return rep_ >> 1; }
  constexpr bool positive() const { return (rep_ & 1u) == 0; }
  constexpr std::uint32_t index() const { return rep_; }
  constexpr Lit operator~() const { return from_index(rep_ ^ 1u); }

  friend constexpr bool operator==(Lit a, Lit b) { return a.rep_ == b.rep_; }
  friend constexpr auto operator<=>(Lit a, Lit b) { return a.rep_ <=> b.rep_; }

 private:
  std::uint32_t rep_;
};

inline constexpr Lit kTrueLit = Lit::pos(kTrueAtom);
inline constexpr Lit kFalseLit = Lit::neg(kTrueAtom);

std::ostream& operator<<(std::ostream& out, Lit l);

// A set of literals that must not all hold at the same time.
using Nogood = std::vector<Lit>;

// Sorts and deduplicates; strips the constant true literal. Returns nullopt
// when the nogood can never be violated (it holds a complementary pair or
// the constant false literal).
std::optional<Nogood> make_nogood(Nogood lits);

// a * var + offset with a != 0.
struct View {
  Int coef = 1;
  VarId var = 0;
  Int offset = 0;
  friend bool operator==(const View&, const View&) = default;
};

struct Variable {
  std::string name;
  DomainSet domain;
  // Introduced by preprocessing; never printed.
  bool auxiliary = false;
};

class VariableTable {
 public:
  VarId add(std::string name, DomainSet domain, bool auxiliary = false);
  std::optional<VarId> find(const std::string& name) const;
  const Variable& operator[](VarId v) const { return vars_.at(v); }
  Variable& operator[](VarId v) { return vars_.at(v); }
  const DomainSet& domain(VarId v) const { return vars_.at(v).domain; }
  void set_domain(VarId v, DomainSet dom) { vars_.at(v).domain = std::move(dom); }
  std::size_t size() const { return vars_.size(); }

 private:
  std::vector<Variable> vars_;
  std::unordered_map<std::string, VarId> by_name_;
};

Int view_value(const View& view, Int d);
// Smallest and largest image value. Precondition: domain not empty.
std::pair<Int, Int> view_bounds(const View& view, const DomainSet& dom);
// Image of the view; may throw ContractViolation for huge scaled domains.
DomainSet view_image(const View& view, const DomainSet& dom);

enum class Step : std::uint8_t { Prev, Next };
// Largest image value < d (Prev) or smallest image value > d (Next); an
// infinity when there is none.
ExtInt view_step(ExtInt d, const View& view, const DomainSet& dom, Step dir);

// Literal over an order atom (v <= threshold). Constant kinds stand for the
// tautologically true and false literals; they never reach stored nogoods.
struct OrderLiteral {
  enum class Kind : std::uint8_t { Atom, True, False };
  Kind kind = Kind::Atom;
  VarId var = 0;
  Int threshold = 0;
  bool positive = true;

  static OrderLiteral top() { return {Kind::True, 0, 0, true}; }
  static OrderLiteral bottom() { return {Kind::False, 0, 0, true}; }
  bool is_true() const { return kind == Kind::True; }
  bool is_false() const { return kind == Kind::False; }
  friend bool operator==(const OrderLiteral&, const OrderLiteral&) = default;
};

OrderLiteral complement(const OrderLiteral& l);
std::ostream& operator<<(std::ostream& out, const OrderLiteral& l);

// (v <= d), snapped down to a domain value.
OrderLiteral order_atom_literal(VarId v, Int d, const DomainSet& dom);
// Literal equivalent to a * v + b <= 0.
OrderLiteral tau(Int a, VarId v, Int b, const DomainSet& dom);
// Literals equivalent to view <= d, view >= d and view > d.
OrderLiteral tau_le(const View& view, ExtInt d, const DomainSet& dom);
OrderLiteral tau_ge(const View& view, ExtInt d, const DomainSet& dom);
OrderLiteral tau_gt(const View& view, ExtInt d, const DomainSet& dom);

// Bounds of v implied by a set of order literals over v. Literals over
// other variables are ignored. Throws ContractViolation if the literals
// leave no value.
std::pair<Int, Int> assigned_bounds(std::span<const OrderLiteral> lits, VarId v,
                                    const DomainSet& dom);

}  // namespace lazycasp

#endif  // LAZYCASP_MODEL_HPP_
