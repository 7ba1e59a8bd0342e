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

#include <random>

#include "catch_amalgamated.hpp"
#include "lazycasp/model.hpp"

using namespace lazycasp;

namespace {

OrderLiteral T(VarId v, Int d) { return {OrderLiteral::Kind::Atom, v, d, true}; }
OrderLiteral F(VarId v, Int d) { return {OrderLiteral::Kind::Atom, v, d, false}; }

// Whether v = d satisfies the order literal.
bool holds(const OrderLiteral& l, Int d) {
  if (l.is_true()) return true;
  if (l.is_false()) return false;
  return (d <= l.threshold) == l.positive;
}

DomainSet random_domain(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 3), lo(-20, 20), len(0, 4), gap(2, 5);
  std::vector<Range> rs;
  Int at = lo(rng);
  for (int i = count(rng); i > 0; --i) {
    Int l = at;
    Int h = l + len(rng);
    rs.push_back({l, h});
    at = h + gap(rng);
  }
  return DomainSet::from_ranges(rs);
}

}  // namespace

TEST_CASE("domain sets merge, search and rank", "[model]") {
  DomainSet d = DomainSet::from_ranges({{7, 9}, {1, 3}, {4, 4}, {12, 11}});
  REQUIRE(d.ranges().size() == 2);
  CHECK(d.ranges()[0] == Range{1, 4});
  CHECK(d.ranges()[1] == Range{7, 9});
  CHECK(d.size() == 7);
  CHECK(d.contains(4));
  CHECK_FALSE(d.contains(5));
  CHECK(d.prev(7) == 4);
  CHECK(d.next(4) == 7);
  CHECK_FALSE(d.prev(1).has_value());
  CHECK(d.floor(6) == 4);
  CHECK(d.ceil(6) == 7);
  CHECK(d.at(4) == 7);
  CHECK(d.rank(8) == 5);
  CHECK(d.count(3, 8) == 4);
  CHECK(DomainSet().empty());
}

TEST_CASE("domain algebra", "[model]") {
  DomainSet s = DomainSet(1, 3).scale(-2);
  REQUIRE(s.ranges().size() == 3);
  CHECK(s.ranges()[0] == Range{-6, -6});
  CHECK(s.ranges()[1] == Range{-4, -4});
  CHECK(s.ranges()[2] == Range{-2, -2});
  CHECK(DomainSet(1, 10).intersect(DomainSet(5, 20)) == DomainSet(5, 10));
  CHECK(DomainSet::from_ranges({{1, 3}, {7, 9}}).size() == 6);
  CHECK(DomainSet(1, 3).unite(DomainSet(4, 6)) == DomainSet(1, 6));
  CHECK(DomainSet(1, 3).shift(10) == DomainSet(11, 13));
  CHECK(DomainSet(1, 10).clamp(3, 20) == DomainSet(3, 10));
}

TEST_CASE("scaling keeps the size", "[model][property]") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    DomainSet d = random_domain(rng);
    for (Int f : {Int(-3), Int(-1), Int(1), Int(2), Int(5)}) {
      DomainSet s = d.scale(f);
      CHECK(s.size() == d.size());
      for (const Range& r : d.ranges()) {
        for (Int v = r.lo; v <= r.hi; ++v) CHECK(s.contains(v * f));
      }
    }
  }
}

TEST_CASE("checked arithmetic rejects overflow", "[model]") {
  CHECK_THROWS_AS(checked_mul(kMaxValue, 2), OverflowError);
  CHECK_THROWS_AS(checked_add(kMaxValue, 1), OverflowError);
  CHECK(checked_sub(-5, 3) == -8);
  CHECK(floor_div(-7, 2) == -4);
  CHECK(ceil_div(-7, 2) == -3);
  CHECK(floor_div(7, -2) == -4);
  CHECK(ceil_div(7, 2) == 4);
}

TEST_CASE("view bounds", "[model]") {
  const DomainSet x(1, 10);
  CHECK(view_bounds({1, 0, 0}, x) == std::pair<Int, Int>{1, 10});
  CHECK(view_bounds({-5, 0, 7}, DomainSet(1, 5)) == std::pair<Int, Int>{-18, 2});
  CHECK(view_bounds({1, 0, 0}, DomainSet(5, 5)) == std::pair<Int, Int>{5, 5});
  CHECK(view_image({-5, 0, 7}, DomainSet(1, 5)) == DomainSet::from_values({-18, -13, -8, -3, 2}));
}

TEST_CASE("previous and next image values", "[model]") {
  const DomainSet x(1, 10);
  CHECK(view_step(17, {2, 0, 3}, x, Step::Prev) == ExtInt(15));
  CHECK(view_step(0, {1, 0, 0}, x, Step::Prev) == ExtInt::neg_inf());
  CHECK(view_step(6, {1, 0, 0}, x, Step::Next) == ExtInt(7));
  CHECK(view_step(10, {1, 0, 0}, x, Step::Next) == ExtInt::pos_inf());
  CHECK(view_step(ExtInt::neg_inf(), {1, 0, 0}, x, Step::Next) == ExtInt(1));
}

TEST_CASE("stepping forth and back never overshoots", "[model][property]") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-4, 4), off(-5, 5), pt(-60, 60);
  for (int i = 0; i < 500; ++i) {
    DomainSet dom = random_domain(rng);
    Int a = 0;
    while (a == 0) a = coef(rng);
    View w{a, 0, off(rng)};
    Int d = pt(rng);
    ExtInt n = view_step(d, w, dom, Step::Next);
    if (!n.finite()) continue;
    ExtInt back = view_step(n, w, dom, Step::Prev);
    if (back.finite()) CHECK(back.value() <= d);
  }
}

TEST_CASE("tau maps linear comparisons to order literals", "[model]") {
  const DomainSet x(1, 10);
  CHECK(tau(1, 0, -6, x) == T(0, 6));
  CHECK(tau(-1, 0, 7, x) == F(0, 6));
  CHECK(tau(1, 0, -10, x).is_true());
  CHECK(tau(1, 0, 0, x).is_false());
  CHECK(tau(1, 0, -5, DomainSet::from_ranges({{1, 3}, {7, 9}})) == T(0, 3));
}

TEST_CASE("order literals of -5v+7 over 1..5", "[model]") {
  const DomainSet v(1, 5);
  const View w{-5, 0, 7};
  CHECK(tau_le(w, -18, v) == F(0, 4));
  CHECK(tau_le(w, -13, v) == F(0, 3));
  CHECK(tau_le(w, -8, v) == F(0, 2));
  CHECK(tau_le(w, -3, v) == F(0, 1));
  CHECK(tau_le(w, 2, v).is_true());
}

TEST_CASE("tau agrees with evaluation", "[model][property]") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> coef(-5, 5), off(-30, 30);
  for (int i = 0; i < 1000; ++i) {
    DomainSet dom = random_domain(rng);
    Int a = 0;
    while (a == 0) a = coef(rng);
    Int b = off(rng);
    OrderLiteral l = tau(a, 0, b, dom);
    for (const Range& r : dom.ranges()) {
      for (Int d = r.lo; d <= r.hi; ++d) {
        INFO("a=" << a << " b=" << b << " dom=" << dom << " d=" << d);
        CHECK(holds(l, d) == (a * d + b <= 0));
      }
    }
    if (l.kind == OrderLiteral::Kind::Atom) {
      CHECK(dom.contains(l.threshold));
      CHECK(l.threshold < dom.upper());
    }
  }
}

TEST_CASE("tau on views agrees with evaluation", "[model][property]") {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coef(-4, 4), off(-6, 6), pt(-40, 40);
  for (int i = 0; i < 1000; ++i) {
    DomainSet dom = random_domain(rng);
    Int a = 0;
    while (a == 0) a = coef(rng);
    View w{a, 0, off(rng)};
    Int d = pt(rng);
    OrderLiteral le = tau_le(w, d, dom), ge = tau_ge(w, d, dom), gt = tau_gt(w, d, dom);
    for (const Range& r : dom.ranges()) {
      for (Int v = r.lo; v <= r.hi; ++v) {
        Int img = view_value(w, v);
        CHECK(holds(le, v) == (img <= d));
        CHECK(holds(ge, v) == (img >= d));
        CHECK(holds(gt, v) == (img > d));
      }
    }
  }
}

TEST_CASE("bounds under an assignment", "[model]") {
  const DomainSet x(1, 10);
  std::vector<OrderLiteral> b1{T(0, 6)};
  CHECK(assigned_bounds(b1, 0, x) == std::pair<Int, Int>{1, 6});
  std::vector<OrderLiteral> b2{F(0, 6)};
  CHECK(assigned_bounds(b2, 0, x) == std::pair<Int, Int>{7, 10});
  CHECK(assigned_bounds({}, 0, x) == std::pair<Int, Int>{1, 10});
  std::vector<OrderLiteral> bad{T(0, 3), F(0, 5)};
  CHECK_THROWS_AS(assigned_bounds(bad, 0, x), ContractViolation);
  std::vector<OrderLiteral> other{T(1, 2), F(0, 2), T(0, 8)};
  CHECK(assigned_bounds(other, 0, x) == std::pair<Int, Int>{3, 8});
}

TEST_CASE("nogood construction", "[model]") {
  Lit a = Lit::pos(1), b = Lit::neg(2);
  auto ng = make_nogood({b, a, a, kTrueLit});
  REQUIRE(ng.has_value());
  CHECK(*ng == Nogood{a, b});
  CHECK_FALSE(make_nogood({a, ~a}).has_value());
  CHECK_FALSE(make_nogood({a, kFalseLit}).has_value());
  CHECK(~~a == a);
  CHECK((~a).var() == 1);
  CHECK_FALSE((~a).positive());
}

TEST_CASE("variable table", "[model]") {
  VariableTable vt;
  VarId x = vt.add("x", DomainSet(1, 3));
  VarId y = vt.add("y", DomainSet(0, 0), true);
  CHECK(vt.find("x") == x);
  CHECK_FALSE(vt.find("z").has_value());
  CHECK(vt[y].auxiliary);
  vt.set_domain(x, DomainSet(2, 3));
  CHECK(vt.domain(x).lower() == 2);
}
