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

// Text format for ground instances.
//
//   % comment
//   var x 1..10,20
//   rule a :- not b.            rule :- a, c.          rule {a; b} :- c.
//   rule a.
//   con sum c := 2*x + -1*y <= 3          (relations <=, <, >=, >, =, !=)
//   con dom d := x in 1..3,5
//   con distinct e := x, y+1, 2*z
//   minimize 3*x @ 1, y @ 0
//   show a          external e          set e true|false|release
//   part step(1)
//
// Statements before the first `part` line belong to the part "base".

#ifndef LAZYCASP_INSTANCE_HPP_
#define LAZYCASP_INSTANCE_HPP_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lazycasp/program.hpp"

namespace lazycasp {

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Named view: coef * var + offset; var empty for a constant.
struct ViewSpec {
  Int coef = 1;
  std::string var;
  Int offset = 0;
  friend bool operator==(const ViewSpec&, const ViewSpec&) = default;
};

struct VarStmt {
  std::string name;
  DomainSet domain;
  friend bool operator==(const VarStmt&, const VarStmt&) = default;
};

struct BodyLit {
  std::string atom;
  bool negated = false;
  friend bool operator==(const BodyLit&, const BodyLit&) = default;
};

struct RuleStmt {
  RuleKind kind = RuleKind::Normal;
  std::vector<std::string> head;
  std::vector<BodyLit> body;
  friend bool operator==(const RuleStmt&, const RuleStmt&) = default;
};

struct SumStmt {
  std::string atom;
  // Terms with an empty variable are constants.
  std::vector<ViewSpec> terms;
  Relation rel = Relation::Le;
  Int rhs = 0;
  friend bool operator==(const SumStmt&, const SumStmt&) = default;
};

struct DomStmt {
  std::string atom;
  ViewSpec view;
  DomainSet values;
  friend bool operator==(const DomStmt&, const DomStmt&) = default;
};

struct DistinctStmt {
  std::string atom;
  std::vector<ViewSpec> views;
  friend bool operator==(const DistinctStmt&, const DistinctStmt&) = default;
};

struct MinimizeStmt {
  std::vector<std::pair<ViewSpec, int>> terms;
  friend bool operator==(const MinimizeStmt&, const MinimizeStmt&) = default;
};

struct ShowStmt {
  std::string name;
  friend bool operator==(const ShowStmt&, const ShowStmt&) = default;
};

struct ExternalStmt {
  std::string atom;
  friend bool operator==(const ExternalStmt&, const ExternalStmt&) = default;
};

enum class ExternalValue : std::uint8_t { True, False, Release };

struct SetStmt {
  std::string atom;
  ExternalValue value = ExternalValue::True;
  friend bool operator==(const SetStmt&, const SetStmt&) = default;
};

using Statement = std::variant<VarStmt, RuleStmt, SumStmt, DomStmt, DistinctStmt, MinimizeStmt,
                               ShowStmt, ExternalStmt, SetStmt>;

struct Part {
  std::string name;
  std::vector<Statement> statements;
  friend bool operator==(const Part&, const Part&) = default;
};

struct Instance {
  std::vector<Part> parts;
  friend bool operator==(const Instance&, const Instance&) = default;
};

Instance parse_instance(std::string_view text);
std::string print_instance(const Instance& inst);
std::string print_statement(const Statement& st);

// Items of a program that were added by one part.
struct PartDelta {
  std::size_t first_rule = 0;
  std::size_t first_constraint = 0;
  std::size_t first_objective = 0;
  VarId first_var = 0;
  // Regular atoms first mentioned by this part.
  std::vector<Var> new_atoms;
  std::vector<Var> new_externals;
  std::vector<std::pair<Var, ExternalValue>> settings;
};

// Resolves names of `part` against `prog` and appends its items.
// Throws Error for undeclared variables, constraint atoms in rule heads,
// duplicate declarations and values outside the supported range.
PartDelta add_part(GroundProgram& prog, const Part& part);

// All parts of the instance as one program.
GroundProgram build_program(const Instance& inst);

}  // namespace lazycasp

#endif  // LAZYCASP_INSTANCE_HPP_
