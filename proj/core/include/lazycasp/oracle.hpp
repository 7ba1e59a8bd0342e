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

// Brute-force reference semantics: enumerates every integer assignment and
// every candidate atom set and keeps the stable ones. Only usable on tiny
// instances; it shares no code with the search engine.

#ifndef LAZYCASP_ORACLE_HPP_
#define LAZYCASP_ORACLE_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lazycasp/program.hpp"

namespace lazycasp {

// A constraint stable model projected onto regular atoms and variables.
struct ProjectedModel {
  std::vector<Var> atoms;  // true regular atoms, ascending
  std::vector<Int> values;  // indexed by VarId
  friend auto operator<=>(const ProjectedModel&, const ProjectedModel&) = default;
};

// Cost vector ordered from the most significant (highest) level down.
struct Cost {
  std::vector<int> levels;
  std::vector<Int> values;
  friend auto operator<=>(const Cost&, const Cost&) = default;
};

Cost evaluate_objective(const GroundProgram& prog, std::span<const Int> values);

struct OracleOptions {
  // Upper bound on assignment x atom-set pairs examined.
  std::uint64_t limit = 50'000'000;
  // Truth values of external atoms; unlisted externals are false.
  std::map<Var, bool> externals;
};

struct OracleResult {
  std::vector<ProjectedModel> models;  // sorted
  // Minimal cost over all models (set only when there is an objective and
  // at least one model).
  std::optional<Cost> optimum;
};

class OracleLimitExceeded : public Error {
 public:
  using Error::Error;
};

OracleResult oracle_solve(const GroundProgram& prog, const OracleOptions& opts = {});

// A model by names, comparable across programs that number atoms and
// variables differently.
struct NamedModel {
  std::vector<std::string> atoms;  // sorted
  std::vector<Int> values;         // non-auxiliary variables in declaration order
  friend auto operator<=>(const NamedModel&, const NamedModel&) = default;
};

NamedModel name_model(const GroundProgram& prog, const ProjectedModel& m);

}  // namespace lazycasp

#endif  // LAZYCASP_ORACLE_HPP_
