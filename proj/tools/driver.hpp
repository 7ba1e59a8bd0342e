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

// Command line front end of the solver.

#ifndef LAZYCASP_TOOLS_DRIVER_HPP_
#define LAZYCASP_TOOLS_DRIVER_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace lazycasp::cli {

inline constexpr int kExitSat = 10;
inline constexpr int kExitUnsat = 20;
inline constexpr int kExitOptimum = 30;
inline constexpr int kExitUsage = 1;

// argv-style arguments without the program name. Instances are read from
// the listed files, or from `in` when there are none (or "-").
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace lazycasp::cli

#endif  // LAZYCASP_TOOLS_DRIVER_HPP_
