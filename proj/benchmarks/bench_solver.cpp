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

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "lazycasp/session.hpp"
#include "lazycasp/translate.hpp"

namespace {

using namespace lazycasp;

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(LAZYCASP_BENCH_DATA) + "/" + name);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::uint64_t enumerate(Session& s, SolveMode mode) {
  SolveOptions so;
  so.mode = mode;
  so.models = 0;
  std::uint64_t n = 0;
  s.solve(so, [&](const Model&) {
    ++n;
    return true;
  });
  return n;
}

void BM_SmallExample(benchmark::State& state) {
  const std::string text = read_data("p1.lp");
  for (auto _ : state) {
    Session s;
    s.add_text(text);
    benchmark::DoNotOptimize(enumerate(s, SolveMode::Enumerate));
  }
}
BENCHMARK(BM_SmallExample);

// arg 0: propagation strength, arg 1: translate everything
void BM_SendMoreMoney(benchmark::State& state) {
  const std::string text = read_data("send_more_money.lp");
  SolverConfig cfg;
  cfg.prop_strength = static_cast<int>(state.range(0));
  cfg.translate.translate_threshold = state.range(1) != 0 ? -1 : 0;
  cfg.preprocess.split_size = 3;
  for (auto _ : state) {
    Session s(cfg);
    s.add_text(text);
    benchmark::DoNotOptimize(enumerate(s, SolveMode::Enumerate));
  }
}
BENCHMARK(BM_SendMoreMoney)->ArgsProduct({{1, 2, 3, 4}, {0, 1}});

void BM_StripPacking(benchmark::State& state) {
  const std::string text = read_data("strip_packing.lp");
  SolverConfig cfg;
  cfg.flatten_optimization = state.range(0) != 0;
  for (auto _ : state) {
    Session s(cfg);
    s.add_text(text);
    benchmark::DoNotOptimize(enumerate(s, SolveMode::Optimize));
  }
}
BENCHMARK(BM_StripPacking)->Arg(0)->Arg(1);

// arg: encoding 1..3; one model per step over all 15 steps
void BM_IncrementalQueens(benchmark::State& state) {
  const Instance inst = parse_instance(read_data("q" + std::to_string(state.range(0)) + ".lp"));
  std::uint64_t dynamic = 0;
  for (auto _ : state) {
    Session s;
    for (const Part& p : inst.parts) {
      s.add_part(p);
      SolveOptions so;
      benchmark::DoNotOptimize(s.solve(so));
    }
    dynamic = s.statistics().dynamic_nogoods;
  }
  state.counters["dynamic_nogoods"] = static_cast<double>(dynamic);
}
BENCHMARK(BM_IncrementalQueens)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

// sum of `n` variables over 0..15 <= 8n, fully translated
void BM_Translate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::size_t emitted = 0;
  for (auto _ : state) {
    AtomTable atoms;
    VariableTable vars;
    OrderAtomPool pool{atoms};
    LinearConstraint c;
    for (int i = 0; i < n; ++i) {
      c.terms.push_back({1 + i % 3, vars.add("v" + std::to_string(i), DomainSet::from_ranges({{0, 15}}))});
    }
    c.bound = 8 * n;
    Var sigma = atoms.add(AtomKind::Constraint, "sigma");
    auto ngs = translate_constraint(Lit::pos(sigma), c, vars, pool, true);
    emitted = ngs.size();
    benchmark::DoNotOptimize(ngs);
  }
  state.counters["nogoods"] = static_cast<double>(emitted);
}
BENCHMARK(BM_Translate)->DenseRange(1, 4);

}  // namespace

BENCHMARK_MAIN();
