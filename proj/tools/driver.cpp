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

#include "driver.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "lazycasp/oracle.hpp"
#include "lazycasp/session.hpp"

namespace lazycasp::cli {

namespace {

struct Options {
  SolverConfig cfg;
  std::int64_t models = 1;
  bool stats = false;
  bool oracle = false;
  std::uint64_t oracle_limit = 10'000'000;
  std::vector<std::string> files;
};

void add_flags(CLI::App& app, Options& o) {
  PreprocessConfig& p = o.cfg.preprocess;
  TranslateConfig& t = o.cfg.translate;
  app.add_option("--equality-processing", p.equality_processing, "Enable equality processing")
      ->capture_default_str();
  app.add_option("--distinct-to-card", p.distinct_to_card,
                 "Translate distinct constraints using cardinality-style rules")
      ->capture_default_str();
  app.add_option("--distinct-pigeon", p.distinct_pigeon, "Use pigeon hole constraints")
      ->capture_default_str();
  app.add_option("--distinct-permutation", p.distinct_permutation, "Use permutation constraints")
      ->capture_default_str();
  app.add_option("--sort-coefficient", p.sort_coefficient, "Sort by coefficient first")
      ->capture_default_str();
  app.add_option("--sort-descend-coefficient", p.sort_descend_coefficient,
                 "Sort using decreasing coefficients")
      ->capture_default_str();
  app.add_option("--sort-descend-domain", p.sort_descend_domain,
                 "Sort using decreasing domain sizes")
      ->capture_default_str();
  app.add_option("--split-size", p.split_size, "Maximum terms before splitting (-1: never)")
      ->capture_default_str();
  app.add_option("--max-nogoods-size", p.max_nogoods_size,
                 "Do not split constraints with fewer estimated nogoods")
      ->capture_default_str();
  app.add_option("--translate-constraints", t.translate_threshold,
                 "Translate constraints with fewer estimated nogoods (-1: all)")
      ->capture_default_str();
  app.add_option("--break-symmetries", p.break_symmetries, "Break symmetries when splitting")
      ->capture_default_str();
  app.add_option("--domain-size", p.domain_size, "Threshold for exact domain propagation")
      ->capture_default_str();
  app.add_option("--redundant-nogood-check", t.redundant_nogood_check,
                 "Remove redundant nogoods when translating")
      ->capture_default_str();
  app.add_option("--dont-care-propagation", p.dont_care_propagation,
                 "Enable don't care propagation")
      ->capture_default_str();
  app.add_option("--min-lits-per-var", t.min_lits_per_var, "Order atoms created per variable")
      ->capture_default_str();
  app.add_option("--flatten-optimization", o.cfg.flatten_optimization,
                 "Flatten the objective function")
      ->capture_default_str();
  app.add_option("--prop-strength", o.cfg.prop_strength, "Propagation strength 1..4")
      ->check(CLI::Range(1, 4))
      ->capture_default_str();
  app.add_option("--explicit-binary-order", t.explicit_binary_order,
                 "Add the binary order nogoods between created order atoms")
      ->capture_default_str();
  app.add_option("--learn-nogoods", o.cfg.learn_nogoods,
                 "Store propagator nogoods immediately")
      ->capture_default_str();
  app.add_option("-n,--models", o.models, "Number of models (0: all)")->capture_default_str();
  app.add_flag("--stats", o.stats, "Print statistics");
  app.add_flag("--oracle", o.oracle, "Cross-check the model set by brute force");
  app.add_option("--oracle-limit", o.oracle_limit, "Work limit of the brute-force check")
      ->capture_default_str();
  app.add_option("files", o.files, "Instance files");
}

std::string read_all(std::istream& in) {
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* status_text(SolveResult r) {
  switch (r) {
    case SolveResult::Sat:
      return "SATISFIABLE";
    case SolveResult::Unsat:
      return "UNSATISFIABLE";
    case SolveResult::Optimum:
      return "OPTIMUM FOUND";
    case SolveResult::Interrupted:
      break;
  }
  return "UNKNOWN";
}

int exit_code(SolveResult r) {
  switch (r) {
    case SolveResult::Sat:
      return kExitSat;
    case SolveResult::Unsat:
      return kExitUnsat;
    case SolveResult::Optimum:
      return kExitOptimum;
    case SolveResult::Interrupted:
      break;
  }
  return 0;
}

std::string cost_text(const Cost& c) {
  std::ostringstream s;
  for (std::size_t i = 0; i < c.values.size(); ++i) s << (i ? " " : "") << c.values[i];
  return s.str();
}

// Compares the final call's model set (or optimum) with brute force.
bool oracle_check(Session& session, const Instance& inst, std::uint64_t limit, std::ostream& out) {
  GroundProgram mono = build_program(inst);
  OracleOptions oo;
  oo.limit = limit;
  const GroundProgram& prog = session.program();
  for (const auto& [a, value] : session.external_values()) {
    if (auto m = mono.atoms.find(prog.atoms[a].name)) oo.externals[*m] = value;
  }
  OracleResult expected;
  try {
    expected = oracle_solve(mono, oo);
  } catch (const OracleLimitExceeded& e) {
    out << "ORACLE SKIPPED: " << e.what() << "\n";
    return true;
  }
  bool match = true;
  if (session.has_objective()) {
    std::optional<Cost> best;
    SolveOptions so;
    so.mode = SolveMode::Optimize;
    SolveResult r = session.solve(so, [&](const Model& m) {
      best = m.cost;
      return true;
    });
    match = (r == SolveResult::Optimum) == expected.optimum.has_value() &&
            (!best || (expected.optimum && *best == *expected.optimum));
  } else {
    std::vector<NamedModel> got;
    SolveOptions so;
    so.models = 0;
    session.solve(so, [&](const Model& m) {
      got.push_back(session.named(m));
      return true;
    });
    std::vector<NamedModel> want;
    for (const ProjectedModel& pm : expected.models) want.push_back(name_model(mono, pm));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    match = got == want;
    out << "Oracle models: " << want.size() << " solver models: " << got.size() << "\n";
  }
  out << (match ? "MATCH" : "MISMATCH") << "\n";
  return match;
}

void print_stats(const Statistics& s, std::ostream& out) {
  out << "\n";
  auto line = [&](const char* name, auto value) {
    out << std::left << std::setw(16) << name << ": " << value << "\n";
  };
  line("Calls", s.calls);
  line("Choices", s.choices);
  line("Conflicts", s.conflicts);
  line("Restarts", s.restarts);
  line("Static Nogoods", s.static_nogoods);
  line("Dynamic Nogoods", s.dynamic_nogoods);
  line("Learnt Nogoods", s.learnt_nogoods);
  line("Order Atoms", s.order_atoms);
  line("Atoms", s.atoms);
  line("Variables", s.variables);
  line("Translated", s.translated_constraints);
  line("Lazy", s.lazy_constraints);
  line("Trans. Emitted", s.translate_emitted);
  line("Trans. Removed", s.translate_removed);
  line("Eliminated", s.eliminated_vars);
  line("Don't Care", s.dont_care_atoms);
  line("Time", std::to_string(s.total_seconds) + "s");
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"lazycasp: constraint answer set solver"};
  Options opt;
  add_flags(app, opt);
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (opt.models < 0) {
    err << "error: -n must not be negative\n";
    return kExitUsage;
  }

  std::string text;
  if (opt.files.empty()) {
    text = read_all(in);
  } else {
    for (const std::string& f : opt.files) {
      if (f == "-") {
        text += read_all(in);
        continue;
      }
      std::ifstream file(f);
      if (!file) {
        err << "error: cannot open " << f << "\n";
        return kExitUsage;
      }
      text += read_all(file);
      text += "\n";
    }
  }

  try {
    Instance inst = parse_instance(text);
    Session session(opt.cfg);
    SolveResult result = SolveResult::Unsat;
    std::uint64_t total_models = 0;
    for (const Part& part : inst.parts) {
      session.add_part(part);
      out << "Solving...\n";
      SolveOptions so;
      so.mode = session.has_objective() ? SolveMode::Optimize : SolveMode::Enumerate;
      so.models = static_cast<std::uint64_t>(opt.models);
      std::uint64_t k = 0;
      result = session.solve(so, [&](const Model& m) {
        out << "Answer: " << ++k << "\n" << session.format_model(m) << "\n";
        if (m.cost) out << "Optimization: " << cost_text(*m.cost) << "\n";
        return true;
      });
      total_models += k;
    }
    out << status_text(result) << "\n";
    out << "\nModels       : " << total_models << "\n";
    if (opt.stats) print_stats(session.statistics(), out);
    if (opt.oracle) oracle_check(session, inst, opt.oracle_limit, out);
    return exit_code(result);
  } catch (const ParseError& e) {
    err << "error: line " << e.line() << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace lazycasp::cli
