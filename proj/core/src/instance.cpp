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

#include "lazycasp/instance.hpp"

#include <cctype>
#include <charconv>
#include <sstream>
#include <unordered_set>

namespace lazycasp {

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

// Bound on declared values and on |coef * value| sums, leaving headroom for
// the bound arithmetic of translation and propagation.
constexpr Int kMaxDeclared = Int(1) << 60;
constexpr __int128 kMaxSum = __int128(1) << 61;

class LineLexer {
 public:
  LineLexer(std::string_view text, std::size_t line) : s_(text), line_(line) {}

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool at_end() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }
  bool peek_ident() {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  std::string ident() {
    skip_ws();
    if (!peek_ident()) fail("expected identifier");
    std::size_t start = pos_;
    int depth = 0;
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == '(') {
        ++depth;
      } else if (c == ')') {
        if (depth == 0) break;
        --depth;
      } else if (depth == 0 && !(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                                 c == '\'')) {
        break;
      } else if (depth > 0 && std::isspace(static_cast<unsigned char>(c))) {
        fail("whitespace inside identifier");
      }
      ++pos_;
    }
    if (depth != 0) fail("unbalanced parentheses in identifier");
    return std::string(s_.substr(start, pos_ - start));
  }
  // Keyword test that does not consume a longer identifier.
  bool accept_word(std::string_view word) {
    skip_ws();
    if (s_.substr(pos_, word.size()) != word) return false;
    std::size_t end = pos_ + word.size();
    if (end < s_.size()) {
      char c = s_[end];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '(' || c == '\'') {
        return false;
      }
    }
    pos_ = end;
    return true;
  }
  bool peek_int() {
    skip_ws();
    std::size_t p = pos_;
    if (p < s_.size() && (s_[p] == '-' || s_[p] == '+')) ++p;
    return p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]));
  }
  Int integer() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) ++pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string_view tok = s_.substr(start, pos_ - start);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    Int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
      fail("expected integer");
    }
    if (v > kMaxDeclared || v < -kMaxDeclared) fail("integer out of supported range");
    return v;
  }
  std::string_view rest() {
    skip_ws();
    return s_.substr(pos_);
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

DomainSet parse_ranges(LineLexer& lex) {
  std::vector<Range> ranges;
  do {
    Int lo = lex.integer();
    Int hi = lo;
    if (lex.accept("..")) hi = lex.integer();
    if (lo > hi) lex.fail("empty range");
    ranges.push_back({lo, hi});
  } while (lex.accept(","));
  return DomainSet::from_ranges(std::move(ranges));
}

// INT | INT*IDENT | IDENT | -IDENT
ViewSpec parse_term(LineLexer& lex, bool negate) {
  ViewSpec t;
  if (lex.peek_int()) {
    Int v = lex.integer();
    if (lex.accept("*")) {
      t.coef = v;
      t.var = lex.ident();
    } else {
      t.coef = 0;
      t.offset = v;
    }
  } else {
    bool minus = lex.accept("-");
    t.var = lex.ident();
    t.coef = minus ? -1 : 1;
  }
  if (negate) {
    t.coef = -t.coef;
    t.offset = -t.offset;
  }
  return t;
}

std::vector<ViewSpec> parse_sum(LineLexer& lex) {
  std::vector<ViewSpec> terms;
  terms.push_back(parse_term(lex, false));
  for (;;) {
    if (lex.accept("+")) {
      terms.push_back(parse_term(lex, false));
    } else if (lex.peek() == '-' && !lex.rest().starts_with("->")) {
      lex.expect("-");
      terms.push_back(parse_term(lex, true));
    } else {
      break;
    }
  }
  return terms;
}

// A sum with at most one variable.
ViewSpec parse_view(LineLexer& lex) {
  ViewSpec out;
  out.coef = 0;
  for (const ViewSpec& t : parse_sum(lex)) {
    if (!t.var.empty()) {
      if (!out.var.empty()) lex.fail("view with more than one variable");
      out.var = t.var;
      out.coef = t.coef;
    }
    out.offset += t.offset;
  }
  if (out.var.empty()) lex.fail("view without a variable");
  if (out.coef == 0) lex.fail("view with zero coefficient");
  return out;
}

Relation parse_relation(LineLexer& lex) {
  if (lex.accept("<=")) return Relation::Le;
  if (lex.accept(">=")) return Relation::Ge;
  if (lex.accept("!=")) return Relation::Ne;
  if (lex.accept("<")) return Relation::Lt;
  if (lex.accept(">")) return Relation::Gt;
  if (lex.accept("=")) return Relation::Eq;
  lex.fail("expected relation");
}

RuleStmt parse_rule(LineLexer& lex) {
  RuleStmt r;
  if (lex.accept("{")) {
    r.kind = RuleKind::Choice;
    if (!lex.accept("}")) {
      do {
        r.head.push_back(lex.ident());
      } while (lex.accept(";"));
      lex.expect("}");
    }
  } else if (lex.peek_ident() && !lex.rest().starts_with("not ")) {
    r.head.push_back(lex.ident());
  } else {
    r.kind = RuleKind::Integrity;
  }
  if (lex.accept(":-")) {
    do {
      BodyLit l;
      if (lex.accept_word("not")) l.negated = true;
      l.atom = lex.ident();
      r.body.push_back(std::move(l));
    } while (lex.accept(","));
  } else if (r.kind == RuleKind::Integrity) {
    lex.fail("expected ':-'");
  }
  lex.expect(".");
  return r;
}

std::string strip_comment(std::string_view line) {
  auto pos = line.find('%');
  return std::string(line.substr(0, pos));
}

}  // namespace

Instance parse_instance(std::string_view text) {
  Instance inst;
  inst.parts.push_back({"base", {}});
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line = strip_comment(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    LineLexer lex(line, line_no);
    if (lex.at_end()) continue;
    std::vector<Statement>& out = inst.parts.back().statements;
    if (lex.accept_word("var")) {
      VarStmt v;
      v.name = lex.ident();
      v.domain = parse_ranges(lex);
      out.emplace_back(std::move(v));
    } else if (lex.accept_word("rule")) {
      out.emplace_back(parse_rule(lex));
    } else if (lex.accept_word("con")) {
      if (lex.accept_word("sum")) {
        SumStmt s;
        s.atom = lex.ident();
        lex.expect(":=");
        s.terms = parse_sum(lex);
        s.rel = parse_relation(lex);
        s.rhs = lex.integer();
        out.emplace_back(std::move(s));
      } else if (lex.accept_word("dom")) {
        DomStmt d;
        d.atom = lex.ident();
        lex.expect(":=");
        d.view = parse_view(lex);
        if (!lex.accept_word("in")) lex.fail("expected 'in'");
        d.values = parse_ranges(lex);
        out.emplace_back(std::move(d));
      } else if (lex.accept_word("distinct")) {
        DistinctStmt d;
        d.atom = lex.ident();
        lex.expect(":=");
        do {
          d.views.push_back(parse_view(lex));
        } while (lex.accept(","));
        out.emplace_back(std::move(d));
      } else {
        lex.fail("unknown constraint kind");
      }
    } else if (lex.accept_word("minimize")) {
      MinimizeStmt m;
      do {
        ViewSpec v = parse_view(lex);
        int level = 0;
        if (lex.accept("@")) level = static_cast<int>(lex.integer());
        m.terms.emplace_back(std::move(v), level);
      } while (lex.accept(","));
      out.emplace_back(std::move(m));
    } else if (lex.accept_word("show")) {
      out.emplace_back(ShowStmt{lex.ident()});
    } else if (lex.accept_word("external")) {
      out.emplace_back(ExternalStmt{lex.ident()});
    } else if (lex.accept_word("set")) {
      SetStmt s;
      s.atom = lex.ident();
      if (lex.accept_word("true")) {
        s.value = ExternalValue::True;
      } else if (lex.accept_word("false")) {
        s.value = ExternalValue::False;
      } else if (lex.accept_word("release")) {
        s.value = ExternalValue::Release;
      } else {
        lex.fail("expected true, false or release");
      }
      out.emplace_back(std::move(s));
    } else if (lex.accept_word("part")) {
      std::string name = lex.ident();
      if (inst.parts.size() == 1 && inst.parts.front().statements.empty() &&
          inst.parts.front().name == "base") {
        inst.parts.front().name = name;
      } else {
        inst.parts.push_back({name, {}});
      }
    } else {
      lex.fail("unknown statement");
    }
    if (!lex.at_end()) lex.fail("trailing input: " + std::string(lex.rest()));
  }
  return inst;
}

namespace {

void print_view(std::ostream& out, const ViewSpec& v) {
  if (v.var.empty()) {
    out << v.offset;
    return;
  }
  out << v.coef << "*" << v.var;
  if (v.offset > 0) out << "+" << v.offset;
  if (v.offset < 0) out << "-" << -v.offset;
}

void print_ranges(std::ostream& out, const DomainSet& d) { out << d; }

struct Printer {
  std::ostream& out;
  void operator()(const VarStmt& v) const {
    out << "var " << v.name << " ";
    print_ranges(out, v.domain);
  }
  void operator()(const RuleStmt& r) const {
    out << "rule ";
    if (r.kind == RuleKind::Choice) {
      out << "{";
      for (std::size_t i = 0; i < r.head.size(); ++i) out << (i ? "; " : "") << r.head[i];
      out << "}";
    } else if (r.kind == RuleKind::Normal) {
      out << r.head.front();
    }
    if (!r.body.empty()) {
      out << (r.kind == RuleKind::Integrity ? ":- " : " :- ");
      for (std::size_t i = 0; i < r.body.size(); ++i) {
        out << (i ? ", " : "") << (r.body[i].negated ? "not " : "") << r.body[i].atom;
      }
    }
    out << ".";
  }
  void operator()(const SumStmt& s) const {
    out << "con sum " << s.atom << " := ";
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
      if (i) out << " + ";
      if (s.terms[i].var.empty()) {
        out << s.terms[i].offset;
      } else {
        out << s.terms[i].coef << "*" << s.terms[i].var;
      }
    }
    out << " " << relation_symbol(s.rel) << " " << s.rhs;
  }
  void operator()(const DomStmt& d) const {
    out << "con dom " << d.atom << " := ";
    print_view(out, d.view);
    out << " in ";
    print_ranges(out, d.values);
  }
  void operator()(const DistinctStmt& d) const {
    out << "con distinct " << d.atom << " := ";
    for (std::size_t i = 0; i < d.views.size(); ++i) {
      if (i) out << ", ";
      print_view(out, d.views[i]);
    }
  }
  void operator()(const MinimizeStmt& m) const {
    out << "minimize ";
    for (std::size_t i = 0; i < m.terms.size(); ++i) {
      if (i) out << ", ";
      print_view(out, m.terms[i].first);
      out << " @ " << m.terms[i].second;
    }
  }
  void operator()(const ShowStmt& s) const { out << "show " << s.name; }
  void operator()(const ExternalStmt& e) const { out << "external " << e.atom; }
  void operator()(const SetStmt& s) const {
    out << "set " << s.atom << " "
        << (s.value == ExternalValue::True    ? "true"
            : s.value == ExternalValue::False ? "false"
                                              : "release");
  }
};

}  // namespace

std::string print_statement(const Statement& st) {
  std::ostringstream out;
  std::visit(Printer{out}, st);
  return out.str();
}

std::string print_instance(const Instance& inst) {
  std::ostringstream out;
  for (std::size_t i = 0; i < inst.parts.size(); ++i) {
    const Part& p = inst.parts[i];
    if (i > 0 || p.name != "base") out << "part " << p.name << "\n";
    for (const Statement& st : p.statements) out << print_statement(st) << "\n";
  }
  return out.str();
}

namespace {

class Resolver {
 public:
  Resolver(GroundProgram& prog, PartDelta& delta) : prog_(prog), delta_(delta) {}

  VarId variable(const std::string& name) const {
    auto v = prog_.vars.find(name);
    if (!v) throw Error("undeclared variable: " + name);
    return *v;
  }

  Var atom(const std::string& name) {
    if (auto a = prog_.atoms.find(name)) return *a;
    if (prog_.vars.find(name)) throw Error("name used as atom and variable: " + name);
    Var a = prog_.atoms.add(AtomKind::Regular, name);
    delta_.new_atoms.push_back(a);
    return a;
  }

  Var regular_atom(const std::string& name, const char* what) {
    Var a = atom(name);
    if (prog_.atoms[a].kind == AtomKind::Constraint) {
      throw Error(std::string("constraint atom ") + what + ": " + name);
    }
    return a;
  }

  Var constraint_atom(const std::string& name) {
    if (prog_.atoms.find(name)) throw Error("atom defined twice: " + name);
    if (prog_.vars.find(name)) throw Error("name used as atom and variable: " + name);
    return prog_.atoms.add(AtomKind::Constraint, name);
  }

  __int128 magnitude(const View& v) const {
    const DomainSet& d = prog_.vars.domain(v.var);
    __int128 m = std::max(d.empty() ? 0 : std::abs(d.lower()), d.empty() ? 0 : std::abs(d.upper()));
    return m * (v.coef < 0 ? -__int128(v.coef) : __int128(v.coef)) +
           (v.offset < 0 ? -__int128(v.offset) : __int128(v.offset));
  }

  View view(const ViewSpec& s) const {
    View v{s.coef, variable(s.var), s.offset};
    if (magnitude(v) > kMaxSum / 4) throw OverflowError("view value out of supported range");
    return v;
  }

  SumConstraint sum(const SumStmt& s) const {
    SumConstraint c;
    c.rel = s.rel;
    __int128 rhs = s.rhs;
    __int128 mag = 0;
    for (const ViewSpec& t : s.terms) {
      rhs -= t.offset;
      if (t.var.empty() || t.coef == 0) continue;
      View v{t.coef, variable(t.var), 0};
      mag += magnitude(v);
      c.terms.push_back({t.coef, v.var});
    }
    mag += rhs < 0 ? -rhs : rhs;
    if (mag > kMaxSum) throw OverflowError("constraint " + s.atom + " exceeds supported range");
    c.rhs = static_cast<Int>(rhs);
    return c;
  }

 private:
  GroundProgram& prog_;
  PartDelta& delta_;
};

}  // namespace

PartDelta add_part(GroundProgram& prog, const Part& part) {
  PartDelta delta;
  delta.first_rule = prog.rules.size();
  delta.first_constraint = prog.constraints.size();
  delta.first_objective = prog.objective.size();
  delta.first_var = static_cast<VarId>(prog.vars.size());
  Resolver res(prog, delta);
  for (const Statement& st : part.statements) {
    if (const auto* v = std::get_if<VarStmt>(&st)) {
      if (prog.atoms.find(v->name)) throw Error("name used as atom and variable: " + v->name);
      if (v->domain.empty()) throw Error("empty domain for variable " + v->name);
      prog.vars.add(v->name, v->domain);
    }
  }
  for (const Statement& st : part.statements) {
    if (const auto* s = std::get_if<SumStmt>(&st)) {
      SumConstraint c = res.sum(*s);
      prog.constraints.push_back({res.constraint_atom(s->atom), std::move(c)});
    } else if (const auto* d = std::get_if<DomStmt>(&st)) {
      DomainConstraint c{res.view(d->view), d->values};
      prog.constraints.push_back({res.constraint_atom(d->atom), std::move(c)});
    } else if (const auto* d = std::get_if<DistinctStmt>(&st)) {
      DistinctConstraint c;
      for (const ViewSpec& v : d->views) c.views.push_back(res.view(v));
      prog.constraints.push_back({res.constraint_atom(d->atom), std::move(c)});
    }
  }
  for (const Statement& st : part.statements) {
    if (const auto* r = std::get_if<RuleStmt>(&st)) {
      Rule rule{r->kind, {}, {}};
      for (const std::string& h : r->head) rule.head.push_back(res.regular_atom(h, "in rule head"));
      for (const BodyLit& l : r->body) rule.body.push_back(Lit(res.atom(l.atom), !l.negated));
      prog.rules.push_back(std::move(rule));
    } else if (const auto* m = std::get_if<MinimizeStmt>(&st)) {
      for (const auto& [v, level] : m->terms) prog.objective.push_back({res.view(v), level});
    } else if (const auto* s = std::get_if<ShowStmt>(&st)) {
      prog.show.push_back(s->name);
    } else if (const auto* e = std::get_if<ExternalStmt>(&st)) {
      Var a = res.regular_atom(e->atom, "declared external");
      if (std::find(prog.externals.begin(), prog.externals.end(), a) == prog.externals.end()) {
        prog.externals.push_back(a);
        delta.new_externals.push_back(a);
      }
    } else if (const auto* s = std::get_if<SetStmt>(&st)) {
      Var a = res.regular_atom(s->atom, "set as external");
      delta.settings.emplace_back(a, s->value);
    }
  }
  return delta;
}

GroundProgram build_program(const Instance& inst) {
  GroundProgram prog;
  for (const Part& p : inst.parts) add_part(prog, p);
  return prog;
}

}  // namespace lazycasp
