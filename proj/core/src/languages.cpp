#include "semflow/languages.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace semflow {

TermPtr imp_int(long long n) { return val("int", {cint(n)}); }
TermPtr imp_str(const std::string& s) { return val("str", {cstr(s)}); }
TermPtr imp_bool(bool b) { return val(b ? "true" : "false", {}); }
TermPtr imp_var(const std::string& name) { return nonval("var", {cstr(name)}); }
TermPtr imp_skip() { return val("skip", {}); }
TermPtr imp_assign(const std::string& name, TermPtr e) {
  return nonval(":=", {cstr(name), std::move(e)});
}
TermPtr imp_add(TermPtr a, TermPtr b) { return nonval("+", {std::move(a), std::move(b)}); }
TermPtr imp_lt(TermPtr a, TermPtr b) { return nonval("<", {std::move(a), std::move(b)}); }
TermPtr imp_le(TermPtr a, TermPtr b) { return nonval("<=", {std::move(a), std::move(b)}); }
TermPtr imp_seq(TermPtr a, TermPtr b) { return nonval("seq", {std::move(a), std::move(b)}); }
TermPtr imp_if(TermPtr c, TermPtr t, TermPtr e) {
  return nonval("if", {std::move(c), std::move(t), std::move(e)});
}
TermPtr imp_while(TermPtr c, TermPtr body) {
  return nonval("while", {std::move(c), std::move(body)});
}
TermPtr imp_print(TermPtr e) { return nonval("print", {std::move(e)}); }

namespace {

Configuration cpat(TermPtr t, const std::string& muvar) {
  return Configuration{std::move(t), ReductionState{{}, var(muvar, MatchType::All)}};
}

TermPtr v_all(const std::string& n) { return var(n, MatchType::All); }
TermPtr v_val(const std::string& n) { return var(n, MatchType::Val); }
TermPtr v_nv(const std::string& n) { return var(n, MatchType::NonVal); }

void add_sig(Language& l, const std::string& sym, int arity, bool is_val, Sort sort,
             std::vector<Sort> child_sorts, bool is_call = false) {
  Signature s;
  s.sym = sym;
  s.arity = arity;
  s.is_val = is_val;
  s.is_call = is_call;
  s.sort = sort;
  s.child_sorts = std::move(child_sorts);
  l.sigs[sym] = std::move(s);
}

std::optional<long long> as_int(const TermPtr& t) {
  if (t->kind == Term::Kind::ValNode && t->sym == "int" && t->children.size() == 1 &&
      t->children[0]->kind == Term::Kind::ConstInt)
    return t->children[0]->ival;
  return std::nullopt;
}

SemFun arith_fun(const std::string& name,
                 std::function<std::vector<Configuration>(long long, long long)> eval) {
  SemFun f;
  f.name = name;
  f.concrete = [eval](const std::vector<Configuration>& args) -> std::vector<Configuration> {
    if (args.size() != 2) return {};
    auto a = as_int(args[0].term);
    auto b = as_int(args[1].term);
    if (!a || !b) return {};
    return eval(*a, *b);
  };
  f.abstract_default = [](const std::vector<Configuration>&) -> std::vector<Configuration> {
    return {Configuration{star(MatchType::Val), empty_state()}};
  };
  return f;
}

const char* kOutKey = "__out";

SemFun write_fun() {
  SemFun f;
  f.name = "write";
  f.concrete = [](const std::vector<Configuration>& args) -> std::vector<Configuration> {
    if (args.size() != 1) return {};
    ReductionState st = args[0].state;
    TermPtr old = st.lookup(cstr(kOutKey)).value_or(val("nil", {}));
    st.upd(cstr(kOutKey), val("cons", {args[0].term, old}));
    return {Configuration{imp_skip(), std::move(st)}};
  };
  f.abstract_default = [](const std::vector<Configuration>& args) -> std::vector<Configuration> {
    if (args.size() != 1) return {};
    ReductionState st = args[0].state;
    st.upd(cstr(kOutKey), star(MatchType::Val));
    return {Configuration{imp_skip(), std::move(st)}};
  };
  return f;
}

void add_core_rules(Language& l) {
  // assignment
  l.rules.push_back(SosRule{
      "AssnCong", cpat(nonval(":=", {v_all("x"), v_nv("e")}), "mu"),
      rhs_step(cpat(v_all("e2"), "mu2"), cpat(v_nv("e"), "mu"),
               rhs_build(cpat(nonval(":=", {v_all("x"), v_all("e2")}), "mu2")))});
  {
    ReductionState upd_state;
    upd_state.tail = v_all("mu");
    upd_state.bindings.emplace_back(v_all("x"), v_val("v"));
    l.rules.push_back(SosRule{"AssnEval",
                              cpat(nonval(":=", {v_all("x"), v_val("v")}), "mu"),
                              rhs_build(Configuration{imp_skip(), upd_state})});
  }
  // variable lookup
  {
    ReductionState lookup;
    lookup.tail = v_all("rho");
    lookup.bindings.emplace_back(v_all("y"), v_val("v"));
    l.rules.push_back(SosRule{"VarLookup", Configuration{nonval("var", {v_all("y")}), lookup},
                              rhs_build(Configuration{v_val("v"), lookup})});
  }
  // binary operators with a semantic function
  auto binop = [&l](const std::string& sym, const std::string& fun, const std::string& stem) {
    l.rules.push_back(SosRule{
        stem + "Cong1", cpat(nonval(sym, {v_nv("e1"), v_all("t2")}), "mu"),
        rhs_step(cpat(v_all("e1p"), "mu2"), cpat(v_nv("e1"), "mu"),
                 rhs_build(cpat(nonval(sym, {v_all("e1p"), v_all("t2")}), "mu2")))});
    l.rules.push_back(SosRule{
        stem + "Cong2", cpat(nonval(sym, {v_val("v1"), v_nv("e2")}), "mu"),
        rhs_step(cpat(v_all("e2p"), "mu2"), cpat(v_nv("e2"), "mu"),
                 rhs_build(cpat(nonval(sym, {v_val("v1"), v_all("e2p")}), "mu2")))});
    l.rules.push_back(SosRule{
        stem + "Eval", cpat(nonval(sym, {v_val("v1"), v_val("v2")}), "mu"),
        rhs_call(cpat(v_val("n"), "mud"), fun, {cpat(v_val("v1"), "mu"), cpat(v_val("v2"), "mu")},
                 rhs_build(cpat(v_val("n"), "mu")))});
  };
  binop("+", "add", "Add");
  binop("<", "lt", "Lt");
  // sequencing
  l.rules.push_back(SosRule{
      "SeqCong", cpat(nonval("seq", {v_nv("s1"), v_all("s2")}), "mu"),
      rhs_step(cpat(v_all("s1p"), "mu2"), cpat(v_nv("s1"), "mu"),
               rhs_build(cpat(nonval("seq", {v_all("s1p"), v_all("s2")}), "mu2")))});
  l.rules.push_back(SosRule{"SeqNext", cpat(nonval("seq", {imp_skip(), v_all("s2")}), "mu"),
                            rhs_build(cpat(v_all("s2"), "mu"))});
  // conditionals
  l.rules.push_back(SosRule{
      "IfCong", cpat(nonval("if", {v_nv("e"), v_all("s1"), v_all("s2")}), "mu"),
      rhs_step(cpat(v_all("ep"), "mu2"), cpat(v_nv("e"), "mu"),
               rhs_build(cpat(nonval("if", {v_all("ep"), v_all("s1"), v_all("s2")}), "mu2")))});
  l.rules.push_back(
      SosRule{"IfTrue", cpat(nonval("if", {imp_bool(true), v_all("s1"), v_all("s2")}), "mu"),
              rhs_build(cpat(v_all("s1"), "mu"))});
  l.rules.push_back(
      SosRule{"IfFalse", cpat(nonval("if", {imp_bool(false), v_all("s1"), v_all("s2")}), "mu"),
              rhs_build(cpat(v_all("s2"), "mu"))});
  // while, by expansion
  l.rules.push_back(SosRule{
      "WhileDesugar", cpat(nonval("while", {v_all("e"), v_all("s")}), "mu"),
      rhs_build(cpat(nonval("if", {v_all("e"),
                                   nonval("seq", {v_all("s"),
                                                  nonval("while", {v_all("e"), v_all("s")})}),
                                   imp_skip()}),
                     "mu"))});
}

}  // namespace

Language imp_language() {
  Language l;
  l.name = "imp";
  l.has_sorts = true;
  add_sig(l, "int", 1, true, Sort::Expr, {Sort::Other});
  add_sig(l, "true", 0, true, Sort::Expr, {});
  add_sig(l, "false", 0, true, Sort::Expr, {});
  add_sig(l, "skip", 0, true, Sort::Stmt, {});
  add_sig(l, "var", 1, false, Sort::Expr, {Sort::Other});
  add_sig(l, "+", 2, false, Sort::Expr, {Sort::Expr, Sort::Expr});
  add_sig(l, "<", 2, false, Sort::Expr, {Sort::Expr, Sort::Expr});
  add_sig(l, ":=", 2, false, Sort::Stmt, {Sort::Other, Sort::Expr});
  add_sig(l, "seq", 2, false, Sort::Stmt, {Sort::Stmt, Sort::Stmt});
  add_sig(l, "if", 3, false, Sort::Stmt, {Sort::Expr, Sort::Stmt, Sort::Stmt});
  add_sig(l, "while", 2, false, Sort::Stmt, {Sort::Expr, Sort::Stmt});
  add_core_rules(l);
  l.semfuns["add"] = arith_fun("add", [](long long a, long long b) {
    return std::vector<Configuration>{Configuration{imp_int(a + b), empty_state()}};
  });
  l.semfuns["lt"] = arith_fun("lt", [](long long a, long long b) {
    return std::vector<Configuration>{Configuration{imp_bool(a < b), empty_state()}};
  });
  l.initial_state = empty_state();
  return l;
}

Language imp_extended() {
  Language l = imp_language();
  l.name = "imp-ext";
  add_sig(l, "str", 1, true, Sort::Expr, {Sort::Other});
  add_sig(l, "nil", 0, true, Sort::Other, {});
  add_sig(l, "cons", 2, true, Sort::Other, {Sort::Other, Sort::Other});
  add_sig(l, "print", 1, false, Sort::Stmt, {Sort::Expr});
  add_sig(l, "<=", 2, false, Sort::Expr, {Sort::Expr, Sort::Expr});
  add_sig(l, "for", 4, false, Sort::Stmt, {Sort::Other, Sort::Expr, Sort::Expr, Sort::Stmt});
  add_sig(l, "let", 3, false, Sort::Stmt, {Sort::Other, Sort::Expr, Sort::Stmt});

  l.rules.push_back(SosRule{
      "PrintCong", cpat(nonval("print", {v_nv("e")}), "mu"),
      rhs_step(cpat(v_all("ep"), "mu2"), cpat(v_nv("e"), "mu"),
               rhs_build(cpat(nonval("print", {v_all("ep")}), "mu2")))});
  l.rules.push_back(SosRule{
      "PrintEval", cpat(nonval("print", {v_val("v")}), "mu"),
      rhs_call(cpat(v_val("w"), "mu2"), "write", {cpat(v_val("v"), "mu")},
               rhs_build(cpat(imp_skip(), "mu2")))});
  {
    // le rules, mirroring lt
    l.rules.push_back(SosRule{
        "LeCong1", cpat(nonval("<=", {v_nv("e1"), v_all("t2")}), "mu"),
        rhs_step(cpat(v_all("e1p"), "mu2"), cpat(v_nv("e1"), "mu"),
                 rhs_build(cpat(nonval("<=", {v_all("e1p"), v_all("t2")}), "mu2")))});
    l.rules.push_back(SosRule{
        "LeCong2", cpat(nonval("<=", {v_val("v1"), v_nv("e2")}), "mu"),
        rhs_step(cpat(v_all("e2p"), "mu2"), cpat(v_nv("e2"), "mu"),
                 rhs_build(cpat(nonval("<=", {v_val("v1"), v_all("e2p")}), "mu2")))});
    l.rules.push_back(SosRule{
        "LeEval", cpat(nonval("<=", {v_val("v1"), v_val("v2")}), "mu"),
        rhs_call(cpat(v_val("n"), "mud"), "le",
                 {cpat(v_val("v1"), "mu"), cpat(v_val("v2"), "mu")},
                 rhs_build(cpat(v_val("n"), "mu")))});
  }
  // for x = lo to hi do s expands to assignments plus a while whose
  // condition is <=-headed
  {
    TermPtr x = v_all("x");
    TermPtr body = nonval(
        "seq",
        {v_all("s"),
         nonval(":=", {x, nonval("+", {nonval("var", {x}), imp_int(1)})})});
    TermPtr loop = nonval(
        "while", {nonval("<=", {nonval("var", {x}), nonval("var", {cstr("__hi")})}), body});
    TermPtr expansion = nonval(
        "seq", {nonval(":=", {x, v_all("lo")}),
                nonval("seq", {nonval(":=", {cstr("__hi"), v_all("hi")}), loop})});
    l.rules.push_back(SosRule{
        "ForDesugar",
        cpat(nonval("for", {x, v_all("lo"), v_all("hi"), v_all("s")}), "mu"),
        rhs_build(cpat(expansion, "mu"))});
  }
  l.rules.push_back(SosRule{
      "LetDesugar", cpat(nonval("let", {v_all("x"), v_all("e"), v_all("s")}), "mu"),
      rhs_build(cpat(nonval("seq", {nonval(":=", {v_all("x"), v_all("e")}), v_all("s")}), "mu"))});

  l.semfuns["le"] = arith_fun("le", [](long long a, long long b) {
    return std::vector<Configuration>{Configuration{imp_bool(a <= b), empty_state()}};
  });
  l.semfuns["write"] = write_fun();
  l.initial_state = empty_state();
  l.initial_state.upd(cstr(kOutKey), val("nil", {}));
  return l;
}

std::map<std::string, SemFun> builtin_semfuns() {
  std::map<std::string, SemFun> out;
  out["add"] = arith_fun("add", [](long long a, long long b) {
    return std::vector<Configuration>{Configuration{imp_int(a + b), empty_state()}};
  });
  out["lt"] = arith_fun("lt", [](long long a, long long b) {
    return std::vector<Configuration>{Configuration{imp_bool(a < b), empty_state()}};
  });
  out["le"] = arith_fun("le", [](long long a, long long b) {
    return std::vector<Configuration>{Configuration{imp_bool(a <= b), empty_state()}};
  });
  out["write"] = write_fun();
  return out;
}

Language lockstep_demo() {
  Language l;
  l.name = "lockstep-demo";
  add_sig(l, "lockstep", 2, false, Sort::Other, {Sort::Other, Sort::Other});
  add_sig(l, "tick", 0, false, Sort::Other, {});
  add_sig(l, "tock", 0, true, Sort::Other, {});
  l.has_sorts = false;
  l.rules.push_back(SosRule{"TickStep", cpat(nonval("tick", {}), "mu"),
                            rhs_build(cpat(val("tock", {}), "mu"))});
  l.rules.push_back(SosRule{
      "LockstepComp", cpat(nonval("lockstep", {v_nv("e1"), v_nv("e2")}), "mu"),
      rhs_step(cpat(v_all("e1p"), "mu2"), cpat(v_nv("e1"), "mu"),
               rhs_step(cpat(v_all("e2p"), "mu3"), cpat(v_nv("e2"), "mu2"),
                        rhs_build(cpat(nonval("lockstep", {v_all("e1p"), v_all("e2p")}),
                                       "mu3"))))});
  l.initial_state = empty_state();
  return l;
}

// ------------------------------ read vars ----------------------------------

namespace {

void read_vars(const TermPtr& t, std::set<std::string>& written, std::vector<std::string>& out) {
  auto note = [&](const std::string& n) {
    if (written.count(n)) return;
    for (const auto& e : out)
      if (e == n) return;
    out.push_back(n);
  };
  if (!t->is_node()) return;
  if (t->sym == "var") {
    if (t->children[0]->kind == Term::Kind::ConstStr) note(t->children[0]->sval);
    return;
  }
  if (t->sym == ":=") {
    read_vars(t->children[1], written, out);
    if (t->children[0]->kind == Term::Kind::ConstStr) written.insert(t->children[0]->sval);
    return;
  }
  if (t->sym == "seq") {
    read_vars(t->children[0], written, out);
    read_vars(t->children[1], written, out);
    return;
  }
  if (t->sym == "if") {
    read_vars(t->children[0], written, out);
    std::set<std::string> w1 = written, w2 = written;
    read_vars(t->children[1], w1, out);
    read_vars(t->children[2], w2, out);
    for (const auto& n : w1)
      if (w2.count(n)) written.insert(n);
    return;
  }
  if (t->sym == "while") {
    read_vars(t->children[0], written, out);
    std::set<std::string> w = written;
    read_vars(t->children[1], w, out);
    return;
  }
  if (t->sym == "for") {
    read_vars(t->children[1], written, out);
    read_vars(t->children[2], written, out);
    std::set<std::string> w = written;
    if (t->children[0]->kind == Term::Kind::ConstStr) w.insert(t->children[0]->sval);
    w.insert("__hi");
    read_vars(t->children[3], w, out);
    return;
  }
  if (t->sym == "let") {
    read_vars(t->children[1], written, out);
    std::set<std::string> w = written;
    if (t->children[0]->kind == Term::Kind::ConstStr) w.insert(t->children[0]->sval);
    read_vars(t->children[2], w, out);
    return;
  }
  for (const auto& c : t->children) read_vars(c, written, out);
}

}  // namespace

std::vector<std::string> program_read_vars(const TermPtr& program) {
  std::set<std::string> written;
  std::vector<std::string> out;
  read_vars(program, written, out);
  return out;
}

std::vector<std::string> validate_program(const Language& lang, const TermPtr& program) {
  std::vector<std::string> diags;
  std::function<void(const TermPtr&)> go = [&](const TermPtr& t) {
    if (t->kind == Term::Kind::Var || t->kind == Term::Kind::Star) {
      diags.push_back("program contains a pattern leaf: " + print_term(t));
      return;
    }
    if (!t->is_node()) return;
    const Signature* s = lang.sig(t->sym);
    if (!s) {
      diags.push_back("undeclared node '" + t->sym + "'");
      return;
    }
    if (s->arity != static_cast<int>(t->children.size()))
      diags.push_back("arity mismatch on '" + t->sym + "'");
    if (s->is_val != (t->kind == Term::Kind::ValNode))
      diags.push_back("valueness mismatch on '" + t->sym + "'");
    for (const auto& c : t->children) go(c);
  };
  go(program);
  return diags;
}

std::vector<TermPtr> output_trace(const ReductionState& s) {
  std::vector<TermPtr> out;
  auto cur = s.lookup(cstr(kOutKey));
  while (cur && (*cur)->kind == Term::Kind::ValNode && (*cur)->sym == "cons") {
    out.push_back((*cur)->children[0]);
    cur = (*cur)->children[1];
  }
  std::reverse(out.begin(), out.end());
  return out;
}

// ------------------------------ display ------------------------------------

std::string display_term(const TermPtr& t) {
  std::ostringstream os;
  std::function<void(const TermPtr&)> go = [&](const TermPtr& u) {
    switch (u->kind) {
      case Term::Kind::ConstInt: os << u->ival; return;
      case Term::Kind::ConstStr: os << '"' << u->sval << '"'; return;
      case Term::Kind::Star: os << "*" << mt_name(u->mt); return;
      case Term::Kind::Var:
        os << "?" << u->sym;
        if (u->tag) os << "#" << u->tag;
        return;
      default: break;
    }
    const std::string& y = u->sym;
    if (y == "int" && u->children.size() == 1) {
      go(u->children[0]);
      return;
    }
    if (y == "str" && u->children.size() == 1) {
      go(u->children[0]);
      return;
    }
    if (u->children.empty()) {
      os << y;
      return;
    }
    if (y == "var") {
      if (u->children[0]->kind == Term::Kind::ConstStr)
        os << u->children[0]->sval;
      else
        go(u->children[0]);
      return;
    }
    if (y == ":=") {
      if (u->children[0]->kind == Term::Kind::ConstStr)
        os << u->children[0]->sval;
      else
        go(u->children[0]);
      os << " := ";
      go(u->children[1]);
      return;
    }
    if ((y == "+" || y == "<" || y == "<=") && u->children.size() == 2) {
      os << "(";
      go(u->children[0]);
      os << " " << y << " ";
      go(u->children[1]);
      os << ")";
      return;
    }
    if (y == "seq") {
      os << "(";
      go(u->children[0]);
      os << " ; ";
      go(u->children[1]);
      os << ")";
      return;
    }
    if (y == "if" && u->children.size() == 3) {
      os << "if ";
      go(u->children[0]);
      os << " then ";
      go(u->children[1]);
      os << " else ";
      go(u->children[2]);
      return;
    }
    if (y == "while" && u->children.size() == 2) {
      os << "while ";
      go(u->children[0]);
      os << " do ";
      go(u->children[1]);
      return;
    }
    if (y == "print" && u->children.size() == 1) {
      os << "print ";
      go(u->children[0]);
      return;
    }
    os << "(" << y;
    for (const auto& c : u->children) {
      os << " ";
      go(c);
    }
    os << ")";
  };
  go(t);
  return os.str();
}

std::string display_state(const ReductionState& s) {
  std::ostringstream os;
  os << "[";
  bool first = true;
  for (auto it = s.bindings.rbegin(); it != s.bindings.rend(); ++it) {
    if (!first) os << ", ";
    first = false;
    os << display_term(it->first) << " -> " << display_term(it->second);
  }
  if (s.tail) {
    if (!first) os << " ";
    os << "| " << display_term(s.tail);
  }
  os << "]";
  return os.str();
}

std::string display_config(const Configuration& c) {
  return "(" + display_term(c.term) + ", " + display_state(c.state) + ")";
}

}  // namespace semflow
