#include <doctest.h>

#include "semflow/term.hpp"

using namespace semflow;

TEST_CASE("term printing and parsing round-trip") {
  auto t = parse_term("(:= \"x\" (+ 1 2))");
  CHECK(t->sym == ":=");
  CHECK(t->kind == Term::Kind::NonValNode);
  CHECK(t->children[0]->sval == "x");
  CHECK(print_term(t) == "(:= \"x\" (+ 1 2))");
  CHECK(term_eq(parse_term(print_term(t)), t));

  auto v = parse_term("?e:nonval");
  CHECK(v->kind == Term::Kind::Var);
  CHECK(v->mt == MatchType::NonVal);

  auto s = parse_term("*val");
  CHECK(s->kind == Term::Kind::Star);

  auto valnode = parse_term("(!int 5)");
  CHECK(valnode->kind == Term::Kind::ValNode);
  CHECK(valnode->children[0]->ival == 5);
  CHECK(print_term(valnode) == "(!int 5)");

  auto bare = parse_term("skip");
  CHECK(bare->kind == Term::Kind::ValNode);
  CHECK(bare->children.empty());
}

TEST_CASE("malformed terms carry positions") {
  CHECK_THROWS_WITH_AS(parse_term("(+ 1"), doctest::Contains("parse error"), std::runtime_error);
  CHECK_THROWS(parse_term("?x"));
}

TEST_CASE("state printing, parsing, right-biased update") {
  ReductionState st;
  st.upd(cstr("y"), cint(1));
  st.upd(cstr("z"), cint(2));
  // newest first in print
  CHECK(print_state(st) == "[\"z\" -> 2, \"y\" -> 1]");
  st.upd(cstr("y"), cint(7));
  CHECK(term_eq(*st.lookup(cstr("y")), cint(7)));
  CHECK(st.bindings.size() == 2);

  ReductionState parsed = parse_state("[\"z\" -> 2, \"y\" -> 1]");
  CHECK(state_eq(parsed, parse_state(print_state(parsed))));

  ReductionState tailed = parse_state("[\"a\" -> 1 | ?rest:all]");
  CHECK(tailed.tail != nullptr);
  CHECK(!tailed.concrete());

  CHECK(state_eq(top_state(), parse_state("[| *all]")));
}

TEST_CASE("substitution replaces bound variables and keeps the rest") {
  Substitution s;
  s.terms[VarKey{"e", 0}] = parse_term("(+ 1 2)");
  auto t = parse_term("(:= \"x\" ?e:all)");
  CHECK(term_eq(substitute(s, t), parse_term("(:= \"x\" (+ 1 2))")));

  Substitution id;
  CHECK(substitute(id, t) == t);  // untouched terms are shared
}

TEST_CASE("substitution applies the right-biased collision rule") {
  // state [x -> 1, z -> 2] with x newest; sigma maps x to the key "z"
  ReductionState st;
  st.upd(cstr("z"), cint(2));
  st.upd(var("x", MatchType::All), cint(1));
  Substitution s;
  s.terms[VarKey{"x", 0}] = cstr("z");
  ReductionState out = substitute(s, st);
  REQUIRE(out.bindings.size() == 1);
  CHECK(term_eq(out.bindings[0].first, cstr("z")));
  CHECK(term_eq(out.bindings[0].second, cint(1)));
}

TEST_CASE("fresh renaming is consistent and alpha-stable") {
  FreshCounter fc;
  std::map<VarKey, TermPtr> seen;
  auto t = parse_term("(+ ?a:all (+ ?b:all ?a:all))");
  auto r = fresh_rename(t, fc, seen);
  CHECK(r->children[0]->tag != 0);
  CHECK(r->children[0]->tag == r->children[1]->children[1]->tag);  // same var, same tag
  CHECK(r->children[0]->tag != r->children[1]->children[0]->tag);

  // renaming twice yields alpha-equivalent results: same shape, fresh tags
  FreshCounter fc2;
  std::map<VarKey, TermPtr> seen2;
  auto r2 = fresh_rename(r, fc2, seen2);
  CHECK(r2->children[0]->tag == r2->children[1]->children[1]->tag);

  // variable-free terms are untouched (shared)
  auto g = parse_term("(+ 1 2)");
  std::map<VarKey, TermPtr> seen3;
  CHECK(fresh_rename(g, fc, seen3) == g);
}
