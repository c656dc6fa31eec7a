#include <doctest.h>

#include "semflow/match.hpp"

using namespace semflow;

TEST_CASE("match decomposes structurally") {
  auto p = parse_term("(:= ?x:all ?e:nonval)");
  auto s = parse_term("(:= \"x\" (+ 1 2))");
  auto m = match(p, s);
  REQUIRE(m.has_value());
  CHECK(term_eq(m->terms.at(VarKey{"x", 0}), cstr("x")));
  CHECK(term_eq(m->terms.at(VarKey{"e", 0}), parse_term("(+ 1 2)")));
  // round trip: sigma(p) == s
  CHECK(term_eq(substitute(*m, p), s));
}

TEST_CASE("a value variable does not match a nonvalue node") {
  CHECK(!match(parse_term("?v:val"), parse_term("(+ 1 2)")).has_value());
}

TEST_CASE("repeated variables must bind equal terms") {
  CHECK(!match(parse_term("(+ ?v:val ?v:val)"), parse_term("(+ 1 2)")).has_value());
  CHECK(match(parse_term("(+ ?v:val ?v:val)"), parse_term("(+ 1 1)")).has_value());
}

TEST_CASE("state matching binds entries and the tail absorbs the rest") {
  // pattern [x -> v | k] against [z -> 2, y -> 1] under {x -> "y"}
  ReductionState pat;
  pat.upd(var("x", MatchType::All), var("v", MatchType::Val));
  pat.tail = var("k", MatchType::All);
  ReductionState sub = parse_state("[\"z\" -> 2, \"y\" -> 1]");
  Substitution partial;
  partial.terms[VarKey{"x", 0}] = cstr("y");
  auto m = match_state(pat, sub, partial);
  REQUIRE(m.has_value());
  CHECK(term_eq(m->terms.at(VarKey{"v", 0}), cint(1)));
  ReductionState rest = m->states.at(VarKey{"k", 0});
  CHECK(state_eq(rest, parse_state("[\"z\" -> 2]")));
}

TEST_CASE("an all-absorbing tail takes the whole state") {
  ReductionState pat;
  pat.tail = var("k", MatchType::All);
  auto m = match_state(pat, parse_state("[\"y\" -> 1]"), Substitution{});
  REQUIRE(m.has_value());
  CHECK(state_eq(m->states.at(VarKey{"k", 0}), parse_state("[\"y\" -> 1]")));
}

TEST_CASE("a missing key fails the state match") {
  ReductionState pat;
  pat.upd(var("x", MatchType::All), var("v", MatchType::Val));
  Substitution partial;
  partial.terms[VarKey{"x", 0}] = cstr("y");
  CHECK(!match_state(pat, parse_state("[]"), partial).has_value());
}

TEST_CASE("variable keys signal KeyNotGround") {
  ReductionState pat;
  pat.upd(var("x", MatchType::All), var("v", MatchType::Val));
  CHECK_THROWS_AS(match_state(pat, parse_state("[\"y\" -> 1]"), Substitution{}), KeyNotGround);
}

TEST_CASE("unification computes the most general unifier") {
  auto m = unify(parse_term("(+ ?a:all 1)"), parse_term("(+ 2 ?b:all)"));
  REQUIRE(m.has_value());
  CHECK(term_eq(m->terms.at(VarKey{"a", 0}), cint(2)));
  CHECK(term_eq(m->terms.at(VarKey{"b", 0}), cint(1)));

  // soundness: sigma(a) == sigma(b)
  auto a = parse_term("(+ ?a:all 1)");
  auto b = parse_term("(+ 2 ?b:all)");
  CHECK(term_eq(substitute(*m, a), substitute(*m, b)));
}

TEST_CASE("unification respects match types and the occurs check") {
  CHECK(!unify(parse_term("?e:nonval"), parse_term("1")).has_value());
  CHECK(!unify(parse_term("?a:all"), parse_term("(+ ?a:all 1)")).has_value());
  // All-typed variables specialize toward Val
  auto m = unify(parse_term("?a:all"), parse_term("?b:val"));
  REQUIRE(m.has_value());
  CHECK(m->terms.at(VarKey{"a", 0})->mt == MatchType::Val);
}

TEST_CASE("the abstraction ordering") {
  CHECK(prec_leq(parse_term("(+ 1 2)"), parse_term("*nonval")));
  CHECK(!prec_leq(parse_term("*val"), parse_term("*nonval")));
  auto t = parse_term("(:= \"x\" (+ 1 2))");
  CHECK(prec_leq(t, t));
  CHECK(prec_leq(parse_term("(!int 3)"), parse_term("*val")));
  CHECK(prec_leq(parse_term("*val"), parse_term("*all")));
  CHECK(prec_leq(parse_term("(+ 1 *val)"), parse_term("(+ 1 *all)")));
  CHECK(!prec_leq(parse_term("*all"), parse_term("*val")));
}

TEST_CASE("join is the least upper bound on the bundled shapes") {
  // (x:=1+1) join (y:=2+1) = (*val := *val + 1)
  auto a = parse_term("(:= \"x\" (+ (!int 1) (!int 1)))");
  auto b = parse_term("(:= \"y\" (+ (!int 2) (!int 1)))");
  auto j = join(a, b);
  CHECK(term_eq(j, parse_term("(:= *val (+ *val (!int 1)))")));
  CHECK(prec_leq(a, j));
  CHECK(prec_leq(b, j));

  CHECK(term_eq(join(a, a), a));
  CHECK(term_eq(join(parse_term("(!int 1)"), parse_term("true")), parse_term("*val")));
}

TEST_CASE("abstract matching returns star witnesses") {
  auto m = abstract_match(parse_term("(+ ?v1:val ?v2:val)"), parse_term("*all"));
  REQUIRE(m.has_value());
  CHECK(term_eq(m->terms.at(VarKey{"v1", 0}), star(MatchType::Val)));
  CHECK(term_eq(m->terms.at(VarKey{"v2", 0}), star(MatchType::Val)));

  // on concrete subjects it coincides with plain matching
  auto p = parse_term("(:= ?x:all ?e:nonval)");
  auto s = parse_term("(:= \"x\" (+ 1 2))");
  auto am = abstract_match(p, s);
  auto cm = match(p, s);
  REQUIRE(am.has_value());
  REQUIRE(cm.has_value());
  CHECK(term_eq(am->terms.at(VarKey{"e", 0}), cm->terms.at(VarKey{"e", 0})));

  CHECK(!abstract_match(parse_term("?e:nonval"), parse_term("*val")).has_value());

  // repeated variables meet their candidates
  auto r = abstract_match(parse_term("(+ ?v:val ?v:val)"), parse_term("(+ (!int 1) *val)"));
  REQUIRE(r.has_value());
  CHECK(term_eq(r->terms.at(VarKey{"v", 0}), parse_term("(!int 1)")));
  CHECK(!abstract_match(parse_term("(+ ?v:val ?v:val)"), parse_term("(+ (!int 1) (!int 2))"))
             .has_value());
}

TEST_CASE("meet is the compatible lower bound") {
  auto m = meet(parse_term("*val"), parse_term("(!int 3)"));
  REQUIRE(m.has_value());
  CHECK(term_eq(*m, parse_term("(!int 3)")));
  CHECK(!meet(parse_term("*val"), parse_term("(+ 1 2)")).has_value());
  CHECK(term_eq(*meet(parse_term("*all"), parse_term("*nonval")), parse_term("*nonval")));
}
