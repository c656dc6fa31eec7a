#include <doctest.h>

#include "semflow/abstraction.hpp"
#include "semflow/languages.hpp"
#include "semflow/match.hpp"

using namespace semflow;

namespace {

std::vector<AmRule> fused_rules(const Language& lang) {
  auto pam = sos_to_pam(lang);
  return fuse(lang, pam_to_unfused_am(lang, pam));
}

}  // namespace

TEST_CASE("value irrelevance stars stored values but keeps names") {
  Language imp = imp_language();
  Abstraction abs = value_irrelevance(imp);
  AmState s{Configuration{imp_assign("x", imp_var("y")), parse_state("[\"y\" -> (!int 1)]")},
            ctx_emp()};
  AmState a = abs.state(s);
  CHECK(term_eq(a.conf.term, imp_assign("x", imp_var("y"))));  // names survive
  CHECK(state_eq(a.conf.state, parse_state("[\"y\" -> *val]")));
  // skip is a control value and keeps its identity
  CHECK(term_eq(abs.term(imp_skip()), imp_skip()));
  CHECK(term_eq(abs.term(imp_int(3)), star(MatchType::Val)));
  CHECK(term_eq(abs.term(imp_bool(true)), star(MatchType::Val)));
}

TEST_CASE("alpha is idempotent on sampled states") {
  Language imp = imp_language();
  for (const Abstraction& abs :
       {value_irrelevance(imp), expression_irrelevance(imp),
        boolean_tracking(imp, {"b"}), identity_abstraction()}) {
    AmState s{Configuration{imp_if(imp_lt(imp_var("b"), imp_int(2)), imp_assign("x", imp_int(1)),
                                   imp_skip()),
                            parse_state("[\"b\" -> true, \"y\" -> (!int 7)]")},
              ctx_emp()};
    AmState once = abs.state(s);
    AmState twice = abs.state(once);
    CAPTURE(abs.name);
    CHECK(am_state_eq(once, twice));
  }
}

TEST_CASE("the constant beta for arithmetic") {
  Language imp = imp_language();
  Abstraction abs = value_irrelevance(imp);
  auto r = abs.beta(imp, "add", {Configuration{star(MatchType::Val), empty_state()},
                                 Configuration{star(MatchType::Val), empty_state()}});
  REQUIRE(r.size() == 1);
  CHECK(term_eq(r[0].term, star(MatchType::Val)));
}

TEST_CASE("expression irrelevance skips focused expressions") {
  Language imp = imp_language();
  Abstraction abs = expression_irrelevance(imp);
  AmState s{Configuration{imp_var("y"), parse_state("[\"y\" -> (!int 1)]")}, ctx_emp()};
  AmState a = abs.state(s);
  CHECK(term_eq(a.conf.term, star(MatchType::Val)));
  CHECK(state_eq(a.conf.state, top_state()));

  // statement focus: values erased, structure kept
  AmState st{Configuration{imp_assign("x", imp_var("y")), parse_state("[\"y\" -> (!int 1)]")},
             ctx_emp()};
  AmState at = abs.state(st);
  CHECK(term_eq(at.conf.term, imp_assign("x", imp_var("y"))));
  CHECK(state_eq(at.conf.state, parse_state("[\"y\" -> *val]")));
}

TEST_CASE("expression irrelevance requires a sort table") {
  Language l = lockstep_demo();
  CHECK_THROWS_AS(expression_irrelevance(l), MissingSortTable);
}

TEST_CASE("boolean tracking keeps tracked booleans only") {
  Language imp = imp_language();
  Abstraction abs = boolean_tracking(imp, {"b"});
  ReductionState st = parse_state("[\"b\" -> true, \"c\" -> false, \"y\" -> (!int 1)]");
  ReductionState a = abs.red_state(st);
  CHECK(term_eq(*a.lookup(cstr("b")), imp_bool(true)));
  CHECK(term_eq(*a.lookup(cstr("c")), star(MatchType::Val)));  // untracked boolean
  CHECK(term_eq(*a.lookup(cstr("y")), star(MatchType::Val)));

  auto r = abs.beta(imp, "lt", {Configuration{star(MatchType::Val), empty_state()},
                                Configuration{star(MatchType::Val), empty_state()}});
  REQUIRE(r.size() == 2);
  CHECK(term_eq(r[0].term, imp_bool(true)));
  CHECK(term_eq(r[1].term, imp_bool(false)));
}

TEST_CASE("abstract rewriting walks the assignment in four states") {
  Language imp = imp_language();
  auto rules = fused_rules(imp);
  Abstraction abs = value_irrelevance(imp);
  AmState s0 = abs.state(
      AmState{Configuration{imp_assign("x", imp_var("y")), parse_state("[\"y\" -> (!int 1)]")},
              ctx_emp()});
  std::vector<AmState> trace{s0};
  while (trace.size() < 8) {
    auto succ = abs_step(imp, rules, abs, trace.back());
    if (succ.empty()) break;
    REQUIRE(succ.size() == 1);
    trace.push_back(succ[0]);
  }
  REQUIRE(trace.size() == 4);
  CHECK(term_eq(trace[1].conf.term, imp_var("y")));
  CHECK(ctx_len(trace[1].ctx) == 1);
  CHECK(term_eq(trace[2].conf.term, star(MatchType::Val)));
  CHECK(ctx_len(trace[2].ctx) == 1);
  CHECK(term_eq(trace[3].conf.term, imp_skip()));
  CHECK(state_eq(trace[3].conf.state, parse_state("[\"x\" -> *val, \"y\" -> *val]")));
  CHECK(ctx_len(trace[3].ctx) == 0);
}

TEST_CASE("a starred condition steps into both branches") {
  Language imp = imp_language();
  auto rules = fused_rules(imp);
  Abstraction abs = value_irrelevance(imp);
  AmState s = abs.state(AmState{
      Configuration{imp_if(imp_bool(true), imp_assign("x", imp_int(1)), imp_skip()),
                    empty_state()},
      ctx_emp()});
  REQUIRE(term_eq(s.conf.term->children[0], star(MatchType::Val)));
  auto succ = abs_step(imp, rules, abs, s);
  REQUIRE(succ.size() == 2);
}

TEST_CASE("identity abstraction on concrete states coincides with the machine") {
  Language imp = imp_language();
  auto rules = fused_rules(imp);
  Abstraction abs = identity_abstraction();
  AmState s{Configuration{imp_assign("x", imp_add(imp_int(1), imp_int(2))), empty_state()},
            ctx_emp()};
  auto a = abs_step(imp, rules, abs, s);
  auto c = am_step(imp, rules, s);
  REQUIRE(a.size() == c.size());
  REQUIRE(a.size() == 1);
  CHECK(am_state_eq(a[0], c[0]));
}

TEST_CASE("the call-skipping variant blows a call focus to a star") {
  Language l = imp_language();
  Signature call;
  call.sym = "call";
  call.arity = 0;
  call.is_val = false;
  call.is_call = true;
  call.sort = Sort::Expr;
  l.sigs["call"] = call;
  Abstraction abs = value_irrelevance(l, true);
  AmState s{Configuration{nonval("call", {}), parse_state("[\"y\" -> (!int 1)]")}, ctx_emp()};
  AmState a = abs.state(s);
  CHECK(term_eq(a.conf.term, star(MatchType::Val)));
  CHECK(state_eq(a.conf.state, top_state()));
  // non-call states behave like plain value irrelevance
  AmState t{Configuration{imp_assign("x", imp_int(1)), empty_state()}, ctx_emp()};
  CHECK(term_eq(abs.state(t).conf.term, imp_assign("x", star(MatchType::Val))));
}

TEST_CASE("abstraction specs parse by name") {
  Language imp = imp_language();
  CHECK(abstraction_by_name(imp, "identity").name == "identity");
  CHECK(abstraction_by_name(imp, "value-irrel").name == "value-irrel");
  CHECK(abstraction_by_name(imp, "value-irrel-skipcalls").context_discarding);
  CHECK(abstraction_by_name(imp, "expr-irrel").name == "expr-irrel");
  CHECK(abstraction_by_name(imp, "bool-track:b,c").name == "bool-track:b,c");
  CHECK_THROWS(abstraction_by_name(imp, "nope"));
}
