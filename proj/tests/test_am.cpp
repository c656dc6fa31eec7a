#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "semflow/am.hpp"
#include "semflow/graph_pattern.hpp"
#include "semflow/languages.hpp"
#include "semflow/match.hpp"

using namespace semflow;

namespace {

Language assignment_only() {
  Language l = imp_language();
  std::vector<SosRule> keep;
  for (const auto& r : l.rules)
    if (r.name == "AssnCong" || r.name == "AssnEval") keep.push_back(r);
  l.rules = std::move(keep);
  return l;
}

std::vector<AmRule> imp_fused() {
  Language imp = imp_language();
  auto pam = sos_to_pam(imp);
  return fuse(imp, pam_to_unfused_am(imp, pam));
}

}  // namespace

TEST_CASE("the assignment congruence up-rule is invertible") {
  Language imp = imp_language();
  auto pam = sos_to_pam(imp);
  auto verdicts = check_up_rules_invertible(imp, pam);
  REQUIRE(!verdicts.empty());
  for (const auto& v : verdicts) {
    CAPTURE(v.rule);
    CAPTURE(v.detail);
    CHECK(v.v == Invertibility::Invertible);
  }
}

TEST_CASE("the lockstep third rule is not invertible") {
  Language l = lockstep_demo();
  auto pam = sos_to_pam(l);
  auto verdicts = check_up_rules_invertible(l, pam);
  bool found = false;
  for (const auto& v : verdicts) {
    if (v.rule == "LockstepComp.3") {
      found = true;
      CHECK(v.v == Invertibility::NotInvertible);
    }
  }
  CHECK(found);
}

TEST_CASE("lockstep composition yields a forbidden up-down rule") {
  Language l = lockstep_demo();
  auto pam = sos_to_pam(l);
  auto r = check_no_up_down(pam);
  CHECK(!r.ok);
  REQUIRE(r.offending.size() == 1);
  CHECK(r.offending[0] == "LockstepComp.2");

  CHECK_THROWS_AS(pam_to_unfused_am(l, pam), PreconditionFailed);
}

TEST_CASE("imp passes the up-down prohibition") {
  Language imp = imp_language();
  auto pam = sos_to_pam(imp);
  CHECK(check_no_up_down(pam).ok);
}

TEST_CASE("an empty rule set with just the reset rule passes") {
  Language empty;
  empty.name = "empty";
  auto pam = sos_to_pam(empty);
  CHECK(check_no_up_down(pam).ok);
}

TEST_CASE("a semfun on the inverse path yields Unknown, overridable") {
  // (g e) steps e after consulting a semantic function; the inverse of its
  // up-rule cannot be checked automatically
  Language l;
  l.name = "chain-cong";
  l.sigs["g"] = Signature{"g", 1, false, false, std::nullopt, {}};
  l.sigs["g2"] = Signature{"g2", 1, false, false, std::nullopt, {}};
  l.sigs["int"] = Signature{"int", 1, true, false, std::nullopt, {}};
  l.semfuns = builtin_semfuns();
  auto mu = [] { return ReductionState{{}, var("mu", MatchType::All)}; };
  Configuration one{imp_int(1), mu()};
  l.rules.push_back(SosRule{
      "ChainCong",
      Configuration{nonval("g", {var("e", MatchType::NonVal)}), mu()},
      rhs_call(Configuration{var("n", MatchType::Val), ReductionState{{}, var("mud", MatchType::All)}},
               "add", {one, one},
               rhs_step(Configuration{var("ep", MatchType::All), ReductionState{{}, var("mu2", MatchType::All)}},
                        Configuration{var("e", MatchType::NonVal), mu()},
                        rhs_build(Configuration{nonval("g", {var("ep", MatchType::All)}),
                                                ReductionState{{}, var("mu2", MatchType::All)}})))});
  auto pam = sos_to_pam(l);
  auto verdicts = check_up_rules_invertible(l, pam);
  REQUIRE(verdicts.size() == 1);
  CHECK(verdicts[0].v == Invertibility::Unknown);
  CHECK_THROWS_AS(pam_to_unfused_am(l, pam), PreconditionFailed);
  ConvertOptions opts;
  opts.assume_invertible = {verdicts[0].rule};
  CHECK_NOTHROW(pam_to_unfused_am(l, pam, opts));
}

TEST_CASE("conversion deletes the value rule as a would-be self-loop") {
  Language imp = imp_language();
  auto pam = sos_to_pam(imp);
  auto am = pam_to_unfused_am(imp, pam);
  for (const auto& r : am) CHECK(r.name != "value");
  for (const auto& r : am) CHECK(r.name != "reset");
}

TEST_CASE("up-rule foci specialize to value variables") {
  Language imp = imp_language();
  auto pam = sos_to_pam(imp);
  auto am = pam_to_unfused_am(imp, pam);
  bool found = false;
  for (const auto& r : am) {
    if (r.name != "AssnCong.2") continue;
    found = true;
    REQUIRE(r.lhs.conf.term->kind == Term::Kind::Var);
    CHECK(r.lhs.conf.term->mt == MatchType::Val);
  }
  CHECK(found);
}

TEST_CASE("an up-rule with a nonvalue-node focus is removed") {
  // let ((+ a b), mu2) = step (e, mu) destructures the stepped result; the
  // continuation's focus can never be a value
  Language l;
  l.name = "destructuring";
  l.sigs["h"] = Signature{"h", 1, false, false, std::nullopt, {}};
  l.sigs["h2"] = Signature{"h2", 1, false, false, std::nullopt, {}};
  l.sigs["+"] = Signature{"+", 2, false, false, std::nullopt, {}};
  auto mu = [] { return ReductionState{{}, var("mu", MatchType::All)}; };
  l.rules.push_back(SosRule{
      "Destr", Configuration{nonval("h", {var("e", MatchType::NonVal)}), mu()},
      rhs_step(Configuration{nonval("+", {var("a", MatchType::All), var("b", MatchType::All)}),
                             ReductionState{{}, var("mu2", MatchType::All)}},
               Configuration{var("e", MatchType::NonVal), mu()},
               rhs_build(Configuration{nonval("h2", {var("a", MatchType::All)}),
                                       ReductionState{{}, var("mu2", MatchType::All)}}))});
  auto pam = sos_to_pam(l);
  ConvertOptions opts;
  opts.assume_invertible = {"Destr.2"};
  auto am = pam_to_unfused_am(l, pam, opts);
  for (const auto& r : am) CHECK(r.name != "Destr.2");
  // the down half survives
  bool down = false;
  for (const auto& r : am)
    if (r.name == "Destr") down = true;
  CHECK(down);
}

TEST_CASE("fusing the assignment rules yields exactly the final pair") {
  Language l = assignment_only();
  auto pam = sos_to_pam(l);
  auto unfused = pam_to_unfused_am(l, pam);
  REQUIRE(unfused.size() == 3);
  auto fused = fuse(l, unfused);
  std::vector<const AmRule*> live;
  for (const auto& r : fused)
    if (!r.fused_away) live.push_back(&r);
  REQUIRE(live.size() == 2);

  // first rule: focus into the right-hand side, pushing the frame; second
  // rule: plug the value and evaluate the assignment in one step
  CHECK(canon_am_rule(*live[0]) ==
        "(:= ?v0:all ?v1:nonval) @ [|?v2:all] | ?k3  ->  ?v1:nonval @ [|?v2:all] | ?k3 o "
        "{1:x=?v0:all;}");
  CHECK(canon_am_rule(*live[1]) ==
        "?v0:val @ [|?v1:all] | ?k2 o {1:x=?v3:all;}  ->  (!skip) @ "
        "[?v3:all->?v0:val,|?v1:all] | ?k2");

  // provenance records the pair
  CHECK(live[1]->provenance ==
        std::vector<std::string>{"AssnCong.2", "AssnEval"});
  CHECK(live[1]->name == "AssnCong.2+AssnEval");
}

TEST_CASE("a rule with no successor is unchanged by fusion") {
  Language l;
  l.name = "lonely";
  l.sigs["q"] = Signature{"q", 0, false, false, std::nullopt, {}};
  l.sigs["done"] = Signature{"done", 0, true, false, std::nullopt, {}};
  auto mu = [] { return ReductionState{{}, var("mu", MatchType::All)}; };
  l.rules.push_back(SosRule{"QDone", Configuration{nonval("q", {}), mu()},
                            rhs_build(Configuration{val("done", {}), mu()})});
  auto pam = sos_to_pam(l);
  auto unfused = pam_to_unfused_am(l, pam);
  auto fused = fuse(l, unfused);
  REQUIRE(fused.size() == unfused.size());
  CHECK(fused[0].name == unfused[0].name);
}

TEST_CASE("the fused machine runs assignment through lookup") {
  Language imp = imp_language();
  auto fused = imp_fused();
  AmState s0{Configuration{imp_assign("x", imp_var("y")), parse_state("[\"y\" -> (!int 1)]")},
             ctx_emp()};
  AmTrace tr = am_run(imp, fused, s0, 16);
  REQUIRE(tr.states.size() == 4);  // three further states
  CHECK(!tr.determinism_violation);
  CHECK(term_eq(tr.states.back().conf.term, imp_skip()));
  CHECK(state_eq(tr.states.back().conf.state, parse_state("[\"x\" -> (!int 1), \"y\" -> (!int 1)]")));
  CHECK(ctx_eq(tr.states.back().ctx, ctx_emp()));
}

TEST_CASE("the fused machine computes the nested addition") {
  Language imp = imp_language();
  auto fused = imp_fused();
  auto t = imp_add(imp_add(imp_int(1), imp_add(imp_int(1), imp_int(1))), imp_int(1));
  AmTrace tr = am_run(imp, fused, AmState{Configuration{t, empty_state()}, ctx_emp()}, 32);
  CHECK(term_eq(tr.states.back().conf.term, imp_int(4)));
  CHECK(ctx_eq(tr.states.back().ctx, ctx_emp()));
}

TEST_CASE("a value at the empty context halts the machine") {
  Language imp = imp_language();
  auto fused = imp_fused();
  AmTrace tr = am_run(imp, fused, AmState{Configuration{imp_int(4), empty_state()}, ctx_emp()}, 8);
  CHECK(tr.states.size() == 1);
}

TEST_CASE("sanity of frame along machine traces") {
  Language imp = imp_language();
  auto fused = imp_fused();
  auto t = imp_seq(imp_assign("x", imp_add(imp_int(1), imp_int(2))),
                   imp_if(imp_lt(imp_var("x"), imp_int(5)), imp_assign("y", imp_int(1)),
                          imp_skip()));
  AmTrace tr = am_run(imp, fused, AmState{Configuration{t, empty_state()}, ctx_emp()}, 128);
  REQUIRE(tr.states.size() > 3);
  for (std::size_t i = 0; i + 1 < tr.states.size(); ++i) {
    int la = ctx_len(tr.states[i].ctx);
    int lb = ctx_len(tr.states[i + 1].ctx);
    CHECK(std::abs(la - lb) <= 1);  // push, pop, or top swap only
    if (tr.states[i].conf.term->is_nonvalue_term()) {
      // from a nonvalue, the context is contained in the successor's
      CHECK(lb >= la);
    }
  }
}
