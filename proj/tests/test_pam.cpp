#include <doctest.h>

#include <algorithm>

#include "semflow/languages.hpp"
#include "semflow/pam.hpp"

using namespace semflow;

namespace {

std::vector<const PamRule*> rules_from(const std::vector<PamRule>& rules,
                                       const std::string& sos_name) {
  std::vector<const PamRule*> out;
  for (const auto& r : rules)
    if (r.sos_rule == sos_name) out.push_back(&r);
  return out;
}

}  // namespace

TEST_CASE("congruence rules split into a down rule and an up rule") {
  Language imp = imp_language();
  auto rules = sos_to_pam(imp);
  auto assn = rules_from(rules, "AssnCong");
  REQUIRE(assn.size() == 2);
  CHECK(assn[0]->lhs.phase == Phase::Down);
  CHECK(assn[0]->rhs.phase == Phase::Down);
  // the down rule pushes the assignment frame
  CHECK(ctx_len(assn[0]->rhs.ctx) == 1);
  CHECK(assn[0]->rhs.ctx->top->origin_name == "AssnCong");
  CHECK(assn[1]->lhs.phase == Phase::Up);
  CHECK(assn[1]->rhs.phase == Phase::Up);
  CHECK(ctx_len(assn[1]->lhs.ctx) == 1);
  CHECK(ctx_len(assn[1]->rhs.ctx) == 0);
}

TEST_CASE("evaluation rules become a single down-up rule") {
  Language imp = imp_language();
  auto rules = sos_to_pam(imp);
  auto assn = rules_from(rules, "AssnEval");
  REQUIRE(assn.size() == 1);
  CHECK(assn[0]->lhs.phase == Phase::Down);
  CHECK(assn[0]->rhs.phase == Phase::Up);
  CHECK(assn[0]->chain.empty());
  CHECK(print_config(assn[0]->rhs.conf) == "(skip, [?x:all -> ?v:val | ?mu:all])");
}

TEST_CASE("semantic-function rules carry a chain and stay down") {
  Language imp = imp_language();
  auto rules = sos_to_pam(imp);
  auto add = rules_from(rules, "AddEval");
  REQUIRE(add.size() == 1);
  REQUIRE(add[0]->chain.size() == 1);
  CHECK(add[0]->chain[0].fun == "add");
  CHECK(add[0]->lhs.phase == Phase::Down);
  CHECK(add[0]->rhs.phase == Phase::Down);
  CHECK(ctx_eq(add[0]->lhs.ctx, add[0]->rhs.ctx));
}

TEST_CASE("rule classification partitions by phases") {
  Language imp = imp_language();
  auto rules = sos_to_pam(imp);
  RuleClasses c = classify_rules(rules);
  CHECK(c.up_down == std::vector<std::string>{"reset"});
  auto has = [](const std::vector<std::string>& v, const std::string& n) {
    return std::find(v.begin(), v.end(), n) != v.end();
  };
  CHECK(has(c.down_down, "AssnCong"));
  CHECK(has(c.up_up, "AssnCong.2"));
  CHECK(has(c.down_up, "AssnEval"));
  CHECK(has(c.down_up, "value"));
  CHECK(c.down_down.size() + c.down_up.size() + c.up_up.size() + c.up_down.size() ==
        rules.size());
}

TEST_CASE("a pam step enters the assignment congruence") {
  Language imp = imp_language();
  auto rules = sos_to_pam(imp);
  Configuration c{imp_assign("x", imp_var("y")), parse_state("[\"y\" -> (!int 1)]")};
  PamState s{c, ctx_emp(), Phase::Down};
  auto succ = pam_step(imp, rules, s);
  REQUIRE(succ.size() == 1);
  CHECK(term_eq(succ[0].conf.term, imp_var("y")));
  CHECK(succ[0].phase == Phase::Down);
  CHECK(ctx_len(succ[0].ctx) == 1);
}

TEST_CASE("a value at the empty context in the up phase halts") {
  Language imp = imp_language();
  auto rules = sos_to_pam(imp);
  PamState s{Configuration{imp_skip(), empty_state()}, ctx_emp(), Phase::Up};
  CHECK(pam_step(imp, rules, s).empty());
  PamTrace tr = pam_run(imp, rules, s, 10);
  CHECK(tr.states.size() == 1);
}

TEST_CASE("the nested-addition derivation reproduces the fifteen-state trace") {
  Language imp = imp_language();
  auto rules = sos_to_pam(imp);
  auto t = imp_add(imp_add(imp_int(1), imp_add(imp_int(1), imp_int(1))), imp_int(1));
  PamState s0{Configuration{t, empty_state()}, ctx_emp(), Phase::Down};
  PamTrace tr = pam_run(imp, rules, s0, 64);
  const char* expected[] = {
      "< ((+ (+ (!int 1) (+ (!int 1) (!int 1))) (!int 1)), []) | emp > down",
      "< ((+ (!int 1) (+ (!int 1) (!int 1))), []) | emp o [((+ %t (!int 1)), [| %s])] > down",
      "< ((+ (!int 1) (!int 1)), []) | emp o [((+ %t (!int 1)), [| %s])] o [((+ (!int 1) %t), "
      "[| %s])] > down",
      "< ((!int 2), []) | emp o [((+ %t (!int 1)), [| %s])] o [((+ (!int 1) %t), [| %s])] > "
      "down",
      "< ((!int 2), []) | emp o [((+ %t (!int 1)), [| %s])] o [((+ (!int 1) %t), [| %s])] > up",
      "< ((+ (!int 1) (!int 2)), []) | emp o [((+ %t (!int 1)), [| %s])] > up",
      "< ((+ (+ (!int 1) (!int 2)) (!int 1)), []) | emp > up",
      "< ((+ (+ (!int 1) (!int 2)) (!int 1)), []) | emp > down",
      "< ((+ (!int 1) (!int 2)), []) | emp o [((+ %t (!int 1)), [| %s])] > down",
      "< ((!int 3), []) | emp o [((+ %t (!int 1)), [| %s])] > down",
      "< ((!int 3), []) | emp o [((+ %t (!int 1)), [| %s])] > up",
      "< ((+ (!int 3) (!int 1)), []) | emp > up",
      "< ((+ (!int 3) (!int 1)), []) | emp > down",
      "< ((!int 4), []) | emp > down",
      "< ((!int 4), []) | emp > up",
  };
  REQUIRE(tr.states.size() == 15);
  CHECK(!tr.determinism_violation);
  for (std::size_t i = 0; i < 15; ++i) {
    CAPTURE(i);
    CHECK(print_pam_state(tr.states[i]) == expected[i]);
  }
}

TEST_CASE("sanity of phase: pushes go down-down, pops land in up") {
  Language imp = imp_language();
  auto rules = sos_to_pam(imp);
  auto t = imp_seq(imp_assign("x", imp_add(imp_int(1), imp_int(2))),
                   imp_assign("y", imp_var("x")));
  PamState s0{Configuration{t, empty_state()}, ctx_emp(), Phase::Down};
  PamTrace tr = pam_run(imp, rules, s0, 256);
  REQUIRE(tr.states.size() > 2);
  for (std::size_t i = 0; i + 1 < tr.states.size(); ++i) {
    const PamState& a = tr.states[i];
    const PamState& b = tr.states[i + 1];
    int la = ctx_len(a.ctx), lb = ctx_len(b.ctx);
    if (lb > la) {
      CHECK(a.phase == Phase::Down);
      CHECK(b.phase == Phase::Down);
      CHECK(lb == la + 1);
    }
    if (lb < la) {
      CHECK(b.phase == Phase::Up);
      CHECK(la == lb + 1);
    }
  }
}

TEST_CASE("the rule sequence of a step is context-independent") {
  Language imp = imp_language();
  auto rules = sos_to_pam(imp);

  // run one SOS step's worth of PAM transitions under emp and under an
  // arbitrary injected context; the rule sequences agree
  auto step_rules = [&](const Configuration& c, ContextPtr k) {
    PamState cur{c, k, Phase::Down};
    std::vector<std::string> used;
    for (int i = 0; i < 64; ++i) {
      PamTrace one = pam_run(imp, rules, cur, 1);
      if (one.states.size() < 2) break;
      used.push_back(one.rule_names[0]);
      cur = one.states[1];
      if (cur.phase == Phase::Up && ctx_eq(cur.ctx, k)) break;  // step complete
    }
    return used;
  };

  Configuration c{imp_assign("x", imp_add(imp_int(1), imp_int(2))), empty_state()};
  auto seq_emp = step_rules(c, ctx_emp());

  // inject a foreign context: the frame pushed by stepping a sequence
  auto outer = imp_seq(imp_assign("x", imp_add(imp_int(1), imp_int(2))), imp_skip());
  PamTrace warm =
      pam_run(imp, rules, PamState{Configuration{outer, empty_state()}, ctx_emp(), Phase::Down}, 1);
  REQUIRE(warm.states.size() == 2);
  ContextPtr k2 = warm.states[1].ctx;
  REQUIRE(ctx_len(k2) == 1);
  auto seq_inj = step_rules(c, k2);

  CHECK(seq_emp == seq_inj);
  CHECK(!seq_emp.empty());
}
