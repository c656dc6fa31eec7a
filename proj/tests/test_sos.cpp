#include <doctest.h>

#include "semflow/languages.hpp"
#include "semflow/sos.hpp"

using namespace semflow;

namespace {
Configuration conf(TermPtr t) { return Configuration{std::move(t), empty_state()}; }
}  // namespace

TEST_CASE("the bundled languages validate cleanly") {
  for (const Language& lang : {imp_language(), imp_extended()}) {
    auto diags = validate_language(lang);
    for (const auto& d : diags) CAPTURE(d);
    CHECK(diags.empty());
  }
}

TEST_CASE("a value LHS is a validation error") {
  Language l = imp_language();
  l.rules.push_back(SosRule{"Bad", Configuration{imp_skip(), ReductionState{{}, var("mu", MatchType::All)}},
                            rhs_build(Configuration{imp_skip(), ReductionState{{}, var("mu", MatchType::All)}})});
  auto diags = validate_language(l);
  bool found = false;
  for (const auto& d : diags)
    if (d.find("Bad") != std::string::npos && d.find("value") != std::string::npos) found = true;
  CHECK(found);
}

TEST_CASE("unbound rhs variables are a validation error") {
  Language l = imp_language();
  l.rules.push_back(SosRule{
      "Unbound", Configuration{nonval("var", {var("y", MatchType::All)}),
                               ReductionState{{}, var("mu", MatchType::All)}},
      rhs_build(Configuration{var("zap", MatchType::All), ReductionState{{}, var("mu", MatchType::All)}})});
  auto diags = validate_language(l);
  bool found = false;
  for (const auto& d : diags)
    if (d.find("Unbound") != std::string::npos && d.find("unbound") != std::string::npos)
      found = true;
  CHECK(found);
}

TEST_CASE("overlapping LHS patterns only warn") {
  Language l = imp_language();
  // duplicate of the while rule overlaps it
  SosRule dup = l.rules.back();
  dup.name = "WhileDup";
  l.rules.push_back(dup);
  auto diags = validate_language(l);
  bool warned = false;
  for (const auto& d : diags)
    if (d.rfind("warning:", 0) == 0 && d.find("WhileDup") != std::string::npos) warned = true;
  CHECK(warned);
  CHECK(diagnostics_ok(diags));
}

TEST_CASE("sos step: assignment evaluates its right-hand side") {
  Language imp = imp_language();
  // (x := 1+1, []) steps to (x := 2, [])
  auto c = conf(imp_assign("x", imp_add(imp_int(1), imp_int(1))));
  StepOutcome o = sos_step(imp, c);
  REQUIRE(o.kind == StepOutcome::Kind::Stepped);
  CHECK(term_eq(o.next.term, imp_assign("x", imp_int(2))));
  CHECK(o.next.state.bindings.empty());
}

TEST_CASE("sos step: values halt") {
  Language imp = imp_language();
  StepOutcome o = sos_step(imp, conf(imp_skip()));
  CHECK(o.kind == StepOutcome::Kind::ValueHalt);
}

TEST_CASE("sos step: while expands into if") {
  Language imp = imp_language();
  auto w = imp_while(imp_bool(true), imp_skip());
  StepOutcome o = sos_step(imp, conf(w));
  REQUIRE(o.kind == StepOutcome::Kind::Stepped);
  CHECK(term_eq(o.next.term, imp_if(imp_bool(true), imp_seq(imp_skip(), w), imp_skip())));
}

TEST_CASE("sos run reaches 4 on the nested addition") {
  Language imp = imp_language();
  auto t = imp_add(imp_add(imp_int(1), imp_add(imp_int(1), imp_int(1))), imp_int(1));
  SosTrace tr = sos_run(imp, conf(t), 10);
  REQUIRE(!tr.states.empty());
  CHECK(term_eq(tr.states.back().term, imp_int(4)));
  CHECK(tr.states.size() == 4);  // the three reductions plus the start
  CHECK(!tr.stuck);
}

TEST_CASE("sos run with zero fuel returns just the start") {
  Language imp = imp_language();
  auto c = conf(imp_assign("x", imp_int(1)));
  SosTrace tr = sos_run(imp, c, 0);
  CHECK(tr.states.size() == 1);
}

TEST_CASE("a nonterminating loop burns exactly its fuel") {
  Language imp = imp_language();
  auto c = conf(imp_while(imp_bool(true), imp_skip()));
  SosTrace tr = sos_run(imp, c, 5);
  CHECK(tr.states.size() == 6);
  CHECK(!tr.stuck);
}

TEST_CASE("an inner failure with no alternative is stuck, not a halt") {
  Language imp = imp_language();
  // assignment whose rhs reads an unbound variable
  auto c = conf(imp_assign("x", imp_var("q")));
  StepOutcome o = sos_step(imp, c);
  CHECK(o.kind == StepOutcome::Kind::Stuck);
  SosTrace tr = sos_run(imp, c, 5);
  CHECK(tr.stuck);
  CHECK(tr.states.size() == 1);
}

TEST_CASE("print captures output in the reduction state") {
  Language ext = imp_extended();
  Configuration c{imp_print(imp_str("(")), ext.initial_state};
  SosTrace tr = sos_run(ext, c, 5);
  REQUIRE(!tr.states.empty());
  auto out = output_trace(tr.states.back().state);
  REQUIRE(out.size() == 1);
  CHECK(term_eq(out[0], imp_str("(")));
}
