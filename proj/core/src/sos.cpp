#include "semflow/sos.hpp"

#include <functional>
#include <set>

#include "semflow/match.hpp"

namespace semflow {

SosRhsPtr rhs_build(Configuration c) {
  auto r = std::make_shared<SosRhs>();
  r->kind = SosRhs::Kind::Build;
  r->build = std::move(c);
  return r;
}

SosRhsPtr rhs_step(Configuration result, Configuration arg, SosRhsPtr rest) {
  auto r = std::make_shared<SosRhs>();
  r->kind = SosRhs::Kind::LetStepTo;
  r->result = std::move(result);
  r->arg = std::move(arg);
  r->rest = std::move(rest);
  return r;
}

SosRhsPtr rhs_call(Configuration result, std::string fun, std::vector<Configuration> args,
                   SosRhsPtr rest) {
  auto r = std::make_shared<SosRhs>();
  r->kind = SosRhs::Kind::LetComputation;
  r->result = std::move(result);
  r->fun = std::move(fun);
  r->args = std::move(args);
  r->rest = std::move(rest);
  return r;
}

void config_vars(const Configuration& c, std::vector<TermPtr>& out) {
  term_vars(c.term, out);
  for (const auto& [k, v] : c.state.bindings) {
    term_vars(k, out);
    term_vars(v, out);
  }
  if (c.state.tail) term_vars(c.state.tail, out);
}

void rhs_free_vars(const SosRhsPtr& rhs, std::vector<TermPtr>& out) {
  auto minus = [](std::vector<TermPtr> vs, const std::vector<TermPtr>& bound) {
    std::vector<TermPtr> kept;
    for (const auto& v : vs) {
      bool b = false;
      for (const auto& w : bound)
        if (key_of(v) == key_of(w)) b = true;
      if (!b) kept.push_back(v);
    }
    return kept;
  };
  auto add = [&out](const std::vector<TermPtr>& vs) {
    for (const auto& v : vs) {
      bool seen = false;
      for (const auto& w : out)
        if (key_of(v) == key_of(w)) seen = true;
      if (!seen) out.push_back(v);
    }
  };
  switch (rhs->kind) {
    case SosRhs::Kind::Build: {
      std::vector<TermPtr> vs;
      config_vars (rhs->build, vs);
      add(vs);
      return;
    }
    case SosRhs::Kind::LetStepTo: {
      std::vector<TermPtr> vs;
      config_vars(rhs->arg, vs);
      add(vs);
      std::vector<TermPtr> bound;
      config_vars(rhs->result, bound);
      std::vector<TermPtr> inner;
      rhs_free_vars(rhs->rest, inner);
      add(minus(inner, bound));
      return;
    }
    case SosRhs::Kind::LetComputation: {
      std::vector<TermPtr> vs;
      for (const auto& a : rhs->args) config_vars(a, vs);
      add(vs);
      std::vector<TermPtr> bound;
      config_vars(rhs->result, bound);
      std::vector<TermPtr> inner;
      rhs_free_vars(rhs->rest, inner);
      add(minus(inner, bound));
      return;
    }
  }
}

// ------------------------------ validation ---------------------------------

namespace {

void check_term(const Language& lang, const std::string& rule, const TermPtr& t,
                std::vector<std::string>& diags) {
  if (t->is_node()) {
    const Signature* sg = lang.sig(t->sym);
    if (!sg) {
      diags.push_back("rule " + rule + ": unknown symbol '" + t->sym + "'");
    } else {
      if (sg->arity != static_cast<int>(t->children.size()))
        diags.push_back("rule " + rule + ": arity mismatch on '" + t->sym + "'");
      if (sg->is_val != (t->kind == Term::Kind::ValNode))
        diags.push_back("rule " + rule + ": valueness mismatch on '" + t->sym + "'");
    }
    for (const auto& c : t->children) check_term(lang, rule, c, diags);
  }
}

void check_config(const Language& lang, const std::string& rule, const Configuration& c,
                  std::vector<std::string>& diags) {
  check_term(lang, rule, c.term, diags);
  for (const auto& [k, v] : c.state.bindings) {
    check_term(lang, rule, k, diags);
    check_term(lang, rule, v, diags);
  }
}

void check_rhs(const Language& lang, const std::string& rule, const SosRhsPtr& rhs,
               std::vector<TermPtr> bound, std::vector<std::string>& diags) {
  auto require_bound = [&](const Configuration& c, const char* what) {
    std::vector<TermPtr> vs;
    config_vars(c, vs);
    for (const auto& v : vs) {
      bool ok = false;
      for (const auto& w : bound)
        if (key_of(v) == key_of(w)) ok = true;
      if (!ok)
        diags.push_back("rule " + rule + ": unbound variable ?" + v->sym + " in " + what);
    }
  };
  switch (rhs->kind) {
    case SosRhs::Kind::Build:
      check_config(lang, rule, rhs->build, diags);
      require_bound(rhs->build, "build");
      return;
    case SosRhs::Kind::LetStepTo: {
      check_config(lang, rule, rhs->arg, diags);
      check_config(lang, rule, rhs->result, diags);
      require_bound(rhs->arg, "step argument");
      std::vector<TermPtr> vs;
      config_vars(rhs->result, vs);
      for (const auto& v : vs) bound.push_back(v);
      check_rhs(lang, rule, rhs->rest, std::move(bound), diags);
      return;
    }
    case SosRhs::Kind::LetComputation: {
      if (!lang.semfun(rhs->fun))
        diags.push_back("rule " + rule + ": unknown semantic function '" + rhs->fun + "'");
      for (const auto& a : rhs->args) {
        check_config(lang, rule, a, diags);
        require_bound(a, "call argument");
      }
      std::vector<TermPtr> vs;
      config_vars(rhs->result, vs);
      for (const auto& v : vs) bound.push_back(v);
      check_rhs(lang, rule, rhs->rest, std::move(bound), diags);
      return;
    }
  }
}

}  // namespace

std::vector<std::string> validate_language(const Language& lang) {
  std::vector<std::string> diags;
  for (const auto& r : lang.rules) {
    check_config(lang, r.name, r.lhs, diags);
    // Sanity of Values: the LHS pattern must not match a value.
    const TermPtr& t = r.lhs.term;
    if (t->is_value_term() ||
        (t->kind == Term::Kind::Var && t->mt != MatchType::NonVal) ||
        (t->kind == Term::Kind::Star && t->mt != MatchType::NonVal))
      diags.push_back("rule " + r.name + ": LHS matches a value");
    std::vector<TermPtr> bound;
    config_vars(r.lhs, bound);
    check_rhs(lang, r.name, r.rhs, std::move(bound), diags);
  }
  // Conservative determinism screen: warn on rule pairs whose LHS terms unify.
  for (std::size_t i = 0; i < lang.rules.size(); ++i) {
    for (std::size_t j = i + 1; j < lang.rules.size(); ++j) {
      FreshCounter fc;
      std::map<VarKey, TermPtr> seen1, seen2;
      TermPtr a = fresh_rename(lang.rules[i].lhs.term, fc, seen1);
      TermPtr b = fresh_rename(lang.rules[j].lhs.term, fc, seen2);
      Substitution s;
      if (unify_into(a, b, s, fc))
        diags.push_back("warning: rules " + lang.rules[i].name + " and " +
                        lang.rules[j].name + " have overlapping LHS patterns");
    }
  }
  return diags;
}

bool diagnostics_ok(const std::vector<std::string>& diags) {
  for (const auto& d : diags)
    if (d.rfind("warning:", 0) != 0) return false;
  return true;
}

// ------------------------------ interpreter --------------------------------

namespace {

// Evaluates an rhs chain under sigma; returns the built configuration or
// nullopt when an inner fragment fails.
std::optional<Configuration> eval_rhs(const Language& lang, const SosRhsPtr& rhs,
                                      Substitution sigma) {
  switch (rhs->kind) {
    case SosRhs::Kind::Build:
      return substitute(sigma, rhs->build);
    case SosRhs::Kind::LetStepTo: {
      Configuration arg = substitute(sigma, rhs->arg);
      StepOutcome inner = sos_step(lang, arg);
      if (inner.kind != StepOutcome::Kind::Stepped) return std::nullopt;
      if (!match_config_into(rhs->result, inner.next, sigma, false)) return std::nullopt;
      return eval_rhs(lang, rhs->rest, std::move(sigma));
    }
    case SosRhs::Kind::LetComputation: {
      const SemFun* f = lang.semfun(rhs->fun);
      if (!f) return std::nullopt;
      std::vector<Configuration> args;
      args.reserve(rhs->args.size());
      for (const auto& a : rhs->args) args.push_back(substitute(sigma, a));
      for (const Configuration& r : f->concrete(args)) {
        Substitution ext = sigma;
        if (!match_config_into(rhs->result, r, ext, false)) continue;
        auto out = eval_rhs(lang, rhs->rest, std::move(ext));
        if (out) return out;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

}  // namespace

StepOutcome sos_step(const Language& lang, const Configuration& c) {
  bool matched_any = false;
  for (const auto& r : lang.rules) {
    Substitution sigma;
    if (!match_config_into(r.lhs, c, sigma, false)) continue;
    matched_any = true;
    auto out = eval_rhs(lang, r.rhs, std::move(sigma));
    if (out) return StepOutcome{StepOutcome::Kind::Stepped, *out, r.name};
  }
  if (c.is_value()) return StepOutcome{StepOutcome::Kind::ValueHalt, c, "value"};
  StepOutcome o;
  o.kind = StepOutcome::Kind::Stuck;
  o.next = c;
  o.detail = matched_any ? "rule matched but an inner fragment failed" : "no rule matches";
  return o;
}

SosTrace sos_run(const Language& lang, const Configuration& c, int fuel) {
  SosTrace t;
  t.states.push_back(c);
  Configuration cur = c;
  for (int i = 0; i < fuel; ++i) {
    StepOutcome o = sos_step(lang, cur);
    if (o.kind == StepOutcome::Kind::ValueHalt) break;
    if (o.kind == StepOutcome::Kind::Stuck) {
      t.stuck = true;
      t.stuck_detail = o.detail;
      break;
    }
    cur = o.next;
    t.states.push_back(cur);
  }
  return t;
}

}  // namespace semflow
