#include "semflow/abstraction.hpp"

#include <algorithm>
#include <sstream>

#include "semflow/match.hpp"

namespace semflow {

namespace {

// Shared shape of the bundled abstractions: a term map applied to the focus,
// every state value, and every captured frame entry.
struct AlphaParts {
  std::function<TermPtr(const TermPtr&)> term;
  // applied to the whole state after the term map ran on its values
  std::function<AmState(const AmState&)> post;
};

ReductionState map_state(const std::function<TermPtr(const TermPtr&)>& f,
                         const ReductionState& s) {
  ReductionState out;
  for (const auto& [k, v] : s.bindings) out.bindings.emplace_back(k, f(v));
  out.tail = s.tail;
  return out;
}

ContextPtr map_ctx(const std::function<TermPtr(const TermPtr&)>& f, const ContextPtr& c) {
  switch (c->kind) {
    case Context::Kind::Emp:
    case Context::Kind::KVar:
      return c;
    case Context::Kind::Push: {
      auto nf = std::make_shared<Frame>(*c->top);
      for (auto& e : nf->capt) {
        if (e.term) e.term = f(e.term);
        if (e.state) e.state = map_state(f, *e.state);
      }
      return ctx_push(map_ctx(f, c->rest), nf);
    }
  }
  return c;
}

Abstraction assemble(std::string name, AlphaParts parts,
                     decltype(Abstraction::beta) beta, bool context_discarding) {
  Abstraction a;
  a.name = std::move(name);
  a.term = parts.term;
  a.red_state = [f = parts.term](const ReductionState& s) { return map_state(f, s); };
  a.state = [parts](const AmState& s) {
    AmState out;
    out.conf.term = parts.term(s.conf.term);
    out.conf.state = map_state(parts.term, s.conf.state);
    out.ctx = map_ctx(parts.term, s.ctx);
    if (parts.post) out = parts.post(out);
    return out;
  };
  a.beta = std::move(beta);
  a.context_discarding = context_discarding;
  return a;
}

// Star every data value; statement-sorted values (skip) are control results
// and keep their identity, as do name constants and pattern leaves.
TermPtr value_star_term(const Language& lang, const TermPtr& t) {
  if (t->kind == Term::Kind::ValNode) {
    const Signature* s = lang.sig(t->sym);
    if (s && s->sort && *s->sort == Sort::Stmt) return t;
    return star(MatchType::Val);
  }
  if (!t->is_node()) return t;
  bool changed = false;
  std::vector<TermPtr> kids;
  kids.reserve(t->children.size());
  for (const auto& c : t->children) {
    TermPtr nc = value_star_term(lang, c);
    changed = changed || nc != c;
    kids.push_back(nc);
  }
  if (!changed) return t;
  return nonval(t->sym, std::move(kids));
}

std::vector<Configuration> beta_default(const Language& lang, const std::string& fun,
                                        const std::vector<Configuration>& args) {
  const SemFun* f = lang.semfun(fun);
  if (!f) return {};
  return f->abstract_default(args);
}

Sort term_sort(const Language& lang, const TermPtr& t) {
  if (t->kind == Term::Kind::Var && t->var_sort) {
    if (*t->var_sort == "expr") return Sort::Expr;
    if (*t->var_sort == "stmt") return Sort::Stmt;
    return Sort::Other;
  }
  if (t->is_node()) {
    const Signature* s = lang.sig(t->sym);
    if (s && s->sort) return *s->sort;
  }
  return Sort::Other;
}

}  // namespace

Abstraction identity_abstraction() {
  Abstraction a;
  a.name = "identity";
  a.term = [](const TermPtr& t) { return t; };
  a.red_state = [](const ReductionState& s) { return s; };
  a.state = [](const AmState& s) { return s; };
  a.beta = [](const Language& lang, const std::string& fun,
              const std::vector<Configuration>& args) -> std::vector<Configuration> {
    const SemFun* f = lang.semfun(fun);
    if (!f) return {};
    return f->concrete(args);
  };
  a.context_discarding = false;
  return a;
}

Abstraction value_irrelevance(const Language& lang, bool skip_calls) {
  AlphaParts p;
  p.term = [&lang](const TermPtr& t) { return value_star_term(lang, t); };
  if (skip_calls) {
    p.post = [&lang](const AmState& s) {
      if (s.conf.term->is_node()) {
        const Signature* sg = lang.sig(s.conf.term->sym);
        if (sg && sg->is_call) {
          AmState out = s;
          out.conf.term = star(MatchType::Val);
          out.conf.state = top_state();
          return out;
        }
      }
      return s;
    };
  }
  return assemble(skip_calls ? "value-irrel-skipcalls" : "value-irrel", std::move(p),
                  beta_default, true);
}

Abstraction expression_irrelevance(const Language& lang) {
  if (!lang.has_sorts)
    throw MissingSortTable("language '" + lang.name + "' has no expression/statement sorts");
  AlphaParts p;
  p.term = [&lang](const TermPtr& t) { return value_star_term(lang, t); };
  p.post = [&lang](const AmState& s) {
    const TermPtr& t = s.conf.term;
    bool nonvalue_focus = t->is_nonvalue_term() ||
                          (t->kind == Term::Kind::Var && t->mt == MatchType::NonVal);
    if (nonvalue_focus && term_sort(lang, t) == Sort::Expr) {
      AmState out = s;
      out.conf.term = star(MatchType::Val);
      out.conf.state = top_state();
      return out;
    }
    return s;
  };
  return assemble("expr-irrel", std::move(p), beta_default, true);
}

Abstraction boolean_tracking(const Language& lang, std::vector<std::string> tracked_vars,
                             bool keep_string_literals) {
  auto tracked = std::make_shared<std::vector<std::string>>(std::move(tracked_vars));
  // In the focused term booleans survive; in the state only tracked
  // variables keep their boolean bindings.
  auto term_map = [&lang, keep_string_literals](const TermPtr& t) {
    std::function<TermPtr(const TermPtr&)> go = [&](const TermPtr& u) -> TermPtr {
      if (u->kind == Term::Kind::ValNode) {
        if (u->sym == "true" || u->sym == "false") return u;
        if (keep_string_literals && u->sym == "str") return u;
        const Signature* s = lang.sig(u->sym);
        if (s && s->sort && *s->sort == Sort::Stmt) return u;
        return star(MatchType::Val);
      }
      if (!u->is_node()) return u;
      std::vector<TermPtr> kids;
      for (const auto& c : u->children) kids.push_back(go(c));
      return nonval(u->sym, std::move(kids));
    };
    return go(t);
  };
  auto value_map = [&lang](const TermPtr& t) { return value_star_term(lang, t); };

  Abstraction a;
  std::ostringstream nm;
  nm << "bool-track:";
  for (std::size_t i = 0; i < tracked->size(); ++i) nm << (i ? "," : "") << (*tracked)[i];
  a.name = nm.str();
  a.term = term_map;
  a.red_state = [term_map, value_map, tracked](const ReductionState& s) {
    ReductionState out;
    for (const auto& [k, v] : s.bindings) {
      bool is_tracked = k->kind == Term::Kind::ConstStr &&
                        std::find(tracked->begin(), tracked->end(), k->sval) != tracked->end();
      bool boolean = v->kind == Term::Kind::ValNode && (v->sym == "true" || v->sym == "false");
      out.bindings.emplace_back(k, is_tracked && boolean ? v : value_map(v));
    }
    out.tail = s.tail;
    return out;
  };
  a.state = [a_red = a.red_state, term_map](const AmState& s) {
    AmState out;
    out.conf.term = term_map(s.conf.term);
    out.conf.state = a_red(s.conf.state);
    out.ctx = map_ctx(term_map, s.ctx);
    return out;
  };
  a.beta = [](const Language& lang, const std::string& fun,
              const std::vector<Configuration>& args) -> std::vector<Configuration> {
    if (fun == "lt" || fun == "le") {
      return {Configuration{val("true", {}), empty_state()},
              Configuration{val("false", {}), empty_state()}};
    }
    return beta_default(lang, fun, args);
  };
  a.context_discarding = false;
  return a;
}

Abstraction abstraction_by_name(const Language& lang, const std::string& spec) {
  if (spec == "identity") return identity_abstraction();
  if (spec == "value-irrel") return value_irrelevance(lang, false);
  if (spec == "value-irrel-skipcalls") return value_irrelevance(lang, true);
  if (spec == "expr-irrel") return expression_irrelevance(lang);
  if (spec.rfind("bool-track:", 0) == 0) {
    std::vector<std::string> vars;
    std::string rest = spec.substr(11);
    std::string cur;
    for (char c : rest) {
      if (c == ',') {
        if (!cur.empty()) vars.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) vars.push_back(cur);
    return boolean_tracking(lang, std::move(vars));
  }
  throw std::runtime_error("unknown abstraction '" + spec + "'");
}

// ------------------------------ abstract step ------------------------------

namespace {

void run_chain_abs(const Language& lang, const Abstraction& abs,
                   const std::vector<ChainCall>& chain, std::size_t i, Substitution sigma,
                   const std::function<void(Substitution)>& done) {
  if (i == chain.size()) {
    done(std::move(sigma));
    return;
  }
  const ChainCall& c = chain[i];
  std::vector<Configuration> args;
  for (const auto& a : c.args) args.push_back(substitute(sigma, a));
  for (const Configuration& r : abs.beta(lang, c.fun, args)) {
    Substitution ext = sigma;
    if (!match_config_into(c.result, r, ext, true)) continue;
    run_chain_abs(lang, abs, chain, i + 1, std::move(ext), done);
  }
}

}  // namespace

std::vector<AmState> abs_step_rule(const Language& lang, const AmRule& rule,
                                   const Abstraction& abs, const AmState& s) {
  std::vector<AmState> out;
  Substitution sigma;
  if (!match_config_into(rule.lhs.conf, s.conf, sigma, true)) return out;
  if (!match_ctx_into(rule.lhs.ctx, s.ctx, sigma, true)) return out;
  run_chain_abs(lang, abs, rule.chain, 0, std::move(sigma), [&](Substitution done) {
    AmState nxt{substitute(done, rule.rhs.conf), substitute(done, rule.rhs.ctx)};
    nxt = abs.state(nxt);
    for (const auto& e : out)
      if (am_state_eq(e, nxt)) return;
    out.push_back(std::move(nxt));
  });
  return out;
}

std::vector<AmState> abs_step(const Language& lang, const std::vector<AmRule>& rules,
                              const Abstraction& abs, const AmState& s) {
  std::vector<AmState> out;
  for (const auto& r : rules) {
    for (auto& nxt : abs_step_rule(lang, r, abs, s)) {
      bool dup = false;
      for (const auto& e : out)
        if (am_state_eq(e, nxt)) dup = true;
      if (!dup) out.push_back(std::move(nxt));
    }
  }
  return out;
}

}  // namespace semflow
