#include "semflow/am.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "semflow/match.hpp"

namespace semflow {

bool am_state_eq(const AmState& a, const AmState& b) {
  return config_eq(a.conf, b.conf) && ctx_eq(a.ctx, b.ctx);
}

std::string print_am_state(const AmState& s) {
  std::ostringstream os;
  os << "< " << print_config(s.conf) << " | " << print_ctx(s.ctx) << " >";
  return os.str();
}

std::string print_am_rule(const AmRule& r) {
  std::ostringstream os;
  os << r.name << ": " << print_am_state(r.lhs) << "  ->  ";
  for (const auto& c : r.chain) {
    os << "let " << print_config(c.result) << " = " << c.fun << "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      if (i) os << ", ";
      os << print_config(c.args[i]);
    }
    os << ") in ";
  }
  os << print_am_state(r.rhs);
  return os.str();
}

// --------------------------- fresh renaming --------------------------------

namespace {

struct Renamer {
  FreshCounter& fc;
  std::map<VarKey, TermPtr> seen;
  std::map<VarKey, ContextPtr> kseen;

  TermPtr term(const TermPtr& t) { return fresh_rename(t, fc, seen); }

  ReductionState state(const ReductionState& s) {
    ReductionState out;
    for (const auto& [k, v] : s.bindings) out.bindings.emplace_back(term(k), term(v));
    if (s.tail) out.tail = term(s.tail);
    return out;
  }

  Configuration config(const Configuration& c) { return Configuration{term(c.term), state(c.state)}; }

  ContextPtr ctx(const ContextPtr& c) {
    switch (c->kind) {
      case Context::Kind::Emp: return c;
      case Context::Kind::KVar: {
        VarKey k{c->kname, c->ktag};
        auto it = kseen.find(k);
        if (it != kseen.end()) return it->second;
        ContextPtr nk = ctx_kvar(c->kname, fc.next());
        kseen[k] = nk;
        return nk;
      }
      case Context::Kind::Push: {
        auto nf = std::make_shared<Frame>(*c->top);
        for (auto& e : nf->capt) {
          if (e.term) e.term = term(e.term);
          if (e.state) e.state = state(*e.state);
        }
        return ctx_push(ctx(c->rest), nf);
      }
    }
    return c;
  }

  std::vector<ChainCall> chain(const std::vector<ChainCall>& cs) {
    std::vector<ChainCall> out;
    for (const auto& c : cs) {
      ChainCall nc;
      nc.result = config(c.result);
      nc.fun = c.fun;
      for (const auto& a : c.args) nc.args.push_back(config(a));
      out.push_back(std::move(nc));
    }
    return out;
  }
};

}  // namespace

AmRule fresh_rename_am(const AmRule& r, FreshCounter& fc) {
  Renamer rn{fc};
  AmRule out = r;
  out.lhs = AmState{rn.config(r.lhs.conf), rn.ctx(r.lhs.ctx)};
  out.chain = rn.chain(r.chain);
  out.rhs = AmState{rn.config(r.rhs.conf), rn.ctx(r.rhs.ctx)};
  return out;
}

PamRule fresh_rename_pam(const PamRule& r, FreshCounter& fc) {
  Renamer rn{fc};
  PamRule out = r;
  out.lhs = PamState{rn.config(r.lhs.conf), rn.ctx(r.lhs.ctx), r.lhs.phase};
  out.chain = rn.chain(r.chain);
  out.rhs = PamState{rn.config(r.rhs.conf), rn.ctx(r.rhs.ctx), r.rhs.phase};
  return out;
}

// --------------------------- invertibility ---------------------------------

namespace {

struct SymState {
  Configuration conf;
  ContextPtr ctx;
};

void collect_state_vars(const ReductionState& s, std::vector<VarKey>& out) {
  if (s.tail && s.tail->kind == Term::Kind::Var) out.push_back(key_of(s.tail));
}

// Collect the rule's own variables (term-, state- and context-valued).
struct OwnVars {
  std::vector<VarKey> terms, states, ctxs;
  void config(const Configuration& c) {
    std::vector<TermPtr> vs;
    config_vars(c, vs);
    for (const auto& v : vs) terms.push_back(key_of(v));
    collect_state_vars(c.state, states);
  }
  void ctx(const ContextPtr& c) {
    ContextPtr cur = c;
    while (cur) {
      if (cur->kind == Context::Kind::KVar) {
        ctxs.push_back(VarKey{cur->kname, cur->ktag});
        return;
      }
      if (cur->kind == Context::Kind::Emp) return;
      for (const auto& e : cur->top->capt) {
        if (e.term) {
          std::vector<TermPtr> vs;
          term_vars(e.term, vs);
          for (const auto& v : vs) terms.push_back(key_of(v));
        }
        if (e.state) collect_state_vars(*e.state, states);
      }
      cur = cur->rest;
    }
  }
};

// A binding is a pure renaming if it maps a variable to a bare variable of
// the same match type (or a state/context variable to a bare one).
struct Rigidity {
  bool rigid = true;
  Substitution inverse;  // their fresh names back to our names
};

Rigidity check_rigid(const Substitution& s, const OwnVars& own) {
  Rigidity r;
  for (const auto& k : own.terms) {
    auto it = s.terms.find(k);
    if (it == s.terms.end()) continue;
    const TermPtr& b = it->second;
    if (b->kind == Term::Kind::Var) {
      r.inverse.terms[key_of(b)] = var(k.name, b->mt, k.tag);
      continue;
    }
    r.rigid = false;
  }
  for (const auto& k : own.states) {
    auto it = s.states.find(k);
    if (it == s.states.end()) continue;
    const ReductionState& b = it->second;
    if (b.bindings.empty() && b.tail && b.tail->kind == Term::Kind::Var) {
      r.inverse.states[key_of(b.tail)] = ReductionState{{}, var(k.name, MatchType::All, k.tag)};
      continue;
    }
    r.rigid = false;
  }
  for (const auto& k : own.ctxs) {
    auto it = s.contexts.find(k);
    if (it == s.contexts.end()) continue;
    const ContextPtr& b = it->second;
    if (b->kind == Context::Kind::KVar) {
      r.inverse.contexts[VarKey{b->kname, b->ktag}] = ctx_kvar(k.name, k.tag);
      continue;
    }
    r.rigid = false;
  }
  return r;
}

bool sym_state_eq(const SymState& a, const SymState& b) {
  return config_eq(a.conf, b.conf) && ctx_eq(a.ctx, b.ctx);
}

}  // namespace

std::vector<InvertVerdict> check_up_rules_invertible(const Language& lang,
                                                     const std::vector<PamRule>& rules,
                                                     int depth_bound) {
  std::vector<InvertVerdict> out;
  for (const auto& u : rules) {
    if (!(u.lhs.phase == Phase::Up && u.rhs.phase == Phase::Up)) continue;
    InvertVerdict v;
    v.rule = u.name;
    if (!u.chain.empty()) {
      v.v = Invertibility::Unknown;
      v.detail = "rule invokes a semantic function";
      out.push_back(std::move(v));
      continue;
    }
    TermPtr focus = u.lhs.conf.term;
    if (focus->is_value_term()) {
      v.v = Invertibility::Invertible;
      v.detail = "vacuous: focus is a value";
      out.push_back(std::move(v));
      continue;
    }
    // Hypothesis of Definition "invertible": the popped configuration is a
    // nonvalue; specialize the focus variable accordingly.
    PamRule hyp = u;
    if (focus->kind == Term::Kind::Var && focus->mt != MatchType::NonVal) {
      Substitution h;
      h.terms[key_of(focus)] = var(focus->sym, MatchType::NonVal, focus->tag);
      hyp.lhs = PamState{substitute(h, u.lhs.conf), substitute(h, u.lhs.ctx), u.lhs.phase};
      hyp.rhs = PamState{substitute(h, u.rhs.conf), substitute(h, u.rhs.ctx), u.rhs.phase};
    }

    OwnVars own;
    own.config(hyp.lhs.conf);
    own.config(hyp.rhs.conf);
    own.ctx(hyp.lhs.ctx);
    own.ctx(hyp.rhs.ctx);

    SymState start{hyp.rhs.conf, hyp.rhs.ctx};
    SymState target{hyp.lhs.conf, hyp.lhs.ctx};

    std::deque<std::pair<SymState, int>> work{{start, 0}};
    std::vector<SymState> seen{start};
    bool found = false;
    bool nonrigid_evidence = false, semfun_evidence = false, bound_hit = false;
    std::string nonrigid_detail;
    FreshCounter fc;

    while (!work.empty() && !found) {
      auto [cur, depth] = work.front();
      work.pop_front();
      if (sym_state_eq(cur, target)) {
        found = true;
        break;
      }
      if (depth >= depth_bound) {
        bound_hit = true;
        continue;
      }
      for (const auto& r : rules) {
        if (!(r.lhs.phase == Phase::Down && r.rhs.phase == Phase::Down)) continue;
        PamRule rr = fresh_rename_pam(r, fc);
        Substitution s;
        if (!unify_config_into(rr.lhs.conf, cur.conf, s, fc)) continue;
        if (!unify_ctx_into(rr.lhs.ctx, cur.ctx, s, fc)) continue;
        Rigidity rig = check_rigid(s, own);
        if (!rig.rigid) {
          nonrigid_evidence = true;
          nonrigid_detail = "inverse path needs specialization at rule " + r.name;
          continue;
        }
        if (!rr.chain.empty()) {
          semfun_evidence = true;
          continue;
        }
        SymState nxt;
        nxt.conf = substitute(rig.inverse, substitute(s, rr.rhs.conf));
        nxt.ctx = substitute(rig.inverse, substitute(s, rr.rhs.ctx));
        bool dup = false;
        for (const auto& e : seen)
          if (sym_state_eq(e, nxt)) dup = true;
        if (dup) continue;
        seen.push_back(nxt);
        if (sym_state_eq(nxt, target)) {
          found = true;
          break;
        }
        work.emplace_back(nxt, depth + 1);
      }
    }

    if (found) {
      v.v = Invertibility::Invertible;
    } else if (semfun_evidence || bound_hit) {
      v.v = Invertibility::Unknown;
      v.detail = semfun_evidence ? "inverse path involves a semantic function" : "depth bound hit";
    } else if (nonrigid_evidence) {
      v.v = Invertibility::NotInvertible;
      v.detail = nonrigid_detail;
    } else {
      v.v = Invertibility::NotInvertible;
      v.detail = "no inverse path exists";
    }
    out.push_back(std::move(v));
  }
  return out;
}

UpDownResult check_no_up_down(const std::vector<PamRule>& rules) {
  UpDownResult r;
  for (const auto& rule : rules) {
    if (rule.lhs.phase == Phase::Up && rule.rhs.phase == Phase::Down && rule.name != "reset") {
      r.ok = false;
      r.offending.push_back(rule.name);
    }
  }
  return r;
}

// --------------------------- conversion ------------------------------------

std::vector<AmRule> pam_to_unfused_am(const Language& lang, const std::vector<PamRule>& rules,
                                      const ConvertOptions& opts) {
  auto assumed = [&](const std::string& name) {
    return std::find(opts.assume_invertible.begin(), opts.assume_invertible.end(), name) !=
           opts.assume_invertible.end();
  };
  auto verdicts = check_up_rules_invertible(lang, rules, opts.depth_bound);
  std::vector<InvertVerdict> bad;
  for (const auto& v : verdicts)
    if (v.v != Invertibility::Invertible && !assumed(v.rule)) bad.push_back(v);
  auto updown = check_no_up_down(rules);
  if (!bad.empty() || !updown.ok) {
    PreconditionFailed e("PAM-to-AM preconditions failed");
    e.verdicts = std::move(bad);
    e.up_down = updown.offending;
    throw e;
  }

  std::vector<AmRule> out;
  for (const auto& r : rules) {
    if (r.name == "reset") continue;
    PamRule work = r;
    if (r.lhs.phase == Phase::Up) {
      // Specialize the focus to a value; drop the rule if that fails.
      TermPtr t = r.lhs.conf.term;
      if (t->kind == Term::Kind::Var) {
        auto m = mt_meet(t->mt, MatchType::Val);
        if (!m) continue;
        Substitution s;
        s.terms[key_of(t)] = var(t->sym, MatchType::Val, t->tag);
        work.lhs = PamState{substitute(s, r.lhs.conf), substitute(s, r.lhs.ctx), r.lhs.phase};
        work.rhs = PamState{substitute(s, r.rhs.conf), substitute(s, r.rhs.ctx), r.rhs.phase};
        std::vector<ChainCall> nc;
        for (const auto& c : work.chain) {
          ChainCall x = c;
          x.result = substitute(s, c.result);
          for (auto& a : x.args) a = substitute(s, a);
          nc.push_back(std::move(x));
        }
        work.chain = std::move(nc);
      } else if (!t->is_value_term()) {
        continue;  // nonvalue root never unifies with a value variable
      }
    }
    // Would-be self-loops vanish with the phase.
    if (work.chain.empty() && config_eq(work.lhs.conf, work.rhs.conf) &&
        ctx_eq(work.lhs.ctx, work.rhs.ctx))
      continue;
    AmRule a;
    a.name = work.name;
    a.lhs = AmState{work.lhs.conf, work.lhs.ctx};
    a.chain = work.chain;
    a.rhs = AmState{work.rhs.conf, work.rhs.ctx};
    a.provenance = {work.name};
    a.from_up = r.lhs.phase == Phase::Up;
    out.push_back(std::move(a));
  }
  (void)lang;
  return out;
}

// ------------------------------- fusion ------------------------------------

namespace {

std::optional<AmRule> fuse_pair(const AmRule& f, const AmRule& g_in, FreshCounter& fc) {
  AmRule g = fresh_rename_am(g_in, fc);
  Substitution s;
  if (!unify_config_into(f.rhs.conf, g.lhs.conf, s, fc)) return std::nullopt;
  if (!unify_ctx_into(f.rhs.ctx, g.lhs.ctx, s, fc)) return std::nullopt;
  // normalize bindings so later substitutions are closed
  for (int i = 0; i < 8; ++i) {
    bool changed = false;
    for (auto& [k, v] : s.terms) {
      TermPtr nv = substitute(s, v);
      if (!term_eq(nv, v)) {
        v = nv;
        changed = true;
      }
    }
    if (!changed) break;
  }
  AmRule fg;
  fg.name = f.name + "+" + g.name;
  fg.lhs = AmState{substitute(s, f.lhs.conf), substitute(s, f.lhs.ctx)};
  for (const auto& c : f.chain) {
    ChainCall x;
    x.result = substitute(s, c.result);
    x.fun = c.fun;
    for (const auto& a : c.args) x.args.push_back(substitute(s, a));
    fg.chain.push_back(std::move(x));
  }
  for (const auto& c : g.chain) {
    ChainCall x;
    x.result = substitute(s, c.result);
    x.fun = c.fun;
    for (const auto& a : c.args) x.args.push_back(substitute(s, a));
    fg.chain.push_back(std::move(x));
  }
  fg.rhs = AmState{substitute(s, g.rhs.conf), substitute(s, g.rhs.ctx)};
  fg.provenance = f.provenance;
  fg.provenance.insert(fg.provenance.end(), g_in.provenance.begin(), g_in.provenance.end());
  fg.from_up = false;
  return fg;
}

}  // namespace

std::vector<AmRule> fuse(const Language& lang, std::vector<AmRule> rules,
                         const FuseOptions& opts) {
  (void)lang;
  FreshCounter fc;
  for (int pass = 0;; ++pass) {
    if (pass >= opts.pass_bound) throw FusionDiverged("fusion pass bound exceeded");
    bool changed = false;

    if (opts.fuse_up_rules) {
      std::vector<AmRule> next;
      for (std::size_t i = 0; i < rules.size(); ++i) {
        const AmRule& f = rules[i];
        if (!f.from_up || f.fused_away) {
          next.push_back(f);
          continue;
        }
        std::vector<std::size_t> succ;
        for (std::size_t j = 0; j < rules.size(); ++j) {
          if (j == i) continue;
          FreshCounter probe_fc;
          AmRule fr = fresh_rename_am(f, probe_fc);
          AmRule gr = fresh_rename_am(rules[j], probe_fc);
          Substitution s;
          if (unify_config_into(fr.rhs.conf, gr.lhs.conf, s, probe_fc) &&
              unify_ctx_into(fr.rhs.ctx, gr.lhs.ctx, s, probe_fc))
            succ.push_back(j);
        }
        if (succ.empty()) {
          next.push_back(f);
          continue;
        }
        for (std::size_t j : succ) {
          auto fg = fuse_pair(f, rules[j], fc);
          if (fg) next.push_back(std::move(*fg));
          rules[j].fused_away = true;
        }
        changed = true;
      }
      rules = std::move(next);
    }

    if (opts.fuse_chains) {
      std::vector<AmRule> next;
      for (std::size_t i = 0; i < rules.size(); ++i) {
        const AmRule& f = rules[i];
        if (f.chain.empty() || f.fused_away || f.provenance.size() > 1) {
          next.push_back(f);
          continue;
        }
        std::vector<std::size_t> succ;
        for (std::size_t j = 0; j < rules.size(); ++j) {
          if (j == i) continue;
          FreshCounter probe_fc;
          AmRule fr = fresh_rename_am(f, probe_fc);
          AmRule gr = fresh_rename_am(rules[j], probe_fc);
          Substitution s;
          if (unify_config_into(fr.rhs.conf, gr.lhs.conf, s, probe_fc) &&
              unify_ctx_into(fr.rhs.ctx, gr.lhs.ctx, s, probe_fc))
            succ.push_back(j);
        }
        if (succ.size() != 1) {
          next.push_back(f);
          continue;
        }
        auto fg = fuse_pair(f, rules[succ[0]], fc);
        if (!fg) {
          next.push_back(f);
          continue;
        }
        next.push_back(std::move(*fg));
        rules[succ[0]].fused_away = true;
        changed = true;
      }
      rules = std::move(next);
    }

    if (!changed) break;
  }
  return rules;
}

// ------------------------------ execution ----------------------------------

namespace {

void run_chain_am(const Language& lang, const std::vector<ChainCall>& chain, std::size_t i,
                  Substitution sigma, const std::function<void(Substitution)>& done) {
  if (i == chain.size()) {
    done(std::move(sigma));
    return;
  }
  const ChainCall& c = chain[i];
  const SemFun* f = lang.semfun(c.fun);
  if (!f) return;
  std::vector<Configuration> args;
  for (const auto& a : c.args) args.push_back(substitute(sigma, a));
  for (const Configuration& r : f->concrete(args)) {
    Substitution ext = sigma;
    if (!match_config_into(c.result, r, ext, false)) continue;
    run_chain_am(lang, chain, i + 1, std::move(ext), done);
  }
}

}  // namespace

std::vector<AmState> am_step_rule(const Language& lang, const AmRule& rule, const AmState& s) {
  std::vector<AmState> out;
  Substitution sigma;
  if (!match_config_into(rule.lhs.conf, s.conf, sigma, false)) return out;
  if (!match_ctx_into(rule.lhs.ctx, s.ctx, sigma, false)) return out;
  run_chain_am(lang, rule.chain, 0, std::move(sigma), [&](Substitution done) {
    AmState nxt{substitute(done, rule.rhs.conf), substitute(done, rule.rhs.ctx)};
    for (const auto& e : out)
      if (am_state_eq(e, nxt)) return;
    out.push_back(std::move(nxt));
  });
  return out;
}

std::vector<AmState> am_step(const Language& lang, const std::vector<AmRule>& rules,
                             const AmState& s) {
  std::vector<AmState> out;
  for (const auto& r : rules) {
    for (auto& nxt : am_step_rule(lang, r, s)) {
      bool dup = false;
      for (const auto& e : out)
        if (am_state_eq(e, nxt)) dup = true;
      if (!dup) out.push_back(std::move(nxt));
    }
  }
  return out;
}

AmTrace am_run(const Language& lang, const std::vector<AmRule>& rules, const AmState& s,
               int fuel) {
  AmTrace t;
  t.states.push_back(s);
  AmState cur = s;
  for (int i = 0; i < fuel; ++i) {
    std::vector<std::pair<std::string, AmState>> succ;
    for (const auto& r : rules) {
      for (auto& nxt : am_step_rule(lang, r, cur)) {
        bool dup = false;
        for (const auto& e : succ)
          if (am_state_eq(e.second, nxt)) dup = true;
        if (!dup) succ.emplace_back(r.name, std::move(nxt));
      }
    }
    if (succ.empty()) break;
    if (succ.size() > 1) t.determinism_violation = true;
    cur = succ.front().second;
    t.rule_names.push_back(succ.front().first);
    t.states.push_back(cur);
  }
  return t;
}

}  // namespace semflow
