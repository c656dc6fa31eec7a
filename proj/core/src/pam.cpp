#include "semflow/pam.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "semflow/match.hpp"

namespace semflow {

ContextPtr ctx_emp() {
  static ContextPtr e = std::make_shared<Context>();
  return e;
}

ContextPtr ctx_push(ContextPtr rest, FramePtr top) {
  auto c = std::make_shared<Context>();
  c->kind = Context::Kind::Push;
  c->rest = std::move(rest);
  c->top = std::move(top);
  return c;
}

ContextPtr ctx_kvar(const std::string& name, int tag) {
  auto c = std::make_shared<Context>();
  c->kind = Context::Kind::KVar;
  c->kname = name;
  c->ktag = tag;
  return c;
}

int ctx_len(const ContextPtr& c) {
  int n = 0;
  ContextPtr cur = c;
  while (cur && cur->kind == Context::Kind::Push) {
    ++n;
    cur = cur->rest;
  }
  return n;
}

bool ctx_has_kvar(const ContextPtr& c) {
  ContextPtr cur = c;
  while (cur && cur->kind == Context::Kind::Push) cur = cur->rest;
  return cur && cur->kind == Context::Kind::KVar;
}

bool frame_eq(const FramePtr& a, const FramePtr& b) {
  if (a == b) return true;
  if (a->origin != b->origin || a->capt.size() != b->capt.size()) return false;
  for (std::size_t i = 0; i < a->capt.size(); ++i) {
    const auto& x = a->capt[i];
    const auto& y = b->capt[i];
    if (x.k != y.k) return false;
    if ((x.term == nullptr) != (y.term == nullptr)) return false;
    if (x.term && !term_eq(x.term, y.term)) return false;
    if (x.state.has_value() != y.state.has_value()) return false;
    if (x.state && !state_eq(*x.state, *y.state)) return false;
  }
  return true;
}

bool ctx_eq(const ContextPtr& a, const ContextPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Context::Kind::Emp: return true;
    case Context::Kind::KVar: return a->kname == b->kname && a->ktag == b->ktag;
    case Context::Kind::Push: return frame_eq(a->top, b->top) && ctx_eq(a->rest, b->rest);
  }
  return false;
}

FramePtr substitute(const Substitution& s, const FramePtr& f) {
  auto nf = std::make_shared<Frame>(*f);
  for (auto& e : nf->capt) {
    if (e.term) e.term = substitute(s, e.term);
    if (e.state) e.state = substitute(s, *e.state);
  }
  return nf;
}

ContextPtr substitute(const Substitution& s, const ContextPtr& c) {
  switch (c->kind) {
    case Context::Kind::Emp: return c;
    case Context::Kind::KVar: {
      auto it = s.contexts.find(VarKey{c->kname, c->ktag});
      return it == s.contexts.end() ? c : it->second;
    }
    case Context::Kind::Push:
      return ctx_push(substitute(s, c->rest), substitute(s, c->top));
  }
  return c;
}

namespace {

bool match_frame_into(const FramePtr& pattern, const FramePtr& subject, Substitution& s,
                      bool abstract_mode) {
  if (pattern->origin != subject->origin) return false;
  for (const auto& pe : pattern->capt) {
    const CaptEntry* se = nullptr;
    for (const auto& e : subject->capt)
      if (e.k == pe.k) se = &e;
    if (!se) return false;
    if (pe.term && se->term) {
      if (!match_term_into(pe.term, se->term, s, abstract_mode)) return false;
    } else if (pe.state && se->state) {
      if (!match_state_into(*pe.state, *se->state, s, abstract_mode)) return false;
    } else {
      return false;
    }
  }
  return true;
}

bool unify_frame_into(const FramePtr& a, const FramePtr& b, Substitution& s, FreshCounter& fc) {
  if (a->origin != b->origin) return false;
  for (const auto& ea : a->capt) {
    const CaptEntry* eb = nullptr;
    for (const auto& e : b->capt)
      if (e.k == ea.k) eb = &e;
    if (!eb) return false;
    if (ea.term && eb->term) {
      if (!unify_into(ea.term, eb->term, s, fc)) return false;
    } else if (ea.state && eb->state) {
      if (!unify_state_into(*ea.state, *eb->state, s, fc)) return false;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace

bool match_ctx_into(const ContextPtr& pattern, const ContextPtr& subject, Substitution& s,
                    bool abstract_mode) {
  switch (pattern->kind) {
    case Context::Kind::KVar: {
      VarKey k{pattern->kname, pattern->ktag};
      auto it = s.contexts.find(k);
      if (it != s.contexts.end()) return ctx_eq(it->second, subject);
      s.contexts[k] = subject;
      return true;
    }
    case Context::Kind::Emp:
      return subject->kind == Context::Kind::Emp;
    case Context::Kind::Push:
      if (subject->kind != Context::Kind::Push) return false;
      return match_frame_into(pattern->top, subject->top, s, abstract_mode) &&
             match_ctx_into(pattern->rest, subject->rest, s, abstract_mode);
  }
  return false;
}

bool unify_ctx_into(const ContextPtr& ca, const ContextPtr& cb, Substitution& s,
                    FreshCounter& fc) {
  ContextPtr a = substitute(s, ca);
  ContextPtr b = substitute(s, cb);
  if (a->kind == Context::Kind::KVar || b->kind == Context::Kind::KVar) {
    if (b->kind == Context::Kind::KVar && a->kind != Context::Kind::KVar) std::swap(a, b);
    if (b->kind == Context::Kind::KVar && a->kname == b->kname && a->ktag == b->ktag)
      return true;
    s.contexts[VarKey{a->kname, a->ktag}] = b;
    return true;
  }
  if (a->kind != b->kind) return false;
  if (a->kind == Context::Kind::Emp) return true;
  return unify_frame_into(a->top, b->top, s, fc) && unify_ctx_into(a->rest, b->rest, s, fc);
}

bool prec_leq(const ContextPtr& a, const ContextPtr& b) {
  if (b->kind == Context::Kind::KVar) return true;
  if (a->kind != b->kind) return false;
  if (a->kind == Context::Kind::Emp) return true;
  if (a->kind == Context::Kind::KVar) return false;
  const FramePtr& fa = a->top;
  const FramePtr& fb = b->top;
  if (fa->origin != fb->origin) return false;
  for (const auto& ea : fa->capt) {
    const CaptEntry* eb = nullptr;
    for (const auto& e : fb->capt)
      if (e.k == ea.k) eb = &e;
    if (!eb) return false;
    if (ea.term && eb->term) {
      if (!prec_leq(ea.term, eb->term)) return false;
    } else if (ea.state && eb->state) {
      if (!prec_leq(*ea.state, *eb->state)) return false;
    } else {
      return false;
    }
  }
  return prec_leq(a->rest, b->rest);
}

// ------------------------------ printing -----------------------------------

std::string print_frame(const FramePtr& f) {
  // Render the first fragment of the remnant with the binder variables shown
  // as holes and captured values substituted in.
  Substitution s;
  std::vector<TermPtr> bv;
  config_vars(f->binder, bv);
  if (f->binder.term->kind == Term::Kind::Var)
    s.terms[key_of(f->binder.term)] = var("%t", MatchType::All);
  if (f->binder.state.tail && f->binder.state.tail->kind == Term::Kind::Var)
    s.states[key_of(f->binder.state.tail)] = ReductionState{{}, var("%s", MatchType::All)};
  for (const auto& e : f->capt) {
    if (e.term) s.terms[e.k] = e.term;
    if (e.state) s.states[e.k] = *e.state;
  }
  std::ostringstream os;
  if (f->body->kind == SosRhs::Kind::Build) {
    os << "[" << print_config(substitute(s, f->body->build)) << "]";
  } else {
    os << "[" << print_config(substitute(s, f->binder)) << " -> ...]";
  }
  return os.str();
}

std::string print_ctx(const ContextPtr& c) {
  if (c->kind == Context::Kind::Emp) return "emp";
  if (c->kind == Context::Kind::KVar) {
    std::ostringstream os;
    os << "?" << c->kname;
    if (c->ktag) os << "#" << c->ktag;
    return os.str();
  }
  return print_ctx(c->rest) + " o " + print_frame(c->top);
}

bool pam_state_eq(const PamState& a, const PamState& b) {
  return a.phase == b.phase && config_eq(a.conf, b.conf) && ctx_eq(a.ctx, b.ctx);
}

std::string print_pam_state(const PamState& s) {
  std::ostringstream os;
  os << "< " << print_config(s.conf) << " | " << print_ctx(s.ctx) << " > "
     << (s.phase == Phase::Down ? "down" : "up");
  return os.str();
}

static std::string print_chain(const std::vector<ChainCall>& chain) {
  std::ostringstream os;
  for (const auto& c : chain) {
    os << "let " << print_config(c.result) << " = " << c.fun << "(";
    for (std::size_t i = 0; i < c.args.size(); ++i) {
      if (i) os << ", ";
      os << print_config(c.args[i]);
    }
    os << ") in ";
  }
  return os.str();
}

std::string print_pam_rule(const PamRule& r) {
  std::ostringstream os;
  os << r.name << ": " << print_pam_state(r.lhs) << "  ~>  " << print_chain(r.chain)
     << print_pam_state(r.rhs);
  return os.str();
}

// ------------------------------ translation --------------------------------

namespace {

struct PamBuilder {
  const Language& lang;
  std::vector<PamRule> out;
  FreshCounter fc;
  int origin = 0;

  // Variables used as state tails anywhere in the rule are state-valued.
  std::vector<VarKey> state_vars;

  void collect_state_vars_config(const Configuration& c) {
    if (c.state.tail && c.state.tail->kind == Term::Kind::Var)
      state_vars.push_back(key_of(c.state.tail));
  }
  void collect_state_vars(const SosRhsPtr& r) {
    switch (r->kind) {
      case SosRhs::Kind::Build:
        collect_state_vars_config(r->build);
        return;
      case SosRhs::Kind::LetStepTo:
        collect_state_vars_config(r->arg);
        collect_state_vars_config(r->result);
        collect_state_vars(r->rest);
        return;
      case SosRhs::Kind::LetComputation:
        for (const auto& a : r->args) collect_state_vars_config(a);
        collect_state_vars_config(r->result);
        collect_state_vars(r->rest);
        return;
    }
  }
  bool is_state_var(const VarKey& k) const {
    return std::find(state_vars.begin(), state_vars.end(), k) != state_vars.end();
  }

  void translate(const std::string& rule_name, int& part, PamState cur, const ContextPtr& k,
                 std::vector<ChainCall> chain, const SosRhsPtr& rhs) {
    switch (rhs->kind) {
      case SosRhs::Kind::Build: {
        PamRule r;
        r.name = part == 0 ? rule_name : rule_name + "." + std::to_string(part + 1);
        r.sos_rule = rule_name;
        r.lhs = std::move(cur);
        r.chain = std::move(chain);
        Phase end = r.chain.empty() ? Phase::Up : Phase::Down;
        r.rhs = PamState{rhs->build, k, end};
        out.push_back(std::move(r));
        return;
      }
      case SosRhs::Kind::LetStepTo: {
        auto frame = std::make_shared<Frame>();
        frame->origin = ++origin;
        frame->origin_name = rule_name;
        frame->binder = rhs->result;
        frame->body = rhs->rest;
        std::vector<TermPtr> free;
        rhs_free_vars(rhs->rest, free);
        std::vector<TermPtr> bound;
        config_vars(rhs->result, bound);
        for (const auto& v : free) {
          bool b = false;
          for (const auto& w : bound)
            if (key_of(v) == key_of(w)) b = true;
          if (b) continue;
          CaptEntry e;
          e.k = key_of(v);
          if (is_state_var(e.k))
            e.state = ReductionState{{}, v};
          else
            e.term = v;
          frame->capt.push_back(std::move(e));
        }
        ContextPtr kp = ctx_push(k, frame);
        PamRule r;
        r.name = part == 0 ? rule_name : rule_name + "." + std::to_string(part + 1);
        r.sos_rule = rule_name;
        r.lhs = std::move(cur);
        r.chain = std::move(chain);
        r.rhs = PamState{rhs->arg, kp, Phase::Down};
        out.push_back(std::move(r));
        ++part;
        translate(rule_name, part, PamState{rhs->result, kp, Phase::Up}, k, {}, rhs->rest);
        return;
      }
      case SosRhs::Kind::LetComputation: {
        chain.push_back(ChainCall{rhs->result, rhs->fun, rhs->args});
        translate(rule_name, part, std::move(cur), k, std::move(chain), rhs->rest);
        return;
      }
    }
  }
};

}  // namespace

std::vector<PamRule> sos_to_pam(const Language& lang) {
  PamBuilder b{lang};
  for (const auto& r : lang.rules) {
    b.state_vars.clear();
    b.collect_state_vars_config(r.lhs);
    b.collect_state_vars(r.rhs);
    ContextPtr k = ctx_kvar("k", b.fc.next());
    int part = 0;
    b.translate(r.name, part, PamState{r.lhs, k, Phase::Down}, k, {}, r.rhs);
  }
  {
    // value rule: finished values flip to the returning phase
    PamRule v;
    v.name = "value";
    ContextPtr k = ctx_kvar("k", b.fc.next());
    Configuration c{var("v", MatchType::Val), ReductionState{{}, var("s", MatchType::All)}};
    v.lhs = PamState{c, k, Phase::Down};
    v.rhs = PamState{c, k, Phase::Up};
    b.out.push_back(std::move(v));
  }
  {
    // reset rule: a completed step at the empty context starts the next one
    PamRule r;
    r.name = "reset";
    Configuration c{var("t", MatchType::NonVal), ReductionState{{}, var("s", MatchType::All)}};
    r.lhs = PamState{c, ctx_emp(), Phase::Up};
    r.rhs = PamState{c, ctx_emp(), Phase::Down};
    b.out.push_back(std::move(r));
  }
  return b.out;
}

// ------------------------------ execution ----------------------------------

namespace {

void run_chain(const Language& lang, const std::vector<ChainCall>& chain, std::size_t i,
               Substitution sigma, const std::function<void(Substitution)>& done) {
  if (i == chain.size()) {
    done(std::move(sigma));
    return;
  }
  const ChainCall& c = chain[i];
  const SemFun* f = lang.semfun(c.fun);
  if (!f) return;
  std::vector<Configuration> args;
  args.reserve(c.args.size());
  for (const auto& a : c.args) args.push_back(substitute(sigma, a));
  for (const Configuration& r : f->concrete(args)) {
    Substitution ext = sigma;
    if (!match_config_into(c.result, r, ext, false)) continue;
    run_chain(lang, chain, i + 1, std::move(ext), done);
  }
}

}  // namespace

std::vector<PamState> pam_step(const Language& lang, const std::vector<PamRule>& rules,
                               const PamState& s) {
  std::vector<PamState> out;
  for (const auto& r : rules) {
    if (r.lhs.phase != s.phase) continue;
    Substitution sigma;
    if (!match_config_into(r.lhs.conf, s.conf, sigma, false)) continue;
    if (!match_ctx_into(r.lhs.ctx, s.ctx, sigma, false)) continue;
    run_chain(lang, r.chain, 0, std::move(sigma), [&](Substitution done) {
      PamState nxt;
      nxt.conf = substitute(done, r.rhs.conf);
      nxt.ctx = substitute(done, r.rhs.ctx);
      nxt.phase = r.rhs.phase;
      for (const auto& e : out)
        if (pam_state_eq(e, nxt)) return;
      out.push_back(std::move(nxt));
    });
  }
  return out;
}

PamTrace pam_run(const Language& lang, const std::vector<PamRule>& rules, const PamState& s,
                 int fuel) {
  PamTrace t;
  t.states.push_back(s);
  PamState cur = s;
  for (int i = 0; i < fuel; ++i) {
    // track which rule fired for reporting
    std::vector<std::pair<std::string, PamState>> succ;
    for (const auto& r : rules) {
      if (r.lhs.phase != cur.phase) continue;
      Substitution sigma;
      if (!match_config_into(r.lhs.conf, cur.conf, sigma, false)) continue;
      if (!match_ctx_into(r.lhs.ctx, cur.ctx, sigma, false)) continue;
      run_chain(lang, r.chain, 0, std::move(sigma), [&](Substitution done) {
        PamState nxt;
        nxt.conf = substitute(done, r.rhs.conf);
        nxt.ctx = substitute(done, r.rhs.ctx);
        nxt.phase = r.rhs.phase;
        for (const auto& e : succ)
          if (pam_state_eq(e.second, nxt)) return;
        succ.emplace_back(r.name, std::move(nxt));
      });
    }
    if (succ.empty()) break;
    if (succ.size() > 1) t.determinism_violation = true;
    cur = succ.front().second;
    t.rule_names.push_back(succ.front().first);
    t.states.push_back(cur);
  }
  return t;
}

RuleClasses classify_rules(const std::vector<PamRule>& rules) {
  RuleClasses c;
  for (const auto& r : rules) {
    if (r.lhs.phase == Phase::Down && r.rhs.phase == Phase::Down) c.down_down.push_back(r.name);
    if (r.lhs.phase == Phase::Down && r.rhs.phase == Phase::Up) c.down_up.push_back(r.name);
    if (r.lhs.phase == Phase::Up && r.rhs.phase == Phase::Up) c.up_up.push_back(r.name);
    if (r.lhs.phase == Phase::Up && r.rhs.phase == Phase::Down) c.up_down.push_back(r.name);
  }
  return c;
}

}  // namespace semflow
