#include "semflow/graph_pattern.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include "semflow/match.hpp"

namespace semflow {

// --------------------------- canonical keys --------------------------------

namespace {

struct CanonCtx {
  const std::vector<VarKey>& pinned;
  std::map<VarKey, int> numbering;

  bool is_pinned(const VarKey& k) const {
    return std::find(pinned.begin(), pinned.end(), k) != pinned.end();
  }
  int number(const VarKey& k) {
    auto it = numbering.find(k);
    if (it != numbering.end()) return it->second;
    int n = static_cast<int>(numbering.size());
    numbering[k] = n;
    return n;
  }
};

void canon_term(std::ostringstream& os, CanonCtx& cc, const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (cc.is_pinned(key_of(t))) {
        os << "?" << t->sym << "!" << ":" << mt_name(t->mt);
      } else {
        os << "?v" << cc.number(key_of(t)) << ":" << mt_name(t->mt);
      }
      return;
    case Term::Kind::Star: os << "*" << mt_name(t->mt); return;
    case Term::Kind::ConstInt: os << t->ival; return;
    case Term::Kind::ConstStr: os << '"' << t->sval << '"'; return;
    default:
      os << "(" << (t->kind == Term::Kind::ValNode ? "!" : "") << t->sym;
      for (const auto& c : t->children) {
        os << " ";
        canon_term(os, cc, c);
      }
      os << ")";
  }
}

void canon_state(std::ostringstream& os, CanonCtx& cc, const ReductionState& s) {
  // sort by a pinned-insensitive key print for determinism
  std::vector<std::pair<std::string, std::pair<TermPtr, TermPtr>>> entries;
  for (const auto& [k, v] : s.bindings) entries.push_back({print_term(k), {k, v}});
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  os << "[";
  for (const auto& e : entries) {
    canon_term(os, cc, e.second.first);
    os << "->";
    canon_term(os, cc, e.second.second);
    os << ",";
  }
  if (s.tail) {
    os << "|";
    canon_term(os, cc, s.tail);
  }
  os << "]";
}

void canon_ctx_rec(std::ostringstream& os, CanonCtx& cc, const ContextPtr& c) {
  if (c->kind == Context::Kind::Emp) {
    os << "emp";
    return;
  }
  if (c->kind == Context::Kind::KVar) {
    if (cc.is_pinned(VarKey{c->kname, c->ktag}))
      os << "?" << c->kname << "!";
    else
      os << "?k" << cc.number(VarKey{c->kname, c->ktag});
    return;
  }
  canon_ctx_rec(os, cc, c->rest);
  os << " o {" << c->top->origin << ":";
  for (const auto& e : c->top->capt) {
    os << e.k.name << "=";
    if (e.term) canon_term(os, cc, e.term);
    if (e.state) canon_state(os, cc, *e.state);
    os << ";";
  }
  os << "}";
}

}  // namespace

std::string pattern_canon_key(const AmState& s, const std::vector<VarKey>& pinned,
                              int child_tag) {
  CanonCtx cc{pinned, {}};
  std::ostringstream os;
  canon_term(os, cc, s.conf.term);
  os << " @ ";
  canon_state(os, cc, s.conf.state);
  os << " | ";
  canon_ctx_rec(os, cc, s.ctx);
  if (child_tag >= 0) os << " $child" << child_tag;
  return os.str();
}

std::string canon_am_rule(const AmRule& r) {
  static const std::vector<VarKey> none;
  CanonCtx cc{none, {}};
  std::ostringstream os;
  canon_term(os, cc, r.lhs.conf.term);
  os << " @ ";
  canon_state(os, cc, r.lhs.conf.state);
  os << " | ";
  canon_ctx_rec(os, cc, r.lhs.ctx);
  os << "  ->  ";
  for (const auto& ch : r.chain) {
    os << "let ";
    canon_term(os, cc, ch.result.term);
    os << "@";
    canon_state(os, cc, ch.result.state);
    os << " = " << ch.fun << "(";
    for (const auto& a : ch.args) {
      canon_term(os, cc, a.term);
      os << "@";
      canon_state(os, cc, a.state);
      os << ";";
    }
    os << ") in ";
  }
  canon_term(os, cc, r.rhs.conf.term);
  os << " @ ";
  canon_state(os, cc, r.rhs.conf.state);
  os << " | ";
  canon_ctx_rec(os, cc, r.rhs.ctx);
  return os.str();
}

// ------------------------------ narrowing ----------------------------------

namespace {

void narrow_chain(const Language& lang, const Abstraction& abs,
                  const std::vector<ChainCall>& chain, std::size_t i, Substitution sigma,
                  FreshCounter& fc, const std::function<void(Substitution)>& done) {
  if (i == chain.size()) {
    done(std::move(sigma));
    return;
  }
  const ChainCall& c = chain[i];
  std::vector<Configuration> args;
  for (const auto& a : c.args) args.push_back(substitute(sigma, a));
  for (const Configuration& r : abs.beta(lang, c.fun, args)) {
    Substitution ext = sigma;
    if (!unify_config_into(c.result, r, ext, fc)) continue;
    narrow_chain(lang, abs, chain, i + 1, std::move(ext), fc, done);
  }
}

Substitution normalized(Substitution s) {
  for (int i = 0; i < 16; ++i) {
    bool changed = false;
    for (auto& [k, v] : s.terms) {
      TermPtr nv = substitute(s, v);
      if (!term_eq(nv, v)) {
        v = nv;
        changed = true;
      }
    }
    for (auto& [k, v] : s.states) {
      ReductionState nv = substitute(s, v);
      if (!state_eq(nv, v)) {
        v = nv;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return s;
}

}  // namespace

std::vector<NarrowSucc> narrow_step(const Language& lang, const std::vector<AmRule>& rules,
                                    const Abstraction& abs, const AmState& s,
                                    FreshCounter& fc) {
  std::vector<NarrowSucc> out;
  for (const auto& rule : rules) {
    AmRule rr = fresh_rename_am(rule, fc);
    Substitution sigma;
    if (!unify_config_into(rr.lhs.conf, s.conf, sigma, fc)) continue;
    if (!unify_ctx_into(rr.lhs.ctx, s.ctx, sigma, fc)) continue;
    narrow_chain(lang, abs, rr.chain, 0, std::move(sigma), fc, [&](Substitution done) {
      done = normalized(std::move(done));
      AmState nxt{substitute(done, rr.rhs.conf), substitute(done, rr.rhs.ctx)};
      nxt = abs.state(nxt);
      NarrowSucc ns;
      ns.state = std::move(nxt);
      ns.rule = rule.name;
      if (rr.rhs.conf.term->kind == Term::Kind::Var)
        ns.focus_pattern_mt = rr.rhs.conf.term->mt;
      out.push_back(std::move(ns));
    });
  }
  return out;
}

// --------------------------- pattern generation ----------------------------

GraphPattern gen_graph_pattern(const Language& lang, const std::vector<AmRule>& rules,
                               const Abstraction& abs, const std::string& node_type,
                               int max_nodes) {
  const Signature* sig = lang.sig(node_type);
  if (!sig) throw std::runtime_error("unknown node type '" + node_type + "'");
  if (sig->is_val) throw std::runtime_error("graph patterns are per nonvalue node type");
  if (!abs.context_discarding)
    throw std::runtime_error("abstraction '" + abs.name +
                             "' is not context-discarding; compiled mode unavailable");

  GraphPattern p;
  p.node_type = node_type;
  FreshCounter fc;

  std::vector<TermPtr> kids;
  for (int i = 0; i < sig->arity; ++i) {
    TermPtr v = var("c" + std::to_string(i), MatchType::NonVal, fc.next());
    if (lang.has_sorts && i < static_cast<int>(sig->child_sorts.size())) {
      Term copy = *v;
      Sort so = sig->child_sorts[i];
      copy.var_sort = so == Sort::Expr ? "expr" : so == Sort::Stmt ? "stmt" : "other";
      v = std::make_shared<const Term>(copy);
    }
    kids.push_back(v);
    p.child_vars.push_back(key_of(v));
  }
  ContextPtr k = ctx_kvar("k", fc.next());
  p.ctx_var = VarKey{"k", k->ktag};
  AmState start{Configuration{nonval(node_type, kids), top_state()}, k};
  start = abs.state(start);
  p.start_state = start;

  std::vector<VarKey> pinned = p.child_vars;
  pinned.push_back(p.ctx_var);

  std::map<std::string, int> index;
  std::vector<int> tags;
  auto intern = [&](const AmState& s, int tag) -> int {
    std::string key = pattern_canon_key(s, pinned, tag);
    auto it = index.find(key);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(p.nodes.size());
    PatternNode n;
    n.state = s;
    n.child_tag = tag;
    p.nodes.push_back(std::move(n));
    index.emplace(std::move(key), id);
    tags.push_back(tag);
    return id;
  };

  p.start = intern(start, -1);
  std::deque<int> work{p.start};
  std::set<int> queued{p.start};

  auto is_start_ctx = [&](const ContextPtr& c) {
    return c->kind == Context::Kind::KVar && c->kname == "k" && c->ktag == k->ktag;
  };
  auto child_index_of = [&](const TermPtr& t) -> int {
    for (std::size_t i = 0; i < p.child_vars.size(); ++i)
      if (key_of(t) == p.child_vars[i]) return static_cast<int>(i);
    return -1;
  };

  while (!work.empty()) {
    int cur = work.front();
    work.pop_front();
    AmState s = p.nodes[cur].state;

    // halt: a value over the start's own context variable
    const TermPtr& focus = s.conf.term;
    bool value_focus = focus->is_value_term() ||
                       (focus->kind == Term::Kind::Star && focus->mt == MatchType::Val);
    if (value_focus && is_start_ctx(s.ctx)) {
      p.exit_nodes.insert(cur);
      continue;
    }

    // a bare nonvalue-variable focus stands for an unknown subterm: add a
    // transitive edge over its whole evaluation instead of narrowing
    if (focus->kind == Term::Kind::Var && focus->mt == MatchType::NonVal &&
        child_index_of(focus) >= 0) {
      int ci = child_index_of(focus);
      AmState tgt{Configuration{star(MatchType::Val), top_state()}, s.ctx};
      tgt = abs.state(tgt);
      if (static_cast<int>(p.nodes.size()) >= max_nodes &&
          index.find(pattern_canon_key(tgt, pinned, ci)) == index.end()) {
        p.finite = false;
        continue;
      }
      int id = intern(tgt, ci);
      p.transitive_edges.emplace(cur, id);
      if (!queued.count(id)) {
        queued.insert(id);
        work.push_back(id);
      }
      continue;
    }

    for (const NarrowSucc& ns : narrow_step(lang, rules, abs, s, fc)) {
      if (static_cast<int>(p.nodes.size()) >= max_nodes &&
          index.find(pattern_canon_key(ns.state, pinned, -1)) == index.end()) {
        p.finite = false;
        continue;
      }
      int id = intern(ns.state, -1);
      p.normal_edges.emplace(cur, id);
      // value enterability of a child-focus node: an All-typed slot admits
      // value instances of the child
      const TermPtr& f2 = p.nodes[id].state.conf.term;
      if (f2->kind == Term::Kind::Var && child_index_of(f2) >= 0 && ns.focus_pattern_mt &&
          *ns.focus_pattern_mt == MatchType::All)
        p.nodes[id].value_enterable = true;
      if (!queued.count(id)) {
        queued.insert(id);
        work.push_back(id);
      }
    }
  }
  return p;
}

std::map<std::string, GraphPattern> gen_all_patterns(const Language& lang,
                                                     const std::vector<AmRule>& rules,
                                                     const Abstraction& abs, int max_nodes) {
  std::map<std::string, GraphPattern> out;
  for (const auto& [sym, sig] : lang.sigs) {
    if (sig.is_val) continue;
    out.emplace(sym, gen_graph_pattern(lang, rules, abs, sym, max_nodes));
  }
  return out;
}

TerminationVerdict certify_termination(const std::map<std::string, GraphPattern>& patterns) {
  TerminationVerdict v;
  for (const auto& [sym, p] : patterns) {
    if (!p.finite) {
      v.terminates = false;
      v.infinite_types.push_back(sym);
    }
  }
  return v;
}

std::string pattern_dot(const GraphPattern& p, const DotOptions& opts) {
  std::vector<VarKey> pinned = p.child_vars;
  pinned.push_back(p.ctx_var);
  std::vector<std::pair<std::string, int>> order;
  for (std::size_t i = 0; i < p.nodes.size(); ++i)
    order.emplace_back(pattern_canon_key(p.nodes[i].state, pinned, p.nodes[i].child_tag),
                       static_cast<int>(i));
  std::sort(order.begin(), order.end());
  std::vector<int> rank(p.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i].second] = static_cast<int>(i);

  std::ostringstream os;
  os << "digraph " << opts.name << " {\n";
  if (!p.finite) os << "  // truncated: node budget reached\n";
  os << "  // graph pattern for " << p.node_type << ": " << p.nodes.size() << " nodes\n";
  for (const auto& [key, idx] : order) {
    std::string label = opts.verbose_labels ? key : node_label(p.nodes[idx].state, false);
    std::string esc;
    for (char ch : label) {
      if (ch == '"' || ch == '\\') esc += '\\';
      esc += ch;
    }
    os << "  n" << rank[idx] << " [label=\"" << esc << "\"";
    if (idx == p.start) os << ", shape=box, penwidth=2";
    if (p.exit_nodes.count(idx)) os << ", peripheries=2";
    os << "];\n";
  }
  std::vector<std::tuple<int, int, bool>> es;
  for (const auto& [a, b] : p.normal_edges) es.emplace_back(rank[a], rank[b], false);
  for (const auto& [a, b] : p.transitive_edges) es.emplace_back(rank[a], rank[b], true);
  std::sort(es.begin(), es.end());
  for (const auto& [a, b, trans] : es) {
    os << "  n" << a << " -> n" << b;
    if (trans) os << " [style=dashed]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::string pattern_dump(const GraphPattern& p) {
  std::vector<VarKey> pinned = p.child_vars;
  pinned.push_back(p.ctx_var);
  std::ostringstream os;
  os << "pattern " << p.node_type << (p.finite ? "" : " (truncated)") << "\n";
  for (std::size_t i = 0; i < p.nodes.size(); ++i) {
    os << "  s" << i << (static_cast<int>(i) == p.start ? " start" : "")
       << (p.exit_nodes.count(static_cast<int>(i)) ? " exit" : "") << ": "
       << pattern_canon_key(p.nodes[i].state, pinned, p.nodes[i].child_tag) << "\n";
  }
  for (const auto& [a, b] : p.normal_edges) os << "  s" << a << " -> s" << b << "\n";
  for (const auto& [a, b] : p.transitive_edges) os << "  s" << a << " ~> s" << b << "\n";
  return os.str();
}

}  // namespace semflow
