#include "semflow/analyses.hpp"

#include <deque>
#include <sstream>

#include "semflow/languages.hpp"

namespace semflow {

ConstVal const_join(const ConstVal& a, const ConstVal& b) {
  if (a.k == ConstVal::K::Bot) return b;
  if (b.k == ConstVal::K::Bot) return a;
  if (a.k == ConstVal::K::Num && b.k == ConstVal::K::Num && a.n == b.n) return a;
  return ConstVal{ConstVal::K::Top, 0};
}

std::string const_show(const ConstVal& v) {
  switch (v.k) {
    case ConstVal::K::Bot: return "bot";
    case ConstVal::K::Num: return std::to_string(v.n);
    default: return "top";
  }
}

namespace {

ConstVal eval_expr(const TermPtr& t, const ConstEnv& env) {
  if (t->kind == Term::Kind::ValNode && t->sym == "int" && t->children.size() == 1 &&
      t->children[0]->kind == Term::Kind::ConstInt)
    return ConstVal{ConstVal::K::Num, t->children[0]->ival};
  if (t->is_node() && t->sym == "var" && t->children[0]->kind == Term::Kind::ConstStr) {
    auto it = env.find(t->children[0]->sval);
    if (it == env.end()) return ConstVal{ConstVal::K::Top, 0};
    return it->second;
  }
  if (t->is_node() && t->sym == "+" && t->children.size() == 2) {
    ConstVal a = eval_expr(t->children[0], env);
    ConstVal b = eval_expr(t->children[1], env);
    if (a.k == ConstVal::K::Bot || b.k == ConstVal::K::Bot) return ConstVal{ConstVal::K::Bot, 0};
    if (a.k == ConstVal::K::Num && b.k == ConstVal::K::Num)
      return ConstVal{ConstVal::K::Num, a.n + b.n};
  }
  return ConstVal{ConstVal::K::Top, 0};
}

bool env_eq(const ConstEnv& a, const ConstEnv& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || it->second.k != v.k || it->second.n != v.n) return false;
  }
  return true;
}

ConstEnv env_join(const ConstEnv& a, const ConstEnv& b) {
  ConstEnv out = a;
  for (const auto& [k, v] : b) {
    auto it = out.find(k);
    out[k] = it == out.end() ? v : const_join(it->second, v);
  }
  return out;
}

// Effect of a node: assignments take effect at their exit node; anything
// unsupported writes top to the written variable.
ConstEnv transfer(const RecipeCfgNode& n, ConstEnv env) {
  if (n.role != "out" && n.role != "leaf") return env;
  const TermPtr& t = n.ast;
  if (!t->is_node()) return env;
  if (t->sym == ":=" && t->children[0]->kind == Term::Kind::ConstStr) {
    env[t->children[0]->sval] = eval_expr(t->children[1], env);
    return env;
  }
  if ((t->sym == "let" || t->sym == "for") && t->children[0]->kind == Term::Kind::ConstStr)
    env[t->children[0]->sval] = ConstVal{ConstVal::K::Top, 0};
  return env;
}

}  // namespace

std::map<int, ConstEnv> constant_propagation(const RecipeCfg& cfg) {
  std::map<int, ConstEnv> in, out;
  std::deque<int> work;
  for (int n : cfg.ins) work.push_back(n);
  std::set<int> queued(work.begin(), work.end());
  while (!work.empty()) {
    int n = work.front();
    work.pop_front();
    queued.erase(n);
    ConstEnv i;
    bool has_pred = false;
    for (const auto& [a, b] : cfg.edges) {
      if (b != n) continue;
      has_pred = true;
      auto it = out.find(a);
      if (it != out.end()) i = env_join(i, it->second);
    }
    (void)has_pred;
    ConstEnv o = transfer(cfg.nodes[n], i);
    bool changed = !in.count(n) || !env_eq(in[n], i) || !out.count(n) || !env_eq(out[n], o);
    in[n] = std::move(i);
    out[n] = std::move(o);
    if (changed) {
      for (const auto& [a, b] : cfg.edges) {
        if (a == n && !queued.count(b)) {
          queued.insert(b);
          work.push_back(b);
        }
      }
    }
  }
  return out;
}

// ------------------------------ parentheses ---------------------------------

namespace {

// Statically-known emission of a node: print of a string literal in focus.
std::optional<std::string> emission(const AmState& s) {
  const TermPtr& t = s.conf.term;
  if (t->is_node() && t->sym == "print" && t->children.size() == 1) {
    const TermPtr& a = t->children[0];
    if (a->kind == Term::Kind::ValNode && a->sym == "str" && a->children.size() == 1 &&
        a->children[0]->kind == Term::Kind::ConstStr)
      return a->children[0]->sval;
  }
  return std::nullopt;
}

}  // namespace

ParenVerdict paren_balance(const Cfg& g, int entry, const std::string& open_tok,
                           const std::string& close_tok, int cap) {
  struct Item {
    int node;
    int counter;
  };
  auto key = [](int n, int c) { return std::pair<int, int>{n, c}; };
  std::map<std::pair<int, int>, std::pair<int, int>> parent;  // item -> predecessor item
  std::deque<Item> work;
  std::set<std::pair<int, int>> seen;
  bool overflow = false;

  auto witness_path = [&](int n, int c) {
    std::vector<std::string> path;
    std::pair<int, int> cur{n, c};
    while (true) {
      path.push_back(node_label(g.nodes[cur.first], false));
      auto it = parent.find(cur);
      if (it == parent.end()) break;
      cur = it->second;
    }
    std::reverse(path.begin(), path.end());
    return path;
  };

  auto push = [&](int n, int c, std::optional<std::pair<int, int>> from) {
    auto k = key(n, c);
    if (seen.count(k)) return;
    seen.insert(k);
    if (from) parent[k] = *from;
    work.push_back(Item{n, c});
  };

  push(entry, 0, std::nullopt);
  while (!work.empty()) {
    Item it = work.front();
    work.pop_front();
    int c = it.counter;
    auto em = emission(g.nodes[it.node]);
    if (em) {
      if (*em == open_tok) ++c;
      if (*em == close_tok) --c;
    }
    if (c < 0)
      return ParenVerdict{ParenVerdict::K::Unbalanced, witness_path(it.node, it.counter)};
    if (c > cap) {
      overflow = true;
      continue;
    }
    bool has_succ = false;
    for (const auto& [a, b] : g.edges) {
      if (a != it.node) continue;
      has_succ = true;
      push(b, c, key(it.node, it.counter));
    }
    if (!has_succ && c != 0)
      return ParenVerdict{ParenVerdict::K::Unbalanced, witness_path(it.node, it.counter)};
  }
  if (overflow) return ParenVerdict{ParenVerdict::K::Unknown, {}};
  return ParenVerdict{ParenVerdict::K::Balanced, {}};
}

}  // namespace semflow
