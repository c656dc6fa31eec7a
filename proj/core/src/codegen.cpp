#include "semflow/codegen.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "semflow/languages.hpp"

namespace semflow {

std::string ref_name(const NodeRef& r) {
  switch (r.kind) {
    case NodeRef::Kind::TIn: return "tIn";
    case NodeRef::Kind::TOut: return "tOut";
    case NodeRef::Kind::ChildIn: return "cIn:" + std::to_string(r.child);
    case NodeRef::Kind::ChildOut: return "cOut:" + std::to_string(r.child);
  }
  return "?";
}

std::optional<NodeRef> ref_parse(const std::string& s) {
  if (s == "tIn") return NodeRef{NodeRef::Kind::TIn, -1};
  if (s == "tOut") return NodeRef{NodeRef::Kind::TOut, -1};
  if (s.rfind("cIn:", 0) == 0) return NodeRef{NodeRef::Kind::ChildIn, std::stoi(s.substr(4))};
  if (s.rfind("cOut:", 0) == 0) return NodeRef{NodeRef::Kind::ChildOut, std::stoi(s.substr(5))};
  return std::nullopt;
}

// --------------------------- projection search -----------------------------

namespace {

// Immediate neighbours over both edge kinds.
struct Adj {
  std::vector<std::vector<int>> succ, pred;
};

Adj adjacency(const GraphPattern& p) {
  Adj a;
  a.succ.resize(p.nodes.size());
  a.pred.resize(p.nodes.size());
  auto add = [&](int x, int y) {
    a.succ[x].push_back(y);
    a.pred[y].push_back(x);
  };
  for (const auto& [x, y] : p.normal_edges) add(x, y);
  for (const auto& [x, y] : p.transitive_edges) add(x, y);
  return a;
}

// Dominator sets from the start node (small graphs; iterative bitsets).
std::vector<std::vector<bool>> dominators(const GraphPattern& p, const Adj& a) {
  std::size_t n = p.nodes.size();
  std::vector<std::vector<bool>> dom(n, std::vector<bool>(n, true));
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == p.start) {
      dom[i].assign(n, false);
      dom[i][i] = true;
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (static_cast<int>(i) == p.start) continue;
      std::vector<bool> nd(n, true);
      if (a.pred[i].empty()) {
        nd.assign(n, false);
      } else {
        for (int q : a.pred[i])
          for (std::size_t j = 0; j < n; ++j) nd[j] = nd[j] && dom[q][j];
      }
      nd[i] = true;
      if (nd != dom[i]) {
        dom[i] = std::move(nd);
        changed = true;
      }
    }
  }
  return dom;
}

// Is the subgraph induced by `members` acyclic (over both edge kinds)?
bool class_loop_free(const GraphPattern& p, const std::vector<int>& members) {
  std::set<int> in(members.begin(), members.end());
  std::map<int, int> state;  // 0 unvisited, 1 on stack, 2 done
  std::function<bool(int)> dfs = [&](int u) -> bool {
    state[u] = 1;
    auto visit = [&](int v) -> bool {
      if (!in.count(v)) return true;
      if (state[v] == 1) return false;
      if (state[v] == 0 && !dfs(v)) return false;
      return true;
    };
    for (const auto& [x, y] : p.normal_edges)
      if (x == u && !visit(y)) return false;
    for (const auto& [x, y] : p.transitive_edges)
      if (x == u && !visit(y)) return false;
    state[u] = 2;
    return true;
  };
  for (int m : members)
    if (state[m] == 0 && !dfs(m)) return false;
  return true;
}

}  // namespace

std::optional<NodeClassAssignment> find_projection(const GraphPattern& p) {
  if (!p.finite) return std::nullopt;
  NodeClassAssignment a;

  // Seeds: the start is the node's entry; transitive-edge sources and
  // targets mark child entries and exits; remaining exit nodes are the
  // node's own exit.
  a.cls[p.start] = NodeRef{NodeRef::Kind::TIn, -1};
  for (const auto& [src, tgt] : p.transitive_edges) {
    const TermPtr& f = p.nodes[src].state.conf.term;
    int child = -1;
    if (f->kind == Term::Kind::Var) {
      for (std::size_t i = 0; i < p.child_vars.size(); ++i)
        if (key_of(f) == p.child_vars[i]) child = static_cast<int>(i);
    }
    if (child < 0) child = p.nodes[tgt].child_tag;
    if (child < 0) return std::nullopt;
    NodeRef cin{NodeRef::Kind::ChildIn, child};
    NodeRef cout{NodeRef::Kind::ChildOut, child};
    auto it = a.cls.find(src);
    if (it != a.cls.end() && !(it->second == cin)) return std::nullopt;
    a.cls[src] = cin;
    it = a.cls.find(tgt);
    if (it != a.cls.end() && !(it->second == cout)) return std::nullopt;
    a.cls[tgt] = cout;
  }
  for (int e : p.exit_nodes) {
    if (a.cls.count(e)) continue;  // a child exit doubling as the node's exit
    a.cls[e] = NodeRef{NodeRef::Kind::TOut, -1};
  }

  Adj adj = adjacency(p);
  auto dom = dominators(p, adj);

  // members per class, for loop-freeness checks
  auto members_of = [&](const NodeRef& r) {
    std::vector<int> m;
    for (const auto& [n, c] : a.cls)
      if (c == r) m.push_back(n);
    return m;
  };

  // Unassigned nodes merge into an adjacent class when one end dominates
  // the other; processed in BFS order from the entry, preferring the
  // predecessor side.
  std::vector<int> bfs;
  {
    std::deque<int> work{p.start};
    std::set<int> seen{p.start};
    while (!work.empty()) {
      int u = work.front();
      work.pop_front();
      bfs.push_back(u);
      for (int v : adj.succ[u])
        if (!seen.count(v)) {
          seen.insert(v);
          work.push_back(v);
        }
    }
  }

  bool progress = true;
  while (progress) {
    progress = false;
    for (int u : bfs) {
      if (a.cls.count(u)) continue;
      // candidate classes via dominating adjacency, predecessors first
      std::vector<NodeRef> cands;
      for (int v : adj.pred[u])
        if (a.cls.count(v) && (dom[u][v] || dom[v][u])) cands.push_back(a.cls[v]);
      for (int v : adj.succ[u])
        if (a.cls.count(v) && (dom[u][v] || dom[v][u])) cands.push_back(a.cls[v]);
      bool placed = false;
      for (const NodeRef& c : cands) {
        std::vector<int> m = members_of(c);
        m.push_back(u);
        if (!class_loop_free(p, m)) continue;
        a.cls[u] = c;
        placed = true;
        break;
      }
      if (placed) progress = true;
    }
  }
  for (std::size_t i = 0; i < p.nodes.size(); ++i)
    if (!a.cls.count(static_cast<int>(i))) return std::nullopt;
  return a;
}

Recipe pattern_to_recipe(const GraphPattern& p, const NodeClassAssignment& a) {
  Recipe r;
  r.node_type = p.node_type;
  r.arity = static_cast<int>(p.child_vars.size());

  for (const auto& [x, y] : p.normal_edges) {
    NodeRef cx = a.cls.at(x);
    NodeRef cy = a.cls.at(y);
    if (cx == cy) continue;
    r.connects.emplace(cx, cy);
  }
  r.ins = {NodeRef{NodeRef::Kind::TIn, -1}};
  std::set<NodeRef> outs;
  for (int e : p.exit_nodes) outs.insert(a.cls.at(e));
  for (const NodeRef& o : outs)
    if (o.kind == NodeRef::Kind::TOut) r.outs.push_back(o);
  for (const NodeRef& o : outs)
    if (o.kind != NodeRef::Kind::TOut) r.outs.push_back(o);

  // child call order: first reach of a child's entry class in BFS order
  std::map<int, int> first_seen;  // child -> bfs index
  {
    Adj adj = adjacency(p);
    std::deque<int> work{p.start};
    std::set<int> seen{p.start};
    int t = 0;
    while (!work.empty()) {
      int u = work.front();
      work.pop_front();
      NodeRef c = a.cls.at(u);
      if ((c.kind == NodeRef::Kind::ChildIn || c.kind == NodeRef::Kind::ChildOut) &&
          !first_seen.count(c.child))
        first_seen[c.child] = t;
      ++t;
      for (int v : adj.succ[u])
        if (!seen.count(v)) {
          seen.insert(v);
          work.push_back(v);
        }
    }
  }
  std::vector<std::pair<int, int>> order;  // (bfs index, child)
  for (const auto& [child, t] : first_seen) order.emplace_back(t, child);
  std::sort(order.begin(), order.end());
  for (const auto& [t, child] : order) r.child_order.push_back(child);

  for (std::size_t i = 0; i < p.nodes.size(); ++i)
    if (p.nodes[i].value_enterable) {
      NodeRef c = a.cls.at(static_cast<int>(i));
      if (c.kind == NodeRef::Kind::ChildIn &&
          std::find(r.value_enter.begin(), r.value_enter.end(), c.child) == r.value_enter.end())
        r.value_enter.push_back(c.child);
    }
  std::sort(r.value_enter.begin(), r.value_enter.end());
  return r;
}

// ------------------------------ printing -----------------------------------

namespace {

std::string letter_names(const Recipe& r, std::map<int, std::string>& letters) {
  // pattern slots: present children get letters in slot order, others '_'
  std::set<int> present(r.child_order.begin(), r.child_order.end());
  std::string pat;
  char next = 'a';
  for (int i = 0; i < r.arity; ++i) {
    if (i) pat += ", ";
    if (present.count(i)) {
      std::string nm(1, next++);
      letters[i] = nm;
      pat += nm;
    } else {
      pat += "_";
    }
  }
  return pat;
}

std::string ref_display(const NodeRef& ref, const std::map<int, std::string>& letters) {
  switch (ref.kind) {
    case NodeRef::Kind::TIn: return "tIn";
    case NodeRef::Kind::TOut: return "tOut";
    case NodeRef::Kind::ChildIn: return letters.at(ref.child) + "In";
    case NodeRef::Kind::ChildOut: return letters.at(ref.child) + "Out";
  }
  return "?";
}

}  // namespace

std::string pretty_print_recipe(const Recipe& r) {
  std::map<int, std::string> letters;
  std::string pat = letter_names(r, letters);
  std::ostringstream os;
  os << "genCfg t@(Node \"" << r.node_type << "\" [" << pat << "]) =\n";
  os << "  do (tIn, tOut) <- makeInOut t\n";
  for (int c : r.child_order) {
    const std::string& l = letters.at(c);
    os << "     (" << l << "In, " << l << "Out) <- genCfg " << l << "\n";
  }
  std::vector<std::string> cs;
  for (const auto& [x, y] : r.connects)
    cs.push_back("connect " + ref_display(x, letters) + " " + ref_display(y, letters));
  std::sort(cs.begin(), cs.end());
  for (const auto& c : cs) os << "     " << c << "\n";
  os << "     return (inNodes [";
  for (std::size_t i = 0; i < r.ins.size(); ++i)
    os << (i ? "," : "") << ref_display(r.ins[i], letters);
  os << "], outNodes [";
  for (std::size_t i = 0; i < r.outs.size(); ++i)
    os << (i ? "," : "") << ref_display(r.outs[i], letters);
  os << "])\n";
  return os.str();
}

// ------------------------------- JSON --------------------------------------

namespace {

nlohmann::json recipe_json_obj(const Recipe& r) {
  nlohmann::json j;
  j["nodeType"] = r.node_type;
  j["arity"] = r.arity;
  j["childOrder"] = r.child_order;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& [x, y] : r.connects)
    cs.push_back(nlohmann::json::array({ref_name(x), ref_name(y)}));
  j["connects"] = cs;
  nlohmann::json ins = nlohmann::json::array(), outs = nlohmann::json::array();
  for (const auto& x : r.ins) ins.push_back(ref_name(x));
  for (const auto& x : r.outs) outs.push_back(ref_name(x));
  j["ins"] = ins;
  j["outs"] = outs;
  j["valueEnter"] = r.value_enter;
  return j;
}

Recipe recipe_from_obj(const nlohmann::json& j) {
  Recipe r;
  r.node_type = j.at("nodeType").get<std::string>();
  r.arity = j.at("arity").get<int>();
  r.child_order = j.at("childOrder").get<std::vector<int>>();
  for (const auto& c : j.at("connects")) {
    auto x = ref_parse(c.at(0).get<std::string>());
    auto y = ref_parse(c.at(1).get<std::string>());
    if (!x || !y) throw std::runtime_error("bad node ref in recipe json");
    r.connects.emplace(*x, *y);
  }
  for (const auto& c : j.at("ins")) r.ins.push_back(*ref_parse(c.get<std::string>()));
  for (const auto& c : j.at("outs")) r.outs.push_back(*ref_parse(c.get<std::string>()));
  if (j.contains("valueEnter")) r.value_enter = j.at("valueEnter").get<std::vector<int>>();
  return r;
}

}  // namespace

std::string recipe_to_json(const Recipe& r) { return recipe_json_obj(r).dump(2); }

Recipe recipe_from_json(const std::string& text) {
  return recipe_from_obj(nlohmann::json::parse(text));
}

std::string recipes_to_json(const std::map<std::string, Recipe>& rs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [sym, r] : rs) j.push_back(recipe_json_obj(r));
  return j.dump(2);
}

std::map<std::string, Recipe> recipes_from_json(const std::string& text) {
  std::map<std::string, Recipe> out;
  for (const auto& j : nlohmann::json::parse(text)) {
    Recipe r = recipe_from_obj(j);
    out[r.node_type] = std::move(r);
  }
  return out;
}

// ---------------------------- application ----------------------------------

namespace {

int subtree_size(const TermPtr& t) {
  int n = 1;
  for (const auto& c : t->children) n += subtree_size(c);
  return n;
}

struct Applier {
  const std::map<std::string, Recipe>& recipes;
  RecipeCfg g;

  int node(const TermPtr& ast, int ast_id, const std::string& role) {
    g.nodes.push_back(RecipeCfgNode{ast, ast_id, role});
    return static_cast<int>(g.nodes.size()) - 1;
  }

  struct InOut {
    std::vector<int> ins, outs;
  };

  // ast ids are preorder positions with children in slot order
  int child_ast_id(const TermPtr& t, int ast_id, int slot) {
    int id = ast_id + 1;
    for (int i = 0; i < slot; ++i) id += subtree_size(t->children[i]);
    return id;
  }

  InOut gen(const TermPtr& t, int ast_id, bool value_enterable) {
    if (t->is_value_term()) {
      if (value_enterable) {
        int n = node(t, ast_id, "leaf");
        return InOut{{n}, {n}};
      }
      return InOut{{}, {}};  // pass-through
    }
    auto it = recipes.find(t->sym);
    if (it == recipes.end()) throw MissingRecipe(t->sym);
    const Recipe& r = it->second;

    std::map<int, InOut> children;
    for (int c : r.child_order) {
      bool enter = std::find(r.value_enter.begin(), r.value_enter.end(), c) !=
                   r.value_enter.end();
      children[c] = gen(t->children[c], child_ast_id(t, ast_id, c), enter);
    }

    // lazily materialize tIn/tOut only when referenced
    auto mentioned = [&](const NodeRef& ref) {
      for (const auto& [x, y] : r.connects)
        if (x == ref || y == ref) return true;
      for (const auto& x : r.ins)
        if (x == ref) return true;
      for (const auto& x : r.outs)
        if (x == ref) return true;
      return false;
    };
    int tin = -1, tout = -1;
    if (mentioned(NodeRef{NodeRef::Kind::TIn, -1})) tin = node(t, ast_id, "in");
    if (mentioned(NodeRef{NodeRef::Kind::TOut, -1})) tout = node(t, ast_id, "out");

    auto fwd_nodes = [&](const NodeRef& ref) -> std::vector<int> {
      switch (ref.kind) {
        case NodeRef::Kind::TIn: return tin >= 0 ? std::vector<int>{tin} : std::vector<int>{};
        case NodeRef::Kind::TOut: return tout >= 0 ? std::vector<int>{tout} : std::vector<int>{};
        case NodeRef::Kind::ChildIn: return children.count(ref.child) ? children[ref.child].ins : std::vector<int>{};
        case NodeRef::Kind::ChildOut: return children.count(ref.child) ? children[ref.child].outs : std::vector<int>{};
      }
      return {};
    };
    auto is_empty_child_ref = [&](const NodeRef& ref) {
      return (ref.kind == NodeRef::Kind::ChildIn || ref.kind == NodeRef::Kind::ChildOut) &&
             fwd_nodes(ref).empty();
    };

    // forward targets of a ref, passing through bridged (empty) child refs
    std::function<std::vector<int>(const NodeRef&, std::set<std::string>&)> targets_of =
        [&](const NodeRef& ref, std::set<std::string>& seen) -> std::vector<int> {
      std::vector<int> out = fwd_nodes(ref);
      if (!out.empty()) return out;
      if (!is_empty_child_ref(ref)) return out;
      // empty pass-through: cIn:i flows to cOut:i, cOut:i flows onward
      if (ref.kind == NodeRef::Kind::ChildIn) {
        NodeRef nxt{NodeRef::Kind::ChildOut, ref.child};
        std::string k = "co" + std::to_string(ref.child);
        if (seen.count(k)) return {};
        seen.insert(k);
        return targets_of(nxt, seen);
      }
      // cOut:i — follow connects whose source is this ref
      std::vector<int> acc;
      for (const auto& [x, y] : r.connects) {
        if (!(x == ref)) continue;
        std::string k = ref_name(y);
        if (seen.count(k)) continue;
        seen.insert(k);
        for (int n : targets_of(y, seen)) acc.push_back(n);
      }
      return acc;
    };
    // backward sources, symmetric
    std::function<std::vector<int>(const NodeRef&, std::set<std::string>&)> sources_of =
        [&](const NodeRef& ref, std::set<std::string>& seen) -> std::vector<int> {
      std::vector<int> out = fwd_nodes(ref);
      if (!out.empty()) return out;
      if (!is_empty_child_ref(ref)) return out;
      if (ref.kind == NodeRef::Kind::ChildOut) {
        NodeRef prv{NodeRef::Kind::ChildIn, ref.child};
        std::string k = "ci" + std::to_string(ref.child);
        if (seen.count(k)) return {};
        seen.insert(k);
        return sources_of(prv, seen);
      }
      std::vector<int> acc;
      for (const auto& [x, y] : r.connects) {
        if (!(y == ref)) continue;
        std::string k = ref_name(x);
        if (seen.count(k)) continue;
        seen.insert(k);
        for (int n : sources_of(x, seen)) acc.push_back(n);
      }
      return acc;
    };

    for (const auto& [x, y] : r.connects) {
      std::set<std::string> s1, s2;
      for (int a : sources_of(x, s1))
        for (int b : targets_of(y, s2)) g.edges.emplace(a, b);
    }

    InOut io;
    for (const auto& ref : r.ins) {
      std::set<std::string> seen;
      for (int n : targets_of(ref, seen)) io.ins.push_back(n);
    }
    for (const auto& ref : r.outs) {
      std::set<std::string> seen;
      for (int n : sources_of(ref, seen)) io.outs.push_back(n);
    }
    return io;
  }
};

}  // namespace

RecipeCfg recipe_to_cfg(const std::map<std::string, Recipe>& recipes, const Language& lang,
                        const TermPtr& program) {
  (void)lang;
  Applier ap{recipes, {}};
  if (program->is_value_term()) {
    // a lone value halts immediately: a single node
    int n = ap.node(program, 0, "leaf");
    ap.g.ins = {n};
    ap.g.outs = {n};
    return ap.g;
  }
  auto io = ap.gen(program, 0, true);
  ap.g.ins = io.ins;
  ap.g.outs = io.outs;
  return ap.g;
}

std::string recipe_cfg_dot(const RecipeCfg& g, const DotOptions& opts) {
  std::ostringstream os;
  os << "digraph " << opts.name << " {\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    std::string label = g.nodes[i].role + "#" + std::to_string(g.nodes[i].ast_id) + " " +
                        display_term(g.nodes[i].ast);
    std::string esc;
    for (char ch : label) {
      if (ch == '"' || ch == '\\') esc += '\\';
      esc += ch;
    }
    os << "  n" << i << " [label=\"" << esc << "\"];\n";
  }
  for (const auto& [a, b] : g.edges) os << "  n" << a << " -> n" << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace semflow
