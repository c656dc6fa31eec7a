#include "semflow/cfg.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "semflow/languages.hpp"
#include "semflow/match.hpp"

namespace semflow {

namespace {

void canon_term(std::ostringstream& os, const TermPtr& t) { os << print_term(t); }

void canon_state(std::ostringstream& os, const ReductionState& s) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [k, v] : s.bindings) entries.emplace_back(print_term(k), print_term(v));
  std::sort(entries.begin(), entries.end());
  os << "[";
  for (const auto& [k, v] : entries) os << k << "->" << v << ",";
  if (s.tail) os << "|" << print_term(s.tail);
  os << "]";
}

void canon_ctx(std::ostringstream& os, const ContextPtr& c) {
  if (c->kind == Context::Kind::Emp) {
    os << "emp";
    return;
  }
  if (c->kind == Context::Kind::KVar) {
    os << "?" << c->kname << "#" << c->ktag;
    return;
  }
  canon_ctx(os, c->rest);
  os << " o {" << c->top->origin << ":";
  for (const auto& e : c->top->capt) {
    os << e.k.name << "#" << e.k.tag << "=";
    if (e.term) canon_term(os, e.term);
    if (e.state) canon_state(os, *e.state);
    os << ";";
  }
  os << "}";
}

}  // namespace

std::string canon_key(const AmState& s) {
  std::ostringstream os;
  canon_term(os, s.conf.term);
  os << " @ ";
  canon_state(os, s.conf.state);
  os << " | ";
  canon_ctx(os, s.ctx);
  return os.str();
}

AmState initial_state(const Language& lang, const TermPtr& program) {
  auto diags = validate_program(lang, program);
  if (!diags.empty()) {
    std::ostringstream os;
    os << "invalid program:";
    for (const auto& d : diags) os << " " << d << ";";
    throw std::runtime_error(os.str());
  }
  return AmState{Configuration{program, lang.initial_state}, ctx_emp()};
}

AmState initial_state_closed(const Language& lang, const TermPtr& program) {
  AmState s = initial_state(lang, program);
  for (const auto& v : program_read_vars(program))
    s.conf.state.upd(cstr(v), star(MatchType::Val));
  return s;
}

TransitionGraph explore_graph(const Language& lang, const std::vector<AmRule>& rules,
                              const Abstraction& abs, const AmState& start, int max_states) {
  TransitionGraph g;
  std::map<std::string, int> index;
  auto intern = [&](const AmState& s) -> int {
    std::string k = canon_key(s);
    auto it = index.find(k);
    if (it != index.end()) return it->second;
    int id = static_cast<int>(g.nodes.size());
    g.nodes.push_back(s);
    index.emplace(std::move(k), id);
    return id;
  };
  AmState s0 = abs.state(start);
  g.start = intern(s0);
  std::deque<int> work{g.start};
  std::set<int> queued{g.start};
  while (!work.empty()) {
    int cur = work.front();
    work.pop_front();
    AmState state = g.nodes[cur];
    for (const AmState& nxt : abs_step(lang, rules, abs, state)) {
      if (static_cast<int>(g.nodes.size()) >= max_states && index.find(canon_key(nxt)) == index.end()) {
        g.truncated = true;
        continue;
      }
      int id = intern(nxt);
      g.edges.emplace(cur, id);
      if (!queued.count(id)) {
        queued.insert(id);
        work.push_back(id);
      }
    }
  }
  return g;
}

Cfg project_graph(const TransitionGraph& g, const std::function<AmState(const AmState&)>& pi) {
  Cfg out;
  std::map<std::string, int> index;
  std::vector<int> image(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    AmState p = pi(g.nodes[i]);
    std::string k = canon_key(p);
    auto it = index.find(k);
    if (it == index.end()) {
      int id = static_cast<int>(out.nodes.size());
      out.nodes.push_back(p);
      index.emplace(std::move(k), id);
      image[i] = id;
    } else {
      image[i] = it->second;
    }
  }
  out.start = image[g.start];
  for (const auto& [a, b] : g.edges)
    if (image[a] != image[b]) out.edges.emplace(image[a], image[b]);
  // self-loop clause: a within-class preimage edge exists and every
  // preimage of the class has an outgoing edge
  for (int a = 0; a < static_cast<int>(out.nodes.size()); ++a) {
    bool within = false;
    for (const auto& [x, y] : g.edges)
      if (image[x] == a && image[y] == a) within = true;
    if (!within) continue;
    bool all_step = true;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      if (image[i] != a) continue;
      bool steps = false;
      for (const auto& [x, y] : g.edges)
        if (x == static_cast<int>(i)) steps = true;
      if (!steps) all_step = false;
    }
    if (all_step) out.edges.emplace(a, a);
  }
  out.truncated = g.truncated;
  for (const auto& n : out.nodes) out.labels.push_back(node_label(n, false));
  return out;
}

std::function<AmState(const AmState&)> basic_block_projection() {
  return [](const AmState& s) -> AmState {
    AmState out = s;
    // fold topmost seq-frames into the focus
    TermPtr t = out.conf.term;
    ContextPtr c = out.ctx;
    while (c->kind == Context::Kind::Push) {
      const FramePtr& f = c->top;
      if (f->body->kind != SosRhs::Kind::Build) break;
      const TermPtr& b = f->body->build.term;
      if (!(b->is_node() && b->sym == "seq" && b->children.size() == 2)) break;
      if (!(b->children[0]->kind == Term::Kind::Var &&
            f->binder.term->kind == Term::Kind::Var &&
            key_of(b->children[0]) == key_of(f->binder.term)))
        break;
      // continuation is the captured second component
      TermPtr cont;
      if (b->children[1]->kind == Term::Kind::Var) {
        for (const auto& e : f->capt)
          if (e.term && e.k == key_of(b->children[1])) cont = e.term;
      } else {
        cont = b->children[1];
      }
      if (!cont) break;
      t = cont;
      c = c->rest;
    }
    while (t->is_node() && t->sym == "seq" && t->children.size() == 2) t = t->children[1];
    out.conf.term = t;
    out.ctx = c;
    return out;
  };
}

std::string node_label(const AmState& s, bool verbose) {
  if (verbose) return canon_key(s);
  std::ostringstream os;
  os << display_term(s.conf.term) << "  «" << display_state(s.conf.state) << "»";
  int d = ctx_len(s.ctx);
  if (d > 0) os << " K:" << d;
  return os.str();
}

namespace {

template <typename G>
std::string emit_dot_impl(const G& g, const DotOptions& opts, const char* kind) {
  // deterministic: nodes sorted by canonical label, stable ids
  std::vector<std::pair<std::string, int>> order;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    order.emplace_back(canon_key(g.nodes[i]), static_cast<int>(i));
  std::sort(order.begin(), order.end());
  std::vector<int> rank(g.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i].second] = static_cast<int>(i);

  std::ostringstream os;
  os << "digraph " << opts.name << " {\n";
  if (g.truncated) os << "  // truncated: state budget reached\n";
  os << "  // " << kind << ": " << g.nodes.size() << " nodes, " << g.edges.size()
     << " edges\n";
  for (const auto& [key, idx] : order) {
    std::string label = opts.verbose_labels ? key : node_label(g.nodes[idx], false);
    std::string esc;
    for (char ch : label) {
      if (ch == '"' || ch == '\\') esc += '\\';
      esc += ch;
    }
    os << "  n" << rank[idx] << " [label=\"" << esc << "\"";
    if (idx == g.start) os << ", shape=box, penwidth=2";
    os << "];\n";
  }
  std::vector<std::pair<int, int>> es;
  for (const auto& [a, b] : g.edges) es.emplace_back(rank[a], rank[b]);
  std::sort(es.begin(), es.end());
  for (const auto& [a, b] : es) os << "  n" << a << " -> n" << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace

std::string emit_dot(const TransitionGraph& g, const DotOptions& opts) {
  return emit_dot_impl(g, opts, "transition graph");
}

std::string emit_dot(const Cfg& g, const DotOptions& opts) {
  return emit_dot_impl(g, opts, "cfg");
}

std::string adjacency_dump(const TransitionGraph& g) {
  std::vector<std::pair<std::string, int>> order;
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    order.emplace_back(canon_key(g.nodes[i]), static_cast<int>(i));
  std::sort(order.begin(), order.end());
  std::vector<int> rank(g.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i].second] = static_cast<int>(i);
  std::vector<std::pair<int, int>> es;
  for (const auto& [a, b] : g.edges) es.emplace_back(rank[a], rank[b]);
  std::sort(es.begin(), es.end());
  std::ostringstream os;
  for (const auto& [a, b] : es) os << "n" << a << " -> n" << b << "\n";
  return os.str();
}

}  // namespace semflow
