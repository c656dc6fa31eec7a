#include "semflow/term.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace semflow {

bool mt_leq(MatchType a, MatchType b) {
  return a == b || b == MatchType::All;
}

std::optional<MatchType> mt_meet(MatchType a, MatchType b) {
  if (a == b) return a;
  if (a == MatchType::All) return b;
  if (b == MatchType::All) return a;
  return std::nullopt;  // Val vs NonVal
}

std::string mt_name(MatchType mt) {
  switch (mt) {
    case MatchType::Val: return "val";
    case MatchType::NonVal: return "nonval";
    default: return "all";
  }
}

static std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2));
}

static TermPtr finish(Term t) {
  std::size_t h = static_cast<std::size_t>(t.kind);
  h = mix(h, std::hash<std::string>{}(t.sym));
  h = mix(h, static_cast<std::size_t>(t.tag));
  h = mix(h, static_cast<std::size_t>(t.mt));
  h = mix(h, std::hash<long long>{}(t.ival));
  h = mix(h, std::hash<std::string>{}(t.sval));
  for (const auto& c : t.children) h = mix(h, c->hash);
  t.hash = h;
  return std::make_shared<const Term>(std::move(t));
}

TermPtr nonval(const std::string& sym, std::vector<TermPtr> kids) {
  Term t;
  t.kind = Term::Kind::NonValNode;
  t.sym = sym;
  t.children = std::move(kids);
  return finish(std::move(t));
}

TermPtr val(const std::string& sym, std::vector<TermPtr> kids) {
  Term t;
  t.kind = Term::Kind::ValNode;
  t.sym = sym;
  t.children = std::move(kids);
  return finish(std::move(t));
}

TermPtr cint(long long n) {
  Term t;
  t.kind = Term::Kind::ConstInt;
  t.ival = n;
  return finish(std::move(t));
}

TermPtr cstr(const std::string& s) {
  Term t;
  t.kind = Term::Kind::ConstStr;
  t.sval = s;
  return finish(std::move(t));
}

TermPtr var(const std::string& name, MatchType mt, int tag) {
  Term t;
  t.kind = Term::Kind::Var;
  t.sym = name;
  t.tag = tag;
  t.mt = mt;
  return finish(std::move(t));
}

TermPtr star(MatchType mt) {
  Term t;
  t.kind = Term::Kind::Star;
  t.mt = mt;
  return finish(std::move(t));
}

bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->hash != b->hash) return false;
  if (a->kind != b->kind || a->sym != b->sym || a->tag != b->tag ||
      a->mt != b->mt || a->ival != b->ival || a->sval != b->sval ||
      a->children.size() != b->children.size())
    return false;
  for (std::size_t i = 0; i < a->children.size(); ++i)
    if (!term_eq(a->children[i], b->children[i])) return false;
  return true;
}

bool term_has_var(const TermPtr& t) {
  if (t->kind == Term::Kind::Var) return true;
  for (const auto& c : t->children)
    if (term_has_var(c)) return true;
  return false;
}

bool term_has_star(const TermPtr& t) {
  if (t->kind == Term::Kind::Star) return true;
  for (const auto& c : t->children)
    if (term_has_star(c)) return true;
  return false;
}

bool term_concrete(const TermPtr& t) { return !term_has_var(t) && !term_has_star(t); }

void term_vars(const TermPtr& t, std::vector<TermPtr>& out) {
  if (t->kind == Term::Kind::Var) {
    for (const auto& v : out)
      if (v->sym == t->sym && v->tag == t->tag) return;
    out.push_back(t);
    return;
  }
  for (const auto& c : t->children) term_vars(c, out);
}

static void esc(std::ostringstream& os, const std::string& s) {
  os << '"';
  for (char c : s) {
    if (c == '"' || c == '\\') os << '\\';
    os << c;
  }
  os << '"';
}

std::string print_term(const TermPtr& t) {
  std::ostringstream os;
  std::function<void(const TermPtr&)> go = [&](const TermPtr& u) {
    switch (u->kind) {
      case Term::Kind::ConstInt: os << u->ival; break;
      case Term::Kind::ConstStr: esc(os, u->sval); break;
      case Term::Kind::Star: os << "*" << mt_name(u->mt); break;
      case Term::Kind::Var:
        if (!u->sym.empty() && u->sym[0] == '%') {  // hole markers in frames
          os << u->sym;
          break;
        }
        os << "?" << u->sym;
        if (u->tag != 0) os << "#" << u->tag;
        os << ":" << mt_name(u->mt);
        break;
      default:
        if (u->children.empty() && u->kind == Term::Kind::ValNode) {
          os << u->sym;
          break;
        }
        os << "(" << (u->kind == Term::Kind::ValNode ? "!" : "") << u->sym;
        for (const auto& c : u->children) {
          os << " ";
          go(c);
        }
        os << ")";
    }
  };
  go(t);
  return os.str();
}

// --------------------------- parsing ---------------------------------------

namespace {

struct Parser {
  const std::string& src;
  std::size_t pos = 0;
  // symbols tagged val in the language being parsed are resolved by the
  // caller; the raw reader marks 0-arity bare symbols as val nodes only for
  // the conventional leaves below.
  explicit Parser(const std::string& s) : src(s) {}

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < src.size(); ++i) {
      if (src[i] == '\n') { ++line; col = 1; } else ++col;
    }
    std::ostringstream os;
    os << "parse error at " << line << ":" << col << ": " << msg;
    throw std::runtime_error(os.str());
  }

  void skip() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eat(char c) {
    skip();
    if (pos < src.size() && src[pos] == c) { ++pos; return true; }
    return false;
  }

  char peek() {
    skip();
    return pos < src.size() ? src[pos] : '\0';
  }

  std::string ident() {
    skip();
    std::size_t start = pos;
    while (pos < src.size()) {
      char c = src[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
          c == ',' || c == ']' || c == '|' || c == ':' || c == '#')
        break;
      ++pos;
    }
    if (pos == start) fail("expected identifier");
    return src.substr(start, pos - start);
  }

  // node constructor names may contain punctuation (:=, <, <=)
  std::string sym_ident() {
    skip();
    std::size_t start = pos;
    while (pos < src.size()) {
      char c = src[pos];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')') break;
      ++pos;
    }
    if (pos == start) fail("expected symbol");
    return src.substr(start, pos - start);
  }

  MatchType match_type() {
    std::string m = ident();
    if (m == "val") return MatchType::Val;
    if (m == "nonval" || m == "nv") return MatchType::NonVal;
    if (m == "all") return MatchType::All;
    fail("unknown match type '" + m + "'");
  }

  std::string string_lit() {
    skip();
    if (pos >= src.size() || src[pos] != '"') fail("expected string literal");
    ++pos;
    std::string out;
    while (pos < src.size() && src[pos] != '"') {
      if (src[pos] == '\\' && pos + 1 < src.size()) ++pos;
      out += src[pos++];
    }
    if (pos >= src.size()) fail("unterminated string");
    ++pos;
    return out;
  }

  TermPtr term() {
    skip();
    if (pos >= src.size()) fail("expected term");
    char c = src[pos];
    if (c == '(') {
      ++pos;
      skip();
      std::string sym = sym_ident();
      std::vector<TermPtr> kids;
      while (peek() != ')') kids.push_back(term());
      if (!eat(')')) fail("expected ')'");
      // leading '!' marks a value node: (!cons x xs); plain nodes are nonval.
      if (!sym.empty() && sym[0] == '!') return val(sym.substr(1), std::move(kids));
      return nonval(sym, std::move(kids));
    }
    if (c == '"') return cstr(string_lit());
    if (c == '?') {
      ++pos;
      std::string name = ident();
      int tag = 0;
      if (eat('#')) {
        std::string digits = ident();
        tag = std::stoi(digits);
      }
      if (!eat(':')) fail("expected ':mt' on variable");
      return var(name, match_type(), tag);
    }
    if (c == '*') {
      ++pos;
      return star(match_type());
    }
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos;
      if (c == '-') ++pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
      if (pos == start || (c == '-' && pos == start + 1)) fail("bad integer");
      return cint(std::stoll(src.substr(start, pos - start)));
    }
    // bare identifier: 0-arity value node (true, false, skip, nil)
    std::string sym = ident();
    return val(sym, {});
  }

  ReductionState state() {
    skip();
    if (!eat('[')) fail("expected '['");
    ReductionState st;
    std::vector<std::pair<TermPtr, TermPtr>> listed;  // newest first, as printed
    bool first = true;
    while (true) {
      skip();
      if (eat(']')) break;
      if (eat('|')) {
        st.tail = term();
        skip();
        if (!eat(']')) fail("expected ']' after tail");
        break;
      }
      if (!first && !eat(',')) fail("expected ',' or ']' in state");
      first = false;
      skip();
      if (peek() == '|') continue;  // "[|tail]" form with no entries
      TermPtr k = term();
      skip();
      if (!(eat('-') && eat('>'))) fail("expected '->' in state binding");
      TermPtr v = term();
      listed.emplace_back(k, v);
    }
    // printed newest-first; stored oldest-first
    for (auto it = listed.rbegin(); it != listed.rend(); ++it) st.upd(it->first, it->second);
    return st;
  }
};

}  // namespace

TermPtr parse_term(const std::string& src) {
  Parser p(src);
  TermPtr t = p.term();
  p.skip();
  if (p.pos != src.size()) p.fail("trailing input");
  return t;
}

ReductionState parse_state(const std::string& src) {
  Parser p(src);
  ReductionState s = p.state();
  p.skip();
  if (p.pos != src.size()) p.fail("trailing input");
  return s;
}

TermPtr parse_term_prefix(const std::string& src, std::size_t& pos) {
  Parser p(src);
  p.pos = pos;
  TermPtr t = p.term();
  pos = p.pos;
  return t;
}

ReductionState parse_state_prefix(const std::string& src, std::size_t& pos) {
  Parser p(src);
  p.pos = pos;
  ReductionState s = p.state();
  pos = p.pos;
  return s;
}

// --------------------------- states ----------------------------------------

bool ReductionState::concrete() const {
  if (tail) return false;
  for (const auto& [k, v] : bindings)
    if (!term_concrete(k) || !term_concrete(v)) return false;
  return true;
}

void ReductionState::upd(const TermPtr& key, const TermPtr& value) {
  for (auto& [k, v] : bindings) {
    if (term_eq(k, key)) {
      v = value;
      return;
    }
  }
  bindings.emplace_back(key, value);
}

std::optional<TermPtr> ReductionState::lookup(const TermPtr& key) const {
  for (const auto& [k, v] : bindings)
    if (term_eq(k, key)) return v;
  return std::nullopt;
}

std::size_t ReductionState::hash() const {
  // order-insensitive over bindings
  std::size_t h = 0x5151;
  for (const auto& [k, v] : bindings) h ^= mix(k->hash, v->hash);
  if (tail) h = mix(h, tail->hash);
  return h;
}

ReductionState empty_state() { return ReductionState{}; }

ReductionState top_state() {
  ReductionState s;
  s.tail = star(MatchType::All);
  return s;
}

bool state_eq(const ReductionState& a, const ReductionState& b) {
  if (a.bindings.size() != b.bindings.size()) return false;
  if ((a.tail == nullptr) != (b.tail == nullptr)) return false;
  if (a.tail && !term_eq(a.tail, b.tail)) return false;
  for (const auto& [k, v] : a.bindings) {
    auto bv = b.lookup(k);
    if (!bv || !term_eq(*bv, v)) return false;
  }
  return true;
}

std::string print_state(const ReductionState& s) {
  std::ostringstream os;
  os << "[";
  bool first = true;
  for (auto it = s.bindings.rbegin(); it != s.bindings.rend(); ++it) {
    if (!first) os << ", ";
    first = false;
    os << print_term(it->first) << " -> " << print_term(it->second);
  }
  if (s.tail) {
    if (!first) os << " ";
    os << "| " << print_term(s.tail);
  }
  os << "]";
  return os.str();
}

bool config_eq(const Configuration& a, const Configuration& b) {
  return term_eq(a.term, b.term) && state_eq(a.state, b.state);
}

std::string print_config(const Configuration& c) {
  return "(" + print_term(c.term) + ", " + print_state(c.state) + ")";
}

// --------------------------- substitution ----------------------------------

std::string Substitution::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [k, v] : terms) {
    if (!first) os << ", ";
    first = false;
    os << k.name;
    if (k.tag) os << "#" << k.tag;
    os << " -> " << print_term(v);
  }
  for (const auto& [k, v] : states) {
    if (!first) os << ", ";
    first = false;
    os << k.name;
    if (k.tag) os << "#" << k.tag;
    os << " -> " << print_state(v);
  }
  os << "}";
  return os.str();
}

TermPtr substitute(const Substitution& s, const TermPtr& t) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = s.terms.find(key_of(t));
      if (it != s.terms.end()) return it->second;
      return t;
    }
    case Term::Kind::NonValNode:
    case Term::Kind::ValNode: {
      bool changed = false;
      std::vector<TermPtr> kids;
      kids.reserve(t->children.size());
      for (const auto& c : t->children) {
        TermPtr nc = substitute(s, c);
        changed = changed || nc != c;
        kids.push_back(nc);
      }
      if (!changed) return t;
      return t->kind == Term::Kind::ValNode ? val(t->sym, std::move(kids))
                                            : nonval(t->sym, std::move(kids));
    }
    default:
      return t;
  }
}

ReductionState substitute(const Substitution& s, const ReductionState& st) {
  ReductionState out;
  // Tail first (it is the oldest part), then each binding in update order,
  // so collisions introduced by the substitution resolve right-biased.
  if (st.tail) {
    if (st.tail->kind == Term::Kind::Var) {
      auto it = s.states.find(key_of(st.tail));
      if (it != s.states.end()) {
        out = it->second;
      } else {
        auto t2 = s.terms.find(key_of(st.tail));
        if (t2 != s.terms.end() && t2->second->kind == Term::Kind::Star)
          out.tail = t2->second;
        else
          out.tail = st.tail;
      }
    } else {
      out.tail = st.tail;
    }
  }
  for (const auto& [k, v] : st.bindings) out.upd(substitute(s, k), substitute(s, v));
  return out;
}

Configuration substitute(const Substitution& s, const Configuration& c) {
  return Configuration{substitute(s, c.term), substitute(s, c.state)};
}

TermPtr fresh_rename(const TermPtr& t, FreshCounter& fc, std::map<VarKey, TermPtr>& seen) {
  if (t->kind == Term::Kind::Var) {
    auto it = seen.find(key_of(t));
    if (it != seen.end()) return it->second;
    TermPtr nv = fc.rename(t);
    if (t->var_sort) {
      Term copy = *nv;
      copy.var_sort = t->var_sort;
      nv = std::make_shared<const Term>(copy);
    }
    seen[key_of(t)] = nv;
    return nv;
  }
  if (!t->is_node()) return t;
  bool changed = false;
  std::vector<TermPtr> kids;
  kids.reserve(t->children.size());
  for (const auto& c : t->children) {
    TermPtr nc = fresh_rename(c, fc, seen);
    changed = changed || nc != c;
    kids.push_back(nc);
  }
  if (!changed) return t;
  return t->kind == Term::Kind::ValNode ? val(t->sym, std::move(kids))
                                        : nonval(t->sym, std::move(kids));
}

}  // namespace semflow
