#pragma once

// Term universe: value/nonvalue nodes, constants, match-typed pattern
// variables and star leaves, plus reduction states and configurations.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace semflow {

enum class MatchType { Val, NonVal, All };

// Val <= All, NonVal <= All; Val and NonVal are incomparable.
bool mt_leq(MatchType a, MatchType b);
std::optional<MatchType> mt_meet(MatchType a, MatchType b);
std::string mt_name(MatchType mt);

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind { NonValNode, ValNode, ConstInt, ConstStr, Var, Star };

  Kind kind;
  std::string sym;              // node constructor, or variable name
  int tag = 0;                  // variable freshness tag (0 = source name)
  MatchType mt = MatchType::All;
  long long ival = 0;
  std::string sval;
  std::vector<TermPtr> children;
  std::optional<std::string> var_sort;  // internal: child-slot sort on pattern vars
  std::size_t hash = 0;

  bool is_node() const { return kind == Kind::NonValNode || kind == Kind::ValNode; }
  bool is_const() const { return kind == Kind::ConstInt || kind == Kind::ConstStr; }
  // A value by root: val node or constant. Vars/stars are not values.
  bool is_value_term() const { return kind == Kind::ValNode || is_const(); }
  bool is_nonvalue_term() const { return kind == Kind::NonValNode; }
};

TermPtr nonval(const std::string& sym, std::vector<TermPtr> kids);
TermPtr val(const std::string& sym, std::vector<TermPtr> kids);
TermPtr cint(long long n);
TermPtr cstr(const std::string& s);
TermPtr var(const std::string& name, MatchType mt, int tag = 0);
TermPtr star(MatchType mt);

bool term_eq(const TermPtr& a, const TermPtr& b);
bool term_has_var(const TermPtr& t);
bool term_has_star(const TermPtr& t);
bool term_concrete(const TermPtr& t);  // no vars, no stars
void term_vars(const TermPtr& t, std::vector<TermPtr>& out);

// s-expression form: (sym child ...), 42, "str", ?name:mt / ?name#tag:mt, *mt
std::string print_term(const TermPtr& t);
TermPtr parse_term(const std::string& src);  // throws std::runtime_error with position

// Streaming variants used by the language-file reader.
TermPtr parse_term_prefix(const std::string& src, std::size_t& pos);

// ---------------------------------------------------------------------------

// Reduction state: explicit bindings plus an optional open-world tail
// (a Var or Star term). Bindings are kept oldest-first; the printed form
// lists newest-first, mirroring how successive updates are abbreviated.
struct ReductionState {
  std::vector<std::pair<TermPtr, TermPtr>> bindings;  // oldest first
  TermPtr tail;  // null, Var, or Star

  bool concrete() const;
  bool has_tail() const { return tail != nullptr; }
  // Right-biased update: an existing structurally-equal key is replaced.
  void upd(const TermPtr& key, const TermPtr& value);
  std::optional<TermPtr> lookup(const TermPtr& key) const;
  std::size_t hash() const;
};

ReductionState empty_state();
ReductionState top_state();  // tail = *all, no bindings

bool state_eq(const ReductionState& a, const ReductionState& b);
std::string print_state(const ReductionState& s);
ReductionState parse_state(const std::string& src);
ReductionState parse_state_prefix(const std::string& src, std::size_t& pos);

struct Configuration {
  TermPtr term;
  ReductionState state;

  bool is_value() const { return term && term->is_value_term(); }
};

bool config_eq(const Configuration& a, const Configuration& b);
std::string print_config(const Configuration& c);

// ---------------------------------------------------------------------------

struct VarKey {
  std::string name;
  int tag = 0;
  auto operator<=>(const VarKey&) const = default;
};
inline VarKey key_of(const TermPtr& v) { return VarKey{v->sym, v->tag}; }

struct Context;
using ContextPtr = std::shared_ptr<const Context>;

// Substitution: term-, state- and context-valued bindings in separate
// namespaces. Idempotent on its range by construction (bindings are closed
// values or patterns that never mention their own domain).
struct Substitution {
  std::map<VarKey, TermPtr> terms;
  std::map<VarKey, ReductionState> states;
  std::map<VarKey, ContextPtr> contexts;

  bool empty() const { return terms.empty() && states.empty() && contexts.empty(); }
  bool has_term(const VarKey& k) const { return terms.count(k) != 0; }
  std::string to_string() const;
};

TermPtr substitute(const Substitution& s, const TermPtr& t);
ReductionState substitute(const Substitution& s, const ReductionState& st);
Configuration substitute(const Substitution& s, const Configuration& c);

// Globally fresh variable names: same base name, new tag.
class FreshCounter {
 public:
  int next() { return ++n_; }
  TermPtr rename(const TermPtr& v) { return var(v->sym, v->mt, next()); }

 private:
  int n_ = 0;
};

// Renames every variable in t consistently to fresh tags.
TermPtr fresh_rename(const TermPtr& t, FreshCounter& fc, std::map<VarKey, TermPtr>& seen);

}  // namespace semflow
