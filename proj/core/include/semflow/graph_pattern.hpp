#pragma once

// Compiled mode, stage 1: narrowing-based per-node-type graph patterns with
// transitive edges, and pattern-finiteness as a termination certificate.

#include <map>
#include <set>

#include "semflow/cfg.hpp"

namespace semflow {

struct PatternNode {
  AmState state;
  int child_tag = -1;   // >= 0: the transitive-edge target finishing child i
  bool value_enterable = false;  // a value instance of the focused child can
                                 // reach this node (entered via an All slot)
};

struct GraphPattern {
  std::string node_type;
  AmState start_state;
  int start = 0;
  std::vector<PatternNode> nodes;
  std::set<std::pair<int, int>> normal_edges;
  std::set<std::pair<int, int>> transitive_edges;
  std::set<int> exit_nodes;
  bool finite = true;
  // pinned variables: child markers and the start context variable
  std::vector<VarKey> child_vars;
  VarKey ctx_var;
};

struct NarrowSucc {
  AmState state;
  std::string rule;
  // match type of the rule's rhs focus pattern when it was a bare variable
  std::optional<MatchType> focus_pattern_mt;
};

// Narrowing: unification-driven rule application; the substitution is
// applied on the right only. Rule variables are renamed apart internally.
std::vector<NarrowSucc> narrow_step(const Language& lang, const std::vector<AmRule>& rules,
                                    const Abstraction& abs, const AmState& s,
                                    FreshCounter& fc);

// Worklist closure from <(N(children), top) | k>; bare nonvalue-variable
// foci receive a transitive edge instead of narrowing; halts at values over
// the start's own context variable. Requires a context-discarding
// abstraction.
GraphPattern gen_graph_pattern(const Language& lang, const std::vector<AmRule>& rules,
                               const Abstraction& abs, const std::string& node_type,
                               int max_nodes = 500);

std::map<std::string, GraphPattern> gen_all_patterns(const Language& lang,
                                                     const std::vector<AmRule>& rules,
                                                     const Abstraction& abs,
                                                     int max_nodes = 500);

struct TerminationVerdict {
  bool terminates = true;
  std::vector<std::string> infinite_types;
};
TerminationVerdict certify_termination(const std::map<std::string, GraphPattern>& patterns);

std::string pattern_dot(const GraphPattern& p, const DotOptions& opts = {});
std::string pattern_dump(const GraphPattern& p);

// Canonical key for pattern nodes: structural modulo consistent renaming of
// non-pinned variables, in traversal order.
std::string pattern_canon_key(const AmState& s, const std::vector<VarKey>& pinned, int child_tag);

// Structural key of a whole rule modulo variable renaming (used for golden
// rule comparisons).
std::string canon_am_rule(const AmRule& r);

}  // namespace semflow
