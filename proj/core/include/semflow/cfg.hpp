#pragma once

// Interpreted-mode CFG generation: abstract transition graph exploration,
// projections/quotient graphs, DOT emission.

#include <set>

#include "semflow/abstraction.hpp"

namespace semflow {

struct TransitionGraph {
  std::vector<AmState> nodes;
  std::set<std::pair<int, int>> edges;
  int start = 0;
  bool truncated = false;
};

struct Cfg {
  std::vector<AmState> nodes;
  std::set<std::pair<int, int>> edges;
  int start = 0;
  bool truncated = false;
  std::vector<std::string> labels;
};

// Canonical node identity key (structural, state bindings key-sorted).
std::string canon_key(const AmState& s);

// The program at the empty context with the language's initial state.
// Surfaces validation diagnostics via std::runtime_error.
AmState initial_state(const Language& lang, const TermPtr& program);

// As above, with the program's read-before-written variables bound to stars
// (closes open program fragments for abstract exploration).
AmState initial_state_closed(const Language& lang, const TermPtr& program);

// Worklist closure of the abstract transition relation from alpha(start).
TransitionGraph explore_graph(const Language& lang, const std::vector<AmRule>& rules,
                              const Abstraction& abs, const AmState& start, int max_states);

// Quotient per the projected-graph definition, including its self-loop
// clause: (a,a) is an edge iff every preimage of a has an outgoing edge.
Cfg project_graph(const TransitionGraph& g,
                  const std::function<AmState(const AmState&)>& pi);

// Identifies each statement of a straight-line block with the last
// statement of its continuation: folds topmost seq-frames into the focus
// and keeps the last statement of the seq spine.
std::function<AmState(const AmState&)> basic_block_projection();

struct DotOptions {
  bool verbose_labels = false;
  std::string name = "cfg";
};

std::string emit_dot(const TransitionGraph& g, const DotOptions& opts = {});
std::string emit_dot(const Cfg& g, const DotOptions& opts = {});
std::string adjacency_dump(const TransitionGraph& g);

// Display label: focused term plus a context-depth digest.
std::string node_label(const AmState& s, bool verbose);

}  // namespace semflow
