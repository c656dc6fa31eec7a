#pragma once

// Machine abstractions: an upper-closure state map alpha paired with
// per-semantic-function over-approximations beta, plus abstract rewriting.

#include <functional>

#include "semflow/am.hpp"

namespace semflow {

struct MissingSortTable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Abstraction {
  std::string name;
  // Patterns pass through alpha untouched; alpha is a canonicalizer used as
  // node identity for all graph bookkeeping.
  std::function<TermPtr(const TermPtr&)> term;
  std::function<ReductionState(const ReductionState&)> red_state;
  std::function<AmState(const AmState&)> state;
  // Abstract counterpart of a semantic function.
  std::function<std::vector<Configuration>(const Language&, const std::string&,
                                           const std::vector<Configuration>&)>
      beta;
  bool context_discarding = false;
};

Abstraction identity_abstraction();
Abstraction value_irrelevance(const Language& lang, bool skip_calls = false);
Abstraction expression_irrelevance(const Language& lang);  // throws MissingSortTable
Abstraction boolean_tracking(const Language& lang, std::vector<std::string> tracked_vars,
                             bool keep_string_literals = false);

// Parse a CLI abstraction spec: identity, value-irrel, value-irrel-skipcalls,
// expr-irrel, bool-track:v1,v2 ; unknown names raise std::runtime_error.
Abstraction abstraction_by_name(const Language& lang, const std::string& spec);

// One abstract-rewriting step: abstract-match each rule, thread the witness
// through the chain with beta, then canonicalize the result with alpha.
std::vector<AmState> abs_step(const Language& lang, const std::vector<AmRule>& rules,
                              const Abstraction& abs, const AmState& s);
std::vector<AmState> abs_step_rule(const Language& lang, const AmRule& rule,
                                   const Abstraction& abs, const AmState& s);

}  // namespace semflow
