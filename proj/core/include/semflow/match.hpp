#pragma once

// Matching, unification, the abstraction ordering and its join/meet.

#include <optional>
#include <stdexcept>

#include "semflow/term.hpp"

namespace semflow {

// Raised by state matching when a pattern key is still a variable after the
// partial substitution has been applied.
struct KeyNotGround : std::runtime_error {
  explicit KeyNotGround(const std::string& k)
      : std::runtime_error("state pattern key not ground: " + k) {}
};

// Concrete matching: pattern may contain variables, subject is concrete.
// Returns the unique sigma with sigma(pattern) == subject.
std::optional<Substitution> match(const TermPtr& pattern, const TermPtr& subject);
std::optional<Substitution> match_state(const ReductionState& pattern,
                                        const ReductionState& subject,
                                        const Substitution& partial);

// Abstract matching: subject may contain stars. Succeeds iff some
// concretization of the subject matches the pattern; the witness binds each
// pattern variable to the join over the matching concretizations (computed
// directly: repeated variables meet their candidates, star subjects bind
// pattern fragments' variables to stars of the fragment's match type).
std::optional<Substitution> abstract_match(const TermPtr& pattern, const TermPtr& subject);

// Extending forms used by the machines. `abstract_mode` selects between the
// two behaviours above.
bool match_term_into(const TermPtr& pattern, const TermPtr& subject, Substitution& s,
                     bool abstract_mode);
bool match_state_into(const ReductionState& pattern, const ReductionState& subject,
                      Substitution& s, bool abstract_mode);
bool match_config_into(const Configuration& pattern, const Configuration& subject,
                       Substitution& s, bool abstract_mode);

// Most general unifier respecting match types; occurs-check enforced.
// Variable namespaces must have been renamed apart by the caller.
std::optional<Substitution> unify(const TermPtr& a, const TermPtr& b);
bool unify_into(const TermPtr& a, const TermPtr& b, Substitution& s, FreshCounter& fc);
bool unify_state_into(const ReductionState& a, const ReductionState& b, Substitution& s,
                      FreshCounter& fc);
bool unify_config_into(const Configuration& a, const Configuration& b, Substitution& s,
                       FreshCounter& fc);

// The abstraction ordering: t1 is at or below t2 (t2 at least as abstract).
// Includes the subsumption extension: an instance is below a variable.
bool prec_leq(const TermPtr& t1, const TermPtr& t2);
bool prec_leq(const ReductionState& a, const ReductionState& b);
bool prec_leq(const Configuration& a, const Configuration& b);

// Least upper bound under prec_leq; both sides variable-free.
TermPtr join(const TermPtr& t1, const TermPtr& t2);
ReductionState join(const ReductionState& a, const ReductionState& b);

// Greatest lower bound where it exists.
std::optional<TermPtr> meet(const TermPtr& t1, const TermPtr& t2);

}  // namespace semflow
