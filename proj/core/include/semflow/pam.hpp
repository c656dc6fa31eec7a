#pragma once

// Phased abstract machine: contexts built from suspended rule remnants, the
// SOS-to-PAM translation, and PAM execution.

#include "semflow/sos.hpp"

namespace semflow {

// A frame is the remnant of an SOS right-hand side, stored closure-style:
// the binder pattern that will receive the returning configuration, the
// remaining rhs, and the values of left-hand variables captured at push
// time. Frames in rule patterns carry pattern entries instead of values.
// Frames are identified by the origin of their generating rhs position;
// binder and body are templates shared by every frame with that origin.
struct CaptEntry {
  VarKey k;
  TermPtr term;                       // exactly one of term/state set
  std::optional<ReductionState> state;
};

struct Frame {
  int origin = 0;
  std::string origin_name;
  Configuration binder;
  SosRhsPtr body;
  std::vector<CaptEntry> capt;
};
using FramePtr = std::shared_ptr<const Frame>;

struct Context {
  enum class Kind { Emp, Push, KVar };
  Kind kind = Kind::Emp;
  ContextPtr rest;
  FramePtr top;
  std::string kname;
  int ktag = 0;
};

ContextPtr ctx_emp();
ContextPtr ctx_push(ContextPtr rest, FramePtr top);
ContextPtr ctx_kvar(const std::string& name, int tag = 0);
int ctx_len(const ContextPtr& c);     // frames above the base
bool ctx_has_kvar(const ContextPtr& c);
bool ctx_eq(const ContextPtr& a, const ContextPtr& b);
bool frame_eq(const FramePtr& a, const FramePtr& b);

ContextPtr substitute(const Substitution& s, const ContextPtr& c);
FramePtr substitute(const Substitution& s, const FramePtr& f);
bool match_ctx_into(const ContextPtr& pattern, const ContextPtr& subject, Substitution& s,
                    bool abstract_mode);
bool unify_ctx_into(const ContextPtr& a, const ContextPtr& b, Substitution& s, FreshCounter& fc);
bool prec_leq(const ContextPtr& a, const ContextPtr& b);

std::string print_frame(const FramePtr& f);
std::string print_ctx(const ContextPtr& c);

enum class Phase { Down, Up };

struct PamState {
  Configuration conf;
  ContextPtr ctx;
  Phase phase = Phase::Down;
};

bool pam_state_eq(const PamState& a, const PamState& b);
std::string print_pam_state(const PamState& s);

struct ChainCall {
  Configuration result;
  std::string fun;
  std::vector<Configuration> args;
};

struct PamRule {
  std::string name;
  std::string sos_rule;               // originating SOS rule ("" for built-ins)
  PamState lhs;
  std::vector<ChainCall> chain;
  PamState rhs;
};

std::string print_pam_rule(const PamRule& r);

// The SOS-to-PAM translation. Congruence steps push a frame and split the
// rule; semantic-function calls accumulate on the rule's chain; a chained
// build ends in a down state (the value rule then flips finished values up).
// Adds the reset rule and the value rule.
std::vector<PamRule> sos_to_pam(const Language& lang);

// All successors over all matching rules and semantic-function choices.
std::vector<PamState> pam_step(const Language& lang, const std::vector<PamRule>& rules,
                               const PamState& s);

struct PamTrace {
  std::vector<PamState> states;
  std::vector<std::string> rule_names;  // rule used for each transition
  bool determinism_violation = false;
};

PamTrace pam_run(const Language& lang, const std::vector<PamRule>& rules, const PamState& s,
                 int fuel);

struct RuleClasses {
  std::vector<std::string> down_down, down_up, up_up, up_down;
};
RuleClasses classify_rules(const std::vector<PamRule>& rules);

}  // namespace semflow
