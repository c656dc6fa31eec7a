#pragma once

// PAM-to-AM conversion: invertibility checking, the up-down prohibition,
// phase erasure with value specialization, fusion, and AM execution.

#include "semflow/pam.hpp"

namespace semflow {

struct AmState {
  Configuration conf;
  ContextPtr ctx;
};

bool am_state_eq(const AmState& a, const AmState& b);
std::string print_am_state(const AmState& s);

struct AmRule {
  std::string name;
  AmState lhs;
  std::vector<ChainCall> chain;
  AmState rhs;
  std::vector<std::string> provenance;  // originating PAM rule names, in order
  bool from_up = false;                 // originated from an up-rule
  bool fused_away = false;              // consumed as a fusion successor
};

std::string print_am_rule(const AmRule& r);

enum class Invertibility { Invertible, NotInvertible, Unknown };

struct InvertVerdict {
  std::string rule;
  Invertibility v = Invertibility::Unknown;
  std::string detail;
};

std::vector<InvertVerdict> check_up_rules_invertible(const Language& lang,
                                                     const std::vector<PamRule>& rules,
                                                     int depth_bound = 32);

struct UpDownResult {
  bool ok = true;
  std::vector<std::string> offending;  // up-down rules besides the reset rule
};
UpDownResult check_no_up_down(const std::vector<PamRule>& rules);

struct PreconditionFailed : std::runtime_error {
  std::vector<InvertVerdict> verdicts;
  std::vector<std::string> up_down;
  explicit PreconditionFailed(std::string msg) : std::runtime_error(std::move(msg)) {}
};

struct ConvertOptions {
  std::vector<std::string> assume_invertible;  // operator overrides for Unknown verdicts
  int depth_bound = 32;
};

// The six-step conversion: check invertibility and the up-down prohibition,
// drop the reset rule, specialize up-rule foci to values, delete would-be
// self-loops, erase phases.
std::vector<AmRule> pam_to_unfused_am(const Language& lang, const std::vector<PamRule>& rules,
                                      const ConvertOptions& opts = {});

struct FuseOptions {
  bool fuse_chains = true;
  bool fuse_up_rules = true;
  int pass_bound = 8;
};

struct FusionDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fusion: chain rules with a unique unifiable successor are composed with
// it; every up-origin rule is composed with each of its possible successors.
// Consumed successors stay in the rule list marked fused_away; execution
// uses the full list, displays and golden comparisons use the others.
std::vector<AmRule> fuse(const Language& lang, std::vector<AmRule> rules,
                         const FuseOptions& opts = {});

AmRule fresh_rename_am(const AmRule& r, FreshCounter& fc);
PamRule fresh_rename_pam(const PamRule& r, FreshCounter& fc);

std::vector<AmState> am_step(const Language& lang, const std::vector<AmRule>& rules,
                             const AmState& s);
// Successors produced by one specific rule (used by property tests).
std::vector<AmState> am_step_rule(const Language& lang, const AmRule& rule, const AmState& s);

struct AmTrace {
  std::vector<AmState> states;
  std::vector<std::string> rule_names;
  bool determinism_violation = false;
};
AmTrace am_run(const Language& lang, const std::vector<AmRule>& rules, const AmState& s,
               int fuel);

}  // namespace semflow
