#pragma once

// Straightened operational semantics: language definitions, semantic
// functions, and the reference small-step interpreter.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semflow/term.hpp"

namespace semflow {

// Semantic functions are relations on configurations: arguments and results
// are values, and result sets are finite. `abstract_default` is the
// coarsest sound abstract counterpart, used by abstractions that do not
// override it.
struct SemFun {
  std::string name;
  std::function<std::vector<Configuration>(const std::vector<Configuration>&)> concrete;
  std::function<std::vector<Configuration>(const std::vector<Configuration>&)> abstract_default;
};

struct SosRhs;
using SosRhsPtr = std::shared_ptr<const SosRhs>;

struct SosRhs {
  enum class Kind { Build, LetStepTo, LetComputation };
  Kind kind;
  Configuration build;               // Build
  Configuration result;              // LetStepTo / LetComputation result pattern
  Configuration arg;                 // LetStepTo: configuration to step
  std::string fun;                   // LetComputation
  std::vector<Configuration> args;   // LetComputation
  SosRhsPtr rest;
};

SosRhsPtr rhs_build(Configuration c);
SosRhsPtr rhs_step(Configuration result, Configuration arg, SosRhsPtr rest);
SosRhsPtr rhs_call(Configuration result, std::string fun, std::vector<Configuration> args,
                   SosRhsPtr rest);

struct SosRule {
  std::string name;
  Configuration lhs;
  SosRhsPtr rhs;
};

enum class Sort { Expr, Stmt, Other };

struct Signature {
  std::string sym;
  int arity = 0;
  bool is_val = false;
  bool is_call = false;                // call-like node (function-skipping abstraction)
  std::optional<Sort> sort;            // result sort, when the language has sorts
  std::vector<Sort> child_sorts;
};

struct Language {
  std::string name;
  std::map<std::string, Signature> sigs;
  std::vector<SosRule> rules;
  std::map<std::string, SemFun> semfuns;
  ReductionState initial_state;
  bool has_sorts = false;

  const Signature* sig(const std::string& sym) const {
    auto it = sigs.find(sym);
    return it == sigs.end() ? nullptr : &it->second;
  }
  const SemFun* semfun(const std::string& n) const {
    auto it = semfuns.find(n);
    return it == semfuns.end() ? nullptr : &it->second;
  }
};

// Diagnostics; entries starting with "warning:" are non-fatal.
std::vector<std::string> validate_language(const Language& lang);
bool diagnostics_ok(const std::vector<std::string>& diags);

// Free variables of an rhs, given its binding structure.
void rhs_free_vars(const SosRhsPtr& rhs, std::vector<TermPtr>& out);
void config_vars(const Configuration& c, std::vector<TermPtr>& out);

struct StepOutcome {
  enum class Kind { Stepped, ValueHalt, Stuck };
  Kind kind = Kind::Stuck;
  Configuration next;
  std::string detail;
};

StepOutcome sos_step(const Language& lang, const Configuration& c);

struct SosTrace {
  std::vector<Configuration> states;  // includes the initial configuration
  bool stuck = false;
  std::string stuck_detail;
};

SosTrace sos_run(const Language& lang, const Configuration& c, int fuel);

}  // namespace semflow
