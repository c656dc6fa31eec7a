#pragma once

// Bundled language definitions and the program surface syntax.

#include "semflow/sos.hpp"

namespace semflow {

// Core imperative language: int/bool values, +, <, variable lookup,
// assignment, sequencing, conditionals, while (by expansion).
Language imp_language();

// imp plus strings, print (output captured in the reduction state under
// "__out"), <=, a let binding statement, and a for loop that expands into
// assignments and a while with a <=-headed condition.
Language imp_extended();

// A two-component lockstep-composition demo whose semantics steps both
// components in one rule; exercises the up-down prohibition and the
// not-invertible verdict.
Language lockstep_demo();

// Semantic functions language files may call by name.
std::map<std::string, SemFun> builtin_semfuns();

// Convenience term builders for imp programs.
TermPtr imp_int(long long n);
TermPtr imp_str(const std::string& s);
TermPtr imp_bool(bool b);
TermPtr imp_var(const std::string& name);
TermPtr imp_skip();
TermPtr imp_assign(const std::string& name, TermPtr e);
TermPtr imp_add(TermPtr a, TermPtr b);
TermPtr imp_lt(TermPtr a, TermPtr b);
TermPtr imp_le(TermPtr a, TermPtr b);
TermPtr imp_seq(TermPtr a, TermPtr b);
TermPtr imp_if(TermPtr c, TermPtr t, TermPtr e);
TermPtr imp_while(TermPtr c, TermPtr body);
TermPtr imp_print(TermPtr e);

// Source text with a position-carrying diagnostic on failure.
struct ProgramSource {
  std::string text;
  std::string language;
};

// Infix statement syntax (see README), falling back to the s-expression
// term reader when the source parses as one.
TermPtr parse_program(const ProgramSource& src);

// Program checks against a language: arities, valueness, known symbols.
std::vector<std::string> validate_program(const Language& lang, const TermPtr& program);

// Variables read by the program (used to close open programs with
// star-valued inputs when building CFGs, and to seed concrete runs).
std::vector<std::string> program_read_vars(const TermPtr& program);

// Extract the captured output trace (newest first reversed to emission
// order) from a final reduction state.
std::vector<TermPtr> output_trace(const ReductionState& s);

// Human-oriented rendering used by the dump commands: infix for the
// bundled operators, keywords for control nodes.
std::string display_term(const TermPtr& t);
std::string display_state(const ReductionState& s);
std::string display_config(const Configuration& c);

}  // namespace semflow
