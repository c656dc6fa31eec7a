#pragma once

// Text format for language definitions:
//   language <name>
//   node <sym> <arity> <val|nonval> [<expr|stmt|other> [<child sorts...>]]
//   init <state>
//   rule <name>: <conf> ~> <rhs>
// where <conf> is ( <term> , <state> ) and <rhs> chains
//   let <conf> = step <conf> in ...
//   let <conf> = call <fn>(<conf>, ...) in ...
//   build <conf>
// Calls resolve against the builtin semantic functions.

#include "semflow/sos.hpp"

namespace semflow {

Language parse_language(const std::string& text);
Language load_language_file(const std::string& path);
std::string print_language(const Language& lang);  // round-trips parse_language

}  // namespace semflow
