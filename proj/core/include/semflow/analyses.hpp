#pragma once

// The two demo analyzers: constant propagation over expression-level
// recipe-generated CFGs, and parenthesis balancing over path-sensitive
// interpreted CFGs.

#include "semflow/codegen.hpp"

namespace semflow {

struct ConstVal {
  enum class K { Bot, Num, Top };
  K k = K::Bot;
  long long n = 0;
};
ConstVal const_join(const ConstVal& a, const ConstVal& b);
std::string const_show(const ConstVal& v);

using ConstEnv = std::map<std::string, ConstVal>;

// Worklist dataflow to fixpoint; assignments and integer arithmetic only.
// Result maps each CFG node to the environment after its effect.
std::map<int, ConstEnv> constant_propagation(const RecipeCfg& cfg);

struct ParenVerdict {
  enum class K { Balanced, Unbalanced, Unknown };
  K k = K::Balanced;
  std::vector<std::string> witness;  // Unbalanced: a concrete offending path
};

// Counter abstract interpretation over all CFG paths; emissions come from
// nodes focusing a print of a statically-known string literal.
ParenVerdict paren_balance(const Cfg& g, int entry, const std::string& open_tok,
                           const std::string& close_tok, int cap = 8);

}  // namespace semflow
