#pragma once

// Compiled mode, stage 2: project a graph pattern into enter/exit node
// classes, emit a syntax-directed CFG-generator recipe, and apply recipes.

#include "semflow/graph_pattern.hpp"

namespace semflow {

struct NodeRef {
  enum class Kind { TIn, TOut, ChildIn, ChildOut };
  Kind kind = Kind::TIn;
  int child = -1;
  auto operator<=>(const NodeRef&) const = default;
};

std::string ref_name(const NodeRef& r);                 // tIn / tOut / cIn:i / cOut:i
std::optional<NodeRef> ref_parse(const std::string&);

struct NodeClassAssignment {
  std::map<int, NodeRef> cls;  // pattern node index -> class
};

struct Recipe {
  std::string node_type;
  int arity = 0;
  std::vector<int> child_order;                       // order of genCfg calls
  std::set<std::pair<NodeRef, NodeRef>> connects;
  std::vector<NodeRef> ins, outs;
  std::vector<int> value_enter;  // children whose value instances are real control points
};

// Greedy projection search: seeds classes from recognizable states, then
// merges intermediate states into adjacent classes when one dominates the
// other, keeping each class loop-free. Absent when no valid grouping exists.
std::optional<NodeClassAssignment> find_projection(const GraphPattern& p);

Recipe pattern_to_recipe(const GraphPattern& p, const NodeClassAssignment& a);

std::string pretty_print_recipe(const Recipe& r);
std::string recipe_to_json(const Recipe& r);
Recipe recipe_from_json(const std::string& json_text);
std::string recipes_to_json(const std::map<std::string, Recipe>& rs);
std::map<std::string, Recipe> recipes_from_json(const std::string& json_text);

struct MissingRecipe : std::runtime_error {
  explicit MissingRecipe(const std::string& t) : std::runtime_error("missing recipe for '" + t + "'") {}
};

// A recipe-generated CFG with AST back-references.
struct RecipeCfgNode {
  TermPtr ast;
  int ast_id = -1;
  std::string role;  // "in", "out", or "leaf"
};

struct RecipeCfg {
  std::vector<RecipeCfgNode> nodes;
  std::set<std::pair<int, int>> edges;
  std::vector<int> ins, outs;  // of the whole program
};

RecipeCfg recipe_to_cfg(const std::map<std::string, Recipe>& recipes, const Language& lang,
                        const TermPtr& program);

std::string recipe_cfg_dot(const RecipeCfg& g, const DotOptions& opts = {});

}  // namespace semflow
