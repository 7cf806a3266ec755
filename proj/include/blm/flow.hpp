#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "blm/model.hpp"

namespace blm {

struct FlowNode {
  // Unique key within the graph. Concrete graphs key nodes by their display
  // name; abstract graphs scope the key per service so that repeated tags
  // (two services both exposing "get") stay distinct for analysis while the
  // notation prints the bare tag.
  std::string key;
  std::string name;  // display name used by the production notation
  enum class Role { Entry, Element, Product, Tag, ServiceStub, Port };
  Role role = Role::Element;
  bool terminal = false;
  std::optional<std::string> element;  // qualified index backing this node
};

// One successor item: a plain node or a bracketed fork set [a, b].
struct SuccessorItem {
  std::vector<std::string> keys;
  bool fork = false;
};

// head -> {s1, s2} b1=b2 ...  A multi-node head ({a, b} -> {c}) continues a
// successor group introduced earlier.
struct Production {
  std::vector<std::string> head;
  std::vector<SuccessorItem> successors;
  std::vector<std::pair<std::string, std::string>> bindings;
};

struct FlowGraph {
  std::map<std::string, FlowNode> nodes;
  std::vector<Production> productions;
  std::vector<std::string> entries;  // node keys, one per service

  const FlowNode* find_node(const std::string& key) const;
  // Resolves a display name; throws NotFound when absent, Analysis error
  // when ambiguous.
  const FlowNode& resolve(const std::string& name) const;

  // Control edges derived from the productions. Within a successor list the
  // chain threads through members that continue somewhere (they head a
  // production or belong to a group head) and forks over members that do
  // not: dangling ports receive an edge but do not carry the chain.
  const std::vector<std::pair<std::string, std::string>>& edges() const;
  std::vector<std::string> successors_of(const std::string& key) const;

private:
  mutable std::optional<std::vector<std::pair<std::string, std::string>>> edge_cache_;
};

struct PathReport {
  bool terminates = false;
  long max_steps = 0;  // longest simple path, counting edges
  bool has_cycle = false;
};

// Element-level control flow. Invokes edge into the target service's entry;
// outputs edge into the service Product; receive elements and value
// producers with undefined inputs become isolated port nodes.
FlowGraph build_flow(const LogicModel& model);

// Flow over the operation vocabulary (get, set, compute, store, return,
// r:select, r:cmp, r:updateN). Constant-only sets are folded away; update
// runs commit through a synthesized store before return; ports surface as
// entry-production successors.
FlowGraph abstract_flow(const LogicModel& model);

// Forward transitive closure of display names, including the start node.
std::set<std::string> reachable(const FlowGraph& g, const std::string& name);

// Every maximal path from the node must reach a terminal within `budget`
// steps (one per edge) with no reachable cycle.
PathReport terminal_paths(const FlowGraph& g, const std::string& name, long budget);

// Smallest element set closed under definitions of traced variables,
// def-use (variables and database fields, including invoke/receive argument
// bridges), and guarding conditional rules.
std::set<std::string> backward_slice(const LogicModel& model, const FlowGraph& g,
                                     const std::set<std::string>& trace_vars);

std::string emit_productions(const FlowGraph& g);
FlowGraph parse_flow_productions(const std::string& text);

}  // namespace blm
