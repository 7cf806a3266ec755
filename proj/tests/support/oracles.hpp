#pragma once

#include <set>
#include <string>

#include "blm/contract.hpp"
#include "blm/flow.hpp"
#include "blm/model.hpp"

namespace blm::test {

// Exhaustive path enumeration over the concrete flow graph: an element is
// computable when no enumerated path from it loops, dead-ends off a
// terminal, or accumulates more than `budget` weight.
std::set<std::string> oracle_cf(const LogicModel& model, const CostModel& cost,
                                long budget);

// Path enumeration for arbitrary graphs; mirrors PathReport.
PathReport oracle_terminal(const FlowGraph& g, const std::string& name, long budget);

// Naive fixpoint closure with its own fact extraction.
std::set<std::string> oracle_slice(const LogicModel& model,
                                   const std::set<std::string>& trace_vars);

}  // namespace blm::test
