#pragma once

#include <set>
#include <string>

#include "blm/contract.hpp"
#include "blm/model.hpp"

namespace blm {

// The three property sets over qualified element indices. af and naf
// partition the evaluated element universe.
struct PropertySets {
  std::set<std::string> cf;
  std::set<std::string> tf;
  std::set<std::string> af;
  std::set<std::string> naf;
  long total_cost = 0;
  bool operator==(const PropertySets&) const = default;
};

// cf holds every element from which each maximal flow path reaches a
// terminal within the weighted budget with no reachable cycle. The weight
// of stepping onto an element is its kind's cost; terminals cost nothing.
std::pair<std::set<std::string>, long> eval_computability(const LogicModel& model,
                                                          const CostModel& cost,
                                                          long budget);

std::set<std::string> eval_traceability(const LogicModel& model,
                                        const std::set<std::string>& trace_vars);

// af comes from the contract; naf is the complement per service.
std::pair<std::set<std::string>, std::set<std::string>> eval_accessibility(
    const LogicModel& model, const Contract& contract);

// Aggregate evaluation under one contract. Trace variables the model never
// mentions contribute nothing (integration contracts routinely name
// variables owned by the partner service).
PropertySets evaluate_all(const LogicModel& model, const Contract& contract);

}  // namespace blm
