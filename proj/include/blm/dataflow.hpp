#pragma once

#include <string>
#include <vector>

#include "blm/model.hpp"

namespace blm {

// Variables are scoped to their service; database fields are global and
// written "table.field". A receive element reads, across the service
// boundary, the argument variables of every invoke that targets its service
// (positional match).
struct DataflowFacts {
  std::vector<std::pair<std::string, std::string>> defines_vars;  // (service, var)
  std::vector<std::string> defines_db;                            // table.field
  std::vector<std::pair<std::string, std::string>> reads_vars;    // (service, var)
  std::vector<std::string> reads_db;                              // table.field
};

DataflowFacts element_facts(const LogicModel& model, const LogicElement& e);

// True when every variable the element's value expressions reference has a
// defining element somewhere in the model. Elements whose only role is to
// produce a value from inputs that nothing defines cannot execute; the flow
// builder treats them as inert.
bool value_inputs_defined(const LogicModel& model, const LogicElement& e);

// All (service, var) pairs defined anywhere in the model.
std::vector<std::pair<std::string, std::string>> all_defined_vars(const LogicModel& model);

}  // namespace blm
