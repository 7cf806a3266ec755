#pragma once

#include <string>
#include <vector>

#include "blm/blps.hpp"
#include "blm/contract.hpp"
#include "blm/model.hpp"
#include "blm/properties.hpp"

namespace blm {

// The integration rewrite: `source` (an output element) becomes an invoke of
// `target_service`; args map source variables positionally onto the target's
// input parameters.
struct BindingSpec {
  std::string source;  // qualified index
  std::string target_service;
  std::vector<std::string> args;  // source variable names
};

// CLI mini-syntax: source.INDEX->targetService(var1,var2,...)
BindingSpec parse_binding_spec(const std::string& text);

struct Violation {
  enum class Kind { AccessViolation, ComputabilityViolation, TraceBreak, InvalidStructure };
  Kind kind;
  std::string subject;
  std::string detail;
};

const char* to_string(Violation::Kind k);

struct IntegrationResult {
  LogicModel merged;
  std::string outer_name;
  BindingSpec binding;
  std::string rewritten_output_var;  // variable the source output used to define
  PropertySets sets;
  std::vector<std::string> rewrite_log;
  std::vector<Violation> violations;
};

// Merges the two models, rewrites the bound output into an invoke, prepends
// a receive to the target service, and binds the target's input parameters
// to the received values. Hard errors: UnknownIndex, ArityMismatch,
// CycleIntroduced; contract breaches come back as violations.
IntegrationResult integrate(const LogicModel& a, const LogicModel& b,
                            const BindingSpec& binding, const Contract& contract,
                            const std::string& outer_name);

// Deterministic re-validation; violations sorted by kind then subject.
std::vector<Violation> validate_integration(const IntegrationResult& result,
                                            const Contract& contract);

PropertySets integrated_properties(const IntegrationResult& result,
                                   const Contract& contract);

// Schema document for the integration (outer service wrapping both bodies).
BlpsDocument integration_document(const IntegrationResult& result);

}  // namespace blm
