#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "blm/model.hpp"

namespace blm {

// Per-kind step weights used by the computability budget. All weights >= 1.
struct CostModel {
  long default_weight = 1;
  std::map<ElementKind, long> overrides;

  long weight(ElementKind k) const {
    auto it = overrides.find(k);
    return it == overrides.end() ? default_weight : it->second;
  }
  bool operator==(const CostModel&) const = default;
};

// SLA-derived constraints: which elements a partner may bind through, which
// variables must stay traceable, and the step budget.
struct Contract {
  std::string name;
  std::map<std::string, std::vector<std::string>> af;  // service -> local indices
  std::set<std::string> trace_vars;
  long budget = 100;
  CostModel weights;
  std::vector<std::pair<std::string, std::string>> allowed_bindings;  // (source, target svc)
  bool operator==(const Contract&) const = default;
};

struct Constraint {
  enum class Kind { Accessibility, Computability, Traceability, Binding };
  Kind kind;
  std::string subject;
  std::string detail;
};

const char* to_string(Constraint::Kind k);

// Line-oriented `.ctr` format; `contract-version 1` header required.
Contract load_contract(const std::string& text);
std::string print_contract(const Contract& c);

// Expands the contract against a model: one accessibility constraint per
// non-accessible element, one computability constraint per service, one
// traceability constraint per trace variable, one binding constraint per
// allowed-binding entry. Contract sections naming services absent from the
// model are skipped; unknown indices within present services are errors.
std::vector<Constraint> analyze_constraints(const Contract& c, const LogicModel& model);

}  // namespace blm
