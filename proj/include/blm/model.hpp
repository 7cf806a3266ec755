#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace blm {

// Element taxonomy. BusinessLogic labels a whole service and Product is the
// synthesized terminal of a flow graph; neither occurs as a parsed statement.
enum class ElementKind { BusinessLogic, BusinessFunction, DataRule, ConditionalRule, Product };

enum class OpKind { Get, Set, Compute, Select, Update, If, Output, Invoke, Receive };

enum class SemType { String, Double, Boolean };

enum class CmpOp { Eq, Ne, Gt, Lt, Ge, Le };

const char* to_string(ElementKind k);
const char* to_string(OpKind o);
const char* to_string(SemType t);
const char* cmp_token(CmpOp c);   // eq ne gt lt ge le
const char* cmp_symbol(CmpOp c);  // == != > < >= <=
ElementKind kind_for_op(OpKind o);
const char* kind_prefix(ElementKind k);  // BL BF DR CR P

struct Literal {
  SemType type = SemType::String;
  std::string text;  // canonical spelling; strings unquoted here
  bool operator==(const Literal&) const = default;
};

// $var, db.field (field is unqualified; the owning rule's table scopes it),
// or a literal.
struct SimpleOperand {
  enum class Kind { Var, Db, Lit };
  Kind kind = Kind::Lit;
  std::string name;  // Var / Db
  Literal lit;       // Lit
  bool operator==(const SimpleOperand&) const = default;
};

// A simple operand or a two-term sum/difference of simple operands.
struct Operand {
  SimpleOperand first;
  std::optional<char> arith;  // '+' or '-'
  std::optional<SimpleOperand> second;
  bool operator==(const Operand&) const = default;
};

struct Condition {
  Operand lhs;
  CmpOp op = CmpOp::Eq;
  Operand rhs;
  bool operator==(const Condition&) const = default;
};

struct Param {
  std::string name;
  SemType type = SemType::String;
  std::optional<SimpleOperand> value;  // literal or variable reference
  bool operator==(const Param&) const = default;
};

struct ElementIndex {
  std::string service;
  std::string local;
  std::string qualified() const { return service + "." + local; }
  auto operator<=>(const ElementIndex&) const = default;
};

struct LogicElement {
  ElementIndex index;
  ElementKind kind = ElementKind::BusinessFunction;
  OpKind op = OpKind::Get;
  std::vector<Param> params;
  std::vector<Condition> conditions;
  std::vector<Condition> assigns;      // update only: db field = expression
  std::vector<std::string> children;   // local indices; ConditionalRule only
  std::optional<std::string> target;   // compute: function name; invoke: service
  std::vector<std::string> retrieves;  // select only
  std::string table;                   // select/update: database table
  bool operator==(const LogicElement&) const = default;
};

struct ServiceDef {
  std::string name;
  // Optional presentation name used by the abstract flow notation; the
  // qualified element namespace always uses `name`.
  std::optional<std::string> flow_alias;
  std::vector<std::string> roots;  // top-level statement labels, document order
  std::vector<std::string> order;  // every element label, document order
  std::map<std::string, LogicElement> elements;

  const LogicElement* find(const std::string& local) const;
  const std::string& flow_name() const { return flow_alias ? *flow_alias : name; }
  bool operator==(const ServiceDef&) const = default;
};

struct LogicModel {
  std::vector<ServiceDef> services;  // document order
  std::set<std::string> external_services;

  const ServiceDef* find_service(const std::string& name) const;
  ServiceDef* find_service(const std::string& name);
  const LogicElement* find(const std::string& qualified) const;
  bool operator==(const LogicModel&) const = default;
};

struct ValidationIssue {
  std::string index;  // qualified element index, or a service name
  std::string message;
};

// Reports every invariant violation; an empty report means well-formed.
std::vector<ValidationIssue> validate_model(const LogicModel& model);

// Throws Error(Analysis, "NotFound") when the index does not resolve.
const LogicElement& element_lookup(const LogicModel& model, const std::string& qualified);

std::pair<std::string, std::string> split_qualified(const std::string& qualified);

// Document-order position of a qualified index within its service,
// offset by the service's position in the model. Used for stable sorts.
long document_position(const LogicModel& model, const std::string& qualified);

}  // namespace blm
