#include "blm/model.hpp"

#include <algorithm>
#include <cstdlib>

#include "blm/error.hpp"

namespace blm {

const char* to_string(ElementKind k) {
  switch (k) {
    case ElementKind::BusinessLogic: return "BL";
    case ElementKind::BusinessFunction: return "BF";
    case ElementKind::DataRule: return "DR";
    case ElementKind::ConditionalRule: return "CR";
    case ElementKind::Product: return "P";
  }
  return "?";
}

const char* to_string(OpKind o) {
  switch (o) {
    case OpKind::Get: return "get";
    case OpKind::Set: return "set";
    case OpKind::Compute: return "compute";
    case OpKind::Select: return "select";
    case OpKind::Update: return "update";
    case OpKind::If: return "if";
    case OpKind::Output: return "output";
    case OpKind::Invoke: return "invoke";
    case OpKind::Receive: return "receive";
  }
  return "?";
}

const char* to_string(SemType t) {
  switch (t) {
    case SemType::String: return "string";
    case SemType::Double: return "double";
    case SemType::Boolean: return "boolean";
  }
  return "?";
}

const char* cmp_token(CmpOp c) {
  switch (c) {
    case CmpOp::Eq: return "eq";
    case CmpOp::Ne: return "ne";
    case CmpOp::Gt: return "gt";
    case CmpOp::Lt: return "lt";
    case CmpOp::Ge: return "ge";
    case CmpOp::Le: return "le";
  }
  return "?";
}

const char* cmp_symbol(CmpOp c) {
  switch (c) {
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
    case CmpOp::Gt: return ">";
    case CmpOp::Lt: return "<";
    case CmpOp::Ge: return ">=";
    case CmpOp::Le: return "<=";
  }
  return "?";
}

ElementKind kind_for_op(OpKind o) {
  switch (o) {
    case OpKind::Select:
    case OpKind::Update:
      return ElementKind::DataRule;
    case OpKind::If:
      return ElementKind::ConditionalRule;
    default:
      return ElementKind::BusinessFunction;
  }
}

const char* kind_prefix(ElementKind k) { return to_string(k); }

const LogicElement* ServiceDef::find(const std::string& local) const {
  auto it = elements.find(local);
  return it == elements.end() ? nullptr : &it->second;
}

const ServiceDef* LogicModel::find_service(const std::string& n) const {
  for (const auto& s : services)
    if (s.name == n) return &s;
  return nullptr;
}

ServiceDef* LogicModel::find_service(const std::string& n) {
  for (auto& s : services)
    if (s.name == n) return &s;
  return nullptr;
}

const LogicElement* LogicModel::find(const std::string& qualified) const {
  auto [svc, local] = split_qualified(qualified);
  const ServiceDef* s = find_service(svc);
  return s ? s->find(local) : nullptr;
}

std::pair<std::string, std::string> split_qualified(const std::string& qualified) {
  auto dot = qualified.find('.');
  if (dot == std::string::npos) return {"", qualified};
  return {qualified.substr(0, dot), qualified.substr(dot + 1)};
}

long document_position(const LogicModel& model, const std::string& qualified) {
  auto [svc, local] = split_qualified(qualified);
  long base = 0;
  for (const auto& s : model.services) {
    if (s.name == svc) {
      auto it = std::find(s.order.begin(), s.order.end(), local);
      if (it != s.order.end()) return base + (it - s.order.begin());
      return base + static_cast<long>(s.order.size());
    }
    base += static_cast<long>(s.order.size()) + 1;
  }
  return base;
}

namespace {

bool literal_text_ok(const Literal& lit) {
  switch (lit.type) {
    case SemType::Boolean:
      return lit.text == "true" || lit.text == "false";
    case SemType::Double: {
      if (lit.text.empty()) return false;
      char* end = nullptr;
      std::strtod(lit.text.c_str(), &end);
      return end && *end == '\0';
    }
    case SemType::String:
      return true;
  }
  return false;
}

void check_operand(const SimpleOperand& op, const LogicElement& e,
                   std::vector<ValidationIssue>& out) {
  if (op.kind == SimpleOperand::Kind::Db && e.kind != ElementKind::DataRule)
    out.push_back({e.index.qualified(),
                   "db." + op.name + " operand outside a data rule"});
  if (op.kind == SimpleOperand::Kind::Lit && !literal_text_ok(op.lit))
    out.push_back({e.index.qualified(), "malformed literal '" + op.lit.text + "'"});
}

void check_condition(const Condition& c, const LogicElement& e,
                     std::vector<ValidationIssue>& out) {
  for (const Operand* o : {&c.lhs, &c.rhs}) {
    check_operand(o->first, e, out);
    if (o->second) check_operand(*o->second, e, out);
    if (o->arith && *o->arith != '+' && *o->arith != '-')
      out.push_back({e.index.qualified(), "unsupported arithmetic operator"});
  }
}

}  // namespace

std::vector<ValidationIssue> validate_model(const LogicModel& model) {
  std::vector<ValidationIssue> out;
  std::set<std::string> service_names;
  for (const auto& svc : model.services) {
    if (!service_names.insert(svc.name).second)
      out.push_back({svc.name, "duplicate service name"});

    std::set<std::string> seen;
    for (const auto& local : svc.order) {
      if (!seen.insert(local).second)
        out.push_back({svc.name + "." + local, "duplicate local index"});
      if (!svc.find(local))
        out.push_back({svc.name + "." + local, "indexed element missing from table"});
    }
    for (const auto& [local, e] : svc.elements) {
      const std::string qi = svc.name + "." + local;
      if (e.index.service != svc.name || e.index.local != local)
        out.push_back({qi, "element index disagrees with its table key"});
      if (std::find(svc.order.begin(), svc.order.end(), local) == svc.order.end())
        out.push_back({qi, "element missing from document order"});
      if (!e.children.empty() && e.kind != ElementKind::ConditionalRule)
        out.push_back({qi, "children on a non-conditional element"});
      if (e.kind != kind_for_op(e.op))
        out.push_back({qi, std::string("operation ") + to_string(e.op) +
                               " labeled with kind " + to_string(e.kind)});
      if (e.kind == ElementKind::Product || e.kind == ElementKind::BusinessLogic)
        out.push_back({qi, "synthetic kind used for a parsed element"});
      for (const auto& child : e.children)
        if (!svc.find(child))
          out.push_back({qi, "child " + child + " not present in service"});
      if (e.op == OpKind::Invoke) {
        if (!e.target) {
          out.push_back({qi, "invoke without a target service"});
        } else {
          if (*e.target == svc.name)
            out.push_back({qi, "invoke targets its own service"});
          if (!model.find_service(*e.target) && !model.external_services.count(*e.target))
            out.push_back({qi, "invoke target '" + *e.target +
                                   "' is neither in the model nor declared external"});
        }
      }
      for (const auto& p : e.params) {
        if (p.name.empty()) out.push_back({qi, "parameter with empty name"});
        if (p.value) check_operand(*p.value, e, out);
        if (p.value && p.value->kind == SimpleOperand::Kind::Lit &&
            p.value->lit.type != p.type)
          out.push_back({qi, "literal type of parameter '" + p.name +
                                 "' disagrees with its declared type"});
      }
      for (const auto& c : e.conditions) check_condition(c, e, out);
      for (const auto& a : e.assigns) {
        if (e.op != OpKind::Update)
          out.push_back({qi, "assignment clause on a non-update element"});
        check_condition(a, e, out);
      }
    }
  }
  return out;
}

const LogicElement& element_lookup(const LogicModel& model, const std::string& qualified) {
  const LogicElement* e = model.find(qualified);
  if (!e)
    throw Error(ErrorCategory::Analysis, "NotFound",
                "no element '" + qualified + "' in the model");
  return *e;
}

}  // namespace blm
