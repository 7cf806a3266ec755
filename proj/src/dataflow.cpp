#include "blm/dataflow.hpp"

#include <algorithm>

namespace blm {

namespace {

void read_simple(const SimpleOperand& s, const LogicElement& e, DataflowFacts& f) {
  if (s.kind == SimpleOperand::Kind::Var)
    f.reads_vars.emplace_back(e.index.service, s.name);
  else if (s.kind == SimpleOperand::Kind::Db)
    f.reads_db.push_back(e.table + "." + s.name);
}

void read_operand(const Operand& o, const LogicElement& e, DataflowFacts& f) {
  read_simple(o.first, e, f);
  if (o.second) read_simple(*o.second, e, f);
}

void read_condition(const Condition& c, const LogicElement& e, DataflowFacts& f) {
  read_operand(c.lhs, e, f);
  read_operand(c.rhs, e, f);
}

}  // namespace

DataflowFacts element_facts(const LogicModel& model, const LogicElement& e) {
  DataflowFacts f;
  const std::string& svc = e.index.service;
  switch (e.op) {
    case OpKind::Get:
      for (const auto& p : e.params) {
        f.defines_vars.emplace_back(svc, p.name);
        if (p.value && p.value->kind == SimpleOperand::Kind::Var)
          f.reads_vars.emplace_back(svc, p.value->name);
      }
      break;
    case OpKind::Set:
    case OpKind::Output:
      if (!e.params.empty()) {
        f.defines_vars.emplace_back(svc, e.params[0].name);
        if (e.params[0].value && e.params[0].value->kind == SimpleOperand::Kind::Var)
          f.reads_vars.emplace_back(svc, e.params[0].value->name);
      }
      break;
    case OpKind::Compute:
      if (!e.params.empty()) f.defines_vars.emplace_back(svc, e.params[0].name);
      for (size_t i = 1; i < e.params.size(); ++i)
        if (e.params[i].value && e.params[i].value->kind == SimpleOperand::Kind::Var)
          f.reads_vars.emplace_back(svc, e.params[i].value->name);
      break;
    case OpKind::Select:
      for (const auto& r : e.retrieves) {
        f.defines_vars.emplace_back(svc, r);
        f.reads_db.push_back(e.table + "." + r);
      }
      for (const auto& c : e.conditions) read_condition(c, e, f);
      break;
    case OpKind::Update:
      for (const auto& a : e.assigns) {
        f.defines_db.push_back(e.table + "." + a.lhs.first.name);
        read_operand(a.rhs, e, f);
      }
      for (const auto& c : e.conditions) read_condition(c, e, f);
      break;
    case OpKind::If:
      for (const auto& c : e.conditions) read_condition(c, e, f);
      break;
    case OpKind::Invoke:
      for (const auto& p : e.params)
        if (p.value && p.value->kind == SimpleOperand::Kind::Var)
          f.reads_vars.emplace_back(svc, p.value->name);
      break;
    case OpKind::Receive: {
      for (const auto& p : e.params) f.defines_vars.emplace_back(svc, p.name);
      // Positional bridge from every invoke that targets this service.
      for (const auto& other : model.services) {
        for (const auto& local : other.order) {
          const LogicElement& inv = *other.find(local);
          if (inv.op != OpKind::Invoke || !inv.target || *inv.target != svc) continue;
          for (size_t i = 0; i < inv.params.size() && i < e.params.size(); ++i)
            if (inv.params[i].value && inv.params[i].value->kind == SimpleOperand::Kind::Var)
              f.reads_vars.emplace_back(other.name, inv.params[i].value->name);
        }
      }
      break;
    }
  }
  return f;
}

std::vector<std::pair<std::string, std::string>> all_defined_vars(const LogicModel& model) {
  std::vector<std::pair<std::string, std::string>> defined;
  for (const auto& svc : model.services)
    for (const auto& local : svc.order)
      for (auto& dv : element_facts(model, *svc.find(local)).defines_vars)
        defined.push_back(dv);
  std::sort(defined.begin(), defined.end());
  defined.erase(std::unique(defined.begin(), defined.end()), defined.end());
  return defined;
}

bool value_inputs_defined(const LogicModel& model, const LogicElement& e) {
  if (e.op != OpKind::Set && e.op != OpKind::Output) return true;
  auto defined = all_defined_vars(model);
  for (const auto& p : e.params) {
    if (!p.value || p.value->kind != SimpleOperand::Kind::Var) continue;
    if (!std::binary_search(defined.begin(), defined.end(),
                            std::make_pair(e.index.service, p.value->name)))
      return false;
  }
  return true;
}

}  // namespace blm
