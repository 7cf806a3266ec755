#include "blm/integrate.hpp"

#include <algorithm>
#include <sstream>

#include "blm/dataflow.hpp"
#include "blm/error.hpp"
#include "blm/flow.hpp"

namespace blm {

const char* to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::AccessViolation: return "AccessViolation";
    case Violation::Kind::ComputabilityViolation: return "ComputabilityViolation";
    case Violation::Kind::TraceBreak: return "TraceBreak";
    case Violation::Kind::InvalidStructure: return "InvalidStructure";
  }
  return "?";
}

BindingSpec parse_binding_spec(const std::string& text) {
  auto arrow = text.find("->");
  auto paren = text.find('(', arrow == std::string::npos ? 0 : arrow);
  if (arrow == std::string::npos || paren == std::string::npos || text.back() != ')')
    throw Error(ErrorCategory::Usage, "InvalidBindingSpec",
                "expected source.INDEX->targetService(var1,var2,...)");
  BindingSpec spec;
  spec.source = text.substr(0, arrow);
  spec.target_service = text.substr(arrow + 2, paren - arrow - 2);
  std::string args = text.substr(paren + 1, text.size() - paren - 2);
  std::string cur;
  for (char c : args) {
    if (c == ',') {
      if (!cur.empty()) spec.args.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) spec.args.push_back(cur);
  if (spec.source.find('.') == std::string::npos || spec.target_service.empty())
    throw Error(ErrorCategory::Usage, "InvalidBindingSpec",
                "expected source.INDEX->targetService(var1,var2,...)");
  return spec;
}

namespace {

// First input element of the target service, in document order.
const LogicElement* first_get(const ServiceDef& svc) {
  for (const auto& local : svc.order) {
    const LogicElement* e = svc.find(local);
    if (e->op == OpKind::Get) return e;
  }
  return nullptr;
}

std::string free_label(const ServiceDef& svc, ElementKind kind) {
  const std::string prefix = kind_prefix(kind);
  int n = 0;
  std::string label;
  do {
    ++n;
    label = prefix + std::to_string(n);
  } while (svc.elements.count(label));
  return label;
}

}  // namespace

IntegrationResult integrate(const LogicModel& a, const LogicModel& b,
                            const BindingSpec& binding, const Contract& contract,
                            const std::string& outer_name) {
  auto [src_svc_name, src_local] = split_qualified(binding.source);
  const ServiceDef* src_svc = a.find_service(src_svc_name);
  if (!src_svc || !src_svc->find(src_local))
    throw Error(ErrorCategory::Analysis, "UnknownIndex",
                "binding source " + binding.source + " is not in the source model");
  const ServiceDef* dst_svc = b.find_service(binding.target_service);
  if (!dst_svc)
    throw Error(ErrorCategory::Analysis, "UnknownIndex",
                "binding target service '" + binding.target_service +
                    "' is not in the target model");
  const LogicElement& src = *src_svc->find(src_local);

  for (const auto& svc : a.services)
    if (b.find_service(svc.name))
      throw Error(ErrorCategory::Analysis, "DuplicateService",
                  "service '" + svc.name + "' exists in both models");

  IntegrationResult result;
  result.outer_name = outer_name;
  result.binding = binding;
  LogicModel& merged = result.merged;
  for (const auto& svc : a.services) merged.services.push_back(svc);
  for (const auto& svc : b.services) merged.services.push_back(svc);
  for (const auto& e : a.external_services) merged.external_services.insert(e);
  for (const auto& e : b.external_services) merged.external_services.insert(e);

  // Contract breaches and a non-rewritable source come back as violations on
  // the unmodified union; the caller decides what to do with them.
  {
    auto it = contract.af.find(src_svc_name);
    bool accessible =
        it == contract.af.end() ||
        std::find(it->second.begin(), it->second.end(), src_local) != it->second.end();
    if (!accessible || src.op != OpKind::Output) {
      result.sets = integrated_properties(result, contract);
      result.violations = validate_integration(result, contract);
      return result;
    }
  }

  // Mutual invocation would make the merged flow cyclic; reject up front.
  for (const auto& svc : b.services)
    for (const auto& local : svc.order) {
      const LogicElement* e = svc.find(local);
      if (e->op == OpKind::Invoke && e->target && a.find_service(*e->target))
        throw Error(ErrorCategory::Analysis, "CycleIntroduced",
                    "target model invokes " + *e->target +
                        "; mutual invocation is not supported");
    }

  const LogicElement* dst_get = first_get(*dst_svc);
  if (dst_get && !binding.args.empty() && binding.args.size() != dst_get->params.size())
    throw Error(ErrorCategory::Analysis, "ArityMismatch",
                "binding passes " + std::to_string(binding.args.size()) +
                    " values but " + dst_get->index.qualified() + " expects " +
                    std::to_string(dst_get->params.size()));

  // (1) the bound output becomes the cross-service invoke
  ServiceDef& msrc = *merged.find_service(src_svc_name);
  LogicElement& call = msrc.elements.at(src_local);
  if (!call.params.empty()) result.rewritten_output_var = call.params[0].name;
  std::vector<std::string> receive_names;
  {
    std::vector<Param> args;
    for (size_t i = 0; i < binding.args.size(); ++i) {
      const std::string& var = binding.args[i];
      SemType type = SemType::String;
      if (dst_get && i < dst_get->params.size()) type = dst_get->params[i].type;
      args.push_back({var, type, SimpleOperand{SimpleOperand::Kind::Var, var, {}}});
      receive_names.push_back(dst_get && i < dst_get->params.size()
                                  ? dst_get->params[i].name
                                  : var);
    }
    call.op = OpKind::Invoke;
    call.kind = ElementKind::BusinessFunction;
    call.params = std::move(args);
    call.conditions.clear();
    call.retrieves.clear();
    call.table.clear();
    call.target = binding.target_service;
  }
  {
    std::ostringstream line;
    line << "rewrote " << binding.source << ": output -> invoke "
         << binding.target_service << "(";
    for (size_t i = 0; i < binding.args.size(); ++i)
      line << (i ? "," : "") << binding.args[i];
    line << ")";
    result.rewrite_log.push_back(line.str());
  }

  // (2) the target service gains a receive listing the mapped parameters
  ServiceDef& mdst = *merged.find_service(binding.target_service);
  {
    std::string label = free_label(mdst, ElementKind::BusinessFunction);
    LogicElement rcv;
    rcv.index = {mdst.name, label};
    rcv.op = OpKind::Receive;
    rcv.kind = ElementKind::BusinessFunction;
    for (size_t i = 0; i < receive_names.size(); ++i) {
      SemType type = SemType::String;
      if (dst_get && i < dst_get->params.size()) type = dst_get->params[i].type;
      rcv.params.push_back({receive_names[i], type, std::nullopt});
    }
    mdst.roots.insert(mdst.roots.begin(), label);
    mdst.order.insert(mdst.order.begin(), label);
    mdst.elements.emplace(label, std::move(rcv));
    std::ostringstream line;
    line << "inserted " << mdst.name << "." << label << ": receive";
    result.rewrite_log.push_back(line.str());
  }

  // (3) the target's input parameters bind to the received values
  if (dst_get) {
    LogicElement& get = mdst.elements.at(dst_get->index.local);
    for (size_t i = 0; i < get.params.size() && i < receive_names.size(); ++i)
      get.params[i].value = SimpleOperand{SimpleOperand::Kind::Var, receive_names[i], {}};
    result.rewrite_log.push_back("bound " + get.index.qualified() +
                                 " parameters to received values");
  }

  // (4) integrated property sets over the merged flow
  result.sets = integrated_properties(result, contract);
  result.violations = validate_integration(result, contract);
  return result;
}

PropertySets integrated_properties(const IntegrationResult& result,
                                   const Contract& contract) {
  return evaluate_all(result.merged, contract);
}

std::vector<Violation> validate_integration(const IntegrationResult& result,
                                            const Contract& contract) {
  std::vector<Violation> out;
  const LogicModel& merged = result.merged;

  // Structure first: the merged model must still be well-formed.
  for (const auto& issue : validate_model(merged))
    out.push_back({Violation::Kind::InvalidStructure, issue.index, issue.message});

  // Accessibility: the partner may bind only through accessible elements. A
  // service with no access section is unrestricted.
  bool access_ok = true;
  {
    auto [svc, local] = split_qualified(result.binding.source);
    auto it = contract.af.find(svc);
    if (it != contract.af.end() &&
        std::find(it->second.begin(), it->second.end(), local) == it->second.end()) {
      access_ok = false;
      out.push_back({Violation::Kind::AccessViolation, result.binding.source,
                     "binding source is outside the accessible set of service '" +
                         svc + "'"});
    }
    if (!contract.allowed_bindings.empty()) {
      bool listed = false;
      for (const auto& [s, t] : contract.allowed_bindings)
        listed = listed || (s == result.binding.source &&
                            t == result.binding.target_service);
      if (!listed) {
        access_ok = false;
        out.push_back({Violation::Kind::AccessViolation, result.binding.source,
                       "binding is not in the contract's allowed list"});
      }
    }
  }

  // The rewrite contract: once access clears, the source must have become an
  // invoke of the target.
  if (access_ok) {
    const LogicElement* src = merged.find(result.binding.source);
    bool rewritten = src && src->op == OpKind::Invoke && src->target &&
                     *src->target == result.binding.target_service;
    if (!rewritten)
      out.push_back({Violation::Kind::InvalidStructure, result.binding.source,
                     "binding source was not rewritten into an invoke (only output "
                     "elements are bindable)"});
  }

  // Computability: the integrated flow must terminate within budget.
  try {
    FlowGraph g = abstract_flow(merged);
    auto [src_svc, ignored] = split_qualified(result.binding.source);
    const ServiceDef* svc = merged.find_service(src_svc);
    if (svc) {
      PathReport r = terminal_paths(g, svc->flow_name(), contract.budget);
      if (r.has_cycle)
        out.push_back({Violation::Kind::ComputabilityViolation, src_svc,
                       "integrated flow contains a cycle"});
      else if (r.max_steps > contract.budget)
        out.push_back({Violation::Kind::ComputabilityViolation, src_svc,
                       "integrated path of length " + std::to_string(r.max_steps) +
                           " exceeds budget " + std::to_string(contract.budget)});
    }
  } catch (const Error& e) {
    out.push_back({Violation::Kind::InvalidStructure, result.binding.source, e.detail()});
  }

  // Traceability: the rewrite must not sever any traced variable. The only
  // definition the rewrite removes is the bound output's own variable.
  for (const auto& v : contract.trace_vars) {
    bool defined_after = false;
    for (const auto& svc : merged.services) {
      for (const auto& local : svc.order) {
        DataflowFacts f = element_facts(merged, *svc.find(local));
        for (const auto& dv : f.defines_vars) defined_after |= dv.second == v;
      }
    }
    if (!defined_after && v == result.rewritten_output_var)
      out.push_back({Violation::Kind::TraceBreak, v,
                     "the rewrite removed the only definition of the traced variable"});
  }

  std::stable_sort(out.begin(), out.end(), [](const Violation& x, const Violation& y) {
    if (x.kind != y.kind) return static_cast<int>(x.kind) < static_cast<int>(y.kind);
    return x.subject < y.subject;
  });
  return out;
}

BlpsDocument integration_document(const IntegrationResult& result) {
  return generate_integrated_blps(result.merged, result.sets, result.outer_name);
}

}  // namespace blm
