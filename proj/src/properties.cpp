#include "blm/properties.hpp"

#include <functional>
#include <map>

#include "blm/dataflow.hpp"
#include "blm/error.hpp"
#include "blm/flow.hpp"

namespace blm {

namespace {

struct NodeVerdict {
  bool cycle = false;      // cycle reachable
  bool dead_end = false;   // non-terminal sink reachable
  long max_cost = 0;       // heaviest path to an end (meaningful when !cycle)
};

// Memoized reverse-topological sweep with tricolor cycle detection.
struct CostAnalysis {
  const FlowGraph& g;
  const LogicModel& model;
  const CostModel& cost;
  std::map<std::string, std::vector<std::string>> succ;
  std::map<std::string, int> color;  // 0 white, 1 gray, 2 done
  std::map<std::string, NodeVerdict> verdict;

  CostAnalysis(const FlowGraph& graph, const LogicModel& m, const CostModel& c)
      : g(graph), model(m), cost(c) {
    for (const auto& [a, b] : g.edges()) succ[a].push_back(b);
  }

  long node_weight(const FlowNode& n) const {
    if (!n.element) return 0;  // entries, products, stubs
    const LogicElement* e = model.find(*n.element);
    return e ? cost.weight(e->kind) : 0;
  }

  const NodeVerdict& run(const std::string& key) {
    auto it = verdict.find(key);
    if (it != verdict.end() && color[key] == 2) return it->second;
    if (color[key] == 1) {  // back edge
      verdict[key].cycle = true;
      return verdict[key];
    }
    color[key] = 1;
    NodeVerdict v;
    auto s = succ.find(key);
    if (s == succ.end() || s->second.empty()) {
      v.dead_end = !g.nodes.at(key).terminal;
    } else {
      for (const auto& next : s->second) {
        if (color[next] == 1) {
          v.cycle = true;
          continue;
        }
        const NodeVerdict& nv = run(next);
        v.cycle = v.cycle || nv.cycle;
        v.dead_end = v.dead_end || nv.dead_end;
        v.max_cost = std::max(v.max_cost, node_weight(g.nodes.at(next)) + nv.max_cost);
      }
    }
    color[key] = 2;
    verdict[key] = v;
    return verdict[key];
  }
};

}  // namespace

std::pair<std::set<std::string>, long> eval_computability(const LogicModel& model,
                                                          const CostModel& cost,
                                                          long budget) {
  if (budget < 1)
    throw Error(ErrorCategory::Usage, "InvalidBudget", "budget must be at least 1");
  FlowGraph g = build_flow(model);
  CostAnalysis analysis(g, model, cost);

  std::set<std::string> cf;
  for (const auto& svc : model.services) {
    for (const auto& local : svc.order) {
      std::string q = svc.name + "." + local;
      if (!g.nodes.count(q)) continue;
      const NodeVerdict& v = analysis.run(q);
      bool sink_self = analysis.succ.find(q) == analysis.succ.end() ||
                       analysis.succ[q].empty();
      bool fails = v.cycle || v.dead_end || (sink_self && !g.nodes.at(q).terminal);
      if (!fails && v.max_cost <= budget) cf.insert(q);
    }
  }
  long total = 0;
  for (const auto& entry : g.entries) {
    const NodeVerdict& v = analysis.run(entry);
    if (!v.cycle) total = std::max(total, v.max_cost);
  }
  return {cf, total};
}

std::set<std::string> eval_traceability(const LogicModel& model,
                                        const std::set<std::string>& trace_vars) {
  FlowGraph g = build_flow(model);
  return backward_slice(model, g, trace_vars);
}

std::pair<std::set<std::string>, std::set<std::string>> eval_accessibility(
    const LogicModel& model, const Contract& contract) {
  std::set<std::string> af, naf;
  for (const auto& svc : model.services) {
    std::set<std::string> declared;
    auto it = contract.af.find(svc.name);
    if (it != contract.af.end()) {
      for (const auto& local : it->second) {
        if (!svc.find(local))
          throw Error(ErrorCategory::Analysis, "UnknownIndex",
                      "contract grants access to unknown element " + svc.name + "." + local);
        declared.insert(local);
      }
    }
    for (const auto& local : svc.order) {
      if (declared.count(local))
        af.insert(svc.name + "." + local);
      else
        naf.insert(svc.name + "." + local);
    }
  }
  return {af, naf};
}

PropertySets evaluate_all(const LogicModel& model, const Contract& contract) {
  PropertySets out;
  auto [cf, total] = eval_computability(model, contract.weights, contract.budget);
  out.cf = std::move(cf);
  out.total_cost = total;

  // Keep only trace variables the model actually mentions.
  std::set<std::string> present;
  for (const auto& v : contract.trace_vars) {
    bool known = false;
    for (const auto& svc : model.services) {
      for (const auto& local : svc.order) {
        DataflowFacts f = element_facts(model, *svc.find(local));
        for (const auto& dv : f.defines_vars) known = known || dv.second == v;
        for (const auto& rv : f.reads_vars) known = known || rv.second == v;
      }
    }
    if (known) present.insert(v);
  }
  if (!present.empty()) out.tf = eval_traceability(model, present);

  auto [af, naf] = eval_accessibility(model, contract);
  out.af = std::move(af);
  out.naf = std::move(naf);
  return out;
}

}  // namespace blm
