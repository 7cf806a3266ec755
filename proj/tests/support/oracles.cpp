#include "support/oracles.hpp"

#include <map>
#include <vector>

namespace blm::test {

namespace {

struct PathEnumerator {
  const FlowGraph& g;
  std::map<std::string, std::vector<std::string>> adj;
  std::map<std::string, long> weight;

  PathEnumerator(const FlowGraph& graph, const LogicModel* model, const CostModel* cost)
      : g(graph) {
    for (const auto& [a, b] : g.edges()) adj[a].push_back(b);
    for (const auto& [key, node] : g.nodes) {
      long w = 0;
      if (model && cost && node.element) {
        const LogicElement* e = model->find(*node.element);
        if (e) w = cost->weight(e->kind);
      }
      weight[key] = w;
    }
  }

  struct Outcome {
    bool cycle = false;
    bool dead_end = false;
    long max_cost = 0;
    long max_steps = 0;
  };

  Outcome enumerate(const std::string& start) {
    Outcome out;
    std::vector<std::string> path{start};
    std::set<std::string> on_path{start};
    walk(start, 0, 0, on_path, out);
    return out;
  }

  void walk(const std::string& node, long cost, long steps, std::set<std::string>& on_path,
            Outcome& out) {
    out.max_cost = std::max(out.max_cost, cost);
    out.max_steps = std::max(out.max_steps, steps);
    auto it = adj.find(node);
    if (it == adj.end() || it->second.empty()) {
      if (!g.nodes.at(node).terminal) out.dead_end = true;
      return;
    }
    for (const auto& next : it->second) {
      if (on_path.count(next)) {
        out.cycle = true;
        out.max_steps = std::max(out.max_steps, steps + 1);
        continue;
      }
      on_path.insert(next);
      walk(next, cost + weight.at(next), steps + 1, on_path, out);
      on_path.erase(next);
    }
  }
};

}  // namespace

std::set<std::string> oracle_cf(const LogicModel& model, const CostModel& cost,
                                long budget) {
  FlowGraph g = build_flow(model);
  PathEnumerator paths(g, &model, &cost);
  std::set<std::string> cf;
  for (const auto& svc : model.services) {
    for (const auto& local : svc.order) {
      std::string q = svc.name + "." + local;
      auto out = paths.enumerate(q);
      if (!out.cycle && !out.dead_end && out.max_cost <= budget) cf.insert(q);
    }
  }
  return cf;
}

PathReport oracle_terminal(const FlowGraph& g, const std::string& name, long budget) {
  PathEnumerator paths(g, nullptr, nullptr);
  auto out = paths.enumerate(g.resolve(name).key);
  PathReport r;
  r.has_cycle = out.cycle;
  r.max_steps = out.max_steps;
  r.terminates = !out.cycle && !out.dead_end && out.max_steps <= budget;
  return r;
}

// ---------------------------------------------------------------------------
// slice fixpoint with independent fact extraction

namespace {

struct Facts {
  std::vector<std::pair<std::string, std::string>> def_vars;  // (service, var)
  std::vector<std::string> def_db;
  std::vector<std::pair<std::string, std::string>> use_vars;
  std::vector<std::string> use_db;
};

void use_simple(Facts& f, const LogicElement& e, const SimpleOperand& s) {
  if (s.kind == SimpleOperand::Kind::Var) f.use_vars.push_back({e.index.service, s.name});
  if (s.kind == SimpleOperand::Kind::Db) f.use_db.push_back(e.table + "." + s.name);
}

void use_operand(Facts& f, const LogicElement& e, const Operand& o) {
  use_simple(f, e, o.first);
  if (o.second) use_simple(f, e, *o.second);
}

Facts facts_of(const LogicModel& model, const LogicElement& e) {
  Facts f;
  const std::string& svc = e.index.service;
  for (const auto& c : e.conditions) {
    use_operand(f, e, c.lhs);
    use_operand(f, e, c.rhs);
  }
  for (const auto& a : e.assigns) {
    f.def_db.push_back(e.table + "." + a.lhs.first.name);
    use_operand(f, e, a.rhs);
  }
  switch (e.op) {
    case OpKind::Get:
      for (const auto& p : e.params) {
        f.def_vars.push_back({svc, p.name});
        if (p.value && p.value->kind == SimpleOperand::Kind::Var)
          f.use_vars.push_back({svc, p.value->name});
      }
      break;
    case OpKind::Set:
    case OpKind::Output:
      for (const auto& p : e.params) {
        f.def_vars.push_back({svc, p.name});
        if (p.value && p.value->kind == SimpleOperand::Kind::Var)
          f.use_vars.push_back({svc, p.value->name});
      }
      break;
    case OpKind::Compute:
      for (size_t i = 0; i < e.params.size(); ++i) {
        if (i == 0) {
          f.def_vars.push_back({svc, e.params[i].name});
        } else if (e.params[i].value &&
                   e.params[i].value->kind == SimpleOperand::Kind::Var) {
          f.use_vars.push_back({svc, e.params[i].value->name});
        }
      }
      break;
    case OpKind::Select:
      for (const auto& r : e.retrieves) {
        f.def_vars.push_back({svc, r});
        f.use_db.push_back(e.table + "." + r);
      }
      break;
    case OpKind::Invoke:
      for (const auto& p : e.params)
        if (p.value && p.value->kind == SimpleOperand::Kind::Var)
          f.use_vars.push_back({svc, p.value->name});
      break;
    case OpKind::Receive: {
      for (const auto& p : e.params) f.def_vars.push_back({svc, p.name});
      for (const auto& other : model.services)
        for (const auto& l : other.order) {
          const LogicElement& inv = *other.find(l);
          if (inv.op != OpKind::Invoke || !inv.target || *inv.target != svc) continue;
          for (size_t i = 0; i < inv.params.size() && i < e.params.size(); ++i)
            if (inv.params[i].value &&
                inv.params[i].value->kind == SimpleOperand::Kind::Var)
              f.use_vars.push_back({other.name, inv.params[i].value->name});
        }
      break;
    }
    default:
      break;
  }
  return f;
}

}  // namespace

std::set<std::string> oracle_slice(const LogicModel& model,
                                   const std::set<std::string>& trace_vars) {
  std::map<std::string, Facts> facts;
  std::map<std::string, std::string> guard;  // child -> conditional parent
  for (const auto& svc : model.services)
    for (const auto& local : svc.order) {
      const LogicElement& e = *svc.find(local);
      facts.emplace(svc.name + "." + local, facts_of(model, e));
      for (const auto& child : e.children)
        guard[svc.name + "." + child] = svc.name + "." + local;
    }

  std::set<std::string> slice;
  for (const auto& [q, f] : facts)
    for (const auto& dv : f.def_vars)
      if (trace_vars.count(dv.second)) slice.insert(q);

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& q : std::set<std::string>(slice)) {
      const Facts& f = facts.at(q);
      for (const auto& uv : f.use_vars)
        for (const auto& [q2, f2] : facts)
          for (const auto& dv : f2.def_vars)
            if (dv == uv && slice.insert(q2).second) changed = true;
      for (const auto& ud : f.use_db)
        for (const auto& [q2, f2] : facts)
          for (const auto& dd : f2.def_db)
            if (dd == ud && slice.insert(q2).second) changed = true;
      auto it = guard.find(q);
      if (it != guard.end() && slice.insert(it->second).second) changed = true;
    }
  }
  return slice;
}

}  // namespace blm::test
