#include "support/generators.hpp"

#include <fstream>
#include <sstream>

#include "blm/error.hpp"
#include "blm/properties.hpp"

namespace blm::test {

namespace {

const char* kVars[] = {"v0", "v1", "v2", "v3", "v4", "v5"};
const char* kTables[] = {"t0", "t1"};
const char* kFields[] = {"f0", "f1", "f2", "f3"};
const char* kStrings[] = {"a", "b", "x1"};
const char* kNumbers[] = {"0", "1", "2", "10", "1000"};

struct Gen {
  std::mt19937_64& rng;
  int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }
  bool chance(int percent) { return pick(100) < percent; }
  std::string var() { return kVars[pick(6)]; }
  std::string table() { return kTables[pick(2)]; }
  std::string field() { return kFields[pick(4)]; }

  Literal literal() {
    switch (pick(3)) {
      case 0: return {SemType::String, kStrings[pick(3)]};
      case 1: return {SemType::Double, kNumbers[pick(5)]};
      default: return {SemType::Boolean, pick(2) ? "true" : "false"};
    }
  }

  SimpleOperand value() {
    if (chance(50)) return {SimpleOperand::Kind::Var, var(), {}};
    return {SimpleOperand::Kind::Lit, "", literal()};
  }

  SimpleOperand simple(bool db_ok) {
    int r = pick(db_ok ? 3 : 2);
    if (r == 0) return {SimpleOperand::Kind::Var, var(), {}};
    if (r == 1) return {SimpleOperand::Kind::Lit, "", literal()};
    return {SimpleOperand::Kind::Db, field(), {}};
  }

  Operand operand(bool db_ok) {
    Operand o;
    o.first = simple(db_ok);
    if (chance(20)) {
      // Arithmetic only over vars to keep the attribute text unambiguous.
      o.first = {SimpleOperand::Kind::Var, var(), {}};
      o.arith = pick(2) ? '+' : '-';
      o.second = SimpleOperand{SimpleOperand::Kind::Var, var(), {}};
    }
    return o;
  }

  Condition condition(bool db_ok) {
    Condition c;
    c.lhs = operand(db_ok);
    c.op = static_cast<CmpOp>(pick(6));
    c.rhs = operand(false);
    return c;
  }
};

struct ServiceBuilder {
  ServiceDef svc;
  std::map<std::string, int> counters;

  std::string place(LogicElement e, std::vector<std::string>& block) {
    const std::string prefix = kind_prefix(e.kind);
    int& n = counters[prefix];
    std::string label;
    do {
      ++n;
      label = prefix + std::to_string(n);
    } while (svc.elements.count(label));
    e.index = {svc.name, label};
    svc.order.push_back(label);
    block.push_back(label);
    svc.elements.emplace(label, std::move(e));
    return label;
  }
};

void gen_elements(Gen& g, ServiceBuilder& b, std::vector<std::string>& block, int count,
                  int depth, const std::vector<std::string>& other_services,
                  const std::vector<std::string>& externals) {
  while (count > 0) {
    --count;
    int roll = g.pick(100);
    LogicElement e;
    if (roll < 18) {
      e.op = OpKind::Get;
      int n = 1 + g.pick(2);
      for (int i = 0; i < n; ++i) e.params.push_back({g.var(), SemType::String, {}});
    } else if (roll < 32) {
      e.op = OpKind::Set;
      SimpleOperand v = g.value();
      SemType t = v.kind == SimpleOperand::Kind::Lit ? v.lit.type : SemType::String;
      e.params.push_back({g.var(), t, v});
    } else if (roll < 44) {
      e.op = OpKind::Compute;
      e.params.push_back({g.var(), SemType::Double, {}});
      e.target = "fn" + std::to_string(g.pick(3));
      if (g.chance(50)) {
        SimpleOperand v{SimpleOperand::Kind::Var, g.var(), {}};
        e.params.push_back({v.name, SemType::String, v});
      }
    } else if (roll < 58) {
      e.op = OpKind::Select;
      e.table = g.table();
      int n = 1 + g.pick(2);
      for (int i = 0; i < n; ++i) e.retrieves.push_back(g.field());
      e.conditions.push_back(g.condition(true));
    } else if (roll < 70) {
      e.op = OpKind::Update;
      e.table = g.table();
      Condition assign;
      assign.lhs.first = {SimpleOperand::Kind::Db, g.field(), {}};
      assign.op = CmpOp::Eq;
      assign.rhs = g.operand(false);
      e.assigns.push_back(assign);
      e.conditions.push_back(g.condition(true));
    } else if (roll < 84 && depth < 2) {
      e.op = OpKind::If;
      e.conditions.push_back(g.condition(false));
      e.kind = ElementKind::ConditionalRule;
      int inner = std::min(count, g.pick(3));
      count -= inner;
      // Parent enters document order first; children follow inside it.
      std::vector<std::string> kids;
      std::string label = b.place(std::move(e), block);
      gen_elements(g, b, kids, inner, depth + 1, other_services, externals);
      b.svc.elements.at(label).children = kids;
      continue;
    } else if (roll < 92) {
      e.op = OpKind::Output;
      SimpleOperand v = g.value();
      SemType t = v.kind == SimpleOperand::Kind::Lit ? v.lit.type : SemType::String;
      e.params.push_back({g.var(), t, v});
    } else if (!other_services.empty() || !externals.empty()) {
      e.op = OpKind::Invoke;
      bool ext = other_services.empty() || (!externals.empty() && g.chance(30));
      e.target = ext ? externals[g.pick(static_cast<int>(externals.size()))]
                     : other_services[g.pick(static_cast<int>(other_services.size()))];
      if (g.chance(60)) {
        SimpleOperand v{SimpleOperand::Kind::Var, g.var(), {}};
        e.params.push_back({v.name, SemType::String, v});
      }
    } else {
      e.op = OpKind::Get;
      e.params.push_back({g.var(), SemType::String, {}});
    }
    e.kind = kind_for_op(e.op);
    b.place(std::move(e), block);
  }
}

}  // namespace

LogicModel random_model(std::mt19937_64& rng, int max_elements, bool allow_cycles) {
  Gen g{rng};
  LogicModel model;
  int nsvc = 1 + g.pick(3);
  int budget = 1 + g.pick(max_elements);
  if (g.chance(30)) model.external_services.insert("ext0");
  std::vector<std::string> externals(model.external_services.begin(),
                                     model.external_services.end());

  std::vector<std::string> names;
  for (int i = 0; i < nsvc; ++i) names.push_back("svc" + std::to_string(i));

  for (int i = 0; i < nsvc; ++i) {
    ServiceBuilder b;
    b.svc.name = names[i];
    int share = i + 1 == nsvc ? budget : g.pick(budget + 1);
    budget -= share;
    std::vector<std::string> peers;
    for (int j = 0; j < nsvc; ++j) {
      if (j == i) continue;
      if (!allow_cycles && j < i) continue;  // forward-only keeps the flow acyclic
      peers.push_back(names[j]);
    }
    gen_elements(g, b, b.svc.roots, share, 0, peers, externals);
    model.services.push_back(std::move(b.svc));
  }
  return model;
}

Contract random_contract(std::mt19937_64& rng, const LogicModel& model) {
  Gen g{rng};
  Contract c;
  c.name = "random";
  c.budget = 1 + g.pick(20);
  if (g.chance(30)) c.weights.overrides[ElementKind::DataRule] = 1 + g.pick(3);
  if (g.chance(20)) c.weights.default_weight = 1 + g.pick(2);
  for (const auto& svc : model.services) {
    if (!g.chance(50)) continue;
    auto& grants = c.af[svc.name];
    for (const auto& local : svc.order)
      if (g.chance(40)) grants.push_back(local);
  }
  if (g.chance(60)) c.trace_vars.insert(g.var());
  return c;
}

BlpsDocument random_document(std::mt19937_64& rng) {
  Gen g{rng};
  LogicModel model = random_model(rng, 10, true);
  PropertySets sets;
  for (const auto& svc : model.services)
    for (const auto& local : svc.order) {
      std::string q = svc.name + "." + local;
      if (g.chance(50)) sets.cf.insert(q);
      if (g.chance(30)) sets.tf.insert(q);
      if (g.chance(40))
        sets.af.insert(q);
      else
        sets.naf.insert(q);
    }
  if (model.services.size() > 1 && g.chance(50))
    return generate_integrated_blps(model, sets, "outer");
  return generate_blps(model, sets, model.services[0].name);
}

std::string fixture_path(const std::string& name) {
  return std::string(BLM_FIXTURES_DIR) + "/" + name;
}

std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in) throw Error(ErrorCategory::Io, "IoError", "missing fixture " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace blm::test
