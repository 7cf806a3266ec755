#include "blm/flow.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "blm/dataflow.hpp"
#include "blm/error.hpp"

namespace blm {

namespace {

bool is_port(const LogicModel& model, const LogicElement& e) {
  if (e.op == OpKind::Receive) return true;
  return !value_inputs_defined(model, e);
}

// Constant initializations carry no operational weight in the abstract
// vocabulary.
bool abstract_elided(const LogicElement& e) {
  if (e.op != OpKind::Set) return false;
  for (const auto& p : e.params)
    if (p.value && p.value->kind == SimpleOperand::Kind::Var) return false;
  return true;
}

}  // namespace

const FlowNode* FlowGraph::find_node(const std::string& key) const {
  auto it = nodes.find(key);
  return it == nodes.end() ? nullptr : &it->second;
}

const FlowNode& FlowGraph::resolve(const std::string& name) const {
  const FlowNode* hit = nullptr;
  for (const auto& [k, n] : nodes) {
    if (n.name != name) continue;
    if (hit)
      throw Error(ErrorCategory::Analysis, "AmbiguousNode",
                  "display name '" + name + "' names more than one node");
    hit = &n;
  }
  if (!hit)
    throw Error(ErrorCategory::Analysis, "NotFound",
                "no node named '" + name + "' in the graph");
  return *hit;
}

const std::vector<std::pair<std::string, std::string>>& FlowGraph::edges() const {
  if (edge_cache_) return *edge_cache_;
  std::vector<std::pair<std::string, std::string>> out;

  // A member continues the chain when something later gives it successors.
  std::set<std::string> continued;
  std::set<std::string> fork_members;
  for (const auto& p : productions) {
    for (const auto& h : p.head) continued.insert(h);
    for (const auto& item : p.successors)
      if (item.fork)
        for (const auto& k : item.keys) fork_members.insert(k);
  }
  for (const auto& [k, n] : nodes)
    if (n.terminal) continued.insert(k);

  for (const auto& p : productions) {
    // Group heads continue their group: sequential groups from the last
    // member, fork groups from every member.
    std::vector<std::string> sources;
    if (p.head.size() == 1) {
      sources = {p.head[0]};
    } else {
      bool fork_join = true;
      for (const auto& h : p.head)
        if (!fork_members.count(h)) fork_join = false;
      if (fork_join)
        sources = p.head;
      else
        sources = {p.head.back()};
    }
    for (const auto& item : p.successors) {
      if (item.fork) {
        for (const auto& src : sources)
          for (const auto& k : item.keys) out.emplace_back(src, k);
        continue;  // fork members rejoin via a group head
      }
      for (const auto& k : item.keys) {
        for (const auto& src : sources) out.emplace_back(src, k);
        if (continued.count(k)) sources = {k};  // dangling ports do not carry the chain
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  edge_cache_ = std::move(out);
  return *edge_cache_;
}

std::vector<std::string> FlowGraph::successors_of(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [a, b] : edges())
    if (a == key) out.push_back(b);
  return out;
}

// ---------------------------------------------------------------------------
// concrete flow

namespace {

struct ConcreteBuilder {
  const LogicModel& model;
  FlowGraph g;
  std::map<std::string, std::string> entry_key;    // service -> key
  std::map<std::string, std::string> product_key;  // service -> key (lazy)

  explicit ConcreteBuilder(const LogicModel& m) : model(m) {}

  std::string entry_for(const std::string& svc_name) {
    auto it = entry_key.find(svc_name);
    if (it != entry_key.end()) return it->second;
    int ordinal = 1;
    for (const auto& s : model.services) {
      if (s.name == svc_name) break;
      ++ordinal;
    }
    std::string name = svc_name + ".BL" + std::to_string(ordinal);
    g.nodes[name] = {name, name, FlowNode::Role::Entry, false, std::nullopt};
    entry_key[svc_name] = name;
    return name;
  }

  std::string product_for(const std::string& svc_name) {
    auto it = product_key.find(svc_name);
    if (it != product_key.end()) return it->second;
    std::string name = svc_name + ".P1";
    g.nodes[name] = {name, name, FlowNode::Role::Product, true, std::nullopt};
    product_key[svc_name] = name;
    return name;
  }

  std::string stub_for(const std::string& svc_name) {
    std::string key = "external:" + svc_name;
    if (!g.nodes.count(key))
      g.nodes[key] = {key, svc_name, FlowNode::Role::ServiceStub, true, std::nullopt};
    return key;
  }

  std::string element_node(const LogicElement& e, bool port) {
    std::string q = e.index.qualified();
    g.nodes[q] = {q, q, port ? FlowNode::Role::Port : FlowNode::Role::Element, false, q};
    return q;
  }

  std::string invoke_successor(const LogicElement& e) {
    const std::string& target = *e.target;
    if (model.find_service(target)) return entry_for(target);
    if (model.external_services.count(target)) return stub_for(target);
    throw Error(ErrorCategory::Analysis, "UnresolvedInvoke",
                "invoke target '" + target + "' from " + e.index.qualified() +
                    " is neither in the model nor declared external");
  }

  // Chains a block's non-port elements; returns the key the block starts at
  // (`natural` when the block contributes nothing).
  std::string chain_block(const ServiceDef& svc, const std::vector<std::string>& labels,
                          const std::string& natural,
                          std::vector<Production>& out) {
    std::vector<const LogicElement*> chain;
    for (const auto& l : labels) {
      const LogicElement& e = *svc.find(l);
      if (is_port(model, e))
        element_node(e, true);
      else
        chain.push_back(&e);
    }
    for (size_t i = 0; i < chain.size(); ++i) {
      const LogicElement& e = *chain[i];
      std::string self = element_node(e, false);
      std::string next = i + 1 < chain.size() ? chain[i + 1]->index.qualified() : natural;
      std::string succ;
      size_t pos = out.size();
      out.push_back({});  // placeholder keeps document order ahead of children
      if (e.op == OpKind::Output) {
        succ = product_for(e.index.service);
      } else if (e.op == OpKind::Invoke) {
        succ = invoke_successor(e);
      } else if (e.op == OpKind::If) {
        succ = chain_block(svc, e.children, next, out);
      } else {
        succ = next;
      }
      // An element chaining straight to a lazily created product must force
      // the node into existence (natural == product key by construction).
      out[pos] = {{self}, {{{succ}, false}}, {}};
      if (e.op != OpKind::Output && e.op != OpKind::Invoke && succ == e.index.service + ".P1")
        product_for(e.index.service);
    }
    return chain.empty() ? natural : chain.front()->index.qualified();
  }

  FlowGraph run() {
    for (const auto& svc : model.services) {
      std::string entry = entry_for(svc.name);
      g.entries.push_back(entry);
      std::vector<Production> body;
      std::string product = svc.name + ".P1";
      std::string first = chain_block(svc, svc.roots, product, body);
      if (first != product) {
        product_for(svc.name);  // referenced by the chain end
        g.productions.push_back({{entry}, {{{first}, false}}, {}});
      } else {
        // A service with nothing to run returns immediately; calls into it
        // must still terminate.
        g.nodes[entry].terminal = true;
      }
      for (auto& p : body) g.productions.push_back(std::move(p));
    }
    return std::move(g);
  }
};

}  // namespace

FlowGraph build_flow(const LogicModel& model) { return ConcreteBuilder(model).run(); }

// ---------------------------------------------------------------------------
// abstract flow

namespace {

struct AbstractBuilder {
  const LogicModel& model;
  FlowGraph g;
  const ServiceDef* svc = nullptr;
  std::map<std::string, int> update_no;  // local label -> per-service ordinal
  std::string ret_key;

  explicit AbstractBuilder(const LogicModel& m) : model(m) {}

  std::string tag_node(const ServiceDef& s, const std::string& tag, bool terminal = false) {
    std::string key = s.name + "#" + tag;
    if (!g.nodes.count(key))
      g.nodes[key] = {key, tag, FlowNode::Role::Tag, terminal, std::nullopt};
    return key;
  }

  std::string entry_node(const ServiceDef& s) {
    std::string key = s.name + "#service";
    if (!g.nodes.count(key))
      g.nodes[key] = {key, s.flow_name(), FlowNode::Role::Entry, false, std::nullopt};
    return key;
  }

  std::string target_entry(const LogicElement& e) {
    const std::string& target = *e.target;
    if (const ServiceDef* t = model.find_service(target)) return entry_node(*t);
    if (model.external_services.count(target)) {
      std::string key = "external:" + target;
      if (!g.nodes.count(key))
        g.nodes[key] = {key, target, FlowNode::Role::ServiceStub, true, std::nullopt};
      return key;
    }
    throw Error(ErrorCategory::Analysis, "UnresolvedInvoke",
                "invoke target '" + target + "' from " + e.index.qualified() +
                    " is neither in the model nor declared external");
  }

  std::string tag_for(const LogicElement& e) const {
    switch (e.op) {
      case OpKind::Get: return "get";
      case OpKind::Set: return "set";
      case OpKind::Compute: return "compute";
      case OpKind::Select: return "r:select";
      case OpKind::Update: return "r:update" + std::to_string(update_no.at(e.index.local));
      case OpKind::If: return "r:cmp";
      case OpKind::Output:
      case OpKind::Invoke: return "store";
      case OpKind::Receive: return "set";
    }
    return "?";
  }

  std::string key_of(const LogicElement& e) { return tag_node(*svc, tag_for(e)); }

  // A segment is a single element or a maximal run of consecutive updates.
  struct Segment {
    std::vector<const LogicElement*> els;
    bool run() const { return els.size() > 1 || els[0]->op == OpKind::Update; }
  };

  std::vector<Segment> segments_of(const std::vector<std::string>& labels) {
    std::vector<const LogicElement*> chain;
    for (const auto& l : labels) {
      const LogicElement& e = *svc->find(l);
      if (is_port(model, e) || abstract_elided(e)) continue;
      chain.push_back(&e);
    }
    std::vector<Segment> out;
    for (size_t i = 0; i < chain.size();) {
      if (chain[i]->op == OpKind::Update) {
        Segment s;
        while (i < chain.size() && chain[i]->op == OpKind::Update) s.els.push_back(chain[i++]);
        out.push_back(std::move(s));
      } else {
        out.push_back({{chain[i++]}});
      }
    }
    return out;
  }

  std::vector<std::string> repr(const Segment& s) {
    std::vector<std::string> out;
    for (const auto* e : s.els) out.push_back(key_of(*e));
    return out;
  }

  // Emits the block's productions; `natural` is where the block falls
  // through to. Returns the block's start representation.
  std::vector<std::string> walk_block(const std::vector<std::string>& labels,
                                      const std::vector<std::string>& natural) {
    auto segs = segments_of(labels);
    if (segs.empty()) return natural;
    for (size_t i = 0; i < segs.size(); ++i) {
      std::vector<std::string> next =
          i + 1 < segs.size() ? repr(segs[i + 1]) : natural;
      const Segment& s = segs[i];
      if (s.run()) {
        // Join production; the run itself is listed by its predecessor.
        if (next.size() == 1 && next[0] == ret_key) {
          std::string store = tag_node(*svc, "store");
          g.productions.push_back({repr(s), {{{store}, false}}, {}});
          g.productions.push_back({{store}, {{{ret_key}, false}}, {}});
        } else {
          g.productions.push_back({repr(s), {{next, false}}, {}});
        }
        continue;
      }
      const LogicElement& e = *s.els[0];
      std::string self = key_of(e);
      if (e.op == OpKind::Output) {
        g.productions.push_back({{self}, {{{ret_key}, false}}, {}});
      } else if (e.op == OpKind::Invoke) {
        g.productions.push_back({{self}, {{{target_entry(e)}, false}}, {}});
      } else if (e.op == OpKind::If) {
        size_t pos = g.productions.size();
        g.productions.push_back({});
        auto child_start = walk_block(e.children, next);
        g.productions[pos] = {{self}, {{child_start, false}}, {}};
      } else {
        g.productions.push_back({{self}, {{next, false}}, {}});
      }
    }
    return repr(segs.front());
  }

  FlowGraph run() {
    for (const auto& service : model.services) {
      svc = &service;
      update_no.clear();
      int n = 0;
      for (const auto& l : service.order)
        if (service.find(l)->op == OpKind::Update) update_no[l] = ++n;

      std::string entry = entry_node(service);
      g.entries.push_back(entry);
      ret_key = tag_node(service, "return", true);

      size_t entry_pos = g.productions.size();
      g.productions.push_back({});
      auto start = walk_block(service.roots, {ret_key});
      bool has_chain = !segments_of(service.roots).empty();

      // Entry successors: dangling ports and the chain start, ordered by the
      // document position of their first contributing element.
      std::vector<std::pair<long, std::string>> ordered;
      long pos = 0;
      bool chain_placed = false;
      for (const auto& l : service.order) {
        const LogicElement& e = *service.find(l);
        ++pos;
        if (is_port(model, e)) {
          if (e.op == OpKind::Output) continue;  // dead value producers vanish
          ordered.emplace_back(pos, tag_node(service, "set"));
        } else if (!abstract_elided(e) && !chain_placed && has_chain) {
          chain_placed = true;
          for (size_t i = 0; i < start.size(); ++i)
            ordered.emplace_back(pos + static_cast<long>(i), start[i]);
        }
      }
      std::stable_sort(ordered.begin(), ordered.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::vector<std::string> entry_succ;
      for (const auto& [_, k] : ordered)
        if (std::find(entry_succ.begin(), entry_succ.end(), k) == entry_succ.end())
          entry_succ.push_back(k);

      if (entry_succ.empty()) {
        g.productions.erase(g.productions.begin() + static_cast<long>(entry_pos));
        g.nodes[entry].terminal = true;  // nothing to run; calls return at once
      } else {
        std::vector<std::pair<std::string, std::string>> bindings;
        collect_bindings(service, bindings);
        g.productions[entry_pos] = {{entry}, {{entry_succ, false}}, bindings};
      }
      // Drop the return node when nothing ended up flowing into it.
      bool ret_used = false;
      for (const auto& p : g.productions) {
        for (const auto& h : p.head) ret_used |= h == ret_key;
        for (const auto& item : p.successors)
          for (const auto& k : item.keys) ret_used |= k == ret_key;
      }
      if (!ret_used) g.nodes.erase(ret_key);
    }
    return std::move(g);
  }

  // A service that receives arguments binds its rewired get to whatever the
  // calling chain produced last before the call.
  void collect_bindings(const ServiceDef& service,
                        std::vector<std::pair<std::string, std::string>>& out) {
    const LogicElement* receive = nullptr;
    for (const auto& l : service.order)
      if (service.find(l)->op == OpKind::Receive) receive = service.find(l);
    if (!receive) return;
    std::set<std::string> received;
    for (const auto& p : receive->params) received.insert(p.name);

    const LogicElement* bound_get = nullptr;
    for (const auto& l : service.order) {
      const LogicElement& e = *service.find(l);
      if (e.op != OpKind::Get) continue;
      for (const auto& p : e.params)
        if (p.value && p.value->kind == SimpleOperand::Kind::Var &&
            received.count(p.value->name))
          bound_get = &e;
      if (bound_get) break;
    }
    if (!bound_get) return;

    for (const auto& other : model.services) {
      if (other.name == service.name) continue;
      const LogicElement* prev = nullptr;
      for (const auto& l : other.order) {
        const LogicElement& e = *other.find(l);
        if (is_port(model, e) || abstract_elided(e)) continue;
        if (e.op == OpKind::Invoke && e.target && *e.target == service.name) {
          std::string src =
              prev ? tag_node(other, tag_in(other, *prev)) : entry_node(other);
          out.emplace_back(tag_node(service, "get"), src);
          return;
        }
        prev = &e;
      }
    }
  }

  std::string tag_in(const ServiceDef& s, const LogicElement& e) const {
    if (e.op != OpKind::Update) return tag_for(e);
    std::map<std::string, int> nums;
    int n = 0;
    for (const auto& l : s.order)
      if (s.find(l)->op == OpKind::Update) nums[l] = ++n;
    return "r:update" + std::to_string(nums.at(e.index.local));
  }
};

}  // namespace

FlowGraph abstract_flow(const LogicModel& model) { return AbstractBuilder(model).run(); }

// ---------------------------------------------------------------------------
// analyses

std::set<std::string> reachable(const FlowGraph& g, const std::string& name) {
  const FlowNode& start = g.resolve(name);
  std::set<std::string> seen_keys;
  std::vector<std::string> work{start.key};
  while (!work.empty()) {
    std::string k = work.back();
    work.pop_back();
    if (!seen_keys.insert(k).second) continue;
    for (const auto& s : g.successors_of(k)) work.push_back(s);
  }
  std::set<std::string> names;
  for (const auto& k : seen_keys) names.insert(g.nodes.at(k).name);
  return names;
}

namespace {

struct PathProbe {
  const FlowGraph& g;
  std::map<std::string, std::vector<std::string>> succ;
  std::set<std::string> on_path;
  bool cycle = false;
  bool dead_end = false;
  long longest = 0;

  explicit PathProbe(const FlowGraph& graph) : g(graph) {
    for (const auto& [a, b] : g.edges()) succ[a].push_back(b);
  }

  void walk(const std::string& k, long depth) {
    longest = std::max(longest, depth);
    auto it = succ.find(k);
    if (it == succ.end() || it->second.empty()) {
      if (!g.nodes.at(k).terminal) dead_end = true;
      return;
    }
    if (!on_path.insert(k).second) return;
    for (const auto& s : it->second) {
      if (on_path.count(s)) {
        cycle = true;
        longest = std::max(longest, depth + 1);
        continue;
      }
      walk(s, depth + 1);
    }
    on_path.erase(k);
  }
};

}  // namespace

PathReport terminal_paths(const FlowGraph& g, const std::string& name, long budget) {
  if (budget < 1)
    throw Error(ErrorCategory::Usage, "InvalidBudget", "budget must be at least 1");
  const FlowNode& start = g.resolve(name);
  PathProbe probe(g);
  probe.walk(start.key, 0);
  PathReport r;
  r.has_cycle = probe.cycle;
  r.max_steps = probe.longest;
  r.terminates = !probe.cycle && !probe.dead_end && probe.longest <= budget;
  return r;
}

// ---------------------------------------------------------------------------
// backward slice

std::set<std::string> backward_slice(const LogicModel& model, const FlowGraph& g,
                                     const std::set<std::string>& trace_vars) {
  (void)g;  // the slice is a model-level closure; the graph carries no extra facts
  if (trace_vars.empty())
    throw Error(ErrorCategory::Usage, "InvalidTraceVars", "trace variable set is empty");

  struct Entry {
    const LogicElement* e;
    DataflowFacts facts;
  };
  std::map<std::string, Entry> facts;                 // qualified -> facts
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> var_defs;
  std::map<std::string, std::vector<std::string>> db_defs;
  std::map<std::string, std::string> parent;          // child -> guarding CR

  for (const auto& svc : model.services) {
    for (const auto& local : svc.order) {
      const LogicElement& e = *svc.find(local);
      std::string q = e.index.qualified();
      Entry entry{&e, element_facts(model, e)};
      for (const auto& dv : entry.facts.defines_vars) var_defs[dv].push_back(q);
      for (const auto& f : entry.facts.defines_db) db_defs[f].push_back(q);
      for (const auto& child : e.children)
        parent[svc.name + "." + child] = q;
      facts.emplace(q, std::move(entry));
    }
  }

  for (const auto& v : trace_vars) {
    bool known = false;
    for (const auto& [q, entry] : facts) {
      for (const auto& dv : entry.facts.defines_vars) known = known || dv.second == v;
      for (const auto& rv : entry.facts.reads_vars) known = known || rv.second == v;
    }
    if (!known)
      throw Error(ErrorCategory::Analysis, "UnknownVariable",
                  "no element defines or reads '" + v + "'");
  }

  std::set<std::string> slice;
  std::vector<std::string> work;
  auto add = [&](const std::string& q) {
    if (slice.insert(q).second) work.push_back(q);
  };
  for (const auto& [q, entry] : facts)
    for (const auto& dv : entry.facts.defines_vars)
      if (trace_vars.count(dv.second)) add(q);

  while (!work.empty()) {
    std::string q = work.back();
    work.pop_back();
    const Entry& entry = facts.at(q);
    for (const auto& rv : entry.facts.reads_vars) {
      auto it = var_defs.find(rv);
      if (it != var_defs.end())
        for (const auto& d : it->second) add(d);
    }
    for (const auto& f : entry.facts.reads_db) {
      auto it = db_defs.find(f);
      if (it != db_defs.end())
        for (const auto& d : it->second) add(d);
    }
    auto p = parent.find(q);
    while (p != parent.end()) {
      add(p->second);
      p = parent.find(p->second);
    }
  }
  return slice;
}

// ---------------------------------------------------------------------------
// notation codec

std::string emit_productions(const FlowGraph& g) {
  std::ostringstream out;
  auto name_of = [&](const std::string& key) { return g.nodes.at(key).name; };
  for (const auto& p : g.productions) {
    if (p.head.size() == 1) {
      out << name_of(p.head[0]);
    } else {
      out << "{";
      for (size_t i = 0; i < p.head.size(); ++i)
        out << (i ? ", " : "") << name_of(p.head[i]);
      out << "}";
    }
    out << " -> {";
    bool first = true;
    for (const auto& item : p.successors) {
      if (!first) out << ", ";
      first = false;
      if (item.fork) {
        out << "[";
        for (size_t i = 0; i < item.keys.size(); ++i)
          out << (i ? ", " : "") << name_of(item.keys[i]);
        out << "]";
      } else {
        for (size_t i = 0; i < item.keys.size(); ++i)
          out << (i ? ", " : "") << name_of(item.keys[i]);
      }
    }
    out << "}";
    for (const auto& [a, b] : p.bindings) out << " " << name_of(a) << "=" << name_of(b);
    out << "\n";
  }
  return out.str();
}

namespace {

bool parsed_terminal(const std::string& name) {
  if (name == "return") return true;
  auto dot = name.rfind('.');
  std::string local = dot == std::string::npos ? name : name.substr(dot + 1);
  if (local.size() < 2 || local[0] != 'P') return false;
  for (size_t i = 1; i < local.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(local[i]))) return false;
  return true;
}

class ProductionParser {
public:
  explicit ProductionParser(const std::string& text) : text_(text) {}

  FlowGraph parse() {
    std::istringstream in(text_);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      line_ = lineno;
      pos_ = 0;
      src_ = line;
      skip_ws();
      if (pos_ >= src_.size()) continue;
      parse_line();
    }
    finish_entries();
    return std::move(g_);
  }

private:
  void parse_line() {
    Production p;
    if (peek() == '{') {
      p.head = parse_name_list('{', '}');
    } else {
      p.head = {node(parse_name())};
    }
    skip_ws();
    if (!eat("->")) fail("expected '->'");
    skip_ws();
    if (peek() != '{') fail("expected '{'");
    ++pos_;
    while (true) {
      skip_ws();
      if (peek() == '[') {
        auto keys = parse_name_list('[', ']');
        p.successors.push_back({keys, true});
      } else {
        p.successors.push_back({{node(parse_name())}, false});
      }
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    if (!eat("}")) fail("expected '}'");
    skip_ws();
    while (pos_ < src_.size()) {
      std::string a = parse_name();
      if (!eat("=")) fail("expected '=' in binding");
      std::string b = parse_name();
      p.bindings.emplace_back(node(a), node(b));
      skip_ws();
    }
    g_.productions.push_back(std::move(p));
  }

  std::vector<std::string> parse_name_list(char open, char close) {
    if (peek() != open) fail(std::string("expected '") + open + "'");
    ++pos_;
    std::vector<std::string> out;
    while (true) {
      skip_ws();
      out.push_back(node(parse_name()));
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      if (peek() == close) {
        ++pos_;
        return out;
      }
      fail(std::string("expected ',' or '") + close + "'");
    }
  }

  std::string parse_name() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '{' ||
          c == '}' || c == '[' || c == ']' || c == '=')
        break;
      if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') break;
      ++pos_;
    }
    if (pos_ == start) fail("expected a node name");
    return src_.substr(start, pos_ - start);
  }

  std::string node(const std::string& name) {
    if (!g_.nodes.count(name))
      g_.nodes[name] = {name, name,
                        parsed_terminal(name) ? FlowNode::Role::Product : FlowNode::Role::Tag,
                        parsed_terminal(name), std::nullopt};
    return name;
  }

  void finish_entries() {
    std::set<std::string> as_successor;
    for (const auto& p : g_.productions)
      for (const auto& item : p.successors)
        for (const auto& k : item.keys) as_successor.insert(k);
    std::set<std::string> seen;
    for (const auto& p : g_.productions)
      for (const auto& h : p.head)
        if (!as_successor.count(h) && seen.insert(h).second) g_.entries.push_back(h);
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  bool eat(const std::string& s) {
    skip_ws();
    if (src_.compare(pos_, s.size(), s) == 0) {
      pos_ += s.size();
      return true;
    }
    return false;
  }
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw Error(ErrorCategory::Parse, "ParseError", msg,
                SourceSpan{"<flow>", line_, static_cast<int>(pos_) + 1, 1});
  }

  const std::string& text_;
  std::string src_;
  size_t pos_ = 0;
  int line_ = 0;
  FlowGraph g_;
};

}  // namespace

FlowGraph parse_flow_productions(const std::string& text) {
  return ProductionParser(text).parse();
}

}  // namespace blm
