#include "blm/contract.hpp"

#include <sstream>

#include "blm/error.hpp"
#include "blm/properties.hpp"

namespace blm {

const char* to_string(Constraint::Kind k) {
  switch (k) {
    case Constraint::Kind::Accessibility: return "accessibility";
    case Constraint::Kind::Computability: return "computability";
    case Constraint::Kind::Traceability: return "traceability";
    case Constraint::Kind::Binding: return "binding";
  }
  return "?";
}

namespace {

std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw Error(ErrorCategory::Parse, "ParseError", msg,
              SourceSpan{"<contract>", line, 1, 1});
}

}  // namespace

Contract load_contract(const std::string& text) {
  Contract c;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  bool versioned = false;
  std::string section;  // current service, empty at top level

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto ws = words(line);
    if (ws.empty()) continue;

    if (!versioned) {
      if (ws.size() != 2 || ws[0] != "contract-version" || ws[1] != "1")
        fail(lineno, "expected 'contract-version 1' header");
      versioned = true;
      continue;
    }

    const std::string& key = ws[0];
    if (key == "contract" && ws.size() == 2) {
      c.name = ws[1];
      section.clear();
    } else if (key == "budget" && ws.size() == 2) {
      long b = 0;
      try {
        b = std::stol(ws[1]);
      } catch (...) {
        fail(lineno, "budget is not a number");
      }
      if (b < 1)
        throw Error(ErrorCategory::Parse, "InvalidBudget",
                    "budget must be at least 1",
                    SourceSpan{"<contract>", lineno, 1, 1});
      c.budget = b;
      section.clear();
    } else if (key == "trace" && ws.size() >= 2) {
      for (size_t i = 1; i < ws.size(); ++i) c.trace_vars.insert(ws[i]);
      section.clear();
    } else if (key == "weight" && ws.size() == 3) {
      long w = 0;
      try {
        w = std::stol(ws[2]);
      } catch (...) {
        fail(lineno, "weight is not a number");
      }
      if (w < 1) fail(lineno, "weights must be at least 1");
      if (ws[1] == "default") {
        c.weights.default_weight = w;
      } else if (ws[1] == "BF") {
        c.weights.overrides[ElementKind::BusinessFunction] = w;
      } else if (ws[1] == "DR") {
        c.weights.overrides[ElementKind::DataRule] = w;
      } else if (ws[1] == "CR") {
        c.weights.overrides[ElementKind::ConditionalRule] = w;
      } else {
        fail(lineno, "unknown weight kind '" + ws[1] + "'");
      }
      section.clear();
    } else if (key == "service" && ws.size() == 2 && !ws[1].empty() &&
               ws[1].back() == ':') {
      section = ws[1].substr(0, ws[1].size() - 1);
      c.af[section];  // a mentioned service has an (initially empty) grant list
    } else if (key == "af" && ws.size() == 2) {
      if (section.empty()) fail(lineno, "'af' outside a service section");
      c.af[section].push_back(ws[1]);
    } else if (key == "binding" && ws.size() == 4 && ws[2] == "->") {
      c.allowed_bindings.emplace_back(ws[1], ws[3]);
      section.clear();
    } else {
      fail(lineno, "unknown directive '" + key + "'");
    }
  }
  if (!versioned) fail(lineno ? lineno : 1, "expected 'contract-version 1' header");
  return c;
}

std::string print_contract(const Contract& c) {
  std::ostringstream out;
  out << "contract-version 1\n";
  if (!c.name.empty()) out << "contract " << c.name << "\n";
  out << "budget " << c.budget << "\n";
  if (c.weights.default_weight != 1)
    out << "weight default " << c.weights.default_weight << "\n";
  for (const auto& [kind, w] : c.weights.overrides)
    out << "weight " << kind_prefix(kind) << " " << w << "\n";
  for (const auto& v : c.trace_vars) out << "trace " << v << "\n";
  for (const auto& [svc, locals] : c.af) {
    out << "service " << svc << ":\n";
    for (const auto& l : locals) out << "  af " << l << "\n";
  }
  for (const auto& [src, dst] : c.allowed_bindings)
    out << "binding " << src << " -> " << dst << "\n";
  return out.str();
}

std::vector<Constraint> analyze_constraints(const Contract& c, const LogicModel& model) {
  std::vector<Constraint> out;
  auto [af, naf] = eval_accessibility(model, c);  // throws UnknownIndex
  for (const auto& svc : model.services)
    for (const auto& local : svc.order) {
      std::string q = svc.name + "." + local;
      if (naf.count(q))
        out.push_back({Constraint::Kind::Accessibility, q,
                       "element is not accessible to integration partners"});
    }
  for (const auto& svc : model.services)
    out.push_back({Constraint::Kind::Computability, svc.name,
                   "service must terminate within budget " + std::to_string(c.budget)});
  for (const auto& v : c.trace_vars)
    out.push_back({Constraint::Kind::Traceability, v,
                   "variable must remain traceable through the flow"});
  for (const auto& [src, dst] : c.allowed_bindings)
    out.push_back({Constraint::Kind::Binding, src + "->" + dst,
                   "binding is permitted by the contract"});
  return out;
}

}  // namespace blm
