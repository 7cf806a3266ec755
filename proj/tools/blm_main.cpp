#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "blm/audit.hpp"
#include "blm/blps.hpp"
#include "blm/contract.hpp"
#include "blm/error.hpp"
#include "blm/flow.hpp"
#include "blm/integrate.hpp"
#include "blm/parser.hpp"
#include "blm/properties.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitParse = 2;
constexpr int kExitIo = 3;
constexpr int kExitUsage = 4;

int exit_code_for(const blm::Error& e) {
  switch (e.category()) {
    case blm::ErrorCategory::Parse:
    case blm::ErrorCategory::Schema:
    case blm::ErrorCategory::Analysis:
      return kExitParse;
    case blm::ErrorCategory::Io:
      return kExitIo;
    case blm::ErrorCategory::Usage:
      return kExitUsage;
  }
  return kExitUsage;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw blm::Error(blm::ErrorCategory::Io, "IoError", "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw blm::Error(blm::ErrorCategory::Io, "IoError", "cannot write '" + path + "'");
  out << bytes;
  if (!out)
    throw blm::Error(blm::ErrorCategory::Io, "IoError", "cannot write '" + path + "'");
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

blm::LogicModel load_model(const std::string& path) {
  std::string text = read_file(path);
  if (ends_with(path, ".xml")) return blm::to_model(blm::deserialize(text));
  return blm::parse_source(text, path);
}

blm::Contract load_contract_file(const std::string& path) {
  return blm::load_contract(read_file(path));
}

std::string local_list(const blm::LogicModel& model, const std::set<std::string>& set,
                       const std::string& service) {
  std::set<std::string> filtered;
  for (const auto& q : set) {
    auto [svc, local] = blm::split_qualified(q);
    if (svc == service) filtered.insert(q);
  }
  auto ordered = blm::canonical_local_order(model, filtered);
  std::string out;
  for (size_t i = 0; i < ordered.size(); ++i) out += (i ? "," : "") + ordered[i];
  return out;
}

std::string xml_attr_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '"') out += "&quot;";
    else out += c;
  }
  return out;
}

struct AuditSink {
  std::string path;
  std::vector<std::string> inputs;
  std::string operation;

  void flush(int code) const {
    if (path.empty()) return;
    std::string bytes;
    for (const auto& p : inputs) {
      try {
        bytes += read_file(p);
      } catch (const blm::Error&) {
      }
    }
    const char* user = std::getenv("USER");
    blm::AuditRecord rec = blm::make_record(user && *user ? user : "blm", operation,
                                            blm::digest_hex(bytes),
                                            "exit=" + std::to_string(code));
    blm::AuditLog(path).append(rec);
  }
};

// ---------------------------------------------------------------------------

int cmd_parse(const std::string& file) {
  blm::LogicModel model = load_model(file);
  for (const auto& svc : model.services) {
    int bf = 0, dr = 0, cr = 0;
    for (const auto& local : svc.order) {
      switch (svc.find(local)->kind) {
        case blm::ElementKind::BusinessFunction: ++bf; break;
        case blm::ElementKind::DataRule: ++dr; break;
        case blm::ElementKind::ConditionalRule: ++cr; break;
        default: break;
      }
    }
    int total = bf + dr + cr;
    std::cout << svc.name << ": " << total << " elements";
    if (total > 0) {
      std::cout << " (";
      bool first = true;
      if (bf) { std::cout << bf << " BF"; first = false; }
      if (dr) { std::cout << (first ? "" : ", ") << dr << " DR"; first = false; }
      if (cr) { std::cout << (first ? "" : ", ") << cr << " CR"; }
      std::cout << ")";
    }
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_flow(const std::string& file, bool abstract) {
  blm::LogicModel model = load_model(file);
  blm::FlowGraph g = abstract ? blm::abstract_flow(model) : blm::build_flow(model);
  std::cout << blm::emit_productions(g);
  return kExitOk;
}

int cmd_eval(const std::string& file, const std::string& contract_path,
             const std::string& blps_out, const std::string& format) {
  blm::LogicModel model = load_model(file);
  blm::Contract contract;
  if (!contract_path.empty()) contract = load_contract_file(contract_path);

  blm::PropertySets sets;
  try {
    sets = blm::evaluate_all(model, contract);
  } catch (const blm::Error& e) {
    if (e.code() == "UnknownIndex") {
      std::cerr << "error: analysis: " << e.detail() << "\n";
      return kExitViolation;
    }
    throw;
  }

  if (format == "xml") {
    std::cout << "<report>\n";
    for (const auto& svc : model.services) {
      std::cout << "  <service name=\"" << xml_attr_escape(svc.name) << "\">\n";
      std::cout << "    <computability CF=\"" << local_list(model, sets.cf, svc.name)
                << "\"/>\n";
      if (!contract.trace_vars.empty())
        std::cout << "    <traceability TF=\"" << local_list(model, sets.tf, svc.name)
                  << "\"/>\n";
      if (contract.af.count(svc.name))
        std::cout << "    <accessibility AF=\"" << local_list(model, sets.af, svc.name)
                  << "\" NAF=\"" << local_list(model, sets.naf, svc.name) << "\"/>\n";
      std::cout << "  </service>\n";
    }
    std::cout << "  <total-cost value=\"" << sets.total_cost << "\"/>\n";
    std::cout << "</report>\n";
  } else {
    for (const auto& svc : model.services) {
      std::cout << "service " << svc.name << "\n";
      std::cout << "CF=" << local_list(model, sets.cf, svc.name) << "\n";
      if (!contract.trace_vars.empty())
        std::cout << "TF=" << local_list(model, sets.tf, svc.name) << "\n";
      if (contract.af.count(svc.name)) {
        std::cout << "AF=" << local_list(model, sets.af, svc.name) << "\n";
        std::cout << "NAF=" << local_list(model, sets.naf, svc.name) << "\n";
      }
    }
    std::cout << "total_cost=" << sets.total_cost << "\n";
  }

  if (!blps_out.empty()) {
    if (model.services.size() != 1)
      throw blm::Error(blm::ErrorCategory::Usage, "InvalidRequest",
                       "--blps emits single-service documents; use integrate for merged models");
    blm::BlpsDocument doc = blm::generate_blps(model, sets, model.services[0].name);
    write_file(blps_out, blm::serialize(doc));
  }

  std::size_t universe = 0;
  for (const auto& svc : model.services) universe += svc.order.size();
  return sets.cf.size() == universe ? kExitOk : kExitViolation;
}

int cmd_integrate(const std::string& file_a, const std::string& file_b,
                  const std::string& bind_text, const std::string& contract_path,
                  const std::string& outer, const std::string& out_path) {
  blm::BindingSpec spec = blm::parse_binding_spec(bind_text);
  blm::LogicModel a = load_model(file_a);
  blm::LogicModel b = load_model(file_b);
  blm::Contract contract;
  if (!contract_path.empty()) contract = load_contract_file(contract_path);

  blm::IntegrationResult result = blm::integrate(a, b, spec, contract, outer);
  if (!result.violations.empty()) {
    for (const auto& v : result.violations)
      std::cout << "violation: " << blm::to_string(v.kind) << " " << v.subject << ": "
                << v.detail << "\n";
    return kExitViolation;
  }

  blm::BlpsDocument doc = blm::integration_document(result);
  std::cout << "integrated service " << result.outer_name << "\n";
  if (doc.cf) {
    std::string out;
    for (size_t i = 0; i < doc.cf->size(); ++i) out += (i ? "," : "") + (*doc.cf)[i];
    std::cout << "CF=" << out << "\n";
  }
  if (doc.tf) {
    std::string out;
    for (size_t i = 0; i < doc.tf->size(); ++i) out += (i ? "," : "") + (*doc.tf)[i];
    std::cout << "TF=" << out << "\n";
  }
  for (const auto& line : result.rewrite_log) std::cout << "rewrite: " << line << "\n";
  if (!out_path.empty()) write_file(out_path, blm::serialize(doc));
  return kExitOk;
}

int cmd_diff(const std::string& old_path, const std::string& new_path,
             const std::string& contract_path, const std::string& format) {
  blm::LogicModel older = load_model(old_path);
  blm::LogicModel newer = load_model(new_path);
  blm::Contract contract;
  if (!contract_path.empty()) contract = load_contract_file(contract_path);

  blm::ImpactReport report = blm::impact(older, newer, contract);

  auto delta_text = [](const blm::SetDelta& d) {
    if (d.empty()) return std::string("none");
    std::string out;
    bool first = true;
    for (const auto& x : d.entered) {
      out += (first ? "" : " ") + std::string("+") + x;
      first = false;
    }
    for (const auto& x : d.left) {
      out += (first ? "" : " ") + std::string("-") + x;
      first = false;
    }
    return out;
  };
  bool preserved = report.verdict == blm::ImpactReport::Verdict::PropertiesPreserved;
  const char* verdict = preserved ? "PropertiesPreserved" : "PropertiesChanged";

  if (format == "xml") {
    std::cout << "<report>\n";
    for (const auto& q : report.changes.added)
      std::cout << "  <added index=\"" << xml_attr_escape(q) << "\"/>\n";
    for (const auto& q : report.changes.removed)
      std::cout << "  <removed index=\"" << xml_attr_escape(q) << "\"/>\n";
    for (const auto& [q, deltas] : report.changes.modified) {
      std::cout << "  <modified index=\"" << xml_attr_escape(q) << "\">\n";
      for (const auto& d : deltas)
        std::cout << "    <delta detail=\"" << xml_attr_escape(d) << "\"/>\n";
      std::cout << "  </modified>\n";
    }
    std::cout << "  <cf delta=\"" << xml_attr_escape(delta_text(report.cf)) << "\"/>\n";
    std::cout << "  <tf delta=\"" << xml_attr_escape(delta_text(report.tf)) << "\"/>\n";
    std::cout << "  <af delta=\"" << xml_attr_escape(delta_text(report.af)) << "\"/>\n";
    std::cout << "  <naf delta=\"" << xml_attr_escape(delta_text(report.naf)) << "\"/>\n";
    std::cout << "  <verdict value=\"" << verdict << "\"/>\n";
    std::cout << "</report>\n";
  } else {
    if (report.changes.empty()) std::cout << "no changes\n";
    for (const auto& q : report.changes.added) std::cout << "added: " << q << "\n";
    for (const auto& q : report.changes.removed) std::cout << "removed: " << q << "\n";
    for (const auto& [q, deltas] : report.changes.modified) {
      std::cout << "modified: " << q << "\n";
      for (const auto& d : deltas) std::cout << "  " << d << "\n";
    }
    std::cout << "cf delta: " << delta_text(report.cf) << "\n";
    std::cout << "tf delta: " << delta_text(report.tf) << "\n";
    std::cout << "af delta: " << delta_text(report.af) << "\n";
    std::cout << "naf delta: " << delta_text(report.naf) << "\n";
    std::cout << "verdict: " << verdict << "\n";
  }
  return preserved ? kExitOk : kExitViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"business logic model toolchain"};
  app.require_subcommand(1);

  std::string audit_path;
  app.add_option("--audit", audit_path, "append an audit record per invocation");

  std::string parse_file;
  auto* parse = app.add_subcommand("parse", "parse a model and print a summary");
  parse->add_option("file", parse_file)->required();

  std::string flow_file;
  bool flow_abstract = false;
  auto* flow = app.add_subcommand("flow", "print the flow productions");
  flow->add_option("file", flow_file)->required();
  flow->add_flag("--abstract", flow_abstract, "use the operation vocabulary");

  std::string eval_file, eval_contract, eval_blps, eval_format = "text";
  auto* eval = app.add_subcommand("eval", "evaluate the property sets");
  eval->add_option("file", eval_file)->required();
  eval->add_option("--contract", eval_contract);
  eval->add_option("--blps", eval_blps, "write the schema document");
  eval->add_option("--format", eval_format)->check(CLI::IsMember({"text", "xml"}));

  std::string int_a, int_b, int_bind, int_contract, int_name = "integrated", int_out;
  auto* integ = app.add_subcommand("integrate", "integrate two services under a contract");
  integ->add_option("source", int_a)->required();
  integ->add_option("target", int_b)->required();
  integ->add_option("--bind", int_bind)->required();
  integ->add_option("--contract", int_contract);
  integ->add_option("--name", int_name);
  integ->add_option("-o,--out", int_out);

  std::string diff_old, diff_new, diff_contract, diff_format = "text";
  auto* diff = app.add_subcommand("diff", "diff two models and report property impact");
  diff->add_option("old", diff_old)->required();
  diff->add_option("new", diff_new)->required();
  diff->add_option("--contract", diff_contract);
  diff->add_option("--format", diff_format)->check(CLI::IsMember({"text", "xml"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  AuditSink audit{audit_path, {}, ""};
  int code = kExitOk;
  try {
    if (parse->parsed()) {
      audit = {audit_path, {parse_file}, "parse"};
      code = cmd_parse(parse_file);
    } else if (flow->parsed()) {
      audit = {audit_path, {flow_file}, "flow"};
      code = cmd_flow(flow_file, flow_abstract);
    } else if (eval->parsed()) {
      audit = {audit_path, {eval_file, eval_contract}, "eval"};
      code = cmd_eval(eval_file, eval_contract, eval_blps, eval_format);
    } else if (integ->parsed()) {
      audit = {audit_path, {int_a, int_b, int_contract}, "integrate"};
      code = cmd_integrate(int_a, int_b, int_bind, int_contract, int_name, int_out);
    } else if (diff->parsed()) {
      audit = {audit_path, {diff_old, diff_new, diff_contract}, "diff"};
      code = cmd_diff(diff_old, diff_new, diff_contract, diff_format);
    }
  } catch (const blm::Error& e) {
    std::cerr << "error: " << blm::to_string(e.category()) << ": " << e.detail() << "\n";
    code = exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    code = kExitUsage;
  }
  try {
    audit.flush(code);
  } catch (const blm::Error& e) {
    std::cerr << "error: io: " << e.detail() << "\n";
    if (code == kExitOk) code = kExitIo;
  }
  return code;
}
