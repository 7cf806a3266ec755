#include "blm/audit.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "blm/blps.hpp"
#include "blm/error.hpp"

namespace blm {

namespace {

std::string describe(const SimpleOperand& s) {
  switch (s.kind) {
    case SimpleOperand::Kind::Var: return "$" + s.name;
    case SimpleOperand::Kind::Db: return "db." + s.name;
    case SimpleOperand::Kind::Lit: return s.lit.text;
  }
  return "";
}

std::string describe(const Operand& o) {
  std::string out = describe(o.first);
  if (o.arith) out += std::string(1, *o.arith) + describe(*o.second);
  return out;
}

std::string join(const std::vector<std::string>& xs, const char* sep = ",") {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? sep : "") + xs[i];
  return out;
}

void field_deltas(const LogicElement& a, const LogicElement& b,
                  std::vector<std::string>& out) {
  if (a.op != b.op)
    out.push_back(std::string("operation: ") + to_string(a.op) + " -> " + to_string(b.op));
  if (a.target != b.target)
    out.push_back("target: " + a.target.value_or("<none>") + " -> " +
                  b.target.value_or("<none>"));
  if (a.table != b.table) out.push_back("table: " + a.table + " -> " + b.table);
  if (a.retrieves != b.retrieves)
    out.push_back("retrieves: " + join(a.retrieves) + " -> " + join(b.retrieves));
  if (a.children != b.children)
    out.push_back("children: " + join(a.children) + " -> " + join(b.children));

  size_t np = std::max(a.params.size(), b.params.size());
  for (size_t i = 0; i < np; ++i) {
    if (i >= a.params.size()) {
      out.push_back("params[" + std::to_string(i) + "]: added " + b.params[i].name);
      continue;
    }
    if (i >= b.params.size()) {
      out.push_back("params[" + std::to_string(i) + "]: removed " + a.params[i].name);
      continue;
    }
    const Param& pa = a.params[i];
    const Param& pb = b.params[i];
    if (pa.name != pb.name)
      out.push_back("params[" + std::to_string(i) + "].name: " + pa.name + " -> " + pb.name);
    if (pa.type != pb.type)
      out.push_back(std::string("params[") + std::to_string(i) + "].datatype: " +
                    to_string(pa.type) + " -> " + to_string(pb.type));
    if (pa.value != pb.value)
      out.push_back("params[" + std::to_string(i) + "].value: " +
                    (pa.value ? describe(*pa.value) : "<none>") + " -> " +
                    (pb.value ? describe(*pb.value) : "<none>"));
  }

  auto cond_deltas = [&](const std::vector<Condition>& ca, const std::vector<Condition>& cb,
                         const char* what) {
    size_t nc = std::max(ca.size(), cb.size());
    for (size_t i = 0; i < nc; ++i) {
      if (i >= ca.size() || i >= cb.size()) {
        out.push_back(std::string(what) + "[" + std::to_string(i) + "]: " +
                      (i >= ca.size() ? "added" : "removed"));
        continue;
      }
      const Condition& x = ca[i];
      const Condition& y = cb[i];
      if (describe(x.lhs) != describe(y.lhs))
        out.push_back(std::string(what) + "[" + std::to_string(i) + "].lvar: " +
                      describe(x.lhs) + " -> " + describe(y.lhs));
      if (x.op != y.op)
        out.push_back(std::string(what) + "[" + std::to_string(i) + "].expr: " +
                      cmp_token(x.op) + " -> " + cmp_token(y.op));
      if (describe(x.rhs) != describe(y.rhs))
        out.push_back(std::string(what) + "[" + std::to_string(i) + "].rvar: " +
                      describe(x.rhs) + " -> " + describe(y.rhs));
    }
  };
  cond_deltas(a.conditions, b.conditions, "conditions");
  cond_deltas(a.assigns, b.assigns, "assigns");
}

SetDelta set_delta(const std::set<std::string>& a, const std::set<std::string>& b) {
  SetDelta d;
  for (const auto& x : b)
    if (!a.count(x)) d.entered.insert(x);
  for (const auto& x : a)
    if (!b.count(x)) d.left.insert(x);
  return d;
}

}  // namespace

ChangeSet diff_models(const LogicModel& older, const LogicModel& newer) {
  ChangeSet out;
  std::set<std::string> names;
  for (const auto& s : older.services) names.insert(s.name);
  for (const auto& s : newer.services) names.insert(s.name);
  for (const auto& name : names) {
    const ServiceDef* sa = older.find_service(name);
    const ServiceDef* sb = newer.find_service(name);
    std::set<std::string> locals;
    if (sa)
      for (const auto& l : sa->order) locals.insert(l);
    if (sb)
      for (const auto& l : sb->order) locals.insert(l);
    for (const auto& local : locals) {
      const LogicElement* ea = sa ? sa->find(local) : nullptr;
      const LogicElement* eb = sb ? sb->find(local) : nullptr;
      std::string q = name + "." + local;
      if (ea && !eb) {
        out.removed.insert(q);
      } else if (!ea && eb) {
        out.added.insert(q);
      } else if (ea && eb && !(*ea == *eb)) {
        std::vector<std::string> deltas;
        field_deltas(*ea, *eb, deltas);
        if (!deltas.empty()) out.modified.emplace(q, std::move(deltas));
      }
    }
  }
  return out;
}

ImpactReport impact(const LogicModel& older, const LogicModel& newer,
                    const Contract& contract) {
  ImpactReport r;
  r.changes = diff_models(older, newer);
  PropertySets before = evaluate_all(older, contract);
  PropertySets after = evaluate_all(newer, contract);
  r.cf = set_delta(before.cf, after.cf);
  r.tf = set_delta(before.tf, after.tf);
  r.af = set_delta(before.af, after.af);
  r.naf = set_delta(before.naf, after.naf);
  bool preserved = r.cf.empty() && r.tf.empty() && r.af.empty() && r.naf.empty();
  r.verdict = preserved ? ImpactReport::Verdict::PropertiesPreserved
                        : ImpactReport::Verdict::PropertiesChanged;
  return r;
}

void AuditLog::append(const AuditRecord& record) const {
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  if (!out)
    throw Error(ErrorCategory::Io, "IoError", "cannot open audit log '" + path_ + "'");
  out << record.timestamp << "\t" << record.actor << "\t" << record.operation << "\t"
      << record.digest << "\t" << record.summary << "\n";
  out.flush();
  if (!out)
    throw Error(ErrorCategory::Io, "IoError", "cannot append to audit log '" + path_ + "'");
}

std::vector<AuditRecord> AuditLog::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCategory::Io, "IoError", "cannot read audit log '" + path + "'");
  std::vector<AuditRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    AuditRecord r;
    std::string* fields[5] = {&r.timestamp, &r.actor, &r.operation, &r.digest, &r.summary};
    size_t start = 0;
    for (int i = 0; i < 5; ++i) {
      size_t tab = i < 4 ? line.find('\t', start) : std::string::npos;
      *fields[i] = line.substr(start, tab == std::string::npos ? tab : tab - start);
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    out.push_back(std::move(r));
  }
  return out;
}

AuditRecord make_record(const std::string& actor, const std::string& operation,
                        const std::string& digest, const std::string& summary) {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {buf, actor, operation, digest, summary};
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  std::uint64_t h = fnv1a64(bytes);
  std::ostringstream out;
  out << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) out << ((h >> shift) & 0xF);
  return out.str();
}

std::string model_digest(const LogicModel& model) {
  std::string bytes;
  for (const auto& svc : model.services)
    bytes += serialize(generate_blps(model, PropertySets{}, svc.name));
  return digest_hex(bytes);
}

}  // namespace blm
