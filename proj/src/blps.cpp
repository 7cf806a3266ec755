#include "blm/blps.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <sstream>

#include "blm/error.hpp"

namespace blm {

// ---------------------------------------------------------------------------
// canonical ordering

namespace {

int kind_rank(ElementKind k) {
  switch (k) {
    case ElementKind::BusinessFunction: return 0;
    case ElementKind::DataRule: return 1;
    case ElementKind::ConditionalRule: return 2;
    default: return 3;
  }
}

}  // namespace

std::vector<std::string> canonical_local_order(const LogicModel& model,
                                               const std::set<std::string>& qualified) {
  struct Key {
    int svc_pos;
    int rank;
    std::string local;
  };
  std::vector<std::pair<Key, std::string>> items;
  for (const auto& q : qualified) {
    auto [svc, local] = split_qualified(q);
    int pos = 0;
    for (const auto& s : model.services) {
      if (s.name == svc) break;
      ++pos;
    }
    const LogicElement* e = model.find(q);
    items.push_back({{pos, e ? kind_rank(e->kind) : 3, local}, local});
  }
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.first.svc_pos != b.first.svc_pos) return a.first.svc_pos < b.first.svc_pos;
    if (a.first.rank != b.first.rank) return a.first.rank < b.first.rank;
    return a.first.local < b.first.local;
  });
  std::vector<std::string> out;
  for (auto& [k, local] : items) out.push_back(std::move(local));
  return out;
}

// ---------------------------------------------------------------------------
// document construction

namespace {

std::optional<std::vector<std::string>> property_list(const LogicModel& model,
                                                      const std::set<std::string>& set,
                                                      const std::vector<std::string>& svcs) {
  std::set<std::string> filtered;
  for (const auto& q : set) {
    auto [svc, local] = split_qualified(q);
    if (std::find(svcs.begin(), svcs.end(), svc) != svcs.end()) filtered.insert(q);
  }
  if (filtered.empty()) return std::nullopt;
  return canonical_local_order(model, filtered);
}

BlpsDocument build_document(const LogicModel& model, const PropertySets& sets,
                            const std::string& outer,
                            const std::vector<std::string>& svc_names) {
  BlpsDocument doc;
  doc.name = outer;
  doc.cf = property_list(model, sets.cf, svc_names);
  doc.tf = property_list(model, sets.tf, svc_names);
  if (auto af = property_list(model, sets.af, svc_names)) {
    doc.af = af;
    doc.naf = property_list(model, sets.naf, svc_names);
  }
  for (const auto& n : svc_names) doc.services.push_back(*model.find_service(n));
  return doc;
}

}  // namespace

BlpsDocument generate_blps(const LogicModel& model, const PropertySets& sets,
                           const std::string& service) {
  if (!model.find_service(service))
    throw Error(ErrorCategory::Analysis, "UnknownService",
                "no service '" + service + "' in the model");
  return build_document(model, sets, service, {service});
}

BlpsDocument generate_integrated_blps(const LogicModel& model, const PropertySets& sets,
                                      const std::string& outer_name) {
  std::vector<std::string> names;
  for (const auto& s : model.services) names.push_back(s.name);
  return build_document(model, sets, outer_name, names);
}

// ---------------------------------------------------------------------------
// writer

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

using Attrs = std::vector<std::pair<std::string, std::string>>;

void open_tag(std::ostringstream& out, int depth, const std::string& tag,
              const Attrs& attrs, bool self_close) {
  out << std::string(static_cast<size_t>(depth) * 2, ' ') << "<" << tag;
  for (const auto& [k, v] : attrs) out << " " << k << "=\"" << xml_escape(v) << "\"";
  out << (self_close ? "/>" : ">") << "\n";
}

void close_tag(std::ostringstream& out, int depth, const std::string& tag) {
  out << std::string(static_cast<size_t>(depth) * 2, ' ') << "</" << tag << ">\n";
}

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + xs[i];
  return out;
}

std::string simple_text(const SimpleOperand& s) {
  switch (s.kind) {
    case SimpleOperand::Kind::Var: return "$" + s.name;
    case SimpleOperand::Kind::Db: return "db." + s.name;
    case SimpleOperand::Kind::Lit: return s.lit.text;
  }
  return "";
}

std::string operand_text(const Operand& o) {
  std::string out = simple_text(o.first);
  if (o.arith) out += std::string(1, *o.arith) + simple_text(*o.second);
  return out;
}

void write_conditions(std::ostringstream& out, int depth, const LogicElement& e) {
  if (e.conditions.empty()) return;
  open_tag(out, depth, "conditions", {}, false);
  for (const auto& c : e.conditions)
    open_tag(out, depth + 1, "condition",
             {{"lvar", operand_text(c.lhs)},
              {"expr", cmp_token(c.op)},
              {"rvar", operand_text(c.rhs)}},
             true);
  close_tag(out, depth, "conditions");
}

void write_param(std::ostringstream& out, int depth, const std::string& tag,
                 const Param& p, bool implicit_self_value) {
  Attrs attrs{{"name", p.name}, {"datatype", to_string(p.type)}};
  if (p.value) {
    bool self_ref = p.value->kind == SimpleOperand::Kind::Var && p.value->name == p.name;
    if (!(implicit_self_value && self_ref))
      attrs.emplace_back("value", simple_text(*p.value));
  }
  open_tag(out, depth, tag, attrs, true);
}

void write_element(std::ostringstream& out, int depth, const ServiceDef& svc,
                   const LogicElement& e) {
  switch (e.op) {
    case OpKind::Get: {
      open_tag(out, depth, "function",
               {{"index", e.index.local}, {"name", "get"}, {"type", "input"}},
               e.params.empty());
      for (const auto& p : e.params) write_param(out, depth + 1, "param", p, false);
      if (!e.params.empty()) close_tag(out, depth, "function");
      break;
    }
    case OpKind::Set: {
      open_tag(out, depth, "function",
               {{"index", e.index.local}, {"name", "set"}, {"type", "set"}},
               e.params.empty());
      for (const auto& p : e.params) write_param(out, depth + 1, "param", p, false);
      if (!e.params.empty()) close_tag(out, depth, "function");
      break;
    }
    case OpKind::Output: {
      open_tag(out, depth, "function",
               {{"index", e.index.local}, {"name", "assign"}, {"type", "output"}},
               e.params.empty());
      for (const auto& p : e.params) write_param(out, depth + 1, "param", p, false);
      if (!e.params.empty()) close_tag(out, depth, "function");
      break;
    }
    case OpKind::Compute: {
      Attrs attrs{{"index", e.index.local}, {"name", "compute"}, {"type", "compute"}};
      if (!e.params.empty()) {
        attrs.emplace_back("datatype", to_string(e.params[0].type));
        attrs.emplace_back("store-result", e.params[0].name);
      }
      if (e.target) attrs.emplace_back("target-function", *e.target);
      bool empty = e.params.size() <= 1;
      open_tag(out, depth, "function", attrs, empty);
      for (size_t i = 1; i < e.params.size(); ++i)
        write_param(out, depth + 1, "arg", e.params[i], true);
      if (!empty) close_tag(out, depth, "function");
      break;
    }
    case OpKind::Invoke: {
      Attrs attrs{{"index", e.index.local}, {"name", "call"}, {"type", "invoke"}};
      if (e.target) attrs.emplace_back("target-service", *e.target);
      open_tag(out, depth, "function", attrs, e.params.empty());
      for (const auto& p : e.params) write_param(out, depth + 1, "arg", p, true);
      if (!e.params.empty()) close_tag(out, depth, "function");
      break;
    }
    case OpKind::Receive: {
      open_tag(out, depth, "function",
               {{"index", e.index.local}, {"name", "receive"}, {"type", "receive"}},
               e.params.empty());
      for (const auto& p : e.params) write_param(out, depth + 1, "arg", p, true);
      if (!e.params.empty()) close_tag(out, depth, "function");
      break;
    }
    case OpKind::Select: {
      open_tag(out, depth, "rule",
               {{"index", e.index.local},
                {"name", "select"},
                {"type", "data manipulation"},
                {"dbname", e.table}},
               false);
      write_conditions(out, depth + 1, e);
      for (const auto& r : e.retrieves)
        open_tag(out, depth + 1, "retrieve", {{"var", r}}, true);
      close_tag(out, depth, "rule");
      break;
    }
    case OpKind::Update: {
      open_tag(out, depth, "rule",
               {{"index", e.index.local},
                {"name", "update"},
                {"type", "data manipulation"},
                {"dbname", e.table}},
               false);
      write_conditions(out, depth + 1, e);
      for (const auto& a : e.assigns)
        open_tag(out, depth + 1, "assign",
                 {{"lvar", a.lhs.first.name},
                  {"expr", cmp_token(a.op)},
                  {"rvar", operand_text(a.rhs)}},
                 true);
      close_tag(out, depth, "rule");
      break;
    }
    case OpKind::If: {
      open_tag(out, depth, "rule",
               {{"index", e.index.local}, {"name", "if"}, {"type", "conditional"}},
               false);
      write_conditions(out, depth + 1, e);
      for (const auto& child : e.children)
        write_element(out, depth + 1, svc, *svc.find(child));
      close_tag(out, depth, "rule");
      break;
    }
  }
}

void write_service_body(std::ostringstream& out, int depth, const ServiceDef& svc) {
  for (const auto& root : svc.roots) write_element(out, depth, svc, *svc.find(root));
}

}  // namespace

std::string serialize(const BlpsDocument& doc) {
  std::ostringstream out;
  bool nested = doc.integrated();
  Attrs outer_attrs{{"name", doc.name}};
  if (!nested && doc.services[0].flow_alias)
    outer_attrs.emplace_back("flow-name", *doc.services[0].flow_alias);
  open_tag(out, 0, "service", outer_attrs, false);

  bool empty_property = !doc.cf && !doc.tf && !doc.af;
  open_tag(out, 1, "property", {}, empty_property);
  if (!empty_property) {
    if (doc.cf) open_tag(out, 2, "computability", {{"CF", join(*doc.cf)}}, true);
    if (doc.tf) open_tag(out, 2, "traceability", {{"TF", join(*doc.tf)}}, true);
    if (doc.af) {
      Attrs attrs{{"AF", join(*doc.af)}};
      attrs.emplace_back("NAF", doc.naf ? join(*doc.naf) : "");
      open_tag(out, 2, "accessibility", attrs, true);
    }
    close_tag(out, 1, "property");
  }

  if (nested) {
    for (const auto& svc : doc.services) {
      Attrs attrs{{"name", svc.name}};
      if (svc.flow_alias) attrs.emplace_back("flow-name", *svc.flow_alias);
      open_tag(out, 1, "service", attrs, svc.roots.empty());
      write_service_body(out, 2, svc);
      if (!svc.roots.empty()) close_tag(out, 1, "service");
    }
  } else {
    write_service_body(out, 1, doc.services[0]);
  }
  close_tag(out, 0, "service");
  return out.str();
}

// ---------------------------------------------------------------------------
// reader

namespace {

struct XmlAttr {
  std::string name;
  std::string value;
};

struct XmlElement {
  std::string tag;
  std::vector<XmlAttr> attrs;
  std::vector<XmlElement> children;
  int line = 1;

  const std::string* attr(const std::string& name) const {
    for (const auto& a : attrs)
      if (a.name == name) return &a.value;
    return nullptr;
  }
};

class XmlReader {
public:
  explicit XmlReader(const std::string& text) : src_(text) {}

  XmlElement parse() {
    skip_ws();
    XmlElement root = parse_element();
    skip_ws();
    if (pos_ < src_.size()) fail("trailing content after the document element");
    return root;
  }

private:
  XmlElement parse_element() {
    if (peek() != '<') fail("expected '<'");
    XmlElement e;
    e.line = line_;
    advance();
    e.tag = read_name();
    while (true) {
      skip_ws();
      char c = peek();
      if (c == '/') {
        advance();
        if (peek() != '>') fail("expected '>'");
        advance();
        return e;
      }
      if (c == '>') {
        advance();
        break;
      }
      XmlAttr a;
      a.name = read_name();
      skip_ws();
      if (peek() != '=') fail("expected '=' after attribute name");
      advance();
      skip_ws();
      if (peek() != '"') fail("expected '\"'");
      advance();
      std::string raw;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        raw += src_[pos_];
        advance();
      }
      if (pos_ >= src_.size()) fail("unterminated attribute value");
      advance();
      a.value = unescape(raw);
      e.attrs.push_back(std::move(a));
    }
    // children until the matching close tag
    while (true) {
      skip_ws();
      if (pos_ >= src_.size()) fail("unexpected end of document inside <" + e.tag + ">");
      if (peek() == '<' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        advance();
        advance();
        std::string close = read_name();
        if (close != e.tag) fail("mismatched closing tag </" + close + ">");
        skip_ws();
        if (peek() != '>') fail("expected '>'");
        advance();
        return e;
      }
      if (peek() != '<') fail("text content is not part of the schema");
      e.children.push_back(parse_element());
    }
  }

  std::string read_name() {
    size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':' || c == '_')
        advance();
      else
        break;
    }
    if (start == pos_) fail("expected a name");
    return src_.substr(start, pos_ - start);
  }

  std::string unescape(const std::string& s) {
    std::string out;
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '&') {
        out += s[i];
        continue;
      }
      if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 4; }
      else if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 3; }
      else if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 3; }
      else if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 5; }
      else fail("unknown entity reference");
    }
    return out;
  }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
      advance();
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCategory::Parse, "XmlError",
                msg + " (line " + std::to_string(line_) + ", column " +
                    std::to_string(col_) + ")",
                SourceSpan{"<blps>", line_, col_, 1});
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

[[noreturn]] void schema_fail(const XmlElement& e, const std::string& reason) {
  throw Error(ErrorCategory::Schema, "SchemaError",
              "<" + e.tag + "> " + reason + " (line " + std::to_string(e.line) + ")");
}

void check_attrs(const XmlElement& e, const std::vector<std::string>& allowed) {
  for (const auto& a : e.attrs)
    if (std::find(allowed.begin(), allowed.end(), a.name) == allowed.end())
      schema_fail(e, "has unknown attribute '" + a.name + "'");
}

std::string require_attr(const XmlElement& e, const std::string& name) {
  const std::string* v = e.attr(name);
  if (!v) schema_fail(e, "is missing attribute '" + name + "'");
  return *v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

SemType parse_type(const XmlElement& e, const std::string& t) {
  if (t == "string") return SemType::String;
  if (t == "double") return SemType::Double;
  if (t == "boolean") return SemType::Boolean;
  schema_fail(e, "has unknown datatype '" + t + "'");
}

Literal infer_literal(const std::string& text) {
  if (text == "true" || text == "false") return {SemType::Boolean, text};
  if (!text.empty()) {
    char* end = nullptr;
    std::strtod(text.c_str(), &end);
    if (end && *end == '\0') return {SemType::Double, text};
  }
  return {SemType::String, text};
}

SimpleOperand parse_simple(const std::string& text) {
  if (!text.empty() && text[0] == '$')
    return {SimpleOperand::Kind::Var, text.substr(1), {}};
  if (text.rfind("db.", 0) == 0)
    return {SimpleOperand::Kind::Db, text.substr(3), {}};
  return {SimpleOperand::Kind::Lit, "", infer_literal(text)};
}

Operand parse_operand(const std::string& text) {
  // Split on the first +/- that separates two simple operands; literals
  // never start with a sign in this dialect.
  for (size_t i = 1; i < text.size(); ++i) {
    if (text[i] == '+' || text[i] == '-') {
      Operand o;
      o.first = parse_simple(text.substr(0, i));
      o.arith = text[i];
      o.second = parse_simple(text.substr(i + 1));
      return o;
    }
  }
  return {parse_simple(text), std::nullopt, std::nullopt};
}

Param parse_param(const XmlElement& x, bool implicit_self_value) {
  check_attrs(x, {"name", "datatype", "value"});
  Param p;
  p.name = require_attr(x, "name");
  p.type = parse_type(x, require_attr(x, "datatype"));
  if (const std::string* v = x.attr("value")) {
    SimpleOperand s = parse_simple(*v);
    if (s.kind == SimpleOperand::Kind::Db) schema_fail(x, "has a db-field value");
    if (s.kind == SimpleOperand::Kind::Lit) s.lit.type = p.type;
    p.value = s;
  } else if (implicit_self_value) {
    p.value = SimpleOperand{SimpleOperand::Kind::Var, p.name, {}};
  }
  return p;
}

Condition parse_condition_tag(const XmlElement& x) {
  check_attrs(x, {"lvar", "expr", "rvar"});
  Condition c;
  c.lhs = parse_operand(require_attr(x, "lvar"));
  std::string expr = require_attr(x, "expr");
  if (expr == "eq") c.op = CmpOp::Eq;
  else if (expr == "ne") c.op = CmpOp::Ne;
  else if (expr == "gt") c.op = CmpOp::Gt;
  else if (expr == "lt") c.op = CmpOp::Lt;
  else if (expr == "ge") c.op = CmpOp::Ge;
  else if (expr == "le") c.op = CmpOp::Le;
  else schema_fail(x, "has unknown comparison '" + expr + "'");
  c.rhs = parse_operand(require_attr(x, "rvar"));
  return c;
}

struct BodyReader {
  ServiceDef svc;
  std::map<std::string, int> auto_counters;

  std::string place(LogicElement e, const std::string& index_attr) {
    std::string local = index_attr;
    if (local.empty()) {
      const std::string prefix = kind_prefix(e.kind);
      int& n = auto_counters[prefix];
      do {
        ++n;
        local = prefix + std::to_string(n);
      } while (svc.elements.count(local));
    }
    if (svc.elements.count(local))
      throw Error(ErrorCategory::Schema, "SchemaError",
                  "duplicate index '" + svc.name + "." + local + "' in the body");
    e.index = {svc.name, local};
    svc.order.push_back(local);
    svc.elements.emplace(local, std::move(e));
    return local;
  }

  std::string read_element(const XmlElement& x);

  void read_children(const XmlElement& x, std::vector<std::string>& out) {
    for (const auto& child : x.children) out.push_back(read_element(child));
  }
};

std::string BodyReader::read_element(const XmlElement& x) {
  if (x.tag == "function") {
    check_attrs(x, {"index", "name", "type", "datatype", "store-result",
                    "target-function", "target-service"});
    std::string type = require_attr(x, "type");
    LogicElement e;
    if (type == "input") e.op = OpKind::Get;
    else if (type == "set") e.op = OpKind::Set;
    else if (type == "output") e.op = OpKind::Output;
    else if (type == "compute") e.op = OpKind::Compute;
    else if (type == "invoke") e.op = OpKind::Invoke;
    else if (type == "receive") e.op = OpKind::Receive;
    else schema_fail(x, "has unknown function type '" + type + "'");
    e.kind = kind_for_op(e.op);

    if (e.op == OpKind::Compute) {
      Param result;
      result.name = require_attr(x, "store-result");
      result.type = parse_type(x, require_attr(x, "datatype"));
      e.params.push_back(result);
      if (const std::string* t = x.attr("target-function")) e.target = *t;
      for (const auto& child : x.children) {
        if (child.tag != "arg") schema_fail(child, "is not allowed inside a compute");
        e.params.push_back(parse_param(child, true));
      }
    } else if (e.op == OpKind::Invoke) {
      e.target = require_attr(x, "target-service");
      for (const auto& child : x.children) {
        if (child.tag != "arg") schema_fail(child, "is not allowed inside an invoke");
        e.params.push_back(parse_param(child, true));
      }
    } else if (e.op == OpKind::Receive) {
      for (const auto& child : x.children) {
        if (child.tag != "arg") schema_fail(child, "is not allowed inside a receive");
        e.params.push_back(parse_param(child, true));
      }
    } else {
      for (const auto& child : x.children) {
        if (child.tag != "param") schema_fail(child, "is not allowed inside a function");
        e.params.push_back(parse_param(child, false));
      }
    }
    const std::string* idx = x.attr("index");
    return place(std::move(e), idx ? *idx : "");
  }

  if (x.tag == "rule") {
    check_attrs(x, {"index", "name", "type", "dbname"});
    std::string type = require_attr(x, "type");
    LogicElement e;
    std::vector<const XmlElement*> nested;
    if (type == "conditional") {
      e.op = OpKind::If;
      e.kind = ElementKind::ConditionalRule;
      for (const auto& child : x.children) {
        if (child.tag == "conditions") {
          for (const auto& c : child.children) {
            if (c.tag != "condition") schema_fail(c, "is not a condition");
            e.conditions.push_back(parse_condition_tag(c));
          }
        } else if (child.tag == "function" || child.tag == "rule") {
          nested.push_back(&child);
        } else {
          schema_fail(child, "is not allowed inside a conditional rule");
        }
      }
    } else if (type == "data manipulation") {
      std::string name = require_attr(x, "name");
      if (name == "select") e.op = OpKind::Select;
      else if (name == "update") e.op = OpKind::Update;
      else schema_fail(x, "has unknown data rule name '" + name + "'");
      e.kind = ElementKind::DataRule;
      e.table = require_attr(x, "dbname");
      for (const auto& child : x.children) {
        if (child.tag == "conditions") {
          for (const auto& c : child.children) {
            if (c.tag != "condition") schema_fail(c, "is not a condition");
            e.conditions.push_back(parse_condition_tag(c));
          }
        } else if (child.tag == "retrieve" && e.op == OpKind::Select) {
          check_attrs(child, {"var"});
          e.retrieves.push_back(require_attr(child, "var"));
        } else if (child.tag == "assign" && e.op == OpKind::Update) {
          Condition a = parse_condition_tag(child);
          a.lhs.first.kind = SimpleOperand::Kind::Db;
          a.lhs.first.name = require_attr(child, "lvar");
          a.lhs.first.lit = {};
          e.assigns.push_back(a);
        } else {
          schema_fail(child, "is not allowed inside a data rule");
        }
      }
    } else {
      schema_fail(x, "has unknown rule type '" + type + "'");
    }
    const std::string* idx = x.attr("index");
    std::string local = place(std::move(e), idx ? *idx : "");
    std::vector<std::string> children;
    for (const XmlElement* n : nested) children.push_back(read_element(*n));
    svc.elements.at(local).children = children;
    return local;
  }

  schema_fail(x, "is not a schema element");
}

ServiceDef read_service_body(const XmlElement& x) {
  BodyReader reader;
  reader.svc.name = require_attr(x, "name");
  if (const std::string* alias = x.attr("flow-name")) reader.svc.flow_alias = *alias;
  for (const auto& child : x.children) reader.svc.roots.push_back(reader.read_element(child));
  return std::move(reader.svc);
}

void check_property_indices(const BlpsDocument& doc,
                            const std::vector<std::string>& list,
                            const std::string& which) {
  // Every listed local index must occur in some body, as many times as listed.
  std::map<std::string, int> available;
  for (const auto& svc : doc.services)
    for (const auto& local : svc.order) ++available[local];
  std::map<std::string, int> wanted;
  for (const auto& l : list) ++wanted[l];
  for (const auto& [local, n] : wanted)
    if (available[local] < n)
      throw Error(ErrorCategory::Schema, "DanglingIndex",
                  which + " lists '" + local + "' which the body does not define");
}

}  // namespace

BlpsDocument deserialize(const std::string& text) {
  XmlElement root = XmlReader(text).parse();
  if (root.tag != "service")
    throw Error(ErrorCategory::Schema, "SchemaError", "document element must be <service>");
  check_attrs(root, {"name", "flow-name"});

  BlpsDocument doc;
  doc.name = require_attr(root, "name");

  bool saw_property = false;
  std::vector<const XmlElement*> nested_services;
  std::vector<const XmlElement*> body;
  for (const auto& child : root.children) {
    if (child.tag == "property") {
      if (saw_property) schema_fail(child, "appears twice");
      saw_property = true;
      check_attrs(child, {});
      for (const auto& p : child.children) {
        if (p.tag == "computability") {
          check_attrs(p, {"CF"});
          doc.cf = split_list(require_attr(p, "CF"));
        } else if (p.tag == "traceability") {
          check_attrs(p, {"TF"});
          doc.tf = split_list(require_attr(p, "TF"));
        } else if (p.tag == "accessibility") {
          check_attrs(p, {"AF", "NAF"});
          doc.af = split_list(require_attr(p, "AF"));
          if (const std::string* naf = p.attr("NAF")) doc.naf = split_list(*naf);
        } else {
          schema_fail(p, "is not a property");
        }
      }
    } else if (child.tag == "service") {
      check_attrs(child, {"name", "flow-name"});
      nested_services.push_back(&child);
    } else {
      body.push_back(&child);
    }
  }
  if (!saw_property)
    throw Error(ErrorCategory::Schema, "SchemaError", "document has no <property> block");

  if (!nested_services.empty()) {
    if (!body.empty())
      throw Error(ErrorCategory::Schema, "SchemaError",
                  "integrated documents may not carry loose elements");
    for (const XmlElement* s : nested_services) doc.services.push_back(read_service_body(*s));
  } else {
    XmlElement leaf = root;
    leaf.children.clear();
    for (const XmlElement* b : body) leaf.children.push_back(*b);
    doc.services.push_back(read_service_body(leaf));
  }

  if (doc.cf) check_property_indices(doc, *doc.cf, "CF");
  if (doc.tf) check_property_indices(doc, *doc.tf, "TF");
  if (doc.af) check_property_indices(doc, *doc.af, "AF");
  if (doc.naf) check_property_indices(doc, *doc.naf, "NAF");
  return doc;
}

LogicModel to_model(const BlpsDocument& doc) {
  LogicModel model;
  for (const auto& svc : doc.services) model.services.push_back(svc);
  for (const auto& svc : model.services)
    for (const auto& local : svc.order) {
      const LogicElement& e = *svc.find(local);
      if (e.op == OpKind::Invoke && e.target && !model.find_service(*e.target))
        model.external_services.insert(*e.target);
    }
  return model;
}

}  // namespace blm
