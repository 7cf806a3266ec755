#include "blm/parser.hpp"

#include <cctype>
#include <cstring>
#include <sstream>

#include "blm/error.hpp"

namespace blm {

namespace {

enum class Tok { Ident, String, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

class Lexer {
public:
  Lexer(const std::string& text, const std::string& file) : src_(text), file_(file) {}

  Token next() {
    skip_ws();
    Token t;
    t.span = {file_, line_, col_, 1};
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        advance();
      t.kind = Tok::Ident;
      t.text = src_.substr(start, pos_ - start);
      t.span.length = static_cast<int>(t.text.size());
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t start = pos_;
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) ||
                                    src_[pos_] == '.'))
        advance();
      t.kind = Tok::Number;
      t.text = src_.substr(start, pos_ - start);
      t.span.length = static_cast<int>(t.text.size());
      return t;
    }
    if (c == '"') {
      advance();
      std::string s;
      while (pos_ < src_.size() && src_[pos_] != '"') {
        s += src_[pos_];
        advance();
      }
      if (pos_ >= src_.size())
        throw Error(ErrorCategory::Parse, "ParseError", "unterminated string literal", t.span);
      advance();
      t.kind = Tok::String;
      t.text = s;
      t.span.length = static_cast<int>(s.size()) + 2;
      return t;
    }
    // two-char comparison operators first
    static const char* two[] = {"==", "!=", ">=", "<=", "->"};
    for (const char* op : two) {
      if (src_.compare(pos_, 2, op) == 0) {
        advance();
        advance();
        t.kind = Tok::Punct;
        t.text = op;
        t.span.length = 2;
        return t;
      }
    }
    advance();
    t.kind = Tok::Punct;
    t.text = std::string(1, c);
    return t;
  }

private:
  void skip_ws() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::string file_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_label(const std::string& s) {
  static const char* prefixes[] = {"BF", "DR", "CR", "BL", "P"};
  for (const char* p : prefixes) {
    size_t n = std::strlen(p);
    if (s.size() > n && s.compare(0, n, p) == 0) {
      bool rest_ok = true;
      for (size_t i = n; i < s.size(); ++i)
        if (!std::isalnum(static_cast<unsigned char>(s[i]))) rest_ok = false;
      if (rest_ok) return true;
    }
  }
  return false;
}

class Parser {
public:
  Parser(const std::string& text, const std::string& file) : lex_(text, file) {
    cur_ = lex_.next();
    ahead_ = lex_.next();
  }

  LogicModel parse_file() {
    LogicModel model;
    while (cur_.kind != Tok::End) {
      if (accept_ident("external")) {
        expect_ident("service");
        model.external_services.insert(expect(Tok::Ident).text);
        accept_punct(";");
      } else if (check_ident("service")) {
        model.services.push_back(parse_service());
      } else {
        fail("expected 'service' or 'external'");
      }
    }
    return model;
  }

private:
  ServiceDef parse_service() {
    expect_ident("service");
    svc_ = ServiceDef{};
    counters_.clear();
    svc_.name = expect(Tok::Ident).text;
    if (accept_ident("as")) svc_.flow_alias = expect(Tok::String).text;
    expect_punct("{");
    svc_.roots = parse_block();
    expect_punct("}");
    return std::move(svc_);
  }

  // Parses statements until '}' and returns their labels in order.
  std::vector<std::string> parse_block() {
    std::vector<std::string> labels;
    while (!check_punct("}")) {
      if (cur_.kind == Tok::End) fail("unexpected end of input inside a block");
      labels.push_back(parse_stmt());
    }
    return labels;
  }

  std::string parse_stmt() {
    std::string label;
    SourceSpan at = cur_.span;
    if (cur_.kind == Tok::Ident && is_label(cur_.text) && ahead_.kind == Tok::Punct &&
        ahead_.text == ":") {
      label = cur_.text;
      bump();
      bump();
    }
    if (cur_.kind != Tok::Ident) fail("expected a statement");
    std::string op = cur_.text;
    ElementKind kind;
    if (op == "select" || op == "update") kind = ElementKind::DataRule;
    else if (op == "if") kind = ElementKind::ConditionalRule;
    else if (op == "get" || op == "set" || op == "compute" || op == "output" ||
             op == "invoke" || op == "receive")
      kind = ElementKind::BusinessFunction;
    else
      throw Error(ErrorCategory::Parse, "UnknownStatement",
                  "'" + op + "' is not a statement", cur_.span);

    // Reserve the slot up front so parents precede their children in
    // document order.
    if (label.empty()) label = auto_label(kind);
    if (svc_.elements.count(label))
      throw Error(ErrorCategory::Parse, "DuplicateLabel",
                  "duplicate label '" + svc_.name + "." + label + "'", at);
    svc_.order.push_back(label);
    svc_.elements.emplace(label, LogicElement{});

    LogicElement e;
    if (op == "get") e = parse_get();
    else if (op == "set") e = parse_set();
    else if (op == "compute") e = parse_compute();
    else if (op == "select") e = parse_select();
    else if (op == "update") e = parse_update();
    else if (op == "if") e = parse_if();
    else if (op == "output") e = parse_output();
    else if (op == "invoke") e = parse_invoke();
    else e = parse_receive();
    accept_punct(";");

    e.index = {svc_.name, label};
    svc_.elements[label] = std::move(e);
    return label;
  }

  std::string auto_label(ElementKind k) {
    const std::string prefix = kind_prefix(k);
    int& n = counters_[prefix];
    std::string label;
    do {
      ++n;
      label = prefix + std::to_string(n);
    } while (svc_.elements.count(label));
    return label;
  }

  LogicElement parse_get() {
    expect_ident("get");
    LogicElement e = make(OpKind::Get);
    do e.params.push_back(parse_vardecl());
    while (accept_punct(","));
    return e;
  }

  LogicElement parse_receive() {
    expect_ident("receive");
    LogicElement e = make(OpKind::Receive);
    do e.params.push_back(parse_vardecl());
    while (accept_punct(","));
    return e;
  }

  LogicElement parse_set() {
    expect_ident("set");
    LogicElement e = make(OpKind::Set);
    Param p = parse_vardecl_defaulted();
    expect_punct("=");
    p.value = parse_simple_value();
    if (!p.explicit_typed && p.value->kind == SimpleOperand::Kind::Lit)
      p.type = p.value->lit.type;
    e.params.push_back(p.param());
    return e;
  }

  LogicElement parse_output() {
    expect_ident("output");
    LogicElement e = make(OpKind::Output);
    Param p = parse_vardecl_defaulted();
    expect_punct("=");
    p.value = parse_simple_value();
    if (!p.explicit_typed && p.value->kind == SimpleOperand::Kind::Lit)
      p.type = p.value->lit.type;
    e.params.push_back(p.param());
    return e;
  }

  LogicElement parse_compute() {
    expect_ident("compute");
    LogicElement e = make(OpKind::Compute);
    Param result = parse_vardecl_defaulted();
    expect_punct("=");
    e.target = expect(Tok::Ident).text;
    expect_punct("(");
    e.params.push_back(result.param());
    if (!check_punct(")")) {
      int n = 0;
      do {
        SimpleOperand v = parse_simple_value();
        std::string name = v.kind == SimpleOperand::Kind::Var
                               ? v.name
                               : "arg" + std::to_string(++n);
        e.params.push_back({name, value_type(v), v});
      } while (accept_punct(","));
    }
    expect_punct(")");
    return e;
  }

  LogicElement parse_invoke() {
    expect_ident("invoke");
    LogicElement e = make(OpKind::Invoke);
    e.target = expect(Tok::Ident).text;
    expect_punct("(");
    if (!check_punct(")")) {
      int n = 0;
      do {
        SimpleOperand v = parse_simple_value();
        std::string name = v.kind == SimpleOperand::Kind::Var
                               ? v.name
                               : "arg" + std::to_string(++n);
        e.params.push_back({name, value_type(v), v});
      } while (accept_punct(","));
    }
    expect_punct(")");
    return e;
  }

  LogicElement parse_select() {
    expect_ident("select");
    LogicElement e = make(OpKind::Select);
    do e.retrieves.push_back(expect(Tok::Ident).text);
    while (accept_punct(","));
    expect_ident("from");
    e.table = expect(Tok::Ident).text;
    expect_ident("where");
    do e.conditions.push_back(parse_condition());
    while (accept_ident("and"));
    return e;
  }

  LogicElement parse_update() {
    expect_ident("update");
    LogicElement e = make(OpKind::Update);
    e.table = expect(Tok::Ident).text;
    expect_ident("set");
    Condition assign;
    assign.lhs.first = {SimpleOperand::Kind::Db, expect(Tok::Ident).text, {}};
    assign.op = CmpOp::Eq;
    expect_punct("=");
    assign.rhs = parse_operand_expr();
    e.assigns.push_back(assign);
    expect_ident("where");
    do e.conditions.push_back(parse_condition());
    while (accept_ident("and"));
    return e;
  }

  LogicElement parse_if() {
    expect_ident("if");
    LogicElement e = make(OpKind::If);
    expect_punct("(");
    e.conditions.push_back(parse_condition());
    expect_punct(")");
    expect_punct("{");
    e.children = parse_block();
    expect_punct("}");
    return e;
  }

  Condition parse_condition() {
    Condition c;
    c.lhs = parse_operand_expr();
    c.op = parse_cmp();
    c.rhs = parse_operand_expr();
    return c;
  }

  CmpOp parse_cmp() {
    if (cur_.kind != Tok::Punct) fail("expected a comparison operator");
    std::string s = cur_.text;
    bump();
    if (s == "==") return CmpOp::Eq;
    if (s == "!=") return CmpOp::Ne;
    if (s == ">") return CmpOp::Gt;
    if (s == "<") return CmpOp::Lt;
    if (s == ">=") return CmpOp::Ge;
    if (s == "<=") return CmpOp::Le;
    fail("expected a comparison operator");
    return CmpOp::Eq;
  }

  Operand parse_operand_expr() {
    Operand o;
    o.first = parse_simple_operand();
    if (check_punct("+") || check_punct("-")) {
      o.arith = cur_.text[0];
      bump();
      o.second = parse_simple_operand();
    }
    return o;
  }

  SimpleOperand parse_simple_operand() {
    if (accept_punct("$"))
      return {SimpleOperand::Kind::Var, expect(Tok::Ident).text, {}};
    if (check_ident("db")) {
      bump();
      expect_punct(".");
      return {SimpleOperand::Kind::Db, expect(Tok::Ident).text, {}};
    }
    return {SimpleOperand::Kind::Lit, "", parse_literal()};
  }

  SimpleOperand parse_simple_value() {
    if (accept_punct("$"))
      return {SimpleOperand::Kind::Var, expect(Tok::Ident).text, {}};
    return {SimpleOperand::Kind::Lit, "", parse_literal()};
  }

  Literal parse_literal() {
    if (cur_.kind == Tok::String) {
      Literal l{SemType::String, cur_.text};
      bump();
      return l;
    }
    if (cur_.kind == Tok::Number) {
      Literal l{SemType::Double, cur_.text};
      bump();
      return l;
    }
    if (check_ident("true") || check_ident("false")) {
      Literal l{SemType::Boolean, cur_.text};
      bump();
      return l;
    }
    fail("expected a literal");
    return {};
  }

  struct Param {
    std::string name;
    SemType type = SemType::String;
    bool explicit_typed = false;
    std::optional<SimpleOperand> value;
    blm::Param param() const { return {name, type, value}; }
  };

  Param parse_vardecl_defaulted() { return parse_vardecl_impl(); }

  blm::Param parse_vardecl() { return parse_vardecl_impl().param(); }

  Param parse_vardecl_impl() {
    Param p;
    p.name = expect(Tok::Ident).text;
    if (accept_punct(":")) {
      std::string t = expect(Tok::Ident).text;
      if (t == "string") p.type = SemType::String;
      else if (t == "double") p.type = SemType::Double;
      else if (t == "boolean") p.type = SemType::Boolean;
      else fail("unknown type '" + t + "'");
      p.explicit_typed = true;
    }
    return p;
  }

  static SemType value_type(const SimpleOperand& v) {
    return v.kind == SimpleOperand::Kind::Lit ? v.lit.type : SemType::String;
  }

  LogicElement make(OpKind op) {
    LogicElement e;
    e.op = op;
    e.kind = kind_for_op(op);
    return e;
  }

  // token helpers
  void bump() {
    cur_ = ahead_;
    ahead_ = lex_.next();
  }
  bool check_ident(const std::string& s) const {
    return cur_.kind == Tok::Ident && cur_.text == s;
  }
  bool check_punct(const std::string& s) const {
    return cur_.kind == Tok::Punct && cur_.text == s;
  }
  bool accept_ident(const std::string& s) {
    if (!check_ident(s)) return false;
    bump();
    return true;
  }
  bool accept_punct(const std::string& s) {
    if (!check_punct(s)) return false;
    bump();
    return true;
  }
  void expect_ident(const std::string& s) {
    if (!accept_ident(s)) fail("expected '" + s + "'");
  }
  void expect_punct(const std::string& s) {
    if (!accept_punct(s)) fail("expected '" + s + "'");
  }
  Token expect(Tok k) {
    if (cur_.kind != k) fail("unexpected token");
    Token t = cur_;
    bump();
    return t;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    std::string got = cur_.kind == Tok::End ? "end of input" : "'" + cur_.text + "'";
    throw Error(ErrorCategory::Parse, "ParseError", msg + ", got " + got, cur_.span);
  }

  Lexer lex_;
  Token cur_, ahead_;
  ServiceDef svc_;
  std::map<std::string, int> counters_;
};

std::string print_literal(const Literal& l) {
  if (l.type == SemType::String) return "\"" + l.text + "\"";
  return l.text;
}

std::string print_simple(const SimpleOperand& s) {
  switch (s.kind) {
    case SimpleOperand::Kind::Var: return "$" + s.name;
    case SimpleOperand::Kind::Db: return "db." + s.name;
    case SimpleOperand::Kind::Lit: return print_literal(s.lit);
  }
  return "";
}

std::string print_operand(const Operand& o) {
  std::string s = print_simple(o.first);
  if (o.arith) s += " " + std::string(1, *o.arith) + " " + print_simple(*o.second);
  return s;
}

std::string print_condition(const Condition& c) {
  return print_operand(c.lhs) + " " + cmp_symbol(c.op) + " " + print_operand(c.rhs);
}

std::string print_vardecl(const Param& p) {
  return p.name + ":" + to_string(p.type);
}

void print_element(std::ostringstream& out, const ServiceDef& svc, const LogicElement& e,
                   int depth);

void print_block(std::ostringstream& out, const ServiceDef& svc,
                 const std::vector<std::string>& labels, int depth) {
  for (const auto& label : labels) print_element(out, svc, *svc.find(label), depth);
}

void print_element(std::ostringstream& out, const ServiceDef& svc, const LogicElement& e,
                   int depth) {
  std::string pad(static_cast<size_t>(depth) * 2, ' ');
  out << pad << e.index.local << ": ";
  switch (e.op) {
    case OpKind::Get:
    case OpKind::Receive: {
      out << to_string(e.op) << " ";
      for (size_t i = 0; i < e.params.size(); ++i)
        out << (i ? ", " : "") << print_vardecl(e.params[i]);
      break;
    }
    case OpKind::Set:
    case OpKind::Output:
      out << to_string(e.op) << " " << print_vardecl(e.params[0]) << " = "
          << print_simple(*e.params[0].value);
      break;
    case OpKind::Compute: {
      out << "compute " << print_vardecl(e.params[0]) << " = " << *e.target << "(";
      for (size_t i = 1; i < e.params.size(); ++i)
        out << (i > 1 ? ", " : "") << print_simple(*e.params[i].value);
      out << ")";
      break;
    }
    case OpKind::Invoke: {
      out << "invoke " << *e.target << "(";
      for (size_t i = 0; i < e.params.size(); ++i)
        out << (i ? ", " : "") << print_simple(*e.params[i].value);
      out << ")";
      break;
    }
    case OpKind::Select: {
      out << "select ";
      for (size_t i = 0; i < e.retrieves.size(); ++i)
        out << (i ? ", " : "") << e.retrieves[i];
      out << " from " << e.table << " where ";
      for (size_t i = 0; i < e.conditions.size(); ++i)
        out << (i ? " and " : "") << print_condition(e.conditions[i]);
      break;
    }
    case OpKind::Update: {
      out << "update " << e.table << " set " << e.assigns[0].lhs.first.name << " = "
          << print_operand(e.assigns[0].rhs) << " where ";
      for (size_t i = 0; i < e.conditions.size(); ++i)
        out << (i ? " and " : "") << print_condition(e.conditions[i]);
      break;
    }
    case OpKind::If: {
      out << "if (" << print_condition(e.conditions[0]) << ") {\n";
      print_block(out, svc, e.children, depth + 1);
      out << pad << "}";
      break;
    }
  }
  out << "\n";
}

}  // namespace

LogicModel parse_source(const std::string& text, const std::string& filename) {
  return Parser(text, filename).parse_file();
}

std::string pretty_print(const LogicModel& model) {
  std::ostringstream out;
  for (const auto& ext : model.external_services)
    out << "external service " << ext << ";\n";
  for (const auto& svc : model.services) {
    out << "service " << svc.name;
    if (svc.flow_alias) out << " as \"" << *svc.flow_alias << "\"";
    out << " {\n";
    print_block(out, svc, svc.roots, 1);
    out << "}\n";
  }
  return out.str();
}

}  // namespace blm
