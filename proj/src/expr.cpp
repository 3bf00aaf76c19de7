#include "htx/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace htx {

namespace {

struct Token {
  enum class Kind { Open, Close, Atom, End } kind;
  std::string text;
  std::size_t offset;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token peek() {
    if (!has_peek_) {
      peeked_ = lex();
      has_peek_ = true;
    }
    return peeked_;
  }

  Token next() {
    Token t = peek();
    has_peek_ = false;
    return t;
  }

 private:
  Token lex() {
    while (pos_ < src_.size() &&
           std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    if (pos_ >= src_.size()) return {Token::Kind::End, "", src_.size()};
    const std::size_t start = pos_;
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      return {Token::Kind::Open, "(", start};
    }
    if (c == ')') {
      ++pos_;
      return {Token::Kind::Close, ")", start};
    }
    while (pos_ < src_.size() && src_[pos_] != '(' && src_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(src_[pos_])))
      ++pos_;
    return {Token::Kind::Atom, src_.substr(start, pos_ - start), start};
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  Token peeked_;
  bool has_peek_ = false;
};

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

ExprPtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Const;
  n->cval = v;
  return n;
}

ExprPtr make_var(int var0, int dim, std::size_t off) {
  if (var0 < 0 || var0 >= dim)
    throw ExprError("coordinate index out of range 1.." + std::to_string(dim),
                    off);
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprNode::Kind::Var;
  n->var = var0;
  return n;
}

ExprPtr parse_one(Lexer& lx, int dim);

ExprPtr parse_atom(const Token& t, int dim) {
  double v = 0.0;
  if (parse_number(t.text, v)) return make_const(v);
  if (t.text.size() >= 2 && t.text[0] == 'x') {
    long idx = 0;
    if (parse_int(t.text.substr(1), idx))
      return make_var(static_cast<int>(idx) - 1, dim, t.offset);
  }
  throw ExprError("unexpected atom '" + t.text + "'", t.offset);
}

ExprPtr parse_list(Lexer& lx, int dim, std::size_t open_off) {
  Token head = lx.next();
  if (head.kind != Token::Kind::Atom)
    throw ExprError("expected operator after '('", head.offset);
  std::vector<ExprPtr> args;
  std::vector<Token> arg_tokens;
  while (true) {
    Token t = lx.peek();
    if (t.kind == Token::Kind::End)
      throw ExprError("unbalanced '('", open_off);
    if (t.kind == Token::Kind::Close) {
      lx.next();
      break;
    }
    arg_tokens.push_back(t);
    args.push_back(parse_one(lx, dim));
  }

  const std::string& op = head.text;
  auto node = std::make_shared<ExprNode>();
  auto need_args = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      throw ExprError("operator '" + op + "' takes " + std::to_string(lo) +
                          (hi > lo ? ".." + std::to_string(hi) : "") +
                          " arguments, got " + std::to_string(args.size()),
                      head.offset);
  };
  if (op == "+") {
    need_args(1, args.size() < 1 ? 1 : args.size());
    node->kind = ExprNode::Kind::Add;
    node->args = std::move(args);
  } else if (op == "-") {
    need_args(1, 2);
    node->kind = args.size() == 1 ? ExprNode::Kind::Neg : ExprNode::Kind::Sub;
    node->args = std::move(args);
  } else if (op == "*") {
    need_args(1, args.size() < 1 ? 1 : args.size());
    node->kind = ExprNode::Kind::Mul;
    node->args = std::move(args);
  } else if (op == "^") {
    need_args(2, 2);
    if (args[1]->kind != ExprNode::Kind::Const)
      throw ExprError("'^' exponent must be a literal integer",
                      arg_tokens[1].offset);
    const double e = args[1]->cval;
    if (e < 0.0 || e != std::floor(e))
      throw ExprError("'^' exponent must be a non-negative integer",
                      arg_tokens[1].offset);
    node->kind = ExprNode::Kind::Pow;
    node->ipow = static_cast<int>(e);
    node->args = {args[0]};
  } else if (op == "exp" || op == "sin" || op == "cos") {
    need_args(1, 1);
    node->kind = op == "exp" ? ExprNode::Kind::Exp
                             : (op == "sin" ? ExprNode::Kind::Sin
                                            : ExprNode::Kind::Cos);
    node->args = std::move(args);
  } else if (op == "const") {
    need_args(1, 1);
    if (args[0]->kind != ExprNode::Kind::Const)
      throw ExprError("'const' takes a numeric literal", arg_tokens[0].offset);
    return args[0];
  } else if (op == "var") {
    need_args(1, 1);
    if (args[0]->kind != ExprNode::Kind::Const)
      throw ExprError("'var' takes an integer literal", arg_tokens[0].offset);
    const double v = args[0]->cval;
    if (v < 1.0 || v != std::floor(v))
      throw ExprError("'var' index must be a positive integer",
                      arg_tokens[0].offset);
    return make_var(static_cast<int>(v) - 1, dim, arg_tokens[0].offset);
  } else {
    throw ExprError("unknown operator '" + op + "'", head.offset);
  }
  return node;
}

ExprPtr parse_one(Lexer& lx, int dim) {
  Token t = lx.next();
  switch (t.kind) {
    case Token::Kind::Open:
      return parse_list(lx, dim, t.offset);
    case Token::Kind::Atom:
      return parse_atom(t, dim);
    case Token::Kind::Close:
      throw ExprError("unexpected ')'", t.offset);
    case Token::Kind::End:
      throw ExprError("empty expression", t.offset);
  }
  throw ExprError("unreachable", t.offset);
}

}  // namespace

ExprPtr parse_expr(const std::string& src, int dim) {
  if (dim < 1) throw std::invalid_argument("parse_expr: dim must be >= 1");
  Lexer lx(src);
  ExprPtr e = parse_one(lx, dim);
  Token t = lx.next();
  if (t.kind != Token::Kind::End)
    throw ExprError("trailing input after expression", t.offset);
  return e;
}

std::vector<ExprPtr> parse_component_list(const std::vector<std::string>& srcs,
                                          int dim) {
  std::vector<ExprPtr> out;
  out.reserve(srcs.size());
  for (const std::string& s : srcs) out.push_back(parse_expr(s, dim));
  return out;
}

double expr_value(const ExprPtr& e, const Vec& x) {
  switch (e->kind) {
    case ExprNode::Kind::Const:
      return e->cval;
    case ExprNode::Kind::Var:
      return x(e->var);
    case ExprNode::Kind::Add: {
      double s = 0.0;
      for (const auto& a : e->args) s += expr_value(a, x);
      return s;
    }
    case ExprNode::Kind::Sub:
      return expr_value(e->args[0], x) - expr_value(e->args[1], x);
    case ExprNode::Kind::Neg:
      return -expr_value(e->args[0], x);
    case ExprNode::Kind::Mul: {
      double p = 1.0;
      for (const auto& a : e->args) p *= expr_value(a, x);
      return p;
    }
    case ExprNode::Kind::Pow: {
      double b = expr_value(e->args[0], x);
      double r = 1.0;
      for (int i = 0; i < e->ipow; ++i) r *= b;
      return r;
    }
    case ExprNode::Kind::Exp:
      return std::exp(expr_value(e->args[0], x));
    case ExprNode::Kind::Sin:
      return std::sin(expr_value(e->args[0], x));
    case ExprNode::Kind::Cos:
      return std::cos(expr_value(e->args[0], x));
  }
  throw std::logic_error("expr_value: corrupt node");
}

Jet expr_jet(const ExprPtr& e, const JetSpace& sp, const Vec& base) {
  switch (e->kind) {
    case ExprNode::Kind::Const:
      return jet_const(sp, e->cval);
    case ExprNode::Kind::Var:
      return jet_var(sp, e->var, base(e->var));
    case ExprNode::Kind::Add: {
      Jet s = jet_const(sp, 0.0);
      for (const auto& a : e->args) s = jet_add(s, expr_jet(a, sp, base));
      return s;
    }
    case ExprNode::Kind::Sub:
      return jet_sub(expr_jet(e->args[0], sp, base),
                     expr_jet(e->args[1], sp, base));
    case ExprNode::Kind::Neg:
      return jet_neg(expr_jet(e->args[0], sp, base));
    case ExprNode::Kind::Mul: {
      Jet p = jet_const(sp, 1.0);
      for (const auto& a : e->args) p = jet_mul(p, expr_jet(a, sp, base));
      return p;
    }
    case ExprNode::Kind::Pow:
      return jet_pow(expr_jet(e->args[0], sp, base), e->ipow);
    case ExprNode::Kind::Exp:
      return jet_exp(expr_jet(e->args[0], sp, base));
    case ExprNode::Kind::Sin:
      return jet_sin(expr_jet(e->args[0], sp, base));
    case ExprNode::Kind::Cos:
      return jet_cos(expr_jet(e->args[0], sp, base));
  }
  throw std::logic_error("expr_jet: corrupt node");
}

Field expression_field(std::vector<ExprPtr> comps) {
  const int n = static_cast<int>(comps.size());
  if (n < 1) throw std::invalid_argument("expression_field: no components");
  Field f;
  f.n = n;
  f.value = [comps, n](const Vec& x) {
    Vec out(n);
    for (int j = 0; j < n; ++j) out(j) = expr_value(comps[j], x);
    return out;
  };
  f.jets = [comps, n](const JetSpace& sp, const Vec& base) {
    std::vector<Jet> out;
    out.reserve(n);
    for (int j = 0; j < n; ++j) out.push_back(expr_jet(comps[j], sp, base));
    return out;
  };
  return f;
}

}  // namespace htx
