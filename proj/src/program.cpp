#include "roundoff/program.hpp"

#include "roundoff/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <unordered_map>

namespace roundoff {

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Cos: return "cos";
    case Fn::Sin: return "sin";
    case Fn::Tan: return "tan";
    case Fn::Acos: return "acos";
    case Fn::Asin: return "asin";
    case Fn::Atan: return "atan";
  }
  return "?";
}

FpFormat FpFormat::with_precision(int p) {
  if (p < 2) throw Error("precision must be at least 2 bits");
  FpFormat f;
  f.precision = p;
  f.eps = pow2(-p);
  return f;
}

FpFormat FpFormat::parse(const std::string& name) {
  if (name == "single") return binary32();
  if (name == "double") return binary64();
  if (name == "quad") return binary128();
  try {
    std::size_t used = 0;
    int p = std::stoi(name, &used);
    if (used == name.size()) return with_precision(p);
  } catch (const std::exception&) {
  }
  throw Error("unknown precision '" + name + "'");
}

std::string FpFormat::name() const {
  if (precision == 24) return "single";
  if (precision == 53) return "double";
  if (precision == 113) return "quad";
  return std::to_string(precision);
}

// ---------------------------------------------------------------------------
// Construction

namespace {

ExprPtr node(Op op, ExprPtr a = nullptr, ExprPtr b = nullptr) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

}  // namespace

ExprPtr make_const(const Rational& v) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Const;
  e->value = v;
  return e;
}

ExprPtr make_var(int index) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Var;
  e->index = index;
  return e;
}

ExprPtr make_neg(ExprPtr a) { return node(Op::Neg, std::move(a)); }
ExprPtr make_add(ExprPtr a, ExprPtr b) { return node(Op::Add, std::move(a), std::move(b)); }
ExprPtr make_sub(ExprPtr a, ExprPtr b) { return node(Op::Sub, std::move(a), std::move(b)); }
ExprPtr make_mul(ExprPtr a, ExprPtr b) { return node(Op::Mul, std::move(a), std::move(b)); }
ExprPtr make_div(ExprPtr a, ExprPtr b) { return node(Op::Div, std::move(a), std::move(b)); }
ExprPtr make_sqrt(ExprPtr a) { return node(Op::Sqrt, std::move(a)); }

ExprPtr make_transc(Fn f, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Transc;
  e->fn = f;
  e->a = std::move(a);
  return e;
}

ExprPtr make_ite(std::shared_ptr<const Condition> cond, ExprPtr then_e, ExprPtr else_e) {
  auto e = std::make_shared<Expr>();
  e->op = Op::IfThenElse;
  e->cond = std::move(cond);
  e->b = std::move(then_e);
  e->c = std::move(else_e);
  return e;
}

ExprPtr make_let(int index, ExprPtr binding, ExprPtr body) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Let;
  e->index = index;
  e->a = std::move(binding);
  e->b = std::move(body);
  return e;
}

bool is_const(const ExprPtr& e, const Rational& v) { return e->op == Op::Const && e->value == v; }

ExprPtr simp_neg(ExprPtr a) {
  if (a->op == Op::Const) return make_const(-a->value);
  if (a->op == Op::Neg) return a->a;
  return make_neg(std::move(a));
}

ExprPtr simp_add(ExprPtr a, ExprPtr b) {
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value + b->value);
  if (is_const(a, 0)) return b;
  if (is_const(b, 0)) return a;
  if (b->op == Op::Neg) return simp_sub(std::move(a), b->a);
  return make_add(std::move(a), std::move(b));
}

ExprPtr simp_sub(ExprPtr a, ExprPtr b) {
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value - b->value);
  if (is_const(b, 0)) return a;
  if (is_const(a, 0)) return simp_neg(std::move(b));
  if (a == b) return make_const(0);
  return make_sub(std::move(a), std::move(b));
}

ExprPtr simp_mul(ExprPtr a, ExprPtr b) {
  if (a->op == Op::Const && b->op == Op::Const) return make_const(a->value * b->value);
  if (is_const(a, 0) || is_const(b, 0)) return make_const(0);
  if (is_const(a, 1)) return b;
  if (is_const(b, 1)) return a;
  if (is_const(a, -1)) return simp_neg(std::move(b));
  if (is_const(b, -1)) return simp_neg(std::move(a));
  if (b->op == Op::Const) std::swap(a, b);
  return make_mul(std::move(a), std::move(b));
}

ExprPtr simp_div(ExprPtr a, ExprPtr b) {
  if (b->op == Op::Const && b->value != 0) {
    if (a->op == Op::Const) return make_const(a->value / b->value);
    if (b->value == 1) return a;
  }
  if (is_const(a, 0)) return make_const(0);
  return make_div(std::move(a), std::move(b));
}

ExprPtr condition_expr(const Condition& c) {
  return c.flipped ? make_sub(c.rhs, c.lhs) : make_sub(c.lhs, c.rhs);
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

std::vector<Token> tokenize(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '(' && i + 1 < src.size() && src[i + 1] == '*') {
      int l0 = line, c0 = col;
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == ')')) advance(1);
      if (i + 1 >= src.size()) throw SyntaxError(l0, c0, "unterminated comment");
      advance(2);
      continue;
    }
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int l0 = line, c0 = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Ident, src.substr(i, j - i), l0, c0});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) ||
        (ch == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      out.push_back({Tok::Number, src.substr(i, j - i), l0, c0});
      advance(j - i);
      continue;
    }
    static const char* two[] = {";;", "**", ">=", "<="};
    bool matched = false;
    for (const char* t : two)
      if (src.compare(i, 2, t) == 0) {
        out.push_back({Tok::Sym, t, l0, c0});
        advance(2);
        matched = true;
        break;
      }
    if (matched) continue;
    if (std::string("()[];,+-*/=<>").find(ch) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, ch), l0, c0});
      advance(1);
      continue;
    }
    throw SyntaxError(l0, c0, std::string("unexpected character '") + ch + "'");
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const std::map<std::string, Fn>& function_names() {
  static const std::map<std::string, Fn> m = {
      {"exp", Fn::Exp},   {"log", Fn::Log},     {"cos", Fn::Cos},     {"sin", Fn::Sin},
      {"tan", Fn::Tan},   {"acos", Fn::Acos},   {"asin", Fn::Asin},   {"atan", Fn::Atan},
      {"arccos", Fn::Acos}, {"arcsin", Fn::Asin}, {"arctan", Fn::Atan}};
  return m;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

  ProgramSpec parse() {
    ProgramSpec spec;
    bool have_box = false, have_obj = false;
    std::vector<std::pair<std::vector<std::string>, std::vector<Poly>>> pending_cstr;
    while (peek().kind != Tok::End) {
      expect_ident("let");
      const Token& nt = next();
      if (nt.kind != Tok::Ident) fail(nt, "expected binding name");
      std::string kind, name;
      auto us = nt.text.find('_');
      if (us == std::string::npos) fail(nt, "binding name must be box_<name>, obj_<name>, cstr_<name> or uncert_<name>");
      kind = nt.text.substr(0, us);
      name = nt.text.substr(us + 1);
      params_.clear();
      while (peek().kind == Tok::Ident) params_.push_back(next().text);
      expect_sym("=");
      if (spec.name.empty()) spec.name = name;
      if (kind == "box") {
        parse_box(spec);
        have_box = true;
      } else if (kind == "obj") {
        parse_obj(spec);
        have_obj = true;
      } else if (kind == "cstr") {
        parse_cstr(spec);
      } else if (kind == "uncert") {
        parse_uncert(spec);
      } else {
        fail(nt, "unknown binding kind '" + kind + "'");
      }
      expect_sym(";;");
    }
    if (!have_box) throw ArityMismatch("program has no box binding");
    if (!have_obj) throw ArityMismatch("program has no obj binding");
    if (spec.uncertainties.empty()) spec.uncertainties.assign(spec.n, Rational(0));
    // let-bound names come after the program variables
    std::vector<std::string> names(prog_names_);
    names.insert(names.end(), let_names_.begin(), let_names_.end());
    spec.var_names = names;
    for (auto& g : spec.constraints) g.set_nvars(spec.n);
    return spec;
  }

 private:
  std::vector<Token> t_;
  std::size_t pos_ = 0;
  std::vector<std::string> params_;
  std::vector<std::string> prog_names_;
  std::vector<std::string> let_names_;
  std::vector<std::pair<std::string, int>> scope_;  // let-bound names in scope
  int n_ = -1;

  const Token& peek() const { return t_[pos_]; }
  const Token& next() { return t_[pos_++]; }
  [[noreturn]] void fail(const Token& t, const std::string& msg) { throw SyntaxError(t.line, t.col, msg); }
  bool is_sym(const std::string& s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool is_ident(const std::string& s) const { return peek().kind == Tok::Ident && peek().text == s; }
  void expect_sym(const std::string& s) {
    if (!is_sym(s)) fail(peek(), "expected '" + s + "'");
    ++pos_;
  }
  void expect_ident(const std::string& s) {
    if (!is_ident(s)) fail(peek(), "expected '" + s + "'");
    ++pos_;
  }

  void bind_params(ProgramSpec& spec) {
    if (n_ < 0) {
      n_ = static_cast<int>(params_.size());
      spec.n = n_;
      prog_names_ = params_;
    } else if (static_cast<int>(params_.size()) != n_) {
      throw ArityMismatch("binding declares " + std::to_string(params_.size()) + " variables, expected " +
                          std::to_string(n_));
    }
  }

  Rational signed_number() {
    bool neg = false;
    while (is_sym("-") || is_sym("+")) {
      if (next().text == "-") neg = !neg;
    }
    Rational v;
    if (is_sym("(")) {
      next();
      v = signed_number();
      if (is_sym("/")) {
        next();
        const Token& d = peek();
        Rational den = signed_number();
        if (den == 0) fail(d, "zero denominator");
        v /= den;
      }
      expect_sym(")");
    } else {
      const Token& t = next();
      if (t.kind != Tok::Number) fail(t, "expected number");
      v = parse_decimal(t.text);
    }
    return neg ? Rational(-v) : v;
  }

  void parse_box(ProgramSpec& spec) {
    bind_params(spec);
    expect_sym("[");
    const Token& start = peek();
    std::vector<Rational> lo, hi;
    if (!is_sym("]")) {
      for (;;) {
        expect_sym("(");
        lo.push_back(signed_number());
        expect_sym(",");
        hi.push_back(signed_number());
        expect_sym(")");
        if (is_sym(";")) {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect_sym("]");
    if (static_cast<int>(lo.size()) != n_)
      throw ArityMismatch("box has " + std::to_string(lo.size()) + " intervals for " + std::to_string(n_) +
                          " variables (line " + std::to_string(start.line) + ")");
    spec.box_lo = lo;
    spec.box_hi = hi;
  }

  void parse_obj(ProgramSpec& spec) {
    bind_params(spec);
    expect_sym("[");
    expect_sym("(");
    spec.objective = expr();
    expect_sym(",");
    spec.target_bound = signed_number();
    expect_sym(")");
    expect_sym("]");
  }

  void parse_cstr(ProgramSpec& spec) {
    bind_params(spec);
    expect_sym("[");
    if (!is_sym("]")) {
      for (;;) {
        const Token& at = peek();
        ExprPtr g = expr();
        if (!is_polynomial_expr(g)) fail(at, "constraint is not polynomial");
        spec.constraints.push_back(to_poly(g, n_));
        if (is_sym(";")) {
          ++pos_;
          if (is_sym("]")) break;
          continue;
        }
        break;
      }
    }
    expect_sym("]");
  }

  void parse_uncert(ProgramSpec& spec) {
    bind_params(spec);
    expect_sym("[");
    std::vector<Rational> u;
    if (!is_sym("]")) {
      for (;;) {
        u.push_back(signed_number());
        if (is_sym(";")) {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect_sym("]");
    if (static_cast<int>(u.size()) != n_)
      throw ArityMismatch("uncertainty list has " + std::to_string(u.size()) + " entries for " +
                          std::to_string(n_) + " variables");
    for (const auto& v : u)
      if (v < 0) throw ArityMismatch("uncertainties must be nonnegative");
    spec.uncertainties = u;
  }

  int lookup(const Token& t) {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == t.text) return it->second;
    for (std::size_t i = 0; i < params_.size(); ++i)
      if (params_[i] == t.text) return static_cast<int>(i);
    throw UnknownVariable(t.text);
  }

  ExprPtr expr() {
    if (is_ident("let")) {
      ++pos_;
      const Token& nt = next();
      if (nt.kind != Tok::Ident) fail(nt, "expected name after let");
      expect_sym("=");
      ExprPtr binding = expr();
      expect_ident("in");
      int index = n_ + static_cast<int>(let_names_.size());
      let_names_.push_back(nt.text);
      scope_.push_back({nt.text, index});
      ExprPtr body = expr();
      scope_.pop_back();
      return make_let(index, binding, body);
    }
    if (is_ident("if")) {
      ++pos_;
      auto cond = condition();
      expect_ident("then");
      ExprPtr a = expr();
      expect_ident("else");
      ExprPtr b = expr();
      return make_ite(cond, a, b);
    }
    return sum();
  }

  std::shared_ptr<const Condition> condition() {
    std::size_t save = pos_;
    if (is_sym("(")) {
      ++pos_;
      try {
        auto c = condition();
        expect_sym(")");
        return c;
      } catch (const SyntaxError&) {
        pos_ = save;
      }
    }
    auto c = std::make_shared<Condition>();
    c->lhs = sum();
    const Token& op = next();
    if (op.kind != Tok::Sym || (op.text != ">=" && op.text != ">" && op.text != "<=" && op.text != "<"))
      fail(op, "expected comparison operator");
    c->rhs = sum();
    c->flipped = op.text[0] == '<';
    c->strict = op.text.size() == 1;
    return c;
  }

  ExprPtr sum() {
    ExprPtr e = term();
    while (is_sym("+") || is_sym("-")) {
      bool plus = next().text == "+";
      ExprPtr r = term();
      e = plus ? make_add(e, r) : make_sub(e, r);
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = unary();
    while (is_sym("*") || is_sym("/")) {
      bool mul = next().text == "*";
      ExprPtr r = unary();
      e = mul ? make_mul(e, r) : make_div(e, r);
    }
    return e;
  }

  ExprPtr unary() {
    if (is_sym("-")) {
      ++pos_;
      if (peek().kind == Tok::Number && !(t_[pos_ + 1].kind == Tok::Sym && t_[pos_ + 1].text == "**")) {
        return make_const(-parse_decimal(next().text));
      }
      return make_neg(unary());
    }
    if (is_sym("+")) {
      ++pos_;
      return unary();
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (is_sym("**")) {
      ++pos_;
      const Token& k = next();
      if (k.kind != Tok::Number || k.text.find_first_not_of("0123456789") != std::string::npos)
        fail(k, "exponent must be a positive integer literal");
      int n = std::stoi(k.text);
      if (n < 1) fail(k, "exponent must be a positive integer literal");
      ExprPtr e = base;
      for (int i = 1; i < n; ++i) e = make_mul(e, base);
      return e;
    }
    return base;
  }

  ExprPtr atom() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      ++pos_;
      return make_const(parse_decimal(t.text));
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "sqrt") {
        ++pos_;
        return make_sqrt(atom());
      }
      auto it = function_names().find(t.text);
      if (it != function_names().end()) {
        ++pos_;
        return make_transc(it->second, atom());
      }
      if (t.text == "let" || t.text == "if") return expr();
      ++pos_;
      return make_var(lookup(t));
    }
    if (is_sym("(")) {
      ++pos_;
      ExprPtr e = expr();
      expect_sym(")");
      return e;
    }
    fail(t, t.kind == Tok::End ? "unexpected end of input" : "unexpected token '" + t.text + "'");
  }
};

}  // namespace

ProgramSpec parse_program(const std::string& text) { return Parser(tokenize(text)).parse(); }

ProgramSpec parse_program_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

// ---------------------------------------------------------------------------
// Queries

int conditional_depth(const ExprPtr& e) {
  if (!e) return 0;
  int d = std::max({conditional_depth(e->a), conditional_depth(e->b), conditional_depth(e->c)});
  if (e->op == Op::IfThenElse) {
    d = std::max(d, std::max(conditional_depth(e->cond->lhs), conditional_depth(e->cond->rhs)));
    return d + 1;
  }
  return d;
}

namespace {

template <class F>
bool any_node(const ExprPtr& e, F pred) {
  std::unordered_map<const Expr*, bool> seen;
  std::function<bool(const ExprPtr&)> rec = [&](const ExprPtr& x) -> bool {
    if (!x) return false;
    auto it = seen.find(x.get());
    if (it != seen.end()) return it->second;
    bool r = pred(*x) || rec(x->a) || rec(x->b) || rec(x->c) ||
             (x->cond && (rec(x->cond->lhs) || rec(x->cond->rhs)));
    seen[x.get()] = r;
    return r;
  };
  return rec(e);
}

}  // namespace

bool is_polynomial_expr(const ExprPtr& e) {
  // Division is polynomial only by a constant-valued polynomial divisor.
  std::function<bool(const ExprPtr&, std::map<int, bool>&)> constant_valued;
  std::unordered_map<const Expr*, bool> memo;
  std::function<bool(const ExprPtr&)> rec = [&](const ExprPtr& x) -> bool {
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    bool r = true;
    switch (x->op) {
      case Op::Const:
      case Op::Var: r = true; break;
      case Op::Neg: r = rec(x->a); break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul: r = rec(x->a) && rec(x->b); break;
      case Op::Div: {
        r = rec(x->a) && rec(x->b);
        if (r) {
          Poly den = to_poly(x->b, max_var_index(x->b) + 1);
          r = den.is_constant() && !den.is_zero();
        }
        break;
      }
      case Op::Sqrt:
      case Op::Transc:
      case Op::IfThenElse: r = false; break;
      case Op::Let: r = rec(x->a) && rec(x->b); break;
    }
    memo[x.get()] = r;
    return r;
  };
  return rec(e);
}

bool has_transcendental(const ExprPtr& e) {
  return any_node(e, [](const Expr& x) { return x.op == Op::Transc; });
}

bool has_sqrt_or_div(const ExprPtr& e) {
  return any_node(e, [](const Expr& x) { return x.op == Op::Sqrt || x.op == Op::Div; });
}

int max_var_index(const ExprPtr& e) {
  int m = -1;
  any_node(e, [&](const Expr& x) {
    if (x.op == Op::Var || x.op == Op::Let) m = std::max(m, x.index);
    return false;
  });
  return m;
}

bool depends_on(const ExprPtr& e, int var) {
  return any_node(e, [&](const Expr& x) { return x.op == Op::Var && x.index == var; });
}

std::size_t expr_size(const ExprPtr& e) {
  std::size_t n = 0;
  any_node(e, [&](const Expr&) {
    ++n;
    return false;
  });
  return n;
}

ValidationReport validate_spec(const ProgramSpec& spec) {
  ValidationReport rep;
  for (int i = 0; i < spec.n; ++i)
    if (spec.box_lo[i] > spec.box_hi[i]) throw EmptyBox(i);
  rep.conditional_depth = conditional_depth(spec.objective);
  if (rep.conditional_depth > 1) throw NestedConditional();
  for (const auto& g : spec.constraints) {
    rep.max_constraint_degree = std::max(rep.max_constraint_degree, g.degree());
    for (int v : g.variables())
      if (v >= spec.n) {
        rep.ok = false;
        rep.messages.push_back("constraint uses variable index " + std::to_string(v) + " >= n");
      }
  }
  int mv = max_var_index(spec.objective);
  if (mv >= spec.index_space()) {
    rep.ok = false;
    rep.messages.push_back("objective uses an undeclared variable index");
  }
  if (static_cast<int>(spec.uncertainties.size()) != spec.n) {
    rep.ok = false;
    rep.messages.push_back("uncertainty list length differs from variable count");
  }
  rep.polynomial = is_polynomial_expr(spec.objective);
  rep.semialgebraic = !has_transcendental(spec.objective);
  return rep;
}

// ---------------------------------------------------------------------------
// Polynomial conversion

Poly to_poly(const ExprPtr& e, int nvars) {
  std::unordered_map<const Expr*, Poly> memo;
  std::map<int, Poly> env;
  std::function<Poly(const ExprPtr&)> rec = [&](const ExprPtr& x) -> Poly {
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    Poly r(nvars);
    bool cache = true;
    switch (x->op) {
      case Op::Const: r = Poly::constant(x->value, nvars); break;
      case Op::Var: {
        auto ev = env.find(x->index);
        if (ev != env.end()) {
          r = ev->second;
          cache = false;
        } else {
          r = Poly::variable(x->index, nvars);
        }
        break;
      }
      case Op::Neg: r = -rec(x->a); break;
      case Op::Add: r = rec(x->a) + rec(x->b); break;
      case Op::Sub: r = rec(x->a) - rec(x->b); break;
      case Op::Mul: r = rec(x->a) * rec(x->b); break;
      case Op::Div: {
        Poly den = rec(x->b);
        if (!den.is_constant() || den.is_zero()) throw Error("division by a non-constant in polynomial context");
        r = rec(x->a).scale(1 / den.constant_term());
        break;
      }
      case Op::Let: {
        env[x->index] = rec(x->a);
        r = rec(x->b);
        env.erase(x->index);
        cache = false;
        break;
      }
      default: throw Error("expression is not polynomial");
    }
    if (cache && env.empty()) memo[x.get()] = r;
    r.set_nvars(std::max(r.nvars(), nvars));
    return r;
  };
  Poly p = rec(e);
  p.set_nvars(std::max(p.nvars(), nvars));
  return p;
}

ExprPtr from_poly(const Poly& p) {
  ExprPtr sum;
  for (const auto& [m, c] : p.terms()) {
    ExprPtr term;
    for (const auto& [v, k] : m.entries())
      for (std::uint32_t i = 0; i < k; ++i) term = term ? make_mul(term, make_var(v)) : make_var(v);
    ExprPtr coef = make_const(c);
    if (!term)
      term = coef;
    else if (c != 1)
      term = make_mul(coef, term);
    sum = sum ? make_add(sum, term) : term;
  }
  return sum ? sum : make_const(0);
}

// ---------------------------------------------------------------------------
// Rewriting

ExprPtr substitute(const ExprPtr& e, const std::vector<ExprPtr>& subs) {
  std::unordered_map<const Expr*, ExprPtr> memo;
  std::function<ExprPtr(const ExprPtr&)> rec = [&](const ExprPtr& x) -> ExprPtr {
    if (!x) return nullptr;
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    ExprPtr r;
    if (x->op == Op::Var) {
      r = (x->index < static_cast<int>(subs.size()) && subs[x->index]) ? subs[x->index] : x;
    } else if (x->op == Op::Const) {
      r = x;
    } else {
      auto a = rec(x->a), b = rec(x->b), c = rec(x->c);
      std::shared_ptr<const Condition> cond = x->cond;
      if (cond) {
        auto nc = std::make_shared<Condition>(*cond);
        nc->lhs = rec(cond->lhs);
        nc->rhs = rec(cond->rhs);
        cond = nc;
      }
      if (a == x->a && b == x->b && c == x->c && cond == x->cond) {
        r = x;
      } else {
        auto n = std::make_shared<Expr>(*x);
        n->a = a;
        n->b = b;
        n->c = c;
        n->cond = cond;
        r = n;
      }
    }
    memo[x.get()] = r;
    return r;
  };
  return rec(e);
}

ExprPtr inline_lets(const ExprPtr& e) {
  std::unordered_map<const Expr*, ExprPtr> memo;
  std::map<int, ExprPtr> env;
  std::function<ExprPtr(const ExprPtr&)> rec = [&](const ExprPtr& x) -> ExprPtr {
    if (!x) return nullptr;
    if (x->op == Op::Const) return x;
    if (x->op == Op::Var) {
      auto it = env.find(x->index);
      return it == env.end() ? x : it->second;
    }
    if (x->op == Op::Let) {
      ExprPtr b = rec(x->a);
      auto saved = env;
      env[x->index] = b;
      auto saved_memo = std::move(memo);
      memo.clear();
      ExprPtr body = rec(x->b);
      memo = std::move(saved_memo);
      env = saved;
      return body;
    }
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    auto a = rec(x->a), b = rec(x->b), c = rec(x->c);
    std::shared_ptr<const Condition> cond = x->cond;
    if (cond) {
      auto nc = std::make_shared<Condition>(*cond);
      nc->lhs = rec(cond->lhs);
      nc->rhs = rec(cond->rhs);
      cond = nc;
    }
    ExprPtr r;
    if (a == x->a && b == x->b && c == x->c && cond == x->cond) {
      r = x;
    } else {
      auto n = std::make_shared<Expr>(*x);
      n->a = a;
      n->b = b;
      n->c = c;
      n->cond = cond;
      r = n;
    }
    memo[x.get()] = r;
    return r;
  };
  return rec(e);
}

ExprPtr symbolic_diff(const ExprPtr& e0, int var) {
  ExprPtr e = inline_lets(e0);
  std::unordered_map<const Expr*, ExprPtr> memo;
  std::unordered_map<const Expr*, bool> dep;
  std::function<bool(const ExprPtr&)> depends = [&](const ExprPtr& x) -> bool {
    if (!x) return false;
    auto it = dep.find(x.get());
    if (it != dep.end()) return it->second;
    bool r = (x->op == Op::Var && x->index == var) || depends(x->a) || depends(x->b) || depends(x->c) ||
             (x->cond && (depends(x->cond->lhs) || depends(x->cond->rhs)));
    dep[x.get()] = r;
    return r;
  };
  std::function<ExprPtr(const ExprPtr&)> d = [&](const ExprPtr& x) -> ExprPtr {
    if (!depends(x)) return make_const(0);
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    ExprPtr r;
    switch (x->op) {
      case Op::Const: r = make_const(0); break;
      case Op::Var: r = make_const(x->index == var ? 1 : 0); break;
      case Op::Neg: r = simp_neg(d(x->a)); break;
      case Op::Add: r = simp_add(d(x->a), d(x->b)); break;
      case Op::Sub: r = simp_sub(d(x->a), d(x->b)); break;
      case Op::Mul: r = simp_add(simp_mul(d(x->a), x->b), simp_mul(x->a, d(x->b))); break;
      case Op::Div: {
        ExprPtr da = d(x->a), db = d(x->b);
        if (is_const(db, 0)) {
          r = simp_div(da, x->b);
        } else {
          r = simp_div(simp_sub(simp_mul(da, x->b), simp_mul(x->a, db)), make_mul(x->b, x->b));
        }
        break;
      }
      case Op::Sqrt: r = simp_div(d(x->a), simp_mul(make_const(2), x)); break;
      case Op::Transc: {
        ExprPtr da = d(x->a);
        const ExprPtr& u = x->a;
        switch (x->fn) {
          case Fn::Exp: r = simp_mul(da, x); break;
          case Fn::Log: r = simp_div(da, u); break;
          case Fn::Sin: r = simp_mul(da, make_transc(Fn::Cos, u)); break;
          case Fn::Cos: r = simp_neg(simp_mul(da, make_transc(Fn::Sin, u))); break;
          case Fn::Tan: r = simp_mul(da, simp_add(make_const(1), make_mul(x, x))); break;
          case Fn::Atan: r = simp_div(da, simp_add(make_const(1), make_mul(u, u))); break;
          case Fn::Asin: r = simp_div(da, make_sqrt(simp_sub(make_const(1), make_mul(u, u)))); break;
          case Fn::Acos: r = simp_neg(simp_div(da, make_sqrt(simp_sub(make_const(1), make_mul(u, u))))); break;
        }
        break;
      }
      case Op::IfThenElse: throw NonDifferentiableAtSymbolLevel();
      case Op::Let: throw Error("unexpected let after inlining");
    }
    memo[x.get()] = r;
    return r;
  };
  return d(e);
}

// ---------------------------------------------------------------------------
// Evaluation and printing

double eval_double(const ExprPtr& e, const std::vector<double>& point) {
  std::vector<double> env(point);
  std::unordered_map<const Expr*, double> memo;
  std::function<double(const ExprPtr&)> rec = [&](const ExprPtr& x) -> double {
    auto it = memo.find(x.get());
    if (it != memo.end()) return it->second;
    double r = 0;
    switch (x->op) {
      case Op::Const: r = to_double(x->value); break;
      case Op::Var: r = env.at(x->index); break;
      case Op::Neg: r = -rec(x->a); break;
      case Op::Add: r = rec(x->a) + rec(x->b); break;
      case Op::Sub: r = rec(x->a) - rec(x->b); break;
      case Op::Mul: r = rec(x->a) * rec(x->b); break;
      case Op::Div: r = rec(x->a) / rec(x->b); break;
      case Op::Sqrt: r = std::sqrt(rec(x->a)); break;
      case Op::Transc: {
        double u = rec(x->a);
        switch (x->fn) {
          case Fn::Exp: r = std::exp(u); break;
          case Fn::Log: r = std::log(u); break;
          case Fn::Sin: r = std::sin(u); break;
          case Fn::Cos: r = std::cos(u); break;
          case Fn::Tan: r = std::tan(u); break;
          case Fn::Acos: r = std::acos(u); break;
          case Fn::Asin: r = std::asin(u); break;
          case Fn::Atan: r = std::atan(u); break;
        }
        break;
      }
      case Op::IfThenElse: {
        double p = rec(x->cond->lhs) - rec(x->cond->rhs);
        if (x->cond->flipped) p = -p;
        bool take = x->cond->strict ? p > 0 : p >= 0;
        r = take ? rec(x->b) : rec(x->c);
        break;
      }
      case Op::Let: {
        if (static_cast<int>(env.size()) <= x->index) env.resize(x->index + 1, 0.0);
        env[x->index] = rec(x->a);
        r = rec(x->b);
        break;
      }
    }
    memo[x.get()] = r;
    return r;
  };
  return rec(e);
}

namespace {

std::string decimal_literal(const Rational& q) {
  Integer num = boost::multiprecision::numerator(q);
  Integer den = boost::multiprecision::denominator(q);
  Integer d = den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  bool neg = num < 0;
  if (neg) num = -num;
  std::string body;
  if (d != 1) {
    body = "(" + num.str() + " / " + den.str() + ")";
  } else {
    int k = std::max(twos, fives);
    Integer scaled = num;
    for (int i = 0; i < k - twos; ++i) scaled *= 2;
    for (int i = 0; i < k - fives; ++i) scaled *= 5;
    std::string digits = scaled.str();
    if (k == 0) {
      body = digits;
    } else {
      if (static_cast<int>(digits.size()) <= k) digits = std::string(k - digits.size() + 1, '0') + digits;
      body = digits.substr(0, digits.size() - k) + "." + digits.substr(digits.size() - k);
    }
  }
  return neg ? "(-" + body + ")" : body;
}

}  // namespace

std::string to_source(const ExprPtr& e, const std::vector<std::string>& names) {
  auto name = [&](int i) { return i < static_cast<int>(names.size()) ? names[i] : "v" + std::to_string(i); };
  std::function<std::string(const ExprPtr&)> rec = [&](const ExprPtr& x) -> std::string {
    switch (x->op) {
      case Op::Const: return decimal_literal(x->value);
      case Op::Var: return name(x->index);
      case Op::Neg: return "(-" + rec(x->a) + ")";
      case Op::Add: return "(" + rec(x->a) + " + " + rec(x->b) + ")";
      case Op::Sub: return "(" + rec(x->a) + " - " + rec(x->b) + ")";
      case Op::Mul: return "(" + rec(x->a) + " * " + rec(x->b) + ")";
      case Op::Div: return "(" + rec(x->a) + " / " + rec(x->b) + ")";
      case Op::Sqrt: return "sqrt(" + rec(x->a) + ")";
      case Op::Transc: return std::string(fn_name(x->fn)) + "(" + rec(x->a) + ")";
      case Op::IfThenElse: {
        const auto& c = *x->cond;
        std::string op = c.flipped ? (c.strict ? "<" : "<=") : (c.strict ? ">" : ">=");
        return "(if (" + rec(c.lhs) + " " + op + " " + rec(c.rhs) + ") then " + rec(x->b) + " else " + rec(x->c) +
               ")";
      }
      case Op::Let: return "(let " + name(x->index) + " = " + rec(x->a) + " in " + rec(x->b) + ")";
    }
    return "?";
  };
  return rec(e);
}

std::string to_source(const ProgramSpec& spec) {
  std::ostringstream os;
  std::string params;
  for (int i = 0; i < spec.n; ++i) params += " " + spec.var_names[i];
  os << "let box_" << spec.name << params << " = [";
  for (int i = 0; i < spec.n; ++i)
    os << (i ? "; " : "") << "(" << decimal_literal(spec.box_lo[i]) << ", " << decimal_literal(spec.box_hi[i])
       << ")";
  os << "];;\n";
  if (!spec.constraints.empty()) {
    os << "let cstr_" << spec.name << params << " = [";
    for (std::size_t j = 0; j < spec.constraints.size(); ++j)
      os << (j ? "; " : "") << to_source(from_poly(spec.constraints[j]), spec.var_names);
    os << "];;\n";
  }
  bool any_u = false;
  for (const auto& u : spec.uncertainties) any_u = any_u || u != 0;
  if (any_u) {
    os << "let uncert_" << spec.name << params << " = [";
    for (int i = 0; i < spec.n; ++i) os << (i ? "; " : "") << decimal_literal(spec.uncertainties[i]);
    os << "];;\n";
  }
  os << "let obj_" << spec.name << params << " = [(" << to_source(spec.objective, spec.var_names) << ", "
     << decimal_literal(spec.target_bound) << ")];;\n";
  return os.str();
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a == b) return true;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Op::Const: return a->value == b->value;
    case Op::Var: return a->index == b->index;
    case Op::Transc:
      if (a->fn != b->fn) return false;
      break;
    case Op::Let:
      if (a->index != b->index) return false;
      break;
    case Op::IfThenElse:
      if (a->cond->flipped != b->cond->flipped || a->cond->strict != b->cond->strict ||
          !structurally_equal(a->cond->lhs, b->cond->lhs) || !structurally_equal(a->cond->rhs, b->cond->rhs))
        return false;
      break;
    default: break;
  }
  return structurally_equal(a->a, b->a) && structurally_equal(a->b, b->b) && structurally_equal(a->c, b->c);
}

}  // namespace roundoff
