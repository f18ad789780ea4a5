#pragma once

#include "roundoff/fpformat.hpp"
#include "roundoff/polynomial.hpp"
#include "roundoff/rational.hpp"

#include <memory>
#include <string>
#include <vector>

namespace roundoff {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Sqrt, Transc, IfThenElse, Let };
enum class Fn { Exp, Log, Cos, Sin, Tan, Acos, Asin, Atan };

const char* fn_name(Fn f);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Branch condition `lhs REL rhs`, normalised to p >= 0 (or p > 0 when strict) with p = lhs - rhs
// or rhs - lhs.
struct Condition {
  ExprPtr lhs;
  ExprPtr rhs;
  bool flipped = false;  // p = rhs - lhs
  bool strict = false;
};

struct Expr {
  Op op = Op::Const;
  Rational value;  // Const
  int index = -1;  // Var, Let
  Fn fn = Fn::Exp;  // Transc
  ExprPtr a, b, c;  // operands; Let: a = binding, b = body; IfThenElse: b = then, c = else
  std::shared_ptr<const Condition> cond;
};

ExprPtr make_const(const Rational& v);
ExprPtr make_var(int index);
ExprPtr make_neg(ExprPtr a);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_sqrt(ExprPtr a);
ExprPtr make_transc(Fn f, ExprPtr a);
ExprPtr make_ite(std::shared_ptr<const Condition> cond, ExprPtr then_e, ExprPtr else_e);
ExprPtr make_let(int index, ExprPtr binding, ExprPtr body);

// Constructors that fold constants and drop neutral elements.
ExprPtr simp_neg(ExprPtr a);
ExprPtr simp_add(ExprPtr a, ExprPtr b);
ExprPtr simp_sub(ExprPtr a, ExprPtr b);
ExprPtr simp_mul(ExprPtr a, ExprPtr b);
ExprPtr simp_div(ExprPtr a, ExprPtr b);

bool is_const(const ExprPtr& e, const Rational& v);

// Condition polynomial p (condition holds iff p >= 0, or p > 0 when strict).
ExprPtr condition_expr(const Condition& c);

struct ProgramSpec {
  std::string name;
  int n = 0;
  std::vector<std::string> var_names;  // program variables, then let-bound names
  std::vector<Rational> box_lo, box_hi;
  std::vector<Poly> constraints;
  ExprPtr objective;
  Rational target_bound = 0;
  std::vector<Rational> uncertainties;
  FpFormat format = FpFormat::binary64();

  int index_space() const { return static_cast<int>(var_names.size()); }
};

ProgramSpec parse_program(const std::string& text);
ProgramSpec parse_program_file(const std::string& path);

struct ValidationReport {
  bool ok = true;
  unsigned max_constraint_degree = 0;
  int conditional_depth = 0;
  bool polynomial = true;       // objective is polynomial (no div, sqrt, transcendental, conditional)
  bool semialgebraic = true;    // no transcendental functions
  std::vector<std::string> messages;
};

// Throws EmptyBox or NestedConditional; otherwise returns the report.
ValidationReport validate_spec(const ProgramSpec& spec);

int conditional_depth(const ExprPtr& e);
bool is_polynomial_expr(const ExprPtr& e);
bool has_transcendental(const ExprPtr& e);
bool has_sqrt_or_div(const ExprPtr& e);
// Largest variable index referenced (including let indices).
int max_var_index(const ExprPtr& e);
bool depends_on(const ExprPtr& e, int var);
std::size_t expr_size(const ExprPtr& e);

// Exact polynomial form of a Div/Sqrt/Transc/IfThenElse-free expression (lets inlined).
Poly to_poly(const ExprPtr& e, int nvars);
ExprPtr from_poly(const Poly& p);

// Replaces Let nodes by their bindings (sharing the bound sub-DAG).
ExprPtr inline_lets(const ExprPtr& e);
// Substitutes variables: var i -> subs[i] when subs[i] is non-null.
ExprPtr substitute(const ExprPtr& e, const std::vector<ExprPtr>& subs);

ExprPtr symbolic_diff(const ExprPtr& e, int var);

double eval_double(const ExprPtr& e, const std::vector<double>& point);

std::string to_source(const ExprPtr& e, const std::vector<std::string>& names);
std::string to_source(const ProgramSpec& spec);

// Structural equality of expressions.
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

}  // namespace roundoff
