#pragma once

#include "roundoff/fpformat.hpp"
#include "roundoff/interval.hpp"
#include "roundoff/program.hpp"

#include <string>
#include <vector>

namespace roundoff {

struct RoundingOptions {
  bool input_rounding = true;     // x_i becomes x_i(1+e)
  bool constant_rounding = true;  // non-representable constants become c(1+e)
  bool neg_error = false;         // negation gets its own error variable
  bool merge = false;             // merge_error_products after rounding
};

struct ErrorVar {
  int id = 0;  // position in RoundedExpr::errors; variable index is err_base + id
  Rational magnitude;
  std::string provenance;
};

// Body over the index space [program vars, let slots, e_0 .. e_{m-1}].
// Every rounding appears as Mul(child, Add(Const 1, Var(e_j))).
struct RoundedExpr {
  int n = 0;
  int index_space = 0;  // n + number of let-bound names
  ExprPtr exact;        // the unrounded expression
  ExprPtr body;
  std::vector<ErrorVar> errors;

  int err_base() const { return index_space; }
  int err_index(int j) const { return index_space + j; }
  int total_vars() const { return index_space + static_cast<int>(errors.size()); }
  std::vector<Interval> error_box() const;
  std::vector<Rational> magnitudes() const;
};

RoundedExpr round_expr(const ExprPtr& expr, int n, int index_space, const FpFormat& format,
                       const RoundingOptions& options);
RoundedExpr round_program(const ProgramSpec& spec, const RoundingOptions& options);

// Replaces each product of two or more rounding factors by a single factor (1+theta).
RoundedExpr merge_error_products(const RoundedExpr& rexpr, const FpFormat& format);

// x_i -> x_i(1+e) with |e| <= u_i, one shared error variable per input with u_i > 0.
RoundedExpr apply_uncertainties(const RoundedExpr& rexpr, const std::vector<Rational>& u);

// gamma_k = k eps / (1 - k eps)
Rational gamma_k(int k, const Rational& eps);

// Recognises Mul(child, Add(Const 1, Var(e))) and returns e's index (or -1).
int rounding_factor(const ExprPtr& e, int err_base, ExprPtr* child = nullptr);

// Box over the full index space: program box, zero let slots, then [-b_j, b_j].
std::vector<Interval> extended_box(const RoundedExpr& r, const std::vector<Interval>& program_box);

}  // namespace roundoff
