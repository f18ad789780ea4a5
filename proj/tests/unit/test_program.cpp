#include "roundoff/errors.hpp"
#include "roundoff/program.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace roundoff;

TEST_CASE("kepler0 parses") {
  ProgramSpec s = testutil::load("kepler0");
  CHECK(s.name == "kepler0");
  CHECK(s.n == 6);
  CHECK(s.box_lo[0] == 4);
  CHECK(s.box_hi[5] == Rational(159, 25));
  CHECK(s.constraints.empty());
  CHECK(s.format.precision == 53);
  ValidationReport rep = validate_spec(s);
  CHECK(rep.ok);
  CHECK(rep.polynomial);
  Poly f = to_poly(s.objective, 6);
  CHECK(f.degree() == 2);
  CHECK(f.size() == 10);
}

TEST_CASE("every shipped benchmark parses and validates") {
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(ROUNDOFF_BENCH_DIR)) {
    if (e.path().extension() != ".prog") continue;
    ProgramSpec s = parse_program_file(e.path().string());
    CHECK_NOTHROW(validate_spec(s));
    CHECK(s.n >= 1);
    ++count;
  }
  CHECK(count == 30);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_program("let box_p x = [(0, 1)];; let obj_p x = [(x +, 0)];;"), SyntaxError);
  CHECK_THROWS_AS(parse_program("let box_p x = [(0, 1)];; let obj_p x = [(y * x, 0)];;"), UnknownVariable);
  CHECK_THROWS_AS(parse_program("let box_p x y = [(0, 1)];; let obj_p x y = [(x * y, 0)];;"), ArityMismatch);
  ProgramSpec empty = parse_program("let box_p x = [(1, 0)];; let obj_p x = [(x, 0)];;");
  CHECK_THROWS_AS(validate_spec(empty), EmptyBox);
  ProgramSpec nested = parse_program(
      "let box_p x = [(0, 1)];; let obj_p x = [(if x > 0 then (if x > 1 then x else 2) else 3, 0)];;");
  CHECK_THROWS_AS(validate_spec(nested), NestedConditional);
}

TEST_CASE("conditionals and lets") {
  ProgramSpec cav = testutil::load("cav10");
  CHECK(conditional_depth(cav.objective) == 1);
  ValidationReport rep = validate_spec(cav);
  CHECK_FALSE(rep.polynomial);
  ProgramSpec carbon = testutil::load("carbonGas");
  ExprPtr flat = inline_lets(carbon.objective);
  CHECK(max_var_index(flat) < carbon.n);
  std::vector<double> pt = {0.35, 4.0e-5};
  CHECK(eval_double(flat, pt) == doctest::Approx(eval_double(carbon.objective, pt)));
}

TEST_CASE("source round trip") {
  for (const char* name : {"kepler1", "doppler1", "floudas3_3", "perin", "sphere", "carbonGas"}) {
    ProgramSpec s = testutil::load(name);
    ProgramSpec t = parse_program(to_source(s));
    CHECK(t.n == s.n);
    CHECK(t.box_lo == s.box_lo);
    CHECK(t.box_hi == s.box_hi);
    CHECK(t.constraints == s.constraints);
    CHECK(structurally_equal(inline_lets(t.objective), inline_lets(s.objective)));
  }
}

TEST_CASE("symbolic differentiation matches finite differences") {
  ProgramSpec s = testutil::load("turbine1");
  ExprPtr f = inline_lets(s.objective);
  std::vector<double> pt;
  for (int i = 0; i < s.n; ++i) pt.push_back(to_double((s.box_lo[i] + s.box_hi[i]) / 2));
  for (int v = 0; v < s.n; ++v) {
    ExprPtr d = symbolic_diff(f, v);
    double h = 1e-6;
    std::vector<double> a = pt, b = pt;
    a[v] -= h;
    b[v] += h;
    double fd = (eval_double(f, b) - eval_double(f, a)) / (2 * h);
    CHECK(eval_double(d, pt) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("simplifying constructors") {
  ExprPtr x = make_var(0);
  CHECK(is_const(simp_mul(x, make_const(0)), 0));
  CHECK(simp_add(x, make_const(0)) == x);
  CHECK(simp_mul(make_const(1), x) == x);
  CHECK(is_const(simp_add(make_const(2), make_const(3)), 5));
  CHECK(depends_on(make_add(x, make_var(1)), 1));
  CHECK_FALSE(depends_on(x, 1));
  CHECK(has_transcendental(make_transc(Fn::Exp, x)));
  CHECK(has_sqrt_or_div(make_sqrt(x)));
  CHECK(is_polynomial_expr(make_mul(x, x)));
  CHECK(from_poly(to_poly(make_mul(x, make_add(x, make_const(1))), 1)) != nullptr);
}
