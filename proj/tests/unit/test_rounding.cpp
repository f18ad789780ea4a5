#include "roundoff/errors.hpp"
#include "roundoff/interval.hpp"
#include "roundoff/rounding.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <random>

using namespace roundoff;

TEST_CASE("error variable counts for kepler0") {
  ProgramSpec s = testutil::load("kepler0");
  RoundingOptions o;
  o.input_rounding = false;
  CHECK(round_program(s, o).errors.size() == 14);
  o.neg_error = true;
  CHECK(round_program(s, o).errors.size() == 15);
  o.input_rounding = true;
  o.neg_error = false;
  RoundedExpr r = round_program(s, o);
  CHECK(r.errors.size() == 20);
  for (const auto& e : r.errors) CHECK(e.magnitude == pow2(-53));
}

TEST_CASE("rounding nodes have the (1+e) shape") {
  ProgramSpec s = parse_program("let box_p x y = [(1, 2); (1, 2)];; let obj_p x y = [(x * y, 0)];;");
  RoundingOptions o;
  o.input_rounding = false;
  RoundedExpr r = round_program(s, o);
  REQUIRE(r.errors.size() == 1);
  ExprPtr child;
  CHECK(rounding_factor(r.body, r.err_base(), &child) == r.err_index(0));
  CHECK(structurally_equal(child, s.objective));
  std::vector<Interval> box = extended_box(r, {Interval(1, 2), Interval(1, 2)});
  CHECK(box.size() == 3u);
  CHECK(box[2] == Interval(-pow2(-53), pow2(-53)));
}

TEST_CASE("constants") {
  ProgramSpec s = parse_program("let box_p x = [(0, 1)];; let obj_p x = [(0.1 * x + 3 + 0.5, 0)];;");
  RoundingOptions o;
  CHECK(round_program(s, o).errors.size() == 5);  // 0.1, x, mul, two adds
  o.constant_rounding = false;
  CHECK(round_program(s, o).errors.size() == 4);
  ProgramSpec single = s;
  single.format = FpFormat::binary32();
  CHECK(round_program(single, {}).errors[0].magnitude == pow2(-24));
}

TEST_CASE("transcendental and sqrt magnitudes") {
  ProgramSpec s = parse_program("let box_p x = [(1, 2)];; let obj_p x = [(exp(x) + sqrt(x), 0)];;");
  RoundingOptions o;
  o.input_rounding = false;
  RoundedExpr r = round_program(s, o);
  std::vector<Rational> mags = r.magnitudes();
  std::sort(mags.begin(), mags.end());
  REQUIRE(mags.size() == 3u);
  CHECK(mags[0] == pow2(-53));
  CHECK(mags[1] == pow2(-53));
  CHECK(mags[2] == pow2(-53) * Rational(3, 2));
}

TEST_CASE("uncertainties share one error per input") {
  ProgramSpec s = parse_program(
      "let box_p x = [(1, 2)];; let uncert_p x = [1e-3];; let obj_p x = [(x * x, 0)];;");
  RoundingOptions o;
  o.input_rounding = false;
  RoundedExpr r = round_program(s, o);
  CHECK(r.errors.size() == 2);
  bool found = false;
  for (const auto& e : r.errors) found = found || e.magnitude == Rational(1, 1000);
  CHECK(found);
}

TEST_CASE("gamma_k bounds products of rounding factors at every corner") {
  Rational eps = pow2(-8);
  for (int k = 1; k <= 8; ++k) {
    Rational g = gamma_k(k, eps);
    for (int mask = 0; mask < (1 << k); ++mask) {
      Rational p = 1;
      for (int i = 0; i < k; ++i) p *= 1 + ((mask >> i) & 1 ? eps : -eps);
      CHECK(abs(p - 1) <= g);
    }
  }
}

TEST_CASE("merged model encloses the unmerged one at every error corner") {
  ProgramSpec s = parse_program(
      "let box_p a b c d = [(1, 2); (-1, 3); (0.5, 1); (2, 4)];; let obj_p a b c d = [(a * b * c * d, 0)];;");
  s.format = FpFormat::with_precision(8);
  RoundedExpr r = round_program(s, {});
  RoundingOptions mo;
  mo.merge = true;
  RoundedExpr m = round_program(s, mo);
  REQUIRE(r.errors.size() == 7);
  CHECK(m.errors.size() < r.errors.size());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  int violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(4);
    std::vector<Interval> mbox;
    for (int i = 0; i < 4; ++i) {
      x[i] = to_double(s.box_lo[i]) + u(rng) * to_double(s.box_hi[i] - s.box_lo[i]);
      mbox.emplace_back(Rational(x[i]));
    }
    mbox.resize(m.index_space);
    for (const auto& e : m.errors) mbox.emplace_back(-e.magnitude, e.magnitude);
    Interval enclosure = ia_bound(m.body, mbox);
    int k = static_cast<int>(r.errors.size());
    for (int mask = 0; mask < (1 << k); ++mask) {
      std::vector<double> pt = x;
      pt.resize(r.index_space);
      for (int j = 0; j < k; ++j) pt.push_back(to_double((mask >> j) & 1 ? r.errors[j].magnitude : -r.errors[j].magnitude));
      violations += !enclosure.contains(eval_double(r.body, pt));
    }
  }
  CHECK(violations == 0);
}
