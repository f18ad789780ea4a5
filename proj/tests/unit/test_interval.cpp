#include "roundoff/errors.hpp"
#include "roundoff/interval.hpp"
#include "roundoff/program.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace roundoff;

namespace {

Interval random_interval(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  double a = u(rng), b = u(rng);
  if (a > b) std::swap(a, b);
  return Interval(Rational(a), Rational(b));
}

double pick(std::mt19937_64& rng, const Interval& I) {
  std::uniform_real_distribution<double> u(0, 1);
  double l = to_double(I.lo()), h = to_double(I.hi());
  return std::min(h, std::max(l, l + u(rng) * (h - l)));
}

}  // namespace

TEST_CASE("arithmetic containment on random cases") {
  std::mt19937_64 rng(17);
  int violations = 0;
  for (int i = 0; i < 2000; ++i) {
    Interval a = random_interval(rng, -5, 5), b = random_interval(rng, -5, 5);
    Rational x = Rational(pick(rng, a)), y = Rational(pick(rng, b));
    violations += !(a + b).contains(x + y);
    violations += !(a - b).contains(x - y);
    violations += !(a * b).contains(x * y);
    violations += !sqr(a).contains(x * x);
    if (!b.contains_zero()) violations += !(a / b).contains(x / y);
  }
  CHECK(violations == 0);
}

TEST_CASE("elementary function containment") {
  std::mt19937_64 rng(23);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    Interval a = random_interval(rng, -3, 3), p = random_interval(rng, 0.01, 9), u = random_interval(rng, -0.99, 0.99);
    double x = pick(rng, a), y = pick(rng, p), z = pick(rng, u);
    violations += !exp(a).contains(std::exp(x));
    violations += !sin(a).contains(std::sin(x));
    violations += !cos(a).contains(std::cos(x));
    violations += !atan(a).contains(std::atan(x));
    violations += !log(p).contains(std::log(y));
    violations += !sqrt(p).contains(std::sqrt(y));
    violations += !asin(u).contains(std::asin(z));
    violations += !acos(u).contains(std::acos(z));
  }
  CHECK(violations == 0);
}

TEST_CASE("interval basics") {
  Interval a(-2, 3);
  CHECK(a.mag() == 3);
  CHECK(a.mig() == 0);
  CHECK(Interval(2, 5).mig() == 2);
  CHECK(a.width() == 5);
  CHECK(hull(Interval(0, 1), Interval(3, 4)) == Interval(0, 4));
  CHECK(intersect(Interval(0, 3), Interval(2, 5)) == Interval(2, 3));
  CHECK_THROWS_AS(intersect(Interval(0, 1), Interval(2, 3)), Error);
  CHECK_THROWS_AS(Interval(1) / Interval(-1, 1), DivisionByZeroInterval);
  CHECK(pow(Interval(-2, 1), 2) == Interval(0, 4));
  CHECK(pi_interval().lo() > Rational(M_PI));
  CHECK(pi_interval().hi() < Rational(std::nextafter(M_PI, 4.0)));
  CHECK(pi_interval().width() < Rational(1, 1000000));
  Interval t = Interval(Rational(1, 3), Rational(2, 3)).tidy(16, 8);
  CHECK(t.contains(Rational(1, 3)));
  CHECK(t.contains(Rational(2, 3)));
}

TEST_CASE("expression bounds") {
  ExprPtr x = make_var(0), y = make_var(1);
  ExprPtr e = make_div(x, make_add(make_const(1), x));
  Interval r = ia_bound(e, {Interval(0, 1)});
  CHECK(r.contains(Rational(1, 2)));
  CHECK(r.contains(0));
  ExprPtr q = make_sub(make_mul(x, y), make_mul(y, x));
  CHECK(ia_bound(q, {Interval(1, 2), Interval(3, 4)}).contains(0));
  Poly p = Poly::variable(0, 1) * Poly::variable(0, 1);
  CHECK(ia_bound(p, {Interval(-1, 2)}).subset_of(Interval(-2, 4)));
}

TEST_CASE("second-order remainder of x*e1*e2") {
  // r = x(1+e1)(1+e2) - x with x in [1,1]: only d2/de1de2 = x survives, so B = eps^2.
  ExprPtr x = make_var(0), e1 = make_var(1), e2 = make_var(2);
  ExprPtr body = make_sub(make_mul(make_mul(x, make_add(make_const(1), e1)), make_add(make_const(1), e2)), x);
  Rational eps = pow2(-53);
  std::vector<Interval> box = {Interval(1), Interval(-eps, eps), Interval(-eps, eps)};
  Interval B = taylor_remainder_bound(body, box, {1, 2}, {eps, eps});
  CHECK(B.hi() == eps * eps);
  Interval M = taylor_remainder_majorant(body, box, {1, 2}, {eps, eps});
  CHECK(M.hi() >= B.hi());
  CHECK(first_order_majorant(body, box, {1, 2}, {eps, eps}) >= 2 * eps);
}
