#include "roundoff/polynomial.hpp"

#include <doctest.h>

#include <random>

using namespace roundoff;

namespace {

Poly random_poly(std::mt19937_64& rng, int nvars, int terms, int maxdeg) {
  std::uniform_int_distribution<int> coef(-9, 9), den(1, 4), var(0, nvars - 1), deg(0, maxdeg);
  Poly p(nvars);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> e(nvars, 0);
    int d = deg(rng);
    for (int k = 0; k < d; ++k) e[var(rng)]++;
    p.add_term(Monomial::from_dense(e), Rational(coef(rng), den(rng)));
  }
  return p;
}

}  // namespace

TEST_CASE("ring axioms hold exactly") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Poly a = random_poly(rng, 3, 5, 3), b = random_poly(rng, 3, 5, 3), c = random_poly(rng, 3, 4, 2);
    Poly zero(3), one = Poly::constant(1, 3);
    CHECK(a + b == b + a);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a * b == b * a);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK(a + zero == a);
    CHECK(a * one == a);
    CHECK((a - a).is_zero());
    CHECK((a * zero).is_zero());
    CHECK(a.pow(2) == a * a);
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Poly a = random_poly(rng, 2, 4, 3), b = random_poly(rng, 2, 4, 3);
    std::vector<Rational> pt = {Rational(trial % 7, 3), Rational(-2, trial % 5 + 1)};
    CHECK((a * b).evaluate(pt) == a.evaluate(pt) * b.evaluate(pt));
    CHECK((a - b).evaluate(pt) == a.evaluate(pt) - b.evaluate(pt));
  }
}

TEST_CASE("monomial order and bases") {
  Monomial x = Monomial::var(0), y = Monomial::var(1);
  GrlexLess lt;
  CHECK(lt(Monomial(), x));
  CHECK(lt(y, x));
  CHECK(lt(x, y * y));
  CHECK((x * y).degree() == 2);
  CHECK((x * x).reduce(0) == x);
  CHECK(x.divides(x * y));
  CHECK_FALSE(y.divides(x));
  CHECK(binomial(8, 2) == 28);
  CHECK(binomial(10, 4) == 210);
  CHECK(monomial_basis({0, 1, 2, 3, 4, 5}, 2).size() == 28);
  CHECK(monomial_basis({1, 4}, 3).size() == 10);
}

TEST_CASE("calculus and substitution") {
  Poly x = Poly::variable(0, 2), y = Poly::variable(1, 2);
  Poly p = x * x * y + y.scale(3) - Poly::constant(2, 2);
  CHECK(p.differentiate(0) == (x * y).scale(2));
  CHECK(p.differentiate(1) == x * x + Poly::constant(3, 2));
  CHECK(p.degree() == 3);
  CHECK(p.degree_in(0) == 2);
  Poly q = p.compose({x + Poly::constant(1, 2), y}, 2);
  CHECK(q.evaluate(std::vector<Rational>{0, 1}) == p.evaluate(std::vector<Rational>{1, 1}));
  Poly r = p.partial_evaluate({{1, Rational(2)}});
  CHECK(r == (x * x).scale(2) + Poly::constant(4, 2));
  CHECK(p.max_abs_coefficient() == 3);
  SupportInfo s = support_and_degree(p);
  CHECK(s.degree == 3);
  CHECK(s.variables == std::set<int>{0, 1});
}
