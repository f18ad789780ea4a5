#include "roundoff/sos.hpp"
#include "roundoff/sparsity.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace roundoff;

namespace {

struct Kepler {
  Poly f;
  ConstraintSet K;
  std::vector<Interval> box;
};

Kepler kepler0() {
  ProgramSpec s = testutil::load("kepler0");
  Kepler k;
  k.f = to_poly(s.objective, 6);
  for (int i = 0; i < 6; ++i) k.box.emplace_back(s.box_lo[i], s.box_hi[i]);
  k.K = box_constraints(k.box, 6);
  Poly g = Poly::constant(243, 6);
  for (int i = 0; i < 6; ++i) g -= Poly::variable(i, 6).pow(2);
  k.K.g.push_back(g);
  return k;
}

}  // namespace

TEST_CASE("box constraints and Archimedean constant") {
  ConstraintSet K = box_constraints({Interval(4, Rational(159, 25)), Interval(-3, 1)}, 2);
  REQUIRE(K.g.size() == 2u);
  CHECK(K.g[0].evaluate(std::vector<Rational>{4, 0}) == 0);
  CHECK(K.g[0].evaluate(std::vector<Rational>{5, 0}) > 0);
  CHECK(K.archimedean_M == 50);  // ceil(6.36^2 + 9) = ceil(49.4496)
}

TEST_CASE("dense kepler0 relaxation values") {
  Kepler k = kepler0();
  SosProgram p1 = build_dense_relaxation(k.f, k.K, 1);
  CHECK(p1.sdp.m() == 27);  // 28 moments minus the constant one
  SdpSolution s1 = solve(p1.sdp);
  CHECK(s1.status == SdpStatus::Optimal);
  CHECK(p1.bound_from(s1) == doctest::Approx(20.755).epsilon(1e-3));
  SosProgram p2 = build_dense_relaxation(k.f, k.K, 2);
  CHECK(p2.sdp.m() == 209);
  SdpSolution s2 = solve(p2.sdp);
  CHECK(p2.bound_from(s2) == doctest::Approx(20.8608).epsilon(1e-3));
  CHECK(p2.bound_from(s2) >= p1.bound_from(s1) - 1e-6);
}

TEST_CASE("minimal order") {
  Kepler k = kepler0();
  CHECK(default_order(k.f, k.K) == 1);
  Poly cubic = Poly::variable(0, 6).pow(3);
  CHECK(default_order(cubic, k.K) == 2);
}

TEST_CASE("sparse relaxation matches dense on kepler0") {
  Kepler k = kepler0();
  CliqueSet cc = chordal_cliques(csp_graph(k.f, {}, 6));
  ConstraintSet Kb = with_clique_balls(box_constraints(k.box, 6), cc, 6);
  SosProgram sp = build_sparse_relaxation(k.f, Kb, cc, 2);
  SdpSolution s = solve(sp.sdp);
  CHECK(s.status == SdpStatus::Optimal);
  CHECK(sp.bound_from(s) == doctest::Approx(20.8608).epsilon(1e-3));
  SosProgram dp = build_dense_relaxation(k.f, box_constraints(k.box, 6), 2);
  CHECK(sp.sdp.m() < dp.sdp.m());
}

TEST_CASE("single clique gives the dense structure") {
  Poly x = Poly::variable(0, 2), y = Poly::variable(1, 2);
  Poly f = x * x * y * y - x * y + Poly::constant(1, 2);
  ConstraintSet K = box_constraints({Interval(-1, 1), Interval(-1, 1)}, 2);
  CliqueSet one{{{0, 1}}};
  SosProgram sp = build_sparse_relaxation(f, with_clique_balls(K, one, 2), one, 2);
  SosProgram dp = build_dense_relaxation(f, K, 2);
  CHECK(sp.rows == dp.rows);
  double a = sp.bound_from(solve(sp.sdp)), b = dp.bound_from(solve(dp.sdp));
  CHECK(a == doctest::Approx(b).epsilon(1e-5));
  CHECK(b == doctest::Approx(0.75).epsilon(1e-4));
}

TEST_CASE("linear part relaxation") {
  // l = x e0 - e1 over x in [-1, 1], e in [-1, 1]^2: min = -2.
  Poly x = Poly::variable(0, 1);
  ConstraintSet X = box_constraints({Interval(-1, 1)}, 1);
  std::vector<Poly> s = {x, Poly::constant(-1, 1)};
  SosProgram lo = build_linear_part_relaxation(s, X, 1, 1, Sense::Min);
  SdpSolution sl = solve(lo.sdp);
  CHECK(lo.bound_from(sl) == doctest::Approx(-2).epsilon(1e-5));
  SosProgram hi = build_linear_part_relaxation(s, X, 1, 1, Sense::Max);
  CHECK(-hi.bound_from(solve(hi.sdp)) == doctest::Approx(2).epsilon(1e-5));
  ConstraintSet K = linear_part_constraints(X, 1, 2);
  CHECK(K.g.size() == X.g.size() + 4);
  CHECK(K.g.back().nvars() == 3);
}
