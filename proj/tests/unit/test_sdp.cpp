#include "roundoff/errors.hpp"
#include "roundoff/sdp.hpp"

#include <doctest.h>

using namespace roundoff;

namespace {

// min x  s.t.  [[x, 1], [1, x]] >= 0, optimum 1.
SdpProblem two_by_two() {
  SdpProblem P;
  P.block_sizes = {2};
  P.c = {1};
  P.F.resize(2);
  P.F[0] = {{0, 0, 1, -1}};
  P.F[1] = {{0, 0, 0, 1}, {0, 1, 1, 1}};
  return P;
}

// min x1 + x2  s.t.  x1 >= 1, x2 >= 2 as a diagonal block, plus [[x1, x2], [x2, 5]] >= 0.
SdpProblem mixed() {
  SdpProblem P;
  P.block_sizes = {-2, 2};
  P.c = {1, 1};
  P.F.resize(3);
  P.F[0] = {{0, 0, 0, 1}, {0, 1, 1, 2}, {1, 1, 1, -5}};
  P.F[1] = {{0, 0, 0, 1}, {1, 0, 0, 1}};
  P.F[2] = {{0, 1, 1, 1}, {1, 0, 1, 1}};
  return P;
}

}  // namespace

TEST_CASE("1x1 problem") {
  SdpProblem P;
  P.block_sizes = {1};
  P.c = {1};
  P.F = {{{0, 0, 0, 3}}, {{0, 0, 0, 1}}};
  SdpSolution s = solve(P);
  CHECK(s.status == SdpStatus::Optimal);
  CHECK(s.primal_objective == doctest::Approx(3).epsilon(1e-7));
  CHECK(s.dual_objective == doctest::Approx(3).epsilon(1e-7));
}

TEST_CASE("2x2 problem") {
  SdpSolution s = solve(two_by_two());
  CHECK(s.status == SdpStatus::Optimal);
  CHECK(s.x[0] == doctest::Approx(1).epsilon(1e-6));
  CHECK(s.dual_objective == doctest::Approx(1).epsilon(1e-6));
  CHECK(s.relative_gap < 1e-7);
}

TEST_CASE("diagonal and dense blocks together") {
  SdpSolution s = solve(mixed());
  CHECK(s.status == SdpStatus::Optimal);
  CHECK(s.x[0] >= 1 - 1e-6);
  CHECK(s.x[1] >= 2 - 1e-6);
  // x1 * 5 >= x2^2 with x2 = 2 forces x1 >= 0.8; the diagonal bound x1 >= 1 is active.
  CHECK(s.primal_objective == doctest::Approx(3).epsilon(1e-6));
}

TEST_CASE("infeasible problem is reported") {
  // x >= 1 and -x >= 0.
  SdpProblem P;
  P.block_sizes = {-2};
  P.c = {1};
  P.F = {{{0, 0, 0, 1}}, {{0, 0, 0, 1}, {0, 1, 1, -1}}};
  SdpSolution s = solve(P);
  CHECK(s.status != SdpStatus::Optimal);
}

TEST_CASE("SDPA sparse format round trip") {
  SdpProblem P = mixed();
  std::string text = export_sdpa_sparse(P);
  SdpProblem Q = import_sdpa_sparse(text);
  CHECK(Q.block_sizes == P.block_sizes);
  CHECK(Q.c == P.c);
  for (int k = 0; k <= P.m(); ++k) {
    auto a = dense_matrix(P, k), b = dense_matrix(Q, k);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK((a[j] - b[j]).norm() == 0);
  }
  CHECK(export_sdpa_sparse(Q) == text);
  CHECK_THROWS(import_sdpa_sparse("2\n1\n"));
}

TEST_CASE("SDPA result round trip") {
  SdpProblem P = two_by_two();
  SdpSolution s = solve(P);
  SdpSolution t = parse_sdpa_solution(write_sdpa_result(s, P), &P);
  CHECK(t.status == SdpStatus::Optimal);
  CHECK(t.x[0] == doctest::Approx(s.x[0]).epsilon(1e-12));
  CHECK(t.dual_objective == doctest::Approx(s.dual_objective).epsilon(1e-12));
  REQUIRE(t.Y.size() == 1u);
  CHECK((t.Y[0] - s.Y[0]).norm() < 1e-10);
  CHECK_THROWS_AS(parse_sdpa_solution("garbage", &P), MalformedSolutionFile);
}

TEST_CASE("dual projection restores the equality constraints") {
  SdpProblem P = mixed();
  SdpSolution s = solve(P);
  std::vector<Eigen::MatrixXd> Y = s.Y;
  Y[1](0, 1) += 1e-3;
  Y[1](1, 0) += 1e-3;
  project_dual(P, Y);
  for (int i = 1; i <= P.m(); ++i) {
    auto F = dense_matrix(P, i);
    double v = 0;
    for (std::size_t b = 0; b < F.size(); ++b) v += (F[b].array() * Y[b].array()).sum();
    CHECK(v == doctest::Approx(P.c[i - 1]).epsilon(1e-10));
  }
}
