#include "roundoff/certify.hpp"
#include "roundoff/errors.hpp"
#include "roundoff/sos.hpp"

#include <doctest.h>

#include <random>

using namespace roundoff;

namespace {

struct Example {
  Poly f;
  ConstraintSet K;
  std::vector<Interval> box;
  SosCertificate cert;
};

// 1/4 + x1^4 - 2 x1^2 x2^2 + x2^4 = (1/2)^2 + (x1^2 - x2^2)^2.
Example quartic() {
  Example e;
  Poly x = Poly::variable(0, 2), y = Poly::variable(1, 2);
  e.f = Poly::constant(Rational(1, 4), 2) + x.pow(4) - (x * x * y * y).scale(2) + y.pow(4);
  e.box = {Interval(-1, 1), Interval(-1, 1)};
  e.K = box_constraints(e.box, 2);
  SosProgram p = build_dense_relaxation(e.f, e.K, 2);
  SdpSolution s = solve(p.sdp);
  e.cert = extract_certificate(s, p, e.K, e.box);
  return e;
}

}  // namespace

TEST_CASE("exact LDL") {
  std::vector<std::vector<Rational>> Q = {{4, 2, 0}, {2, 5, 1}, {0, 1, 3}};
  RationalLdl f = exact_ldl(Q);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Rational v = 0;
      for (int k = 0; k < 3; ++k) v += f.L[i][k] * f.D[k] * f.L[j][k];
      CHECK(v == Q[i][j]);
    }
  for (const auto& d : f.D) CHECK(d >= 0);
  CHECK_THROWS(exact_ldl({{1, 2}, {2, 1}}));
}

TEST_CASE("clipped LDL keeps weights nonnegative") {
  Eigen::MatrixXd Q(3, 3);
  Q << 2, 1, 0, 1, -1, 0, 0, 0, 1;
  FloatLdl f = clipped_ldl(Q);
  CHECK(f.clipped >= 1);
  for (int i = 0; i < f.D.size(); ++i) CHECK(f.D[i] >= 0);
  Eigen::MatrixXd P(2, 2);
  P << 2, 1, 1, 2;
  FloatLdl g = clipped_ldl(P);
  CHECK(g.clipped == 0);
  CHECK((g.L * g.D.asDiagonal() * g.L.transpose() - P).norm() < 1e-12);
}

TEST_CASE("certificate for the quartic") {
  Example e = quartic();
  CheckResult r = check_certificate(e.f, e.K, e.cert, e.box);
  CHECK(r.passed);
  CHECK(to_double(r.certified_bound) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(r.certified_bound <= Rational(1, 4));
  for (const auto& t : e.cert.terms)
    for (const auto& sq : t.squares) CHECK(sq.weight >= 0);
  CheckResult self = check_certificate(e.cert);
  CHECK(self.passed);
  CHECK(self.certified_bound == r.certified_bound);
}

TEST_CASE("certificate text round trip") {
  Example e = quartic();
  std::string text = certificate_to_text(e.cert);
  SosCertificate back = certificate_from_text(text);
  CHECK(certificate_to_text(back) == text);
  CHECK(check_certificate(back).certified_bound == check_certificate(e.cert).certified_bound);
  std::vector<SosCertificate> two = {e.cert, e.cert};
  two[1].name = "second";
  auto many = certificates_from_text(certificates_to_text(two));
  REQUIRE(many.size() == 2u);
  CHECK(many[1].name == "second");
  CHECK_THROWS_AS(certificate_from_text("not a certificate"), MalformedCertificate);
}

TEST_CASE("polynomial text round trip") {
  Poly x = Poly::variable(0, 3), z = Poly::variable(2, 3);
  Poly p = (x * z).scale(Rational(-3, 7)) + z.pow(3) + Poly::constant(Rational(1, 9), 3);
  CHECK(poly_from_text(poly_to_text(p), 3) == p);
  CHECK(poly_from_text(poly_to_text(Poly(3)), 3).is_zero());
}

TEST_CASE("single coefficient mutations are detected") {
  Example e = quartic();
  std::mt19937_64 rng(99);
  int detected = 0;
  for (int i = 0; i < 50; ++i) {
    SosCertificate m = mutate_certificate(e.cert, rng);
    detected += !check_certificate(m).passed;
  }
  CHECK(detected == 50);
}

TEST_CASE("residual is the identity defect") {
  Example e = quartic();
  Poly res = residual_polynomial(e.cert);
  Poly sum = Poly::constant(e.cert.mu, 2);
  for (const auto& t : e.cert.terms) {
    Poly sigma(2);
    for (const auto& sq : t.squares) sigma += (sq.q * sq.q).scale(sq.weight);
    sum += t.constraint < 0 ? sigma : sigma * e.cert.constraints[t.constraint];
  }
  CHECK(e.f - sum == res);
}
