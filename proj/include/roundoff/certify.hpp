#pragma once

#include "roundoff/interval.hpp"
#include "roundoff/polynomial.hpp"
#include "roundoff/sdp.hpp"
#include "roundoff/sos.hpp"

#include <random>
#include <string>
#include <vector>

namespace roundoff {

struct WeightedSquare {
  Rational weight;  // >= 0
  Poly q;
};

// sigma = sum_i weight_i q_i^2, multiplied by constraint g (index into the constraint list, -1 = 1).
struct SosTerm {
  int constraint = -1;
  std::vector<WeightedSquare> squares;
};

// objective - mu - sum_k sigma_k g_k = residual, bounded on the box.
struct SosCertificate {
  std::string name;
  std::string side;  // "min" or "max" of the linear part, or free text
  unsigned order = 0;
  int nvars = 0;
  Rational scale = 1;  // bound on the original quantity = scale * certified bound
  Poly objective;
  std::vector<Interval> box;
  std::vector<Poly> constraints;
  Rational mu = 0;
  Rational claim = 0;  // certified bound claimed by the producer
  std::vector<SosTerm> terms;
};

struct CheckResult {
  bool passed = false;
  Rational certified_bound = 0;
  Interval residual{0};
  std::size_t residual_terms = 0;
  std::string message;
};

// Q = L D L^T over the rationals (L unit lower triangular, no pivoting). Throws on a negative
// pivot; zero pivots require the matching column to vanish.
struct RationalLdl {
  std::vector<std::vector<Rational>> L;
  std::vector<Rational> D;
};
RationalLdl exact_ldl(const std::vector<std::vector<Rational>>& Q);

// Pivoted floating LDL with negative pivots clipped to zero. Column i of L pairs with D[i];
// the permutation is folded into L (row p of L belongs to basis element p).
struct FloatLdl {
  Eigen::MatrixXd L;
  Eigen::VectorXd D;
  int clipped = 0;
};
FloatLdl clipped_ldl(const Eigen::MatrixXd& Q);

// Projects the dual onto the affine constraints, factors each Gram block, rounds the factors to
// rationals, sets mu so the residual has no constant term, and computes the certified bound.
// `K` must list the multipliers used by the program (a block with multiplier g maps to the
// constraint equal to g).
SosCertificate extract_certificate(const SdpSolution& sol, const SosProgram& prog, const ConstraintSet& K,
                                   const std::vector<Interval>& box);

// Exact check of the identity with interval bounding of the residual over the box.
// Every constraint of the certificate must appear in K. passed = certified_bound >= claim.
CheckResult check_certificate(const Poly& objective, const ConstraintSet& K, const SosCertificate& cert,
                              const std::vector<Interval>& box);
// Checks the certificate against its own recorded objective, constraints and box.
CheckResult check_certificate(const SosCertificate& cert);

Poly residual_polynomial(const SosCertificate& cert);

std::string certificate_to_text(const SosCertificate& cert);
SosCertificate certificate_from_text(const std::string& text);
std::string certificates_to_text(const std::vector<SosCertificate>& certs);
std::vector<SosCertificate> certificates_from_text(const std::string& text);

// Sign flip of one nonzero square-root coefficient chosen at random.
SosCertificate mutate_certificate(const SosCertificate& cert, std::mt19937_64& rng);

std::string poly_to_text(const Poly& p);
Poly poly_from_text(const std::string& text, int nvars);

}  // namespace roundoff
