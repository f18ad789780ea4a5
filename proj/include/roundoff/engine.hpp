#pragma once

#include "roundoff/certify.hpp"
#include "roundoff/interval.hpp"
#include "roundoff/program.hpp"
#include "roundoff/rounding.hpp"
#include "roundoff/sdp.hpp"
#include "roundoff/sos.hpp"

#include <map>
#include <string>
#include <vector>

namespace roundoff {

struct EngineOptions {
  unsigned order = 0;  // 0 = minimal order d0 per relaxation
  RoundingOptions rounding;
  bool certify = false;
  int subdivide = 1;                 // number of input-box pieces
  std::string solver = "embedded";   // or "sdpa-files:<dir>"
  SdpParams sdp;
  int maxplus_points = 3;
  int max_basis = 130;               // largest Gram basis handled by the SDP path
  std::size_t max_rows = 12000;      // largest number of coefficient-matching rows
  int ia_budget = 64;                // boxes for the interval fallback of the linear part
  int fallback_budget = 2048;        // boxes when the SDP path is unavailable
  bool parallel = true;
  bool statements_only = false;      // record SOS problem statements instead of solving
};

// ----- lifting of semialgebraic and transcendental terms -----

struct MaxplusApprox {
  Fn kind = Fn::Exp;
  Interval domain;
  std::vector<Rational> points;
  Rational gamma_lower = 0;  // >= sup(-f'') on the domain
  Rational gamma_upper = 0;  // >= sup(f'') on the domain
  std::vector<Poly> lower;   // univariate quadratics in variable 0, f >= max lower
  std::vector<Poly> upper;   // f <= min upper
};

// Points default to the endpoints and midpoint when empty.
MaxplusApprox transc_approx(Fn kind, const Interval& domain, const std::vector<Rational>& points = {});
std::vector<Rational> default_maxplus_points(const Interval& domain, int count);

struct LiftedVar {
  std::string kind;     // "inv", "sqrt" or a function name
  ExprPtr definition;   // over the original variables
  Poly argument;        // lifted polynomial of the argument
};

struct LiftedSystem {
  int n_orig = 0;
  int nvars = 0;
  std::vector<Interval> box;
  std::vector<Poly> constraints;  // g >= 0, including both signs of every equality
  std::vector<Poly> equalities;   // defining equalities (= 0)
  std::vector<LiftedVar> vars;    // index n_orig + k
};

// Replaces divisions, square roots and transcendental calls by fresh variables with polynomial
// constraints; the returned polynomials live in the extended variable space.
class Lifter {
 public:
  Lifter(int n, std::vector<Interval> box, int maxplus_points = 3);
  Poly lift(const ExprPtr& e);
  const LiftedSystem& system() const { return sys_; }
  // Polynomials created before further lifting keep their variable count; this widens them.
  Poly widen(const Poly& p) const;

 private:
  LiftedSystem sys_;
  int maxplus_points_;
  std::map<std::string, int> keys_;
  std::map<const Expr*, Poly> memo_;
  int fresh(const std::string& key, const std::string& kind, const ExprPtr& def, const Poly& arg,
            const Interval& range);
};

// Values of the lifted variables at a point of the original box.
std::vector<double> lifted_point(const LiftedSystem& sys, const std::vector<double>& x);

// ----- linear part and bound assembly -----

struct Linearization {
  RoundedExpr rounded;
  std::vector<ExprPtr> s;  // s_j(x) = d r / d e_j at e = 0
  ExprPtr c0;              // r(x, 0)
};

// r(x, e) = rounded(x, e) - reference(x).
Linearization linearize(const RoundedExpr& rounded, const ExprPtr& reference);

// l(x, e) = c0(x) + sum_j s_j(x) e_j with |e_j| <= b_j over box ∩ {g >= 0}.
struct LinearProblem {
  std::string tag;
  int n = 0;
  std::vector<Interval> box;
  std::vector<Poly> constraints;
  std::vector<Poly> s;
  std::vector<Rational> b;
  Poly offset;
};

struct CertRecord {
  std::string tag;
  double solver_bound = 0;   // scaled back to the original quantity
  std::string solver_status;
  Rational certified_bound;  // same scale
  bool passed = false;
};

struct LinearPartResult {
  Interval interval;
  bool tight = true;
  std::string method;
  unsigned order = 0;
  std::vector<SosCertificate> certificates;
  std::vector<CertRecord> records;
  std::vector<std::string> notes;
};

LinearPartResult sdp_poly(const LinearProblem& problem, const EngineOptions& opt);

// Interval bound of c0 + sum_j s_j e_j by branch and bound over the box.
Interval ia_linear_bound(const std::vector<ExprPtr>& s, const ExprPtr& c0, const std::vector<Rational>& b,
                         const std::vector<Interval>& box, const std::vector<Poly>& constraints, int budget);

struct TermReport {
  std::string label;
  Interval linear{0}, remainder{0}, total{0};
  std::string method;
  bool tight = true;
  unsigned order = 0;
  int errors = 0;
  int lifted = 0;
};

struct AnalysisResult {
  std::string name;
  std::string format;
  Interval interval{0};
  Rational bound = 0;
  unsigned order = 0;
  bool tight = true;
  std::vector<TermReport> terms;
  Interval condition_error{0};
  std::vector<std::string> notes;
  std::vector<SosCertificate> certificates;
  std::vector<CertRecord> cert_records;
  double seconds = 0;
};

AnalysisResult analyze(const ProgramSpec& spec, const EngineOptions& opt);

// Error of `rounded` against `reference` over box ∩ {constraints >= 0}.
TermReport bound_error(const RoundedExpr& rounded, const ExprPtr& reference, int n, const std::vector<Interval>& box,
                       const std::vector<Poly>& constraints, const EngineOptions& opt, const std::string& tag,
                       AnalysisResult& sink);

struct CertificateCheck {
  std::string tag;
  bool statement_matches = false;
  CheckResult result;
  Rational scaled_bound = 0;  // result.certified_bound times the certificate scale
};
// Re-derives the problem statements for the program and checks each certificate against them.
std::vector<CertificateCheck> verify_certificates(const ProgramSpec& spec, const EngineOptions& opt,
                                                  const std::vector<SosCertificate>& certs);

std::vector<Interval> program_box(const ProgramSpec& spec);

}  // namespace roundoff
