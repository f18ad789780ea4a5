#include "roundoff/certify.hpp"
#include "roundoff/engine.hpp"
#include "roundoff/errors.hpp"
#include "roundoff/report.hpp"
#include "roundoff/sampling.hpp"
#include "roundoff/sos.hpp"
#include "roundoff/sparsity.hpp"

#include <mpfr.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace roundoff;

namespace {

// Tolerances and limits.
constexpr double kRelaxationTol = 0.02;
constexpr double kRelaxationSeconds = 10;
constexpr double kOverviewLoEps = 720, kOverviewHiEps = 800;
constexpr double kOverviewSeconds = 5;
constexpr double kRowSeconds = 60;
constexpr double kCertRelTol = 1e-9;
constexpr int kMutants = 100;
constexpr int kIntervalCases = 10000;
constexpr int kMaxplusPoints = 10000;
constexpr std::uint64_t kSoundnessSamples = 100000;
constexpr std::uint64_t kHartmanSamples = 10000;
constexpr double kLiftEqualityTol = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string bench_path(const std::string& name) { return std::string(ROUNDOFF_BENCH_DIR) + "/" + name + ".prog"; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;
  void fail(const std::string& why) {
    pass = false;
    lines.push_back("  FAIL " + why);
  }
  void note(const std::string& s) { lines.push_back("  " + s); }
};

struct Analyzed {
  AnalysisResult result;
  double seconds = 0;
  std::string error;
};

// Default-option analyses, shared between criteria.
std::map<std::string, Analyzed>& cache() {
  static std::map<std::string, Analyzed> c;
  return c;
}

const Analyzed& analyzed(const std::string& name) {
  auto it = cache().find(name);
  if (it != cache().end()) return it->second;
  Analyzed a;
  auto t0 = Clock::now();
  try {
    a.result = analyze(parse_program_file(bench_path(name)), EngineOptions{});
  } catch (const std::exception& e) {
    a.error = e.what();
  }
  a.seconds = seconds_since(t0);
  return cache()[name] = a;
}

std::vector<const ReferenceRow*> rows_in(const std::string& category) {
  std::vector<const ReferenceRow*> out;
  for (const auto& r : reference_table())
    if (category == r.category) out.push_back(&r);
  return out;
}

// bound <= factor * ref_bound, bound >= lower, time < limit.
void check_row(Outcome& o, const ReferenceRow& ref, double factor, double time_limit) {
  const Analyzed& a = analyzed(ref.name);
  if (!a.error.empty()) {
    o.fail(std::string(ref.name) + ": " + a.error);
    return;
  }
  double b = to_double(a.result.bound);
  double limit = factor * ref.ref_bound;
  std::string line = std::string(ref.id) + " " + ref.name + ": bound " + fmt("%.3e", b) + " limit " +
                     fmt("%.3e", limit) + " lower " + fmt("%.3e", ref.lower) + " time " + fmt("%.1f s", a.seconds);
  if (b > limit) return o.fail(line + " above limit");
  if (b < ref.lower) return o.fail(line + " below the lower bound");
  if (time_limit > 0 && a.seconds >= time_limit) return o.fail(line + " too slow");
  o.note(line);
}

ConstraintSet kepler0_example_set(Poly& f) {
  ProgramSpec s = parse_program_file(bench_path("kepler0"));
  f = to_poly(s.objective, 6);
  std::vector<Interval> box;
  for (int i = 0; i < 6; ++i) box.emplace_back(s.box_lo[i], s.box_hi[i]);
  ConstraintSet K = box_constraints(box, 6);
  Poly g = Poly::constant(243, 6);
  for (int i = 0; i < 6; ++i) g -= Poly::variable(i, 6).pow(2);
  K.g.push_back(g);
  return K;
}

Outcome criterion1() {
  Outcome o;
  Poly f;
  ConstraintSet K = kepler0_example_set(f);
  const double expected[] = {20.755, 20.8608};
  for (unsigned d = 1; d <= 2; ++d) {
    auto t0 = Clock::now();
    SosProgram p = build_dense_relaxation(f, K, d);
    SdpSolution s = solve(p.sdp);
    double dt = seconds_since(t0), v = p.bound_from(s);
    std::string line = "d=" + std::to_string(d) + ": " + fmt("%.5f", v) + " (expected " + fmt("%.4f", expected[d - 1]) +
                       ", status " + status_name(s.status) + ", " + fmt("%.2f s", dt) + ")";
    if (std::abs(v - expected[d - 1]) > kRelaxationTol || dt >= kRelaxationSeconds) o.fail(line);
    else o.note(line);
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto expect = [&](const std::string& what, std::uint64_t got, std::uint64_t want) {
    std::string line = what + " = " + std::to_string(got) + " (expected " + std::to_string(want) + ")";
    if (got != want) o.fail(line);
    else o.note(line);
  };
  expect("dense n=6 d=1", dense_variable_count(6, 1), 28);
  expect("dense n=6 d=2", dense_variable_count(6, 2), 210);
  expect("dense n=6 d=3", dense_variable_count(6, 3), 924);
  CliqueSet paper{{{0, 3}, {0, 1, 2}, {0, 1, 4}, {0, 4, 5}, {0, 2, 5}}};
  expect("sparse d=2", variable_count(paper, 2), 155);
  expect("sparse d=3", variable_count(paper, 3), 364);
  Poly f;
  ConstraintSet K = kepler0_example_set(f);
  for (unsigned d = 1; d <= 3; ++d) {
    // One moment per coefficient-matching row plus the constant moment.
    SosProgram p = build_dense_relaxation(f, K, d);
    expect("built dense d=" + std::to_string(d) + " moments", p.rows.size() + 1, dense_variable_count(6, d));
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  ProgramSpec s = parse_program_file(bench_path("kepler0"));
  s.format = FpFormat::binary32();
  EngineOptions opt;
  opt.order = 2;
  opt.rounding.input_rounding = false;
  opt.rounding.neg_error = true;
  auto t0 = Clock::now();
  AnalysisResult r = analyze(s, opt);
  double dt = seconds_since(t0);
  double in_eps = to_double(r.bound / s.format.eps);
  std::string line = "kepler0 single: " + fmt("%.1f eps", in_eps) + " in " + fmt("%.2f s", dt) + " (band [" +
                     fmt("%.0f", kOverviewLoEps) + ", " + fmt("%.0f", kOverviewHiEps) + "] eps, < " +
                     fmt("%.0f s", kOverviewSeconds) + ")";
  if (in_eps < kOverviewLoEps || in_eps > kOverviewHiEps || dt >= kOverviewSeconds) o.fail(line);
  else o.note(line);
  return o;
}

Outcome criterion4() {
  Outcome o;
  for (const auto* r : rows_in("polynomial")) check_row(o, *r, 2, kRowSeconds);
  return o;
}

// Lifted systems: at random box points the lifted objective equals the program value and every
// defining equality vanishes.
void check_lift(Outcome& o, const std::string& name) {
  ProgramSpec s = parse_program_file(bench_path(name));
  ExprPtr f = inline_lets(s.objective);
  std::vector<Interval> box = program_box(s);
  Lifter L(s.n, box);
  Poly p = L.lift(f);
  const LiftedSystem& sys = L.system();
  p.set_nvars(sys.nvars);
  std::mt19937_64 rng(12345);
  double worst = 0;
  int bad = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> x;
    for (int i = 0; i < s.n; ++i) {
      std::uniform_real_distribution<double> u(to_double(box[i].lo()), to_double(box[i].hi()));
      x.push_back(u(rng));
    }
    std::vector<double> pt = lifted_point(sys, x);
    double fx = eval_double(f, x), px = p.evaluate(pt);
    double scale = std::max(1.0, std::abs(fx));
    worst = std::max(worst, std::abs(fx - px) / scale);
    for (const auto& e : sys.equalities) {
      double ev = e.evaluate(pt);
      double mag = 1;
      for (const auto& [m, c] : e.terms()) {
        double t = std::abs(to_double(c));
        for (const auto& [v, ex] : m.entries()) t *= std::pow(std::abs(pt[v]), ex);
        mag = std::max(mag, t);
      }
      worst = std::max(worst, std::abs(ev) / mag);
    }
    for (std::size_t v = 0; v < pt.size(); ++v)
      if (!sys.box[v].contains(pt[v])) ++bad;
  }
  std::string line = "lift " + name + ": " + std::to_string(sys.nvars - s.n) + " lifted variables, " +
                     std::to_string(sys.equalities.size()) + " equalities, worst relative defect " + fmt("%.1e", worst);
  if (worst > kLiftEqualityTol || bad) o.fail(line + (bad ? ", lifted value outside its range" : ""));
  else o.note(line);
}

Outcome criterion5() {
  Outcome o;
  for (const auto* r : rows_in("semialgebraic")) {
    if (r->limit_factor == 0) {
      const Analyzed& a = analyzed(r->name);
      o.note(std::string(r->id) + " " + r->name + ": not graded (reference run out of memory), bound " +
             (a.error.empty() ? fmt("%.3e", to_double(a.result.bound)) : a.error));
      continue;
    }
    check_row(o, *r, 4, 0);
    check_lift(o, r->name);
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (const auto* r : rows_in("constrained")) check_row(o, *r, 2, 0);
  return o;
}

Outcome criterion7() {
  Outcome o;
  struct Band {
    const char* name;
    double lo, hi;
  } bands[] = {{"cav10", 2.90, 5.82}, {"perin", 2.00, 4.02}};
  for (const auto& b : bands) {
    const Analyzed& a = analyzed(b.name);
    if (!a.error.empty()) {
      o.fail(std::string(b.name) + ": " + a.error);
      continue;
    }
    double v = to_double(a.result.bound);
    std::string line = std::string(b.name) + ": bound " + fmt("%.5f", v) + " band [" + fmt("%.2f", b.lo) + ", " +
                       fmt("%.2f", b.hi) + "]";
    if (v < b.lo || v > b.hi) o.fail(line);
    else o.note(line);
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  auto limit = [&](const char* name, double hi, double lo) {
    const Analyzed& a = analyzed(name);
    if (!a.error.empty()) return o.fail(std::string(name) + ": " + a.error);
    double v = to_double(a.result.bound);
    std::string line = std::string(name) + ": bound " + fmt("%.3e", v) + " limit " + fmt("%.3e", hi) +
                       (lo > 0 ? " lower " + fmt("%.3e", lo) : std::string());
    if (v > hi || v < lo) o.fail(line);
    else o.note(line);
  };
  limit("logexp", 4 * 2.52e-15, 1.19e-15);
  limit("sphere", 4 * 1.53e-14, 0);
  for (const char* name : {"hartman3", "hartman6"}) {
    const Analyzed& a = analyzed(name);
    if (!a.error.empty()) {
      o.fail(std::string(name) + ": " + a.error);
      continue;
    }
    SampleOptions so;
    so.samples = kHartmanSamples;
    SampleResult sr = sample_error(parse_program_file(bench_path(name)), so);
    double b = to_double(a.result.bound);
    std::string line = std::string(name) + ": bound " + fmt("%.3e", b) + " sampled " + fmt("%.3e", sr.max_error);
    if (b < sr.max_error) o.fail(line);
    else o.note(line);
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  std::vector<SosCertificate> pool;
  for (const auto* r : rows_in("polynomial")) {
    ProgramSpec s = parse_program_file(bench_path(r->name));
    EngineOptions opt;
    opt.certify = true;
    AnalysisResult res = analyze(s, opt);
    std::vector<SosCertificate> certs = certificates_from_text(certificates_to_text(res.certificates));
    auto checks = verify_certificates(s, opt, certs);
    bool ok = !checks.empty() && checks.size() == certs.size();
    double worst_rel = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
      ok = ok && checks[i].statement_matches && checks[i].result.passed;
      auto rec = std::find_if(res.cert_records.begin(), res.cert_records.end(),
                              [&](const CertRecord& c) { return c.tag == checks[i].tag; });
      if (rec == res.cert_records.end() || std::isnan(rec->solver_bound)) {
        ok = false;
        continue;
      }
      double cert = to_double(checks[i].scaled_bound), solver = rec->solver_bound;
      worst_rel = std::max(worst_rel, std::abs(cert - solver) / std::max(std::abs(solver), 1e-300));
    }
    std::string line = std::string(r->name) + ": " + std::to_string(checks.size()) + " certificates, checks " +
                       (ok ? "pass" : "FAIL") + ", worst relative gap to solver " + fmt("%.2e", worst_rel);
    if (!ok || worst_rel > kCertRelTol) o.fail(line);
    else o.note(line);
    for (auto& c : certs) pool.push_back(std::move(c));
  }
  if (pool.empty()) {
    o.fail("no certificates produced");
    return o;
  }
  std::mt19937_64 rng(2024);
  int detected = 0;
  for (int k = 0; k < kMutants; ++k) {
    const SosCertificate& base = pool[k % pool.size()];
    SosCertificate m = mutate_certificate(base, rng);
    bool caught = false;
    try {
      caught = !check_certificate(m).passed;
    } catch (const std::exception&) {
      caught = true;
    }
    detected += caught;
  }
  std::string line = "mutants detected: " + std::to_string(detected) + "/" + std::to_string(kMutants);
  if (detected != kMutants) o.fail(line);
  else o.note(line);
  return o;
}

// ----- criterion 10 property suites -----

// Brackets f(x) between MPFR evaluations rounded down and up at 200 bits.
// x must be a double so that it converts exactly.
bool mpfr_bracket(const std::string& op, const Rational& x, Rational& lo, Rational& hi) {
  mpfr_t a, r;
  mpfr_inits2(200, a, r, static_cast<mpfr_ptr>(nullptr));
  bool ok = true;
  for (int side = 0; side < 2 && ok; ++side) {
    mpfr_rnd_t rnd = side == 0 ? MPFR_RNDD : MPFR_RNDU;
    mpfr_set_q(a, x.backend().data(), rnd);
    if (op == "exp") mpfr_exp(r, a, rnd);
    else if (op == "log") mpfr_log(r, a, rnd);
    else if (op == "sin") mpfr_sin(r, a, rnd);
    else if (op == "cos") mpfr_cos(r, a, rnd);
    else if (op == "tan") mpfr_tan(r, a, rnd);
    else if (op == "atan") mpfr_atan(r, a, rnd);
    else if (op == "asin") mpfr_asin(r, a, rnd);
    else if (op == "acos") mpfr_acos(r, a, rnd);
    else if (op == "sqrt") mpfr_sqrt(r, a, rnd);
    else ok = false;
    Rational& out = side == 0 ? lo : hi;
    mpq_t q;
    mpq_init(q);
    mpfr_get_q(q, r);
    out = Rational(q);
    mpq_clear(q);
  }
  mpfr_clears(a, r, static_cast<mpfr_ptr>(nullptr));
  return ok;
}

int interval_containment_violations(int cases) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0, 1);
  auto interval_in = [&](double a, double b) {
    double x = a + u(rng) * (b - a), y = a + u(rng) * (b - a);
    if (x > y) std::swap(x, y);
    return Interval(Rational(x), Rational(y));
  };
  auto point_in = [&](const Interval& I) {
    double l = to_double(I.lo()), h = to_double(I.hi());
    double v = std::clamp(l + u(rng) * (h - l), l, h);
    return Rational(v);
  };
  const char* ops[] = {"add", "sub", "mul", "div", "sqr", "sqrt", "exp", "log", "sin", "cos", "tan", "atan", "asin", "acos"};
  int violations = 0;
  for (int k = 0; k < cases; ++k) {
    std::string op = ops[k % 14];
    if (op == "add" || op == "sub" || op == "mul" || op == "div" || op == "sqr") {
      Interval a = interval_in(-50, 50), b = interval_in(-50, 50);
      if (op == "div" && b.contains_zero()) b = interval_in(0.5, 20);
      Rational x = point_in(a), y = point_in(b);
      if (op == "add") violations += !(a + b).contains(x + y);
      else if (op == "sub") violations += !(a - b).contains(x - y);
      else if (op == "mul") violations += !(a * b).contains(x * y);
      else if (op == "div") violations += !(a / b).contains(x / y);
      else violations += !sqr(a).contains(x * x);
      continue;
    }
    Interval a;
    if (op == "log" || op == "sqrt") a = interval_in(1e-3, 100);
    else if (op == "asin" || op == "acos") a = interval_in(-1, 1);
    else if (op == "tan") a = interval_in(-1.5, 1.5);
    else if (op == "exp") a = interval_in(-30, 30);
    else a = interval_in(-20, 20);
    Rational x = point_in(a), lo, hi;
    mpfr_bracket(op, x, lo, hi);
    Interval r;
    if (op == "sqrt") r = sqrt(a);
    else if (op == "exp") r = exp(a);
    else if (op == "log") r = log(a);
    else if (op == "sin") r = sin(a);
    else if (op == "cos") r = cos(a);
    else if (op == "tan") r = tan(a);
    else if (op == "atan") r = atan(a);
    else if (op == "asin") r = asin(a);
    else r = acos(a);
    // The true value lies in [lo, hi]; an enclosure must meet that bracket.
    violations += !(r.lo() <= hi && lo <= r.hi());
  }
  return violations;
}

int ring_axiom_violations() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-20, 20), den(1, 6), var(0, 3), deg(0, 4);
  auto random_poly = [&] {
    Poly p(4);
    for (int t = 0; t < 6; ++t) {
      std::vector<int> e(4, 0);
      for (int k = deg(rng); k > 0; --k) e[var(rng)]++;
      p.add_term(Monomial::from_dense(e), Rational(coef(rng), den(rng)));
    }
    return p;
  };
  int bad = 0;
  for (int k = 0; k < 500; ++k) {
    Poly a = random_poly(), b = random_poly(), c = random_poly();
    bad += !(a + b == b + a);
    bad += !((a + b) + c == a + (b + c));
    bad += !(a * b == b * a);
    bad += !((a * b) * c == a * (b * c));
    bad += !(a * (b + c) == a * b + a * c);
    bad += !((a - a).is_zero());
    bad += !(a * Poly::constant(1, 4) == a);
  }
  return bad;
}

int rip_violations(int& generated) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  int bad = 0;
  generated = 0;
  for (int k = 0; k < 500; ++k) {
    int n = 3 + k % 10;
    CspGraph g(n);
    double p = u(rng);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (u(rng) < p) g.add_edge(i, j);
    bad += !satisfies_rip(chordal_cliques(g));
    ++generated;
  }
  // The clique orders the engine builds for the linear part: {x} + {e_j}.
  for (int n = 1; n <= 6; ++n) {
    CliqueSet cs;
    for (int j = 0; j < 5; ++j) {
      Clique c;
      for (int i = 0; i < n; ++i) c.push_back(i);
      c.push_back(n + j);
      cs.cliques.push_back(c);
    }
    bad += !satisfies_rip(cs);
    ++generated;
  }
  for (const char* name : {"kepler0", "kepler1", "kepler2", "rigidBody2", "himmilbeau", "floudas3_3"}) {
    ProgramSpec s = parse_program_file(bench_path(name));
    bad += !satisfies_rip(chordal_cliques(csp_graph(to_poly(inline_lets(s.objective), s.n), s.constraints, s.n)));
    ++generated;
  }
  return bad;
}

std::string order_monotonicity(bool& ok) {
  std::ostringstream os;
  ok = true;
  Poly f;
  ConstraintSet K = kepler0_example_set(f);
  double prev = -INFINITY;
  for (unsigned d = 1; d <= 2; ++d) {
    SosProgram p = build_dense_relaxation(f, K, d);
    double v = p.bound_from(solve(p.sdp));
    ok = ok && v >= prev - 1e-7;
    prev = v;
  }
  os << "kepler0 relaxation d=1,2 nondecreasing";
  for (const char* name : {"rigidBody1", "sineTaylor", "sineOrder3", "sqroot", "verhulst"}) {
    ProgramSpec s = parse_program_file(bench_path(name));
    EngineOptions o;
    AnalysisResult base = analyze(s, o);
    o.order = base.order + 1;
    AnalysisResult next = analyze(s, o);
    double b0 = to_double(base.bound), b1 = to_double(next.bound);
    bool good = b1 <= b0 * (1 + 1e-6) || !next.tight;
    ok = ok && good;
    os << "; " << name << " d=" << base.order << " " << fmt("%.3e", b0) << " d=" << o.order << " " << fmt("%.3e", b1)
       << (next.tight ? "" : " (fallback)");
  }
  return os.str();
}

int merged_model_violations(int& checked) {
  const char* programs[] = {
      "let box_p a b c d = [(1, 2); (-1, 3); (0.5, 1); (2, 4)];; let obj_p a b c d = [(a * b * c * d, 0)];;",
      "let box_p a b = [(1, 2); (-2, 3)];; let obj_p a b = [((a + b) * (a - b) * a, 0)];;",
      "let box_p a b c = [(0.1, 1); (1, 2); (-1, 1)];; let obj_p a b c = [(a * b + b * c * a, 0)];;"};
  int bad = 0;
  checked = 0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (const char* src : programs) {
    ProgramSpec s = parse_program(src);
    s.format = FpFormat::with_precision(8);
    RoundedExpr r = round_program(s, {});
    RoundingOptions mo;
    mo.merge = true;
    RoundedExpr m = round_program(s, mo);
    int k = static_cast<int>(r.errors.size());
    if (k > 8) continue;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> x(s.n);
      std::vector<Interval> mbox;
      for (int i = 0; i < s.n; ++i) {
        x[i] = to_double(s.box_lo[i]) + u(rng) * to_double(s.box_hi[i] - s.box_lo[i]);
        mbox.emplace_back(Rational(x[i]));
      }
      mbox.resize(m.index_space);
      for (const auto& e : m.errors) mbox.emplace_back(-e.magnitude, e.magnitude);
      Interval enclosure = ia_bound(m.body, mbox);
      for (int mask = 0; mask < (1 << k); ++mask) {
        std::vector<Rational> pt;
        for (double v : x) pt.emplace_back(v);
        pt.resize(r.index_space);
        for (int j = 0; j < k; ++j) pt.push_back((mask >> j) & 1 ? r.errors[j].magnitude : -r.errors[j].magnitude);
        std::vector<Interval> corner(pt.begin(), pt.end());
        Interval exact = ia_bound(r.body, corner);
        bad += !exact.subset_of(enclosure);
        ++checked;
      }
    }
  }
  return bad;
}

int maxplus_violations(int points) {
  struct Case {
    Fn f;
    Interval dom;
  } cases[] = {{Fn::Exp, Interval(-8, 8)},         {Fn::Log, Interval(Rational(1, 10), 10)},
               {Fn::Sin, Interval(-4, 4)},         {Fn::Cos, Interval(-4, 4)},
               {Fn::Atan, Interval(-5, 5)},        {Fn::Tan, Interval(-1, 1)},
               {Fn::Asin, Interval(Rational(-9, 10), Rational(9, 10))}};
  std::mt19937_64 rng(9);
  int bad = 0;
  int per = points / static_cast<int>(std::size(cases));
  for (const auto& c : cases) {
    MaxplusApprox mp = transc_approx(c.f, c.dom);
    std::uniform_real_distribution<double> u(to_double(c.dom.lo()), to_double(c.dom.hi()));
    for (int k = 0; k < per + 1; ++k) {
      Rational x(u(rng));
      if (!c.dom.contains(x)) continue;
      Interval fx = apply(c.f, Interval(x));
      Rational lo = -1e300, hi = 1e300;
      for (const auto& p : mp.lower) lo = std::max(lo, p.evaluate(std::vector<Rational>{x}));
      for (const auto& p : mp.upper) hi = std::min(hi, p.evaluate(std::vector<Rational>{x}));
      bad += !(lo <= fx.hi() && fx.lo() <= hi);
    }
  }
  return bad;
}

Outcome criterion10() {
  Outcome o;
  auto report = [&](bool good, const std::string& line) {
    if (good) o.note(line);
    else o.fail(line);
  };
  int iv = interval_containment_violations(kIntervalCases);
  report(iv == 0, "interval containment: " + std::to_string(kIntervalCases) + " cases, " + std::to_string(iv) + " violations");
  int rv = ring_axiom_violations();
  report(rv == 0, "polynomial ring axioms: " + std::to_string(rv) + " violations");
  int generated = 0;
  int ripv = rip_violations(generated);
  report(ripv == 0, "RIP: " + std::to_string(generated) + " generated clique orders, " + std::to_string(ripv) + " violations");
  bool mono = true;
  std::string ml = order_monotonicity(mono);
  report(mono, "order monotonicity: " + ml);
  int checked = 0;
  int hv = merged_model_violations(checked);
  report(hv == 0 && checked > 0, "merged model vs corner enumeration: " + std::to_string(checked) + " corners, " +
                                     std::to_string(hv) + " violations");
  int mv = maxplus_violations(kMaxplusPoints);
  report(mv == 0, "maxplus sandwich: " + std::to_string(kMaxplusPoints) + " points, " + std::to_string(mv) + " violations");

  for (const auto& ref : reference_table()) {
    ProgramSpec s = parse_program_file(bench_path(ref.name));
    const Analyzed& a = analyzed(ref.name);
    if (!a.error.empty()) {
      o.fail(std::string(ref.name) + ": analysis failed: " + a.error);
      continue;
    }
    SampleOptions so;
    so.samples = kSoundnessSamples;
    so.walk_fallback = true;
    auto t0 = Clock::now();
    SampleResult sr;
    try {
      sr = sample_error(s, so);
    } catch (const std::exception& e) {
      o.fail(std::string(ref.name) + ": sampling failed: " + e.what());
      continue;
    }
    double b = to_double(a.result.bound);
    std::string line = std::string("soundness ") + ref.name + ": bound " + fmt("%.3e", b) + " >= sampled " +
                       fmt("%.3e", sr.max_error) + " (" + std::to_string(sr.accepted) + " samples" +
                       (sr.walked ? ", constraint walk" : "") + ", " + fmt("%.1f s", seconds_since(t0)) + ")";
    report(b >= sr.max_error && sr.accepted >= kSoundnessSamples, line);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},  {5, criterion5},
      {6, criterion6}, {7, criterion7}, {8, criterion8}, {9, criterion9}, {10, criterion10}};
  std::vector<int> only;
  for (int i = 1; i < argc; ++i)
    if (std::isdigit(static_cast<unsigned char>(argv[i][0]))) only.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (auto& [id, fn] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << " (" << fmt("%.1f s", seconds_since(t0))
              << ")\n";
    for (const auto& l : o.lines) std::cout << l << "\n";
    std::cout.flush();
  }
  return failed ? 1 : 0;
}
