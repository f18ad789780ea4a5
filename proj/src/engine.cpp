#include "roundoff/engine.hpp"

#include "roundoff/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace roundoff {

namespace {

// Constant folding with hash-consing, so structurally equal subterms share one node and
// x - x, x / x cancel.
class Folder {
 public:
  ExprPtr operator()(const ExprPtr& e) {
    if (!e) return e;
    auto it = memo_.find(e.get());
    if (it != memo_.end()) return it->second.second;
    ExprPtr r;
    switch (e->op) {
      case Op::Const:
      case Op::Var: r = e; break;
      case Op::Neg: r = simp_neg((*this)(e->a)); break;
      case Op::Add: r = simp_add((*this)(e->a), (*this)(e->b)); break;
      case Op::Sub: r = simp_sub((*this)(e->a), (*this)(e->b)); break;
      case Op::Mul: r = simp_mul((*this)(e->a), (*this)(e->b)); break;
      case Op::Div: {
        ExprPtr a = (*this)(e->a), b = (*this)(e->b);
        r = a == b ? make_const(1) : simp_div(a, b);
        break;
      }
      case Op::Sqrt: {
        ExprPtr a = (*this)(e->a);
        r = is_const(a, 0) ? a : make_sqrt(a);
        break;
      }
      case Op::Transc: r = make_transc(e->fn, (*this)(e->a)); break;
      case Op::Let: r = make_let(e->index, (*this)(e->a), (*this)(e->b)); break;
      case Op::IfThenElse: r = make_ite(e->cond, (*this)(e->b), (*this)(e->c)); break;
    }
    r = canonical(r);
    memo_[e.get()] = {e, r};
    return r;
  }

 private:
  // The source node is kept alive so its address cannot be reused while memoized.
  std::unordered_map<const Expr*, std::pair<ExprPtr, ExprPtr>> memo_;
  std::unordered_map<std::string, ExprPtr> table_;

  ExprPtr canonical(const ExprPtr& r) {
    std::ostringstream key;
    key << static_cast<int>(r->op) << ':' << r->index << ':' << static_cast<int>(r->fn) << ':' << r->a.get() << ':'
        << r->b.get() << ':' << r->c.get() << ':' << r->cond.get();
    if (r->op == Op::Const) key << ':' << to_string(r->value);
    auto [it, inserted] = table_.emplace(key.str(), r);
    return it->second;
  }
};

Interval scaled(const Rational& s, const Interval& I) { return Interval(s) * I; }

std::string file_tag(const std::string& tag) {
  std::string out;
  for (char c : tag) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_';
  return out;
}

SdpSolution run_solver(const SdpProblem& prob, const std::string& tag, const EngineOptions& opt) {
  const std::string prefix = "sdpa-files:";
  if (opt.solver == "embedded" || opt.solver.empty()) return solve(prob, opt.sdp);
  if (opt.solver.rfind(prefix, 0) != 0) throw Error("unknown solver backend '" + opt.solver + "'");
  std::filesystem::path dir = opt.solver.substr(prefix.size());
  std::filesystem::create_directories(dir);
  const std::string base = file_tag(tag);
  {
    std::ofstream out(dir / (base + ".dat-s"));
    out << export_sdpa_sparse(prob);
  }
  std::filesystem::path result = dir / (base + ".out");
  if (std::filesystem::exists(result)) {
    std::ifstream in(result);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_sdpa_solution(ss.str(), &prob);
  }
  SdpSolution sol = solve(prob, opt.sdp);
  std::ofstream out(result);
  out << write_sdpa_result(sol, prob);
  return sol;
}

std::uint64_t binom_u64(unsigned n, unsigned k) {
  if (k > n) return 0;
  long double r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<std::uint64_t>(std::llround(static_cast<double>(r)));
}

struct SideOutcome {
  bool have_bound = false;
  Rational bound;  // lower bound of the side objective, normalized scale
  double solver_value = std::nan("");
  std::string status = "none";
  bool have_cert = false;
  SosCertificate cert;
  CheckResult check;
  std::string note;
};

SideOutcome solve_side(const SosProgram& prog, const ConstraintSet& K, const std::vector<Interval>& tbox,
                       const std::string& tag, const EngineOptions& opt) {
  SideOutcome out;
  SdpSolution sol = run_solver(prog.sdp, tag, opt);
  const bool optimal = sol.status == SdpStatus::Optimal;
  out.status = status_name(sol.status);
  // Reported even for an inexact solve; only an Optimal value is used as a bound.
  if (std::isfinite(sol.dual_objective)) out.solver_value = prog.bound_from(sol);
  if (opt.certify || !optimal) {
    try {
      out.cert = extract_certificate(sol, prog, K, tbox);
      out.check = check_certificate(out.cert);
      out.have_cert = true;
    } catch (const std::exception& ex) {
      out.note = tag + ": certificate extraction failed (" + ex.what() + ")";
    }
  }
  if (opt.certify || !optimal) {
    if (out.have_cert) {
      out.have_bound = true;
      out.bound = out.check.certified_bound;
    }
  } else {
    out.have_bound = true;
    out.bound = Rational(out.solver_value);
  }
  if (!optimal) {
    std::string msg = tag + ": solver status " + status_name(sol.status);
    out.note = out.note.empty() ? msg : msg + "; " + out.note;
  }
  return out;
}

SosCertificate reflect_errors(const SosCertificate& c, int n, const Poly& objective) {
  std::vector<Poly> subs;
  for (int i = 0; i < c.nvars; ++i) {
    Poly v = Poly::variable(i, c.nvars);
    subs.push_back(i < n ? v : -v);
  }
  SosCertificate r = c;
  r.objective = objective;
  for (auto& t : r.terms)
    for (auto& sq : t.squares) sq.q = sq.q.compose(subs, c.nvars);
  return r;
}

int widest_dim(const std::vector<Interval>& box, const std::vector<Interval>& reference) {
  int dim = 0;
  Rational best = -1;
  for (std::size_t i = 0; i < box.size(); ++i) {
    Rational w = reference[i].width() > 0 ? box[i].width() / reference[i].width() : Rational(0);
    if (w > best) {
      best = w;
      dim = static_cast<int>(i);
    }
  }
  return dim;
}

bool feasible(const std::vector<Poly>& constraints, const std::vector<Interval>& box) {
  for (const auto& g : constraints)
    if (ia_bound(g, box).hi() < 0) return false;
  return true;
}

RoundedExpr round_sub(const ProgramSpec& spec, const ExprPtr& e, const EngineOptions& opt) {
  RoundingOptions ro = opt.rounding;
  ro.merge = false;
  RoundedExpr r = round_expr(e, spec.n, spec.index_space(), spec.format, ro);
  r = apply_uncertainties(r, spec.uncertainties);
  if (opt.rounding.merge) r = merge_error_products(r, spec.format);
  return r;
}

}  // namespace

std::vector<Interval> program_box(const ProgramSpec& spec) {
  std::vector<Interval> box;
  for (int i = 0; i < spec.n; ++i) box.emplace_back(spec.box_lo[i], spec.box_hi[i]);
  return box;
}

Linearization linearize(const RoundedExpr& rounded, const ExprPtr& reference) {
  Linearization L;
  L.rounded = rounded;
  ExprPtr body = inline_lets(rounded.body);
  const int m = static_cast<int>(rounded.errors.size());
  std::vector<ExprPtr> zeros(rounded.total_vars());
  for (int j = 0; j < m; ++j) zeros[rounded.err_index(j)] = make_const(0);
  Folder f;
  for (int j = 0; j < m; ++j) L.s.push_back(f(substitute(symbolic_diff(body, rounded.err_index(j)), zeros)));
  ExprPtr body0 = f(substitute(body, zeros)), ref = f(inline_lets(reference));
  L.c0 = f(make_sub(body0, ref));
  return L;
}

Interval ia_linear_bound(const std::vector<ExprPtr>& s, const ExprPtr& c0, const std::vector<Rational>& b,
                         const std::vector<Interval>& box, const std::vector<Poly>& constraints, int budget) {
  const std::vector<Interval>& whole = box;
  auto evaluate = [&](const std::vector<Interval>& B) {
    Interval v = c0 ? ia_bound(c0, B) : Interval(0);
    Rational T = 0;
    for (std::size_t j = 0; j < s.size(); ++j) T += b[j] * ia_bound(s[j], B).mag();
    return (v + Interval(-T, T)).tidy(256, 96);
  };
  struct Piece {
    std::vector<Interval> box;
    Interval value;
    Rational key;
  };
  auto cmp = [](const Piece& a, const Piece& b) { return a.key < b.key; };
  std::priority_queue<Piece, std::vector<Piece>, decltype(cmp)> queue(cmp);
  auto push = [&](std::vector<Interval> B) {
    if (!feasible(constraints, B)) return;
    Interval v = evaluate(B);
    Rational key = v.mag();
    queue.push({std::move(B), v, key});
  };
  push(box);
  int boxes = 1;
  while (!queue.empty() && boxes < budget) {
    Piece p = queue.top();
    queue.pop();
    int dim = widest_dim(p.box, whole);
    if (p.box[dim].width() == 0) {
      queue.push(p);
      break;
    }
    Rational mid = p.box[dim].mid();
    auto left = p.box, right = p.box;
    left[dim] = Interval(p.box[dim].lo(), mid);
    right[dim] = Interval(mid, p.box[dim].hi());
    push(std::move(left));
    push(std::move(right));
    ++boxes;
  }
  std::optional<Interval> acc;
  while (!queue.empty()) {
    acc = acc ? hull(*acc, queue.top().value) : queue.top().value;
    queue.pop();
  }
  return acc ? *acc : Interval(0);
}

LinearPartResult sdp_poly(const LinearProblem& P, const EngineOptions& opt) {
  LinearPartResult res;
  const int n = P.n;
  const int m = static_cast<int>(P.s.size());
  const int nv = n + m;

  std::vector<Poly> subs;
  for (int i = 0; i < n; ++i) {
    const Interval& I = P.box[i];
    subs.push_back(Poly::constant(I.mid(), n) + Poly::variable(i, n).scale(I.width() / 2));
  }
  std::vector<Poly> s2;
  Rational S = 0;
  for (int j = 0; j < m; ++j) {
    Poly sj = P.s[j];
    sj.set_nvars(n);
    Poly c = sj.compose(subs, n).scale(P.b[j]);
    S = std::max(S, c.max_abs_coefficient());
    s2.push_back(std::move(c));
  }
  Poly off(n);
  if (!P.offset.is_zero()) {
    Poly o = P.offset;
    o.set_nvars(n);
    off = o.compose(subs, n);
    S = std::max(S, off.max_abs_coefficient());
  }
  if (S == 0) {
    res.interval = Interval(0);
    res.method = "exact";
    return res;
  }
  for (auto& c : s2) c = c.scale(1 / S);
  off = off.scale(1 / S);

  std::vector<Interval> tbox_x(n, Interval(-1, 1));
  ConstraintSet X = box_constraints(tbox_x, n);
  for (const auto& g : P.constraints) {
    Poly w = g;
    w.set_nvars(n);
    Poly c = w.compose(subs, n);
    if (c.is_constant()) {
      if (c.constant_term() >= 0) continue;
      res.interval = Interval(0);
      res.method = "empty";
      res.notes.push_back(P.tag + ": empty region");
      return res;
    }
    X.g.push_back(c.scale(1 / c.max_abs_coefficient()));
  }
  if (!feasible(X.g, tbox_x)) {
    res.interval = Interval(0);
    res.method = "empty";
    res.notes.push_back(P.tag + ": empty region");
    return res;
  }

  Poly l(nv);
  {
    Poly o = off;
    o.set_nvars(nv);
    l += o;
    for (int j = 0; j < m; ++j) {
      Poly sj = s2[j];
      sj.set_nvars(nv);
      l += sj * Poly::variable(n + j, nv);
    }
  }
  std::vector<Interval> tbox(nv, Interval(-1, 1));
  const Interval ia = ia_bound(l, tbox);

  unsigned d = std::max(opt.order, default_order(l, X));
  res.order = d;
  const std::uint64_t basis = binom_u64(n + 1 + d, d);
  const std::uint64_t rows =
      binom_u64(n + 2 * d, 2 * d) + static_cast<std::uint64_t>(m) * (binom_u64(n + 1 + 2 * d, 2 * d) - binom_u64(n + 2 * d, 2 * d));
  if (basis > static_cast<std::uint64_t>(opt.max_basis) || rows > opt.max_rows) {
    res.interval = scaled(S, ia);
    res.tight = false;
    res.method = "ia";
    res.notes.push_back(P.tag + ": relaxation too large (basis " + std::to_string(basis) + ", rows " +
                        std::to_string(rows) + "), using interval bounds");
    return res;
  }

  ConstraintSet K = linear_part_constraints(X, n, m);
  if (opt.statements_only) {
    for (int side = 0; side < 2; ++side) {
      SosCertificate st;
      st.name = P.tag + (side == 0 ? "/min" : "/max");
      st.side = side == 0 ? "min" : "max";
      st.order = d;
      st.nvars = nv;
      st.scale = S;
      st.objective = side == 0 ? l : -l;
      st.box = tbox;
      st.constraints = K.g;
      res.certificates.push_back(std::move(st));
    }
    res.interval = scaled(S, ia);
    res.tight = false;
    res.method = "statement";
    return res;
  }

  // With no offset the feasible set and l are odd under e -> -e, so max l = -min l.
  const bool symmetric = off.is_zero();
  SosProgram pmin = build_linear_part_relaxation(s2, X, n, d, Sense::Min, off);
  SideOutcome lo, hi;
  if (symmetric) {
    lo = solve_side(pmin, K, tbox, P.tag + "/min", opt);
    hi.have_bound = lo.have_bound;
    hi.bound = lo.bound;
    hi.solver_value = lo.solver_value;
    hi.status = lo.status;
    if (lo.have_cert) {
      hi.cert = reflect_errors(lo.cert, n, -l);
      hi.check = check_certificate(hi.cert);
      hi.have_cert = true;
    }
  } else {
    SosProgram pmax = build_linear_part_relaxation(s2, X, n, d, Sense::Max, off);
    if (opt.parallel) {
      auto f = std::async(std::launch::async, [&] { return solve_side(pmax, K, tbox, P.tag + "/max", opt); });
      lo = solve_side(pmin, K, tbox, P.tag + "/min", opt);
      hi = f.get();
    } else {
      lo = solve_side(pmin, K, tbox, P.tag + "/min", opt);
      hi = solve_side(pmax, K, tbox, P.tag + "/max", opt);
    }
  }
  res.method = "sdp";
  for (SideOutcome* o : {&lo, &hi}) {
    if (!o->note.empty()) res.notes.push_back(o->note);
    if (o->have_cert) {
      o->cert.name = P.tag + (o == &lo ? "/min" : "/max");
      o->cert.side = o == &lo ? "min" : "max";
      o->cert.scale = S;
      CertRecord rec;
      rec.tag = o->cert.name;
      rec.solver_bound = std::isnan(o->solver_value) ? o->solver_value : to_double(S) * o->solver_value;
      rec.solver_status = o->status;
      rec.certified_bound = S * o->check.certified_bound;
      rec.passed = o->check.passed;
      res.records.push_back(rec);
      if (opt.certify) res.certificates.push_back(o->cert);
    }
    if (!o->have_bound) res.tight = false;
  }
  Rational lo_v = lo.have_bound ? lo.bound : ia.lo();
  Rational hi_v = hi.have_bound ? -hi.bound : ia.hi();
  Interval I = ia;
  if (lo_v <= hi_v) {
    Interval sdp(lo_v, hi_v);
    if (intersects(sdp, ia)) I = intersect(sdp, ia);
  } else {
    res.tight = false;
    res.notes.push_back(P.tag + ": inconsistent relaxation bounds, using interval bounds");
  }
  res.interval = scaled(S, I).tidy(256, 96);
  return res;
}

TermReport bound_error(const RoundedExpr& rounded, const ExprPtr& reference, int n, const std::vector<Interval>& box,
                       const std::vector<Poly>& constraints, const EngineOptions& opt, const std::string& tag,
                       AnalysisResult& sink) {
  TermReport t;
  t.label = tag;
  t.errors = static_cast<int>(rounded.errors.size());
  Linearization L = linearize(rounded, reference);
  const std::vector<Rational> b = rounded.magnitudes();

  Lifter lf(n, box, opt.maxplus_points);
  std::vector<Poly> s;
  for (const auto& sj : L.s) s.push_back(lf.lift(sj));
  Poly offset = lf.lift(L.c0);
  const LiftedSystem& sys = lf.system();
  t.lifted = static_cast<int>(sys.vars.size());

  LinearProblem lp;
  lp.tag = tag;
  lp.n = sys.nvars;
  lp.box = sys.box;
  for (const auto& g : constraints) lp.constraints.push_back(lf.widen(g));
  for (const auto& g : sys.constraints) lp.constraints.push_back(lf.widen(g));
  for (auto& sj : s) lp.s.push_back(lf.widen(sj));
  lp.b = b;
  lp.offset = lf.widen(offset);

  LinearPartResult lin = sdp_poly(lp, opt);
  t.linear = lin.interval;
  t.method = lin.method;
  t.tight = lin.tight;
  t.order = lin.order;
  if (t.lifted > 0 || lin.method == "ia") {
    int budget = lin.method == "ia" ? opt.fallback_budget : opt.ia_budget;
    Interval alt = ia_linear_bound(L.s, L.c0, b, box, constraints, budget);
    if (lin.method == "empty") {
      // keep the empty-region answer
    } else if (intersects(alt, t.linear)) {
      t.linear = intersect(alt, t.linear);
    } else {
      t.linear = alt;
    }
    if (t.lifted > 0) sink.notes.push_back(tag + ": " + std::to_string(t.lifted) + " lifted variables");
  }
  for (auto& c : lin.certificates) sink.certificates.push_back(std::move(c));
  for (auto& r : lin.records) sink.cert_records.push_back(std::move(r));
  for (auto& note : lin.notes) sink.notes.push_back(std::move(note));

  if (lin.method == "empty") {
    t.remainder = Interval(0);
  } else {
    ExprPtr body = inline_lets(rounded.body);
    std::vector<Interval> ext = extended_box(rounded, box);
    std::vector<int> idx;
    for (int j = 0; j < t.errors; ++j) idx.push_back(rounded.err_index(j));
    if (t.errors <= 16) {
      try {
        t.remainder = taylor_remainder_bound(body, ext, idx, b);
      } catch (const DomainViolation&) {
        t.remainder = taylor_remainder_majorant(body, ext, idx, b);
      } catch (const DivisionByZeroInterval&) {
        t.remainder = taylor_remainder_majorant(body, ext, idx, b);
      }
    } else {
      t.remainder = taylor_remainder_majorant(body, ext, idx, b);
    }
  }
  t.total = (t.linear + t.remainder).tidy(256, 96);
  return t;
}

namespace {

void merge_term(AnalysisResult& res, const TermReport& t, bool& first) {
  res.interval = first ? t.total : hull(res.interval, t.total);
  first = false;
  res.order = std::max(res.order, t.order);
  res.tight = res.tight && t.tight;
  res.terms.push_back(t);
}

void analyze_piece(const ProgramSpec& spec, const std::vector<Interval>& box, const EngineOptions& opt,
                   const std::string& prefix, AnalysisResult& res) {
  ExprPtr root = inline_lets(spec.objective);
  bool first = true;
  if (root->op != Op::IfThenElse) {
    if (conditional_depth(root) > 0) throw Error("conditionals are supported only as the outermost operation");
    RoundedExpr R = round_program(spec, opt.rounding);
    merge_term(res, bound_error(R, spec.objective, spec.n, box, spec.constraints, opt, prefix + "main", res), first);
    return;
  }

  const Condition& C = *root->cond;
  ExprPtr g = root->b, h = root->c;
  if (conditional_depth(g) > 0 || conditional_depth(h) > 0) throw NestedConditional();
  ExprPtr p = condition_expr(C);
  if (!is_polynomial_expr(p)) throw Error("branch condition must be polynomial");
  Poly pp = to_poly(p, spec.n);

  RoundedExpr Rp = round_sub(spec, p, opt);
  ExprPtr child;
  if (rounding_factor(Rp.body, Rp.err_base(), &child) >= 0) Rp.body = child;
  TermReport tp = bound_error(Rp, p, spec.n, box, spec.constraints, opt, prefix + "cond", res);
  res.condition_error = tp.total;
  const Rational plo = tp.total.lo(), phi = tp.total.hi();

  RoundedExpr Rg = round_sub(spec, g, opt), Rh = round_sub(spec, h, opt);
  auto region = [&](std::vector<Poly> extra) {
    std::vector<Poly> c = spec.constraints;
    for (auto& e : extra) c.push_back(std::move(e));
    return c;
  };
  merge_term(res, bound_error(Rg, g, spec.n, box, region({pp}), opt, prefix + "then", res), first);
  merge_term(res, bound_error(Rh, h, spec.n, box, region({-pp}), opt, prefix + "else", res), first);
  if (plo < 0) {
    Poly upper = Poly::constant(-plo, spec.n) - pp;
    merge_term(res, bound_error(Rh, g, spec.n, box, region({pp, upper}), opt, prefix + "then-to-else", res), first);
  }
  if (phi > 0) {
    Poly lower = pp + Poly::constant(phi, spec.n);
    merge_term(res, bound_error(Rg, h, spec.n, box, region({-pp, lower}), opt, prefix + "else-to-then", res), first);
  }
}

Rational bound_of(const Interval& I) { return std::max(Rational(-I.lo()), I.hi()); }

AnalysisResult analyze_box(const ProgramSpec& spec, const std::vector<Interval>& box, const EngineOptions& opt,
                           const std::string& prefix) {
  AnalysisResult res;
  res.name = spec.name;
  res.format = spec.format.name();
  analyze_piece(spec, box, opt, prefix, res);
  res.bound = bound_of(res.interval);
  return res;
}

}  // namespace

AnalysisResult analyze(const ProgramSpec& spec, const EngineOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  ValidationReport report = validate_spec(spec);
  const std::vector<Interval> box = program_box(spec);

  AnalysisResult res = analyze_box(spec, box, opt, "");
  for (const auto& msg : report.messages) res.notes.push_back(msg);

  if (opt.subdivide > 1) {
    struct Piece {
      std::vector<Interval> box;
      AnalysisResult result;
    };
    std::vector<Piece> pieces{{box, res}};
    int counter = 0;
    auto done = [&] {
      if (opt.statements_only || spec.target_bound <= 0) return false;
      for (const auto& p : pieces)
        if (p.result.bound > spec.target_bound) return false;
      return true;
    };
    while (static_cast<int>(pieces.size()) < opt.subdivide && !done()) {
      std::size_t worst = 0;
      Rational best = -1;
      for (std::size_t k = 0; k < pieces.size(); ++k) {
        Rational vol = 1;
        for (std::size_t i = 0; i < box.size(); ++i)
          if (box[i].width() > 0) vol *= pieces[k].box[i].width() / box[i].width();
        if (vol > best) {
          best = vol;
          worst = k;
        }
      }
      int dim = widest_dim(pieces[worst].box, box);
      if (pieces[worst].box[dim].width() == 0) break;
      Rational mid = pieces[worst].box[dim].mid();
      auto left = pieces[worst].box, right = pieces[worst].box;
      left[dim] = Interval(left[dim].lo(), mid);
      right[dim] = Interval(mid, right[dim].hi());
      std::string pl = "p" + std::to_string(++counter) + "/", pr = "p" + std::to_string(++counter) + "/";
      Piece a{left, analyze_box(spec, left, opt, pl)};
      Piece b{right, analyze_box(spec, right, opt, pr)};
      pieces.erase(pieces.begin() + static_cast<long>(worst));
      pieces.push_back(std::move(a));
      pieces.push_back(std::move(b));
    }
    if (pieces.size() > 1) {
      std::optional<Interval> acc;
      AnalysisResult merged;
      merged.name = res.name;
      merged.format = res.format;
      merged.notes = res.notes;
      merged.certificates = res.certificates;
      merged.cert_records = res.cert_records;
      merged.condition_error = res.condition_error;
      for (auto& p : pieces) {
        acc = acc ? hull(*acc, p.result.interval) : p.result.interval;
        merged.order = std::max(merged.order, p.result.order);
        merged.tight = merged.tight && p.result.tight;
        for (auto& t : p.result.terms) merged.terms.push_back(t);
        for (auto& c : p.result.certificates) merged.certificates.push_back(std::move(c));
        for (auto& c : p.result.cert_records) merged.cert_records.push_back(std::move(c));
        for (auto& s : p.result.notes) merged.notes.push_back(std::move(s));
        merged.condition_error = hull(merged.condition_error, p.result.condition_error);
      }
      merged.interval = intersects(*acc, res.interval) ? intersect(*acc, res.interval) : *acc;
      merged.notes.push_back("subdivided into " + std::to_string(pieces.size()) + " pieces");
      res = std::move(merged);
    }
  }
  res.bound = bound_of(res.interval);
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

std::vector<CertificateCheck> verify_certificates(const ProgramSpec& spec, const EngineOptions& opt,
                                                  const std::vector<SosCertificate>& certs) {
  EngineOptions so = opt;
  so.statements_only = true;
  so.certify = false;
  AnalysisResult stmts = analyze(spec, so);
  std::vector<CertificateCheck> out;
  for (const auto& cert : certs) {
    CertificateCheck c;
    c.tag = cert.name;
    auto it = std::find_if(stmts.certificates.begin(), stmts.certificates.end(),
                           [&](const SosCertificate& s) { return s.name == cert.name; });
    if (it == stmts.certificates.end()) {
      c.result.message = "no matching problem statement";
      out.push_back(c);
      continue;
    }
    bool box_eq = it->box.size() == cert.box.size();
    for (std::size_t i = 0; box_eq && i < cert.box.size(); ++i)
      box_eq = it->box[i].lo() == cert.box[i].lo() && it->box[i].hi() == cert.box[i].hi();
    c.statement_matches = box_eq && it->objective == cert.objective && it->constraints == cert.constraints &&
                          it->scale == cert.scale && it->nvars == cert.nvars;
    ConstraintSet K;
    K.g = it->constraints;
    try {
      c.result = check_certificate(it->objective, K, cert, it->box);
    } catch (const std::exception& ex) {
      c.result.passed = false;
      c.result.message = ex.what();
    }
    c.scaled_bound = c.result.certified_bound * cert.scale;
    if (!c.statement_matches) {
      c.result.passed = false;
      if (c.result.message.empty()) c.result.message = "certificate does not match the problem statement";
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace roundoff
