#include "roundoff/certify.hpp"

#include "roundoff/errors.hpp"

#include <sstream>
#include <unordered_map>

namespace roundoff {

RationalLdl exact_ldl(const std::vector<std::vector<Rational>>& Q) {
  const std::size_t n = Q.size();
  RationalLdl r;
  r.L.assign(n, std::vector<Rational>(n, Rational(0)));
  r.D.assign(n, Rational(0));
  std::vector<std::vector<Rational>> A = Q;
  for (std::size_t k = 0; k < n; ++k) {
    r.L[k][k] = 1;
    const Rational piv = A[k][k];
    if (piv < 0) throw Error("matrix is not positive semidefinite (negative pivot)");
    r.D[k] = piv;
    if (piv == 0) {
      for (std::size_t i = k + 1; i < n; ++i)
        if (A[i][k] != 0) throw Error("matrix is not positive semidefinite (zero pivot with nonzero column)");
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) r.L[i][k] = A[i][k] / piv;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (r.L[i][k] == 0) continue;
      for (std::size_t j = k + 1; j <= i; ++j) {
        A[i][j] -= r.L[i][k] * A[j][k];
        A[j][i] = A[i][j];
      }
    }
  }
  return r;
}

FloatLdl clipped_ldl(const Eigen::MatrixXd& Qin) {
  const int n = static_cast<int>(Qin.rows());
  Eigen::MatrixXd A = 0.5 * (Qin + Qin.transpose());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd D = Eigen::VectorXd::Zero(n);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  FloatLdl out;
  double scale = n ? A.diagonal().cwiseAbs().maxCoeff() : 0.0;
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (A(i, i) > A(p, p)) p = i;
    if (p != k) {
      A.row(k).swap(A.row(p));
      A.col(k).swap(A.col(p));
      L.row(k).swap(L.row(p));
      std::swap(perm[k], perm[p]);
    }
    const double piv = A(k, k);
    if (!(piv > 1e-14 * scale)) {
      for (int i = k; i < n; ++i) out.clipped += A(i, i) < 0;
      break;
    }
    D(k) = piv;
    L(k, k) = 1;
    for (int i = k + 1; i < n; ++i) L(i, k) = A(i, k) / piv;
    for (int j = k + 1; j < n; ++j)
      for (int i = j; i < n; ++i) {
        A(i, j) -= L(i, k) * L(j, k) * piv;
        A(j, i) = A(i, j);
      }
  }
  out.L = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) out.L.row(perm[i]) = L.row(i);
  out.D = D;
  return out;
}

namespace {

using Accum = std::unordered_map<Monomial, Rational, MonomialHash>;

void add_weighted_square(Accum& acc, const Rational& w, const Poly& q, const Poly& g) {
  std::vector<std::pair<Monomial, Rational>> t(q.terms().begin(), q.terms().end());
  Accum sq;
  for (std::size_t a = 0; a < t.size(); ++a) {
    sq[t[a].first * t[a].first] += w * t[a].second * t[a].second;
    for (std::size_t b = a + 1; b < t.size(); ++b) sq[t[a].first * t[b].first] += 2 * w * t[a].second * t[b].second;
  }
  for (const auto& [m, c] : sq)
    for (const auto& [gm, gc] : g.terms()) acc[m * gm] += c * gc;
}

Poly sos_sum(const SosCertificate& cert) {
  Accum acc;
  const int n = cert.nvars;
  for (const auto& term : cert.terms) {
    Poly g = term.constraint < 0 ? Poly::constant(1, n) : cert.constraints.at(term.constraint);
    for (const auto& s : term.squares) add_weighted_square(acc, s.weight, s.q, g);
  }
  Poly out(n);
  for (const auto& [m, c] : acc)
    if (c != 0) out.add_term(m, c);
  return out;
}

void validate(const SosCertificate& cert) {
  for (const auto& term : cert.terms) {
    if (term.constraint < -1 || term.constraint >= static_cast<int>(cert.constraints.size()))
      throw MalformedCertificate("constraint index " + std::to_string(term.constraint) + " out of range");
    for (const auto& s : term.squares)
      if (s.weight < 0) throw MalformedCertificate("negative weight");
  }
  if (static_cast<int>(cert.box.size()) < cert.nvars) throw MalformedCertificate("box does not cover every variable");
}

}  // namespace

Poly residual_polynomial(const SosCertificate& cert) {
  Poly obj = cert.objective;
  obj.set_nvars(cert.nvars);
  return obj - Poly::constant(cert.mu, cert.nvars) - sos_sum(cert);
}

SosCertificate extract_certificate(const SdpSolution& sol, const SosProgram& prog, const ConstraintSet& K,
                                   const std::vector<Interval>& box) {
  std::vector<Eigen::MatrixXd> Y = sol.Y;
  if (Y.size() != prog.blocks.size()) throw Error("solution does not match the relaxation");
  project_dual(prog.sdp, Y);
  SosCertificate cert;
  cert.order = prog.order;
  cert.nvars = prog.nvars;
  cert.objective = prog.objective;
  cert.box = box;
  cert.constraints = K.g;
  for (auto& g : cert.constraints) g.set_nvars(prog.nvars);
  int positive = 0, clipped = 0;
  for (std::size_t k = 0; k < prog.blocks.size(); ++k) {
    const auto& B = prog.blocks[k];
    SosTerm term;
    if (!B.multiplier.is_constant() || B.multiplier.constant_term() != 1) {
      for (std::size_t j = 0; j < cert.constraints.size() && term.constraint < 0; ++j)
        if (cert.constraints[j] == B.multiplier) term.constraint = static_cast<int>(j);
      if (term.constraint < 0) throw Error("multiplier of block " + B.label + " is not in the constraint set");
    }
    FloatLdl f = clipped_ldl(Y[k]);
    clipped += f.clipped;
    for (int i = 0; i < f.D.size(); ++i) {
      if (f.D(i) <= 0) continue;
      Poly q(prog.nvars);
      for (int p = 0; p < f.L.rows(); ++p)
        if (f.L(p, i) != 0) q.add_term(B.basis[p], Rational(f.L(p, i)));
      term.squares.push_back({Rational(f.D(i)), q});
      ++positive;
    }
    if (!term.squares.empty()) cert.terms.push_back(std::move(term));
  }
  if (positive == 0 && clipped > 0) throw ExtractionDegenerate();
  Poly s = sos_sum(cert);
  Poly obj = cert.objective;
  cert.mu = obj.constant_term() - s.constant_term();
  Poly res = obj - Poly::constant(cert.mu, cert.nvars) - s;
  cert.claim = cert.mu + ia_bound(res, box).lo();
  return cert;
}

CheckResult check_certificate(const Poly& objective, const ConstraintSet& K, const SosCertificate& cert,
                              const std::vector<Interval>& box) {
  validate(cert);
  for (std::size_t j = 0; j < cert.constraints.size(); ++j) {
    bool used = false;
    for (const auto& t : cert.terms) used = used || t.constraint == static_cast<int>(j);
    if (!used) continue;
    bool found = false;
    for (const auto& g : K.g) found = found || g == cert.constraints[j];
    if (!found) throw MalformedCertificate("constraint " + std::to_string(j) + " is not part of the problem");
  }
  if (static_cast<int>(box.size()) < cert.nvars) throw MalformedCertificate("box does not cover every variable");
  Poly obj = objective;
  obj.set_nvars(cert.nvars);
  Poly res = obj - Poly::constant(cert.mu, cert.nvars) - sos_sum(cert);
  CheckResult r;
  r.residual = ia_bound(res, box);
  r.residual_terms = res.size();
  r.certified_bound = cert.mu + r.residual.lo();
  r.passed = r.certified_bound >= cert.claim;
  r.message = r.passed ? "PASS" : "FAIL: certified bound " + to_string(r.certified_bound) + " below claim";
  return r;
}

CheckResult check_certificate(const SosCertificate& cert) {
  ConstraintSet K;
  K.g = cert.constraints;
  return check_certificate(cert.objective, K, cert, cert.box);
}

std::string poly_to_text(const Poly& p) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    os << (first ? "" : "; ") << to_string(c);
    for (const auto& [v, e] : m.entries()) os << " " << v << "^" << e;
    first = false;
  }
  os << "}";
  return os.str();
}

Poly poly_from_text(const std::string& text, int nvars) {
  auto open = text.find('{'), close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ParseError("polynomial must be enclosed in braces");
  Poly p(nvars);
  std::string body = text.substr(open + 1, close - open - 1);
  std::istringstream terms(body);
  std::string term;
  while (std::getline(terms, term, ';')) {
    std::istringstream ts(term);
    std::string tok;
    if (!(ts >> tok)) continue;
    Rational c;
    try {
      c = parse_rational(tok);
    } catch (const std::exception&) {
      throw ParseError("bad coefficient '" + tok + "'");
    }
    Monomial m;
    while (ts >> tok) {
      auto caret = tok.find('^');
      if (caret == std::string::npos) throw ParseError("bad factor '" + tok + "'");
      int v = 0, e = 0;
      try {
        v = std::stoi(tok.substr(0, caret));
        e = std::stoi(tok.substr(caret + 1));
      } catch (const std::exception&) {
        throw ParseError("bad factor '" + tok + "'");
      }
      if (v < 0 || v >= nvars || e <= 0) throw ParseError("factor out of range '" + tok + "'");
      m = m * Monomial::var(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(e));
    }
    p.add_term(m, c);
  }
  return p;
}

std::string certificate_to_text(const SosCertificate& cert) {
  std::ostringstream os;
  os << "certificate " << cert.name << "\n";
  os << "side " << cert.side << "\n";
  os << "order " << cert.order << "\n";
  os << "nvars " << cert.nvars << "\n";
  os << "scale " << to_string(cert.scale) << "\n";
  os << "objective " << poly_to_text(cert.objective) << "\n";
  for (std::size_t i = 0; i < cert.box.size(); ++i)
    os << "box " << i << " " << to_string(cert.box[i].lo()) << " " << to_string(cert.box[i].hi()) << "\n";
  for (const auto& g : cert.constraints) os << "constraint " << poly_to_text(g) << "\n";
  os << "mu " << to_string(cert.mu) << "\n";
  os << "claim " << to_string(cert.claim) << "\n";
  for (const auto& t : cert.terms) {
    os << "term " << t.constraint << " " << t.squares.size() << "\n";
    for (const auto& s : t.squares) os << "square " << to_string(s.weight) << " " << poly_to_text(s.q) << "\n";
  }
  os << "end\n";
  return os.str();
}

namespace {

std::vector<SosCertificate> parse_certificates(const std::string& text) {
  std::vector<SosCertificate> out;
  std::istringstream is(text);
  std::string line;
  SosCertificate* cur = nullptr;
  int pending_squares = 0;
  int lineno = 0;
  auto rest = [](const std::string& l, std::size_t kw) {
    std::string r = l.substr(std::min(l.size(), kw + 1));
    return r;
  };
  auto fail = [&](const std::string& what) { throw MalformedCertificate("certificate line " + std::to_string(lineno) + ": " + what); };
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "certificate") {
      if (cur) fail("missing 'end'");
      out.emplace_back();
      cur = &out.back();
      cur->name = rest(line, kw.size());
      continue;
    }
    if (!cur) fail("expected 'certificate'");
    try {
      if (kw == "side") {
        cur->side = rest(line, kw.size());
      } else if (kw == "order") {
        ls >> cur->order;
      } else if (kw == "nvars") {
        ls >> cur->nvars;
        if (cur->nvars < 0) fail("negative nvars");
      } else if (kw == "scale") {
        std::string v;
        ls >> v;
        cur->scale = parse_rational(v);
      } else if (kw == "objective") {
        cur->objective = poly_from_text(rest(line, kw.size()), cur->nvars);
      } else if (kw == "box") {
        std::size_t i;
        std::string lo, hi;
        if (!(ls >> i >> lo >> hi)) fail("bad box line");
        if (i != cur->box.size()) fail("box lines out of order");
        cur->box.emplace_back(parse_rational(lo), parse_rational(hi));
      } else if (kw == "constraint") {
        cur->constraints.push_back(poly_from_text(rest(line, kw.size()), cur->nvars));
      } else if (kw == "mu") {
        std::string v;
        ls >> v;
        cur->mu = parse_rational(v);
      } else if (kw == "claim") {
        std::string v;
        ls >> v;
        cur->claim = parse_rational(v);
      } else if (kw == "term") {
        if (pending_squares) fail("too few squares in previous term");
        SosTerm t;
        if (!(ls >> t.constraint >> pending_squares)) fail("bad term line");
        cur->terms.push_back(t);
      } else if (kw == "square") {
        if (cur->terms.empty() || pending_squares <= 0) fail("unexpected square");
        std::string w;
        ls >> w;
        WeightedSquare s;
        s.weight = parse_rational(w);
        auto brace = line.find('{');
        if (brace == std::string::npos) fail("missing polynomial");
        s.q = poly_from_text(line.substr(brace), cur->nvars);
        cur->terms.back().squares.push_back(s);
        --pending_squares;
      } else if (kw == "end") {
        if (pending_squares) fail("too few squares in last term");
        cur = nullptr;
      } else {
        fail("unknown keyword '" + kw + "'");
      }
    } catch (const MalformedCertificate&) {
      throw;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  if (cur) throw MalformedCertificate("certificate truncated: missing 'end'");
  return out;
}

}  // namespace

SosCertificate certificate_from_text(const std::string& text) {
  auto v = parse_certificates(text);
  if (v.size() != 1) throw MalformedCertificate("expected exactly one certificate, found " + std::to_string(v.size()));
  return v.front();
}

std::string certificates_to_text(const std::vector<SosCertificate>& certs) {
  std::string out;
  for (const auto& c : certs) out += certificate_to_text(c);
  return out;
}

std::vector<SosCertificate> certificates_from_text(const std::string& text) { return parse_certificates(text); }

SosCertificate mutate_certificate(const SosCertificate& cert, std::mt19937_64& rng) {
  struct Site {
    std::size_t term, square;
    Monomial m;
  };
  std::vector<Site> sites;
  for (std::size_t t = 0; t < cert.terms.size(); ++t)
    for (std::size_t s = 0; s < cert.terms[t].squares.size(); ++s) {
      const auto& sq = cert.terms[t].squares[s];
      if (sq.q.size() < 2 || sq.weight == 0) continue;
      for (const auto& [m, c] : sq.q.terms()) sites.push_back({t, s, m});
    }
  SosCertificate out = cert;
  if (sites.empty()) {
    out.mu += 1;
    return out;
  }
  const Site& site = sites[std::uniform_int_distribution<std::size_t>(0, sites.size() - 1)(rng)];
  Poly& q = out.terms[site.term].squares[site.square].q;
  Rational c = q.coefficient(site.m);
  q.add_term(site.m, -2 * c);
  return out;
}

}  // namespace roundoff
