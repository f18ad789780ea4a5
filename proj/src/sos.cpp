#include "roundoff/sos.hpp"

#include "roundoff/errors.hpp"

#include <algorithm>
#include <unordered_map>

namespace roundoff {

namespace {

unsigned half_up(unsigned k) { return (k + 1) / 2; }

std::vector<int> iota_vars(int n) {
  std::vector<int> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

Rational ceil_rational(const Rational& q) {
  Integer num = boost::multiprecision::numerator(q), den = boost::multiprecision::denominator(q);
  Integer f = num / den;
  if (f * den < num) f += 1;
  return Rational(f);
}

}  // namespace

ConstraintSet box_constraints(const std::vector<Interval>& box, int nvars) {
  ConstraintSet K;
  Rational M = 0;
  for (int i = 0; i < static_cast<int>(box.size()); ++i) {
    Poly x = Poly::variable(i, nvars);
    Poly a = Poly::constant(box[i].lo(), nvars), b = Poly::constant(box[i].hi(), nvars);
    K.g.push_back((b - x) * (x - a));
    M += std::max(box[i].lo() * box[i].lo(), box[i].hi() * box[i].hi());
  }
  K.archimedean_M = ceil_rational(M);
  return K;
}

ConstraintSet with_clique_balls(const ConstraintSet& K, const CliqueSet& cliques, int nvars) {
  ConstraintSet out = K;
  if (K.archimedean_M <= 0) return out;
  for (const auto& c : cliques.cliques) {
    Poly g = Poly::constant(Rational(static_cast<long>(c.size())) * K.archimedean_M, nvars);
    for (int i : c) g -= Poly::variable(i, nvars).pow(2);
    out.g.push_back(g);
  }
  return out;
}

double SosProgram::bound_from(const SdpSolution& sol) const {
  return to_double(objective.constant_term()) + sol.dual_objective;
}

std::uint64_t SosProgram::gram_entries() const {
  std::uint64_t t = 0;
  for (const auto& b : blocks) t += b.basis.size() * (b.basis.size() + 1) / 2;
  return t;
}

unsigned default_order(const Poly& p, const ConstraintSet& K) {
  unsigned d = std::max(1u, half_up(p.degree()));
  for (const auto& g : K.g) d = std::max(d, half_up(g.degree()));
  return d;
}

SosProgram build_sos_program(const Poly& objective, std::vector<SosBlock> blocks, int nvars, unsigned order) {
  SosProgram sp;
  sp.nvars = nvars;
  sp.order = order;
  sp.objective = objective;
  sp.objective.set_nvars(nvars);
  blocks.erase(std::remove_if(blocks.begin(), blocks.end(), [](const SosBlock& b) { return b.basis.empty(); }),
               blocks.end());
  sp.blocks = std::move(blocks);

  struct Raw {
    int block, i, j;
    double v;
  };
  std::unordered_map<Monomial, std::vector<Raw>, MonomialHash> by_mono;
  for (int k = 0; k < static_cast<int>(sp.blocks.size()); ++k) {
    const auto& B = sp.blocks[k];
    std::vector<std::pair<Monomial, double>> mult;
    for (const auto& [m, c] : B.multiplier.terms()) mult.emplace_back(m, to_double(c));
    const int s = static_cast<int>(B.basis.size());
    for (int p = 0; p < s; ++p)
      for (int q = p; q < s; ++q) {
        Monomial pq = B.basis[p] * B.basis[q];
        for (const auto& [delta, gd] : mult) by_mono[pq * delta].push_back({k, p, q, gd});
      }
  }
  for (const auto& [m, c] : sp.objective.terms())
    if (!m.is_one() && !by_mono.count(m)) throw CliqueCoverageFailure(m.str());

  for (const auto& [m, raws] : by_mono)
    if (!m.is_one()) sp.rows.push_back(m);
  std::sort(sp.rows.begin(), sp.rows.end(), GrlexLess());

  SdpProblem& P = sp.sdp;
  for (const auto& B : sp.blocks) P.block_sizes.push_back(static_cast<int>(B.basis.size()));
  const int m = static_cast<int>(sp.rows.size());
  P.c.resize(m);
  P.F.assign(m + 1, {});
  P.group_hint.assign(m, -1);
  auto emit = [&](int row, const std::vector<Raw>& raws, double sign) {
    for (const auto& r : raws) P.F[row].push_back({r.block, r.i, r.j, sign * r.v});
  };
  auto it0 = by_mono.find(Monomial());
  if (it0 != by_mono.end()) emit(0, it0->second, -1.0);
  for (int r = 0; r < m; ++r) {
    const auto& raws = by_mono.at(sp.rows[r]);
    P.c[r] = to_double(sp.objective.coefficient(sp.rows[r]));
    emit(r + 1, raws, 1.0);
    int g = sp.blocks[raws.front().block].group;
    for (const auto& raw : raws)
      if (sp.blocks[raw.block].group != g) g = -1;
    P.group_hint[r] = g;
  }
  return sp;
}

SosProgram build_dense_relaxation(const Poly& objective, const ConstraintSet& K, unsigned d) {
  unsigned need = default_order(objective, K);
  if (d < need) throw OrderTooSmall(static_cast<int>(d), static_cast<int>(need));
  int n = objective.nvars();
  for (const auto& g : K.g) n = std::max(n, g.nvars());
  auto vars = iota_vars(n);
  std::vector<SosBlock> blocks;
  blocks.push_back({monomial_basis(vars, d), Poly::constant(1, n), -1, "sigma0"});
  for (std::size_t j = 0; j < K.g.size(); ++j) {
    Poly g = K.g[j];
    g.set_nvars(n);
    blocks.push_back({monomial_basis(vars, d - half_up(g.degree())), g, -1, "g" + std::to_string(j + 1)});
  }
  return build_sos_program(objective, std::move(blocks), n, d);
}

SosProgram build_sparse_relaxation(const Poly& objective, const ConstraintSet& K, const CliqueSet& cliques,
                                   unsigned d) {
  unsigned need = default_order(objective, K);
  if (d < need) throw OrderTooSmall(static_cast<int>(d), static_cast<int>(need));
  int n = objective.nvars();
  for (const auto& g : K.g) n = std::max(n, g.nvars());
  for (const auto& c : cliques.cliques)
    for (int v : c) n = std::max(n, v + 1);
  for (const auto& [m, c] : objective.terms()) {
    std::vector<int> vs;
    for (const auto& [v, e] : m.entries()) vs.push_back(static_cast<int>(v));
    if (!covers(cliques, vs)) throw CliqueCoverageFailure(m.str());
  }
  std::vector<SosBlock> blocks;
  for (std::size_t j = 0; j < cliques.cliques.size(); ++j)
    blocks.push_back({monomial_basis(cliques.cliques[j], d), Poly::constant(1, n), static_cast<int>(j),
                      "sigma0[" + std::to_string(j + 1) + "]"});
  for (std::size_t k = 0; k < K.g.size(); ++k) {
    Poly g = K.g[k];
    g.set_nvars(n);
    auto vs = g.variables();
    int best = -1;
    for (std::size_t j = 0; j < cliques.cliques.size(); ++j) {
      const auto& c = cliques.cliques[j];
      if (!std::includes(c.begin(), c.end(), vs.begin(), vs.end())) continue;
      if (best < 0 || c.size() < cliques.cliques[best].size()) best = static_cast<int>(j);
    }
    if (best < 0) throw CliqueCoverageFailure("constraint g" + std::to_string(k + 1));
    blocks.push_back({monomial_basis(cliques.cliques[best], d - half_up(g.degree())), g, best,
                      "g" + std::to_string(k + 1)});
  }
  return build_sos_program(objective, std::move(blocks), n, d);
}

namespace {

Poly error_bound_poly(int n, int j, int nv) {
  Poly e = Poly::variable(n + j, nv);
  return Poly::constant(1, nv) - e * e;
}

Poly error_ball_poly(const Rational& M, int n, int j, int nv) {
  Poly e = Poly::variable(n + j, nv);
  Poly ball = Poly::constant(M + 1, nv) - e * e;
  for (int i = 0; i < n; ++i) ball -= Poly::variable(i, nv).pow(2);
  return ball;
}

}  // namespace

ConstraintSet linear_part_constraints(const ConstraintSet& X, int n, int m) {
  const int nv = n + m;
  ConstraintSet K;
  K.archimedean_M = X.archimedean_M;
  for (const auto& g : X.g) {
    Poly w = g;
    w.set_nvars(nv);
    K.g.push_back(w);
  }
  for (int j = 0; j < m; ++j) {
    K.g.push_back(error_bound_poly(n, j, nv));
    if (X.archimedean_M > 0) K.g.push_back(error_ball_poly(X.archimedean_M, n, j, nv));
  }
  return K;
}

SosProgram build_linear_part_relaxation(const std::vector<Poly>& s, const ConstraintSet& X, int n, unsigned d,
                                        Sense sense, const Poly& offset) {
  const int m = static_cast<int>(s.size());
  const int nv = n + m;
  Poly l(nv);
  if (!offset.is_zero()) {
    Poly o = offset;
    o.set_nvars(nv);
    l += o;
  }
  for (int j = 0; j < m; ++j) {
    Poly sj = s[j];
    sj.set_nvars(nv);
    l += sj * Poly::variable(n + j, nv);
  }
  if (sense == Sense::Max) l = -l;
  unsigned need = default_order(l, X);
  if (d < need) throw OrderTooSmall(static_cast<int>(d), static_cast<int>(need));

  auto xs = iota_vars(n);
  std::vector<SosBlock> blocks;
  if (m == 0) blocks.push_back({monomial_basis(xs, d), Poly::constant(1, nv), -1, "sigma0"});
  for (int j = 0; j < m; ++j) {
    std::vector<int> clique = xs;
    clique.push_back(n + j);
    blocks.push_back({monomial_basis(clique, d), Poly::constant(1, nv), j, "sigma0[" + std::to_string(j + 1) + "]"});
    blocks.push_back({monomial_basis(clique, d - 1), error_bound_poly(n, j, nv), j,
                      "e" + std::to_string(j + 1) + " bound"});
    if (X.archimedean_M > 0)
      blocks.push_back({monomial_basis(clique, d - 1), error_ball_poly(X.archimedean_M, n, j, nv), j,
                        "ball" + std::to_string(j + 1)});
  }
  for (std::size_t k = 0; k < X.g.size(); ++k) {
    Poly g = X.g[k];
    g.set_nvars(nv);
    blocks.push_back({monomial_basis(xs, d - half_up(g.degree())), g, -1, "g" + std::to_string(k + 1)});
  }
  return build_sos_program(l, std::move(blocks), nv, d);
}

}  // namespace roundoff
