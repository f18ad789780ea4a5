#pragma once

#include "roundoff/interval.hpp"
#include "roundoff/polynomial.hpp"
#include "roundoff/sdp.hpp"
#include "roundoff/sparsity.hpp"

#include <string>
#include <vector>

namespace roundoff {

// Semialgebraic set {g_j >= 0}.
struct ConstraintSet {
  std::vector<Poly> g;
  Rational archimedean_M = 0;  // M with M - sum x_i^2 >= 0 on the set (0 = unknown)
};

// (b_i - x_i)(x_i - a_i) per variable, plus M = ceil(sum max(a_i^2, b_i^2)).
ConstraintSet box_constraints(const std::vector<Interval>& box, int nvars);
// Appends n_j M - sum_{i in C_j} x_i^2 per clique (requires archimedean_M > 0).
ConstraintSet with_clique_balls(const ConstraintSet& K, const CliqueSet& cliques, int nvars);

// One positive semidefinite block: multiplier * m^T Q m with m the basis vector.
struct SosBlock {
  std::vector<Monomial> basis;
  Poly multiplier;  // 1 for a Gram block of sigma_0
  int group = -1;   // clique index, -1 = shared
  std::string label;
};

// max mu  s.t.  objective - mu = sum_k multiplier_k * m_k^T Q_k m_k,  Q_k >= 0.
// SDPA row i matches rows[i]; the dual matrix Y holds the Gram matrices Q_k.
struct SosProgram {
  int nvars = 0;
  unsigned order = 0;
  Poly objective;
  std::vector<SosBlock> blocks;
  std::vector<Monomial> rows;
  SdpProblem sdp;

  // mu = objective(0) + <F_0, Y>
  double bound_from(const SdpSolution& sol) const;
  std::uint64_t gram_entries() const;  // sum_k |basis_k| (|basis_k| + 1) / 2
};

SosProgram build_sos_program(const Poly& objective, std::vector<SosBlock> blocks, int nvars, unsigned order);

unsigned default_order(const Poly& p, const ConstraintSet& K);

SosProgram build_dense_relaxation(const Poly& objective, const ConstraintSet& K, unsigned d);
SosProgram build_sparse_relaxation(const Poly& objective, const ConstraintSet& K, const CliqueSet& cliques,
                                   unsigned d);

enum class Sense { Min, Max };

// l(x, e) = sum_j s_j(x) e_j over X x [-1,1]^m with cliques {x} + {e_j}. Variables are
// x_0..x_{n-1}, e_j = n + j. For Sense::Max the objective is -l, so the bound is -mu.
// `offset` is a constant-in-e part c0(x) added to l.
SosProgram build_linear_part_relaxation(const std::vector<Poly>& s, const ConstraintSet& X, int n, unsigned d,
                                        Sense sense, const Poly& offset = Poly());

// The multipliers used by build_linear_part_relaxation, in certificate order: X.g, then for each
// j the bound 1 - e_j^2 and (when M > 0) the ball M + 1 - e_j^2 - |x|^2.
ConstraintSet linear_part_constraints(const ConstraintSet& X, int n, int m);

}  // namespace roundoff
