#pragma once

#include "roundoff/polynomial.hpp"

#include <cstdint>
#include <vector>

namespace roundoff {

// Correlative sparsity pattern: node per variable, edge when two variables meet in an objective
// monomial or in the same constraint.
struct CspGraph {
  int n = 0;
  std::vector<std::vector<bool>> adj;  // symmetric, adj[i][i] = true

  explicit CspGraph(int n = 0) : n(n), adj(n, std::vector<bool>(n, false)) {
    for (int i = 0; i < n; ++i) adj[i][i] = true;
  }
  void add_edge(int i, int j) { adj[i][j] = adj[j][i] = true; }
  bool edge(int i, int j) const { return adj[i][j]; }
  std::size_t edge_count() const;
};

using Clique = std::vector<int>;  // sorted, 0-based variable indices

struct CliqueSet {
  std::vector<Clique> cliques;
  std::vector<int> sizes() const;
  std::string str() const;  // 1-based, e.g. "{1,4} {1,2,3}"
};

CspGraph csp_graph(const Poly& objective, const std::vector<Poly>& constraints, int n);

// Exact maximal cliques (Bron-Kerbosch with pivoting), sorted by size then lexicographically.
CliqueSet maximal_cliques(const CspGraph& g);

// Maximal cliques of a minimum-degree chordal extension, returned in an RIP order.
CliqueSet chordal_cliques(const CspGraph& g);
CspGraph chordal_extension(const CspGraph& g);

bool is_chordal(const CspGraph& g);
bool satisfies_rip(const CliqueSet& cs);
// Reorders the cliques so that RIP holds, or throws RipFailure.
CliqueSet rip_order(const CliqueSet& cs);

// Moment-side variable count sum_j binom(n_j + 2d, 2d).
std::uint64_t variable_count(const CliqueSet& cs, unsigned d);
std::uint64_t dense_variable_count(unsigned n, unsigned d);

// True if every listed variable set lies inside some clique.
bool covers(const CliqueSet& cs, const std::vector<int>& vars);

}  // namespace roundoff
