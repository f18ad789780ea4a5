#include "roundoff/sparsity.hpp"

#include "roundoff/errors.hpp"

#include <algorithm>
#include <sstream>

namespace roundoff {

std::size_t CspGraph::edge_count() const {
  std::size_t c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) c += adj[i][j];
  return c;
}

std::vector<int> CliqueSet::sizes() const {
  std::vector<int> s;
  for (const auto& c : cliques) s.push_back(static_cast<int>(c.size()));
  return s;
}

std::string CliqueSet::str() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < cliques.size(); ++k) {
    os << (k ? " " : "") << "{";
    for (std::size_t i = 0; i < cliques[k].size(); ++i) os << (i ? "," : "") << cliques[k][i] + 1;
    os << "}";
  }
  return os.str();
}

CspGraph csp_graph(const Poly& objective, const std::vector<Poly>& constraints, int n) {
  CspGraph g(n);
  auto connect = [&](const std::vector<int>& vs) {
    for (std::size_t a = 0; a < vs.size(); ++a)
      for (std::size_t b = a + 1; b < vs.size(); ++b) g.add_edge(vs[a], vs[b]);
  };
  for (const auto& [m, c] : objective.terms()) {
    std::vector<int> vs;
    for (const auto& [v, e] : m.entries()) vs.push_back(static_cast<int>(v));
    connect(vs);
  }
  for (const auto& p : constraints) {
    auto s = p.variables();
    connect(std::vector<int>(s.begin(), s.end()));
  }
  return g;
}

namespace {

void sort_cliques(std::vector<Clique>& cs) {
  for (auto& c : cs) std::sort(c.begin(), c.end());
  std::sort(cs.begin(), cs.end(), [](const Clique& a, const Clique& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
}

bool subset(const Clique& a, const Clique& b) { return std::includes(b.begin(), b.end(), a.begin(), a.end()); }

void bron_kerbosch(const CspGraph& g, std::vector<int>& R, std::vector<int> P, std::vector<int> X,
                   std::vector<Clique>& out) {
  if (P.empty() && X.empty()) {
    out.push_back(R);
    return;
  }
  int pivot = -1;
  std::size_t best = 0;
  for (const auto* set : {&P, &X})
    for (int u : *set) {
      std::size_t cnt = 0;
      for (int v : P) cnt += (u != v && g.edge(u, v));
      if (pivot < 0 || cnt > best) {
        pivot = u;
        best = cnt;
      }
    }
  std::vector<int> candidates;
  for (int v : P)
    if (v == pivot || !g.edge(pivot, v)) candidates.push_back(v);
  for (int v : candidates) {
    std::vector<int> P2, X2;
    for (int u : P)
      if (u != v && g.edge(u, v)) P2.push_back(u);
    for (int u : X)
      if (u != v && g.edge(u, v)) X2.push_back(u);
    R.push_back(v);
    bron_kerbosch(g, R, P2, X2, out);
    R.pop_back();
    P.erase(std::find(P.begin(), P.end(), v));
    X.push_back(v);
  }
}

// Elimination cliques of a minimum-degree ordering; returns the filled graph as well.
std::vector<Clique> elimination_cliques(const CspGraph& g, CspGraph* filled) {
  CspGraph h = g;
  std::vector<bool> gone(g.n, false);
  std::vector<Clique> raw;
  for (int step = 0; step < g.n; ++step) {
    int v = -1, best = 0;
    for (int u = 0; u < g.n; ++u) {
      if (gone[u]) continue;
      int deg = 0;
      for (int w = 0; w < g.n; ++w) deg += (!gone[w] && w != u && h.edge(u, w));
      if (v < 0 || deg < best) {
        v = u;
        best = deg;
      }
    }
    Clique c{v};
    for (int w = 0; w < g.n; ++w)
      if (!gone[w] && w != v && h.edge(v, w)) c.push_back(w);
    for (std::size_t a = 1; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b) h.add_edge(c[a], c[b]);
    std::sort(c.begin(), c.end());
    raw.push_back(c);
    gone[v] = true;
  }
  if (filled) *filled = h;
  std::vector<Clique> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < raw.size() && !dominated; ++j)
      if (i != j && subset(raw[i], raw[j]) && (raw[i].size() < raw[j].size() || j < i)) dominated = true;
    if (!dominated) out.push_back(raw[i]);
  }
  return out;
}

int first_rip_violation(const std::vector<Clique>& cs) {
  Clique uni;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i > 0) {
      Clique inter;
      std::set_intersection(cs[i].begin(), cs[i].end(), uni.begin(), uni.end(), std::back_inserter(inter));
      bool ok = false;
      for (std::size_t l = 0; l < i && !ok; ++l) ok = subset(inter, cs[l]);
      if (!ok) return static_cast<int>(i);
    }
    Clique merged;
    std::set_union(uni.begin(), uni.end(), cs[i].begin(), cs[i].end(), std::back_inserter(merged));
    uni = merged;
  }
  return -1;
}

}  // namespace

CliqueSet maximal_cliques(const CspGraph& g) {
  std::vector<int> R, P, X;
  for (int i = 0; i < g.n; ++i) P.push_back(i);
  CliqueSet cs;
  if (g.n == 0) return cs;
  bron_kerbosch(g, R, P, X, cs.cliques);
  sort_cliques(cs.cliques);
  return cs;
}

CspGraph chordal_extension(const CspGraph& g) {
  CspGraph h;
  elimination_cliques(g, &h);
  return h;
}

CliqueSet chordal_cliques(const CspGraph& g) {
  CliqueSet cs;
  cs.cliques = elimination_cliques(g, nullptr);
  sort_cliques(cs.cliques);
  return rip_order(cs);
}

bool is_chordal(const CspGraph& g) {
  // maximum cardinality search; the reverse visit order is a perfect elimination order iff chordal
  std::vector<int> weight(g.n, 0), order;
  std::vector<bool> done(g.n, false);
  for (int step = 0; step < g.n; ++step) {
    int v = -1;
    for (int u = 0; u < g.n; ++u)
      if (!done[u] && (v < 0 || weight[u] > weight[v])) v = u;
    done[v] = true;
    order.push_back(v);
    for (int u = 0; u < g.n; ++u)
      if (!done[u] && g.edge(u, v)) ++weight[u];
  }
  std::reverse(order.begin(), order.end());
  std::vector<int> pos(g.n);
  for (int i = 0; i < g.n; ++i) pos[order[i]] = i;
  for (int i = 0; i < g.n; ++i) {
    int v = order[i];
    std::vector<int> later;
    for (int u = 0; u < g.n; ++u)
      if (u != v && g.edge(u, v) && pos[u] > i) later.push_back(u);
    for (std::size_t a = 0; a < later.size(); ++a)
      for (std::size_t b = a + 1; b < later.size(); ++b)
        if (!g.edge(later[a], later[b])) return false;
  }
  return true;
}

bool satisfies_rip(const CliqueSet& cs) { return first_rip_violation(cs.cliques) < 0; }

CliqueSet rip_order(const CliqueSet& cs) {
  // Prim on clique-intersection weights: a maximum-weight spanning tree is a junction tree
  // whenever one exists, and its visit order then satisfies RIP.
  const std::size_t m = cs.cliques.size();
  if (m <= 1) return cs;
  std::vector<Clique> cl = cs.cliques;
  for (auto& c : cl) std::sort(c.begin(), c.end());
  auto weight = [&](std::size_t a, std::size_t b) {
    Clique inter;
    std::set_intersection(cl[a].begin(), cl[a].end(), cl[b].begin(), cl[b].end(), std::back_inserter(inter));
    return static_cast<int>(inter.size());
  };
  std::size_t start = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (cl[i].size() > cl[start].size()) start = i;
  std::vector<bool> in(m, false);
  std::vector<int> best(m, -1);
  CliqueSet out;
  std::size_t cur = start;
  for (std::size_t step = 0; step < m; ++step) {
    in[cur] = true;
    out.cliques.push_back(cl[cur]);
    for (std::size_t i = 0; i < m; ++i)
      if (!in[i]) best[i] = std::max(best[i], weight(cur, i));
    std::size_t next = m;
    for (std::size_t i = 0; i < m; ++i)
      if (!in[i] && (next == m || best[i] > best[next])) next = i;
    cur = next;
  }
  int bad = first_rip_violation(out.cliques);
  if (bad >= 0) throw RipFailure(bad);
  return out;
}

std::uint64_t variable_count(const CliqueSet& cs, unsigned d) {
  std::uint64_t total = 0;
  for (const auto& c : cs.cliques) total += binomial(static_cast<unsigned>(c.size()) + 2 * d, 2 * d);
  return total;
}

std::uint64_t dense_variable_count(unsigned n, unsigned d) { return binomial(n + 2 * d, 2 * d); }

bool covers(const CliqueSet& cs, const std::vector<int>& vars) {
  Clique v = vars;
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  for (const auto& c : cs.cliques)
    if (subset(v, c)) return true;
  return false;
}

}  // namespace roundoff
