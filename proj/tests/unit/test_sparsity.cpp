#include "roundoff/errors.hpp"
#include "roundoff/sparsity.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace roundoff;

namespace {

CliqueSet paper_cliques() {
  return CliqueSet{{{0, 3}, {0, 1, 2}, {0, 1, 4}, {0, 4, 5}, {0, 2, 5}}};
}

bool rip_brute_force(CliqueSet cs) {
  std::sort(cs.cliques.begin(), cs.cliques.end());
  do {
    if (satisfies_rip(cs)) return true;
  } while (std::next_permutation(cs.cliques.begin(), cs.cliques.end()));
  return false;
}

}  // namespace

TEST_CASE("kepler0 correlative sparsity pattern") {
  ProgramSpec s = testutil::load("kepler0");
  CspGraph g = csp_graph(to_poly(s.objective, 6), {}, 6);
  const char* rows[] = {"111111", "111010", "111001", "100100", "110011", "101011"};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) CHECK(g.edge(i, j) == (rows[i][j] == '1'));
  CliqueSet mc = maximal_cliques(g);
  CHECK(mc.cliques.size() == 5u);
  for (const auto& c : paper_cliques().cliques) CHECK(std::find(mc.cliques.begin(), mc.cliques.end(), c) != mc.cliques.end());
  CHECK_FALSE(is_chordal(g));
}

TEST_CASE("the exact kepler0 cliques admit no RIP order") {
  CliqueSet cs = paper_cliques();
  CHECK_FALSE(rip_brute_force(cs));
  CHECK_THROWS_AS(rip_order(cs), RipFailure);
}

TEST_CASE("chordal extension yields an RIP order") {
  ProgramSpec s = testutil::load("kepler0");
  CspGraph g = csp_graph(to_poly(s.objective, 6), {}, 6);
  CspGraph h = chordal_extension(g);
  CHECK(is_chordal(h));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (g.edge(i, j)) CHECK(h.edge(i, j));
  CliqueSet cc = chordal_cliques(g);
  CHECK(satisfies_rip(cc));
  std::vector<int> all;
  for (const auto& c : cc.cliques) all.insert(all.end(), c.begin(), c.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  CHECK(all.size() == 6u);
}

TEST_CASE("small graphs") {
  CspGraph path(3);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  CliqueSet pc = maximal_cliques(path);
  CHECK(pc.cliques == std::vector<Clique>{{0, 1}, {1, 2}});
  CHECK(satisfies_rip(rip_order(pc)));
  CspGraph k4(4);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) k4.add_edge(i, j);
  CHECK(maximal_cliques(k4).cliques == std::vector<Clique>{{0, 1, 2, 3}});
  CHECK(k4.edge_count() == 6u);
  CliqueSet triangle{{{0, 1}, {1, 2}, {0, 2}}};
  CHECK_THROWS_AS(rip_order(triangle), RipFailure);
  CHECK_FALSE(rip_brute_force(triangle));
}

TEST_CASE("RIP holds on every generated clique order") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<int> nd(3, 9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    int n = nd(rng);
    CspGraph g(n);
    double p = u(rng);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (u(rng) < p) g.add_edge(i, j);
    CliqueSet cc = chordal_cliques(g);
    CHECK(satisfies_rip(cc));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (g.edge(i, j)) CHECK(covers(cc, {i, j}));
    if (is_chordal(g)) CHECK(satisfies_rip(rip_order(maximal_cliques(g))));
  }
}

TEST_CASE("variable counts") {
  CHECK(dense_variable_count(6, 1) == 28);
  CHECK(dense_variable_count(6, 2) == 210);
  CHECK(dense_variable_count(6, 3) == 924);
  CHECK(variable_count(paper_cliques(), 2) == 155);
  CHECK(variable_count(paper_cliques(), 3) == 364);
  CHECK(paper_cliques().str() == "{1,4} {1,2,3} {1,2,5} {1,5,6} {1,3,6}");
}
