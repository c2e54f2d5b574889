#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "btsp/error.hpp"
#include "btsp/oracles.hpp"
#include "btsp/parity.hpp"
#include "fixtures.hpp"
#include "random_graphs.hpp"

using namespace btsp;
using namespace btsp::testing;

namespace {

ParitySpec complete_spec(const Instance& inst, std::vector<Vertex> odd, std::vector<Vertex> even) {
  ParitySpec spec;
  spec.vertex_count = inst.size();
  for (int u = 0; u < inst.size(); ++u)
    for (int v = u + 1; v < inst.size(); ++v) spec.edges.push_back({u, v, inst.weight(u, v)});
  spec.odd = std::move(odd);
  spec.even = std::move(even);
  return spec;
}

}  // namespace

TEST_CASE("gadget shape") {
  auto spec = complete_spec(uniform(3, 1), {0, 1}, {2});
  Gadget g = build_gadget(spec);
  CHECK(g.copies[0].size() == 1);
  CHECK(g.copies[1].size() == 1);
  CHECK(g.copies[2].size() == 2);
  // 4 terminals + 3 edge pairs
  CHECK(g.graph.vertex_count == 4 + 6);
  CHECK(std::count_if(g.absorber.begin(), g.absorber.end(), [](int id) { return id >= 0; }) == 1);
  CHECK(g.pair_edge.size() == 3);
}

TEST_CASE("gadget decoding semantics") {
  auto spec = complete_spec(uniform(3, 1), {0, 1}, {2});
  Gadget g = build_gadget(spec);
  // Edge {0,1} selected through its half-edges, edges {0,2},{1,2} unselected,
  // vertex 2 absorbed.
  std::vector<int> ids;
  for (int id = 0; id < static_cast<int>(g.graph.edges.size()); ++id) {
    if (g.selects[id] == 0) ids.push_back(id);
  }
  ids.push_back(g.pair_edge[1]);
  ids.push_back(g.pair_edge[2]);
  ids.push_back(g.absorber[2]);
  auto x = decode_gadget_matching(spec, g, ids);
  CHECK(x.x == std::vector<int>{1, 0, 0});
  CHECK(x.weight == 1);
  CHECK(!certify_parity_solution(spec, x).has_value());
}

TEST_CASE("solver fixtures") {
  auto a = complete_spec(uniform(4, 1), {1, 2}, {0, 3});
  auto xa = solve_parity_bmatching(a);
  REQUIRE(xa.has_value());
  CHECK(xa->weight == 1);
  CHECK(!certify_parity_solution(a, *xa).has_value());

  auto b = complete_spec(lower("k4", {{1}, {1, 10}, {1, 1, 1}}), {1, 2}, {0, 3});
  CHECK(solve_parity_bmatching(b)->weight == 2);

  auto c = complete_spec(lower("neg", {{-1}, {-1, -1}}), {}, {0, 1, 2});
  auto xc = solve_parity_bmatching(c);
  REQUIRE(xc.has_value());
  CHECK(xc->weight == -3);
  CHECK(xc->x == std::vector<int>{1, 1, 1});
}

TEST_CASE("infeasible and malformed specs") {
  auto odd_count = complete_spec(uniform(3, 1), {0}, {1, 2});
  CHECK(!solve_parity_bmatching(odd_count).has_value());

  auto overlap = complete_spec(uniform(3, 1), {0, 1}, {1, 2});
  CHECK_THROWS_AS(build_gadget(overlap), DomainError);

  auto missing = complete_spec(uniform(3, 1), {0, 1}, {});
  CHECK_THROWS_AS(build_gadget(missing), DomainError);
  missing.unlisted_as_even = true;
  CHECK(solve_parity_bmatching(missing)->weight == 1);

  auto bounds = complete_spec(uniform(3, 1), {0, 1}, {2});
  bounds.deg_hi = 3;
  CHECK_THROWS_AS(solve_parity_bmatching(bounds), DomainError);
}

TEST_CASE("random specs agree with exhaustive search") {
  std::mt19937_64 rng(99);
  int feasible = 0;
  for (int trial = 0; trial < 150; ++trial) {
    int n = 3 + static_cast<int>(rng() % 6);
    auto spec = random_parity_spec(rng, n, 16, trial % 2 == 0);
    auto fast = solve_parity_bmatching(spec);
    auto slow = exhaustive_parity_bmatching(spec);
    REQUIRE(fast.has_value() == slow.has_value());
    if (!fast) continue;
    ++feasible;
    CHECK(fast->weight == *slow);
    auto problem = certify_parity_solution(spec, *fast);
    CHECK_MESSAGE(!problem.has_value(), *problem);
  }
  CHECK(feasible > 50);
}
