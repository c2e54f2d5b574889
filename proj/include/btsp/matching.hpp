#pragma once

#include <optional>
#include <string>
#include <vector>

#include "btsp/instance.hpp"
#include "btsp/rational.hpp"

namespace btsp {

struct MatchingEdge {
  Vertex u;
  Vertex v;
  Rational weight;
};

// General multigraph; the edge id is the index into `edges`.
struct MatchingGraph {
  int vertex_count = 0;
  std::vector<MatchingEdge> edges;

  int add_edge(Vertex u, Vertex v, Rational weight);
};

struct DualBlossom {
  std::vector<Vertex> members;  // sorted
  Rational z;
};

// Dual solution of the perfect matching LP with odd-set constraints
// x(E[B]) <= (|B|-1)/2. Reduced cost of e = uv:
//   w(e) - y(u) - y(v) + sum of z(B) over blossoms B containing both u and v.
struct MatchingCertificate {
  std::vector<Rational> vertex_dual;
  std::vector<DualBlossom> blossoms;
};

struct PerfectMatching {
  std::vector<int> edge_ids;  // ascending
  Rational weight;
  MatchingCertificate certificate;
};

// Minimum-weight perfect matching (arbitrary rational weights, parallel edges
// allowed), or nullopt when the graph has none.
std::optional<PerfectMatching> min_weight_perfect_matching(const MatchingGraph& g);

// Rechecks primal feasibility and complementary slackness of `m` on `g`.
// Returns the first violation found, or nullopt when the certificate proves optimality.
std::optional<std::string> check_matching_certificate(const MatchingGraph& g, const PerfectMatching& m);

Rational reduced_cost(const MatchingGraph& g, const MatchingCertificate& cert, int edge_id);

}  // namespace btsp
