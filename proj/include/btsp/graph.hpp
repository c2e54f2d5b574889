#pragma once

#include <compare>
#include <utility>
#include <vector>

#include "btsp/instance.hpp"

namespace btsp {

// Undirected edge of the complete graph, stored with u < v.
struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(Vertex a, Vertex b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// Position of e in the lexicographic enumeration of all edges of K_n.
inline int edge_index(int n, Edge e) { return e.u * n - e.u * (e.u + 1) / 2 + (e.v - e.u - 1); }

inline std::vector<Edge> all_edges(int n) {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) out.push_back({u, v});
  return out;
}

}  // namespace btsp
