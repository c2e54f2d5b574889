#pragma once

#include <random>

#include "btsp/matching.hpp"
#include "btsp/parity.hpp"

namespace btsp::testing {

inline Rational small_rational(std::mt19937_64& rng, int lo, int hi) {
  long num = lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  long den = 1 + static_cast<long>(rng() % 4);
  Rational r(num, den);
  r.canonicalize();
  return r;
}

// Random multigraph; density in percent; parallel edges appear with small probability.
inline MatchingGraph random_matching_graph(std::mt19937_64& rng, int n, int density, bool negative) {
  MatchingGraph g;
  g.vertex_count = n;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (static_cast<int>(rng() % 100) >= density) continue;
      g.add_edge(u, v, small_rational(rng, negative ? -20 : 0, 30));
      if (rng() % 10 == 0) g.add_edge(v, u, small_rational(rng, negative ? -20 : 0, 30));
    }
  return g;
}

inline ParitySpec random_parity_spec(std::mt19937_64& rng, int n, int max_edges, bool negative) {
  ParitySpec spec;
  spec.vertex_count = n;
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) pairs.push_back({u, v});
  std::shuffle(pairs.begin(), pairs.end(), rng);
  const int m = std::min<int>(max_edges, static_cast<int>(pairs.size()));
  const int keep = m / 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(m / 2 + 1));
  for (int k = 0; k < keep; ++k) spec.edges.push_back({pairs[k].first, pairs[k].second, small_rational(rng, negative ? -10 : 0, 20)});
  for (int v = 0; v < n; ++v) (rng() % 2 ? spec.odd : spec.even).push_back(v);
  return spec;
}

}  // namespace btsp::testing
