#include "btsp/oracles.hpp"

#include <algorithm>
#include <climits>
#include <functional>

#include "btsp/error.hpp"

namespace btsp {
namespace {

// All weights times a common denominator, as int64 when every partial sum of up
// to `terms` weights is guaranteed to fit.
std::optional<std::vector<std::int64_t>> scaled_int64(const std::vector<Rational>& values, int terms, Integer& scale) {
  scale = 1;
  for (const auto& v : values) scale = lcm(scale, Integer(v.get_den()));
  const Integer limit = Integer(1) << 61;
  std::vector<std::int64_t> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    Integer s = v.get_num() * (scale / v.get_den());
    if (abs(s) * terms >= limit) return std::nullopt;
    out.push_back(s.get_si());
  }
  return out;
}

template <typename T>
ExactTour held_karp(int n, const std::vector<T>& w, const std::function<Rational(const T&)>& to_rational) {
  auto W = [&](int u, int v) -> const T& { return w[static_cast<std::size_t>(u) * n + v]; };
  const int m = n - 1;  // vertices 1..n-1 live in bits 0..m-1
  const std::size_t full = (std::size_t{1} << m) - 1;
  // cost[mask * m + (v-1)]: cheapest path from v through every vertex outside
  // mask and back to 0, where mask holds the visited vertices including v.
  std::vector<T> cost((full + 1) * m);
  for (int v = 1; v <= m; ++v) {
    cost[full * m + (v - 1)] = W(v, 0);
  }
  for (std::size_t mask = full; mask-- > 1;) {
    for (int v = 1; v <= m; ++v) {
      if (!(mask >> (v - 1) & 1)) continue;
      bool have = false;
      T best{};
      for (int u = 1; u <= m; ++u) {
        if (mask >> (u - 1) & 1) continue;
        std::size_t next = (mask | (std::size_t{1} << (u - 1))) * m + (u - 1);
        T c = W(v, u) + cost[next];
        if (!have || c < best) {
          best = c;
          have = true;
        }
      }
      cost[mask * m + (v - 1)] = best;
    }
  }
  T opt{};
  bool have = false;
  for (int u = 1; u <= m; ++u) {
    T c = W(0, u) + cost[(std::size_t{1} << (u - 1)) * m + (u - 1)];
    if (!have || c < opt) {
      opt = c;
      have = true;
    }
  }
  // Forward reconstruction, always taking the smallest vertex that stays optimal.
  ExactTour tour;
  tour.order.push_back(0);
  std::size_t mask = 0;
  int cur = 0;
  T remaining = opt;
  for (int step = 0; step < m; ++step) {
    for (int u = 1; u <= m; ++u) {
      if (mask >> (u - 1) & 1) continue;
      std::size_t next = mask | (std::size_t{1} << (u - 1));
      if (W(cur, u) + cost[next * m + (u - 1)] == remaining) {
        remaining = cost[next * m + (u - 1)];
        mask = next;
        cur = u;
        tour.order.push_back(u);
        break;
      }
    }
  }
  tour.weight = to_rational(opt);
  return tour;
}

template <typename T>
std::optional<T> one_tree_bruteforce(int n, const std::vector<T>& w, std::span<const int> b, int only_root) {
  auto W = [&](int u, int v) -> const T& { return w[static_cast<std::size_t>(u) * n + v]; };
  std::optional<T> best;
  const int m = n - 1;
  std::vector<int> rest(m);
  std::vector<int> prufer(std::max(0, m - 2), 0);
  std::vector<int> degree(m);
  for (int root = 0; root < n; ++root) {
    if (b[root] < 2 || (only_root >= 0 && root != only_root)) continue;
    int idx = 0;
    for (int v = 0; v < n; ++v)
      if (v != root) rest[idx++] = v;
    std::fill(prufer.begin(), prufer.end(), 0);
    while (true) {
      // degrees in the tree on `rest` (local labels 0..m-1)
      std::fill(degree.begin(), degree.end(), 1);
      for (int x : prufer) ++degree[x];
      bool ok = true;
      for (int i = 0; i < m && ok; ++i) ok = degree[i] <= b[rest[i]];
      if (ok) {
        // decode
        T weight{};
        std::vector<int> deg = degree;
        for (int x : prufer) {
          int leaf = 0;
          while (deg[leaf] != 1) ++leaf;
          weight = weight + W(rest[leaf], rest[x]);
          --deg[leaf];
          --deg[x];
        }
        int a = -1, c = -1;
        for (int i = 0; i < m; ++i) {
          if (deg[i] == 1) (a < 0 ? a : c) = i;
        }
        if (m >= 2) weight = weight + W(rest[a], rest[c]);
        // two cheapest root edges to vertices with slack
        std::optional<T> first, second;
        for (int i = 0; i < m; ++i) {
          if (degree[i] + 1 > b[rest[i]]) continue;
          const T& c2 = W(root, rest[i]);
          if (!first || c2 < *first) {
            second = first;
            first = c2;
          } else if (!second || c2 < *second) {
            second = c2;
          }
        }
        if (second) {
          T total = weight + *first + *second;
          if (!best || total < *best) best = total;
        }
      }
      // next Prüfer sequence
      int pos = static_cast<int>(prufer.size()) - 1;
      while (pos >= 0 && prufer[pos] == m - 1) prufer[pos--] = 0;
      if (pos < 0) break;
      ++prufer[pos];
    }
  }
  return best;
}

std::vector<Rational> flat_weights(const Instance& inst) {
  std::vector<Rational> w;
  const int n = inst.size();
  w.reserve(static_cast<std::size_t>(n) * n);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v) w.push_back(inst.weight(u, v));
  return w;
}

}  // namespace

Rational tour_weight(const Instance& inst, std::span<const Vertex> order) {
  Rational total = 0;
  for (std::size_t i = 0; i < order.size(); ++i) total += inst.weight(order[i], order[(i + 1) % order.size()]);
  return total;
}

ExactTour exact_tsp(const Instance& inst) {
  const int n = inst.size();
  if (n < 3) throw DomainError("exact_tsp needs n >= 3");
  if (n > kExactTspMaxN) throw CapacityError("exact_tsp is limited to n <= " + std::to_string(kExactTspMaxN));
  auto w = flat_weights(inst);
  Integer scale;
  if (auto ints = scaled_int64(w, n + 1, scale)) {
    return held_karp<std::int64_t>(n, *ints, [&](const std::int64_t& x) {
      Rational r(Integer(static_cast<long>(x)), scale);
      r.canonicalize();
      return r;
    });
  }
  return held_karp<Rational>(n, w, [](const Rational& x) { return x; });
}

std::optional<Rational> exhaustive_one_tree(const Instance& inst, std::span<const int> b,
                                           std::optional<Vertex> root) {
  const int n = inst.size();
  if (n > kExhaustiveOneTreeMaxN) {
    throw CapacityError("exhaustive_one_tree is limited to n <= " + std::to_string(kExhaustiveOneTreeMaxN));
  }
  if (static_cast<int>(b.size()) != n) throw DomainError("degree bound vector has wrong length");
  if (root && (*root < 0 || *root >= n)) throw DomainError("root out of range");
  const int only_root = root.value_or(-1);
  auto w = flat_weights(inst);
  Integer scale;
  if (auto ints = scaled_int64(w, n + 1, scale)) {
    auto best = one_tree_bruteforce<std::int64_t>(n, *ints, b, only_root);
    if (!best) return std::nullopt;
    Rational r(Integer(static_cast<long>(*best)), scale);
    r.canonicalize();
    return r;
  }
  return one_tree_bruteforce<Rational>(n, w, b, only_root);
}

std::optional<Rational> exhaustive_parity_bmatching(const ParitySpec& spec) {
  const int m = static_cast<int>(spec.edges.size());
  if (m > kExhaustiveParityMaxEdges) {
    throw CapacityError("exhaustive_parity_bmatching is limited to " + std::to_string(kExhaustiveParityMaxEdges) + " edges");
  }
  const int n = spec.vertex_count;
  std::vector<int> mark(n, 0);
  for (Vertex v : spec.odd) mark.at(v) |= 1;
  for (Vertex v : spec.even) {
    if (mark.at(v) & 1) throw DomainError("vertex " + std::to_string(v) + " is in both parity sets");
    mark[v] |= 2;
  }
  if (spec.mult_lo != 0 || spec.mult_hi != 1) throw DomainError("exhaustive search needs multiplicities in {0,1}");
  std::vector<Rational> weights;
  for (const auto& e : spec.edges) weights.push_back(e.weight);
  Integer scale;
  auto ints = scaled_int64(weights, m + 1, scale);

  auto violates = [&](int v, int d) {
    if (d < spec.deg_lo || d > spec.deg_hi) return true;
    if (mark[v] == 1) return d % 2 == 0;
    if (mark[v] == 2 || spec.unlisted_as_even) return d % 2 == 1;
    return false;
  };
  std::vector<int> degree(n, 0);
  int bad = 0;
  for (int v = 0; v < n; ++v) bad += violates(v, 0);
  std::vector<char> in(m, 0);
  std::int64_t wi = 0;
  Rational wr = 0;
  bool have = false;
  std::int64_t best_i = 0;
  Rational best_r;
  auto consider = [&] {
    if (bad != 0) return;
    if (ints) {
      if (!have || wi < best_i) best_i = wi;
    } else {
      if (!have || wr < best_r) best_r = wr;
    }
    have = true;
  };
  auto toggle = [&](int k) {
    const int sign = in[k] ? -1 : 1;
    in[k] ^= 1;
    for (Vertex v : {spec.edges[k].u, spec.edges[k].v}) {
      bad -= violates(v, degree[v]);
      degree[v] += sign;
      bad += violates(v, degree[v]);
    }
    if (ints) {
      wi += sign * (*ints)[k];
    } else if (sign > 0) {
      wr += weights[k];
    } else {
      wr -= weights[k];
    }
  };
  consider();
  // Gray code walk: step i flips the lowest set bit of i.
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t i = 1; i < total; ++i) {
    toggle(__builtin_ctzll(i));
    consider();
  }
  if (!have) return std::nullopt;
  if (ints) {
    Rational r(Integer(static_cast<long>(best_i)), scale);
    r.canonicalize();
    return r;
  }
  return best_r;
}

std::optional<Rational> exhaustive_perfect_matching(const MatchingGraph& g) {
  const int n = g.vertex_count;
  if (n > kExhaustiveMatchingMaxN) {
    throw CapacityError("exhaustive_perfect_matching is limited to " + std::to_string(kExhaustiveMatchingMaxN) + " vertices");
  }
  if (n % 2 != 0) return std::nullopt;
  std::vector<std::vector<int>> incident(n);
  for (int k = 0; k < static_cast<int>(g.edges.size()); ++k) {
    incident[g.edges[k].u].push_back(k);
    incident[g.edges[k].v].push_back(k);
  }
  std::vector<bool> used(n, false);
  std::optional<Rational> best;
  Rational acc = 0;
  std::function<void()> recurse = [&] {
    int v = 0;
    while (v < n && used[v]) ++v;
    if (v == n) {
      if (!best || acc < *best) best = acc;
      return;
    }
    used[v] = true;
    for (int k : incident[v]) {
      int u = g.edges[k].u == v ? g.edges[k].v : g.edges[k].u;
      if (used[u]) continue;
      used[u] = true;
      acc += g.edges[k].weight;
      recurse();
      acc -= g.edges[k].weight;
      used[u] = false;
    }
    used[v] = false;
  };
  recurse();
  return best;
}

}  // namespace btsp
