#include "btsp/parity.hpp"

#include <algorithm>

#include "btsp/error.hpp"

namespace btsp {

std::vector<Parity> resolve_parities(const ParitySpec& spec) {
  if (spec.mult_lo != 0 || spec.mult_hi != 1 || spec.deg_lo != 0 || spec.deg_hi != 2) {
    throw DomainError("unsupported bound configuration (only l=0, m=1, a=0, b=2)");
  }
  const int n = spec.vertex_count;
  std::vector<int> mark(n, 0);  // 1 odd, 2 even
  for (Vertex v : spec.odd) {
    if (v < 0 || v >= n) throw DomainError("odd-set vertex out of range");
    mark[v] |= 1;
  }
  for (Vertex v : spec.even) {
    if (v < 0 || v >= n) throw DomainError("even-set vertex out of range");
    if (mark[v] & 1) throw DomainError("vertex " + std::to_string(v) + " is in both parity sets");
    mark[v] |= 2;
  }
  std::vector<Parity> parity(n);
  for (int v = 0; v < n; ++v) {
    if (mark[v] == 0 && !spec.unlisted_as_even) {
      throw DomainError("vertex " + std::to_string(v) + " is in neither parity set");
    }
    parity[v] = mark[v] == 1 ? Parity::kOdd : Parity::kEven;
  }
  for (const auto& e : spec.edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n || e.u == e.v) throw DomainError("bad candidate edge");
  }
  return parity;
}

Gadget build_gadget(const ParitySpec& spec) {
  const auto parity = resolve_parities(spec);
  const int n = spec.vertex_count;
  Gadget g;
  g.copies.resize(n);
  g.absorber.assign(n, -1);
  int next = 0;
  // Odd vertices get one terminal (degree exactly 1 under the bound 2); even
  // vertices get two, which either absorb each other or both take an edge.
  for (int v = 0; v < n; ++v) {
    g.copies[v].push_back(next++);
    if (parity[v] == Parity::kEven) g.copies[v].push_back(next++);
  }
  const int m = static_cast<int>(spec.edges.size());
  std::vector<std::pair<int, int>> sides(m);
  for (int k = 0; k < m; ++k) sides[k] = {next, next + 1}, next += 2;
  g.graph.vertex_count = next;
  for (int v = 0; v < n; ++v) {
    if (parity[v] == Parity::kEven) {
      g.absorber[v] = g.graph.add_edge(g.copies[v][0], g.copies[v][1], Rational(0));
      g.selects.push_back(-1);
    }
  }
  g.pair_edge.resize(m);
  for (int k = 0; k < m; ++k) {
    const auto& e = spec.edges[k];
    auto [eu, ev] = sides[k];
    g.pair_edge[k] = g.graph.add_edge(eu, ev, Rational(0));
    g.selects.push_back(-1);
    Rational half = e.weight / 2;
    for (Vertex c : g.copies[e.u]) {
      g.graph.add_edge(c, eu, half);
      g.selects.push_back(k);
    }
    for (Vertex c : g.copies[e.v]) {
      g.graph.add_edge(c, ev, half);
      g.selects.push_back(k);
    }
  }
  return g;
}

MultiplicityVector decode_gadget_matching(const ParitySpec& spec, const Gadget& gadget,
                                          const std::vector<int>& matched_edge_ids) {
  MultiplicityVector result;
  result.x.assign(spec.edges.size(), 0);
  result.weight = 0;
  std::vector<int> halves(spec.edges.size(), 0);
  for (int id : matched_edge_ids) {
    int k = gadget.selects.at(id);
    if (k >= 0) ++halves[k];
  }
  for (std::size_t k = 0; k < halves.size(); ++k) {
    if (halves[k] == 1) throw InvariantViolation("gadget matching selects only one side of candidate edge " + std::to_string(k));
    if (halves[k] == 2) {
      result.x[k] = 1;
      result.weight += spec.edges[k].weight;
    }
  }
  return result;
}

std::optional<MultiplicityVector> solve_parity_bmatching(const ParitySpec& spec) {
  Gadget gadget = build_gadget(spec);
  auto matching = min_weight_perfect_matching(gadget.graph);
  if (!matching) return std::nullopt;
  return decode_gadget_matching(spec, gadget, matching->edge_ids);
}

std::optional<std::string> certify_parity_solution(const ParitySpec& spec, const MultiplicityVector& x) {
  if (x.x.size() != spec.edges.size()) return "multiplicity vector has wrong length";
  std::vector<int> parity_mark(spec.vertex_count, 0);
  for (Vertex v : spec.odd) parity_mark[v] = 1;
  for (Vertex v : spec.even) parity_mark[v] = 2;
  std::vector<int> degree(spec.vertex_count, 0);
  Rational weight = 0;
  for (std::size_t k = 0; k < x.x.size(); ++k) {
    if (x.x[k] < spec.mult_lo || x.x[k] > spec.mult_hi) return "(i) multiplicity bound violated on edge " + std::to_string(k);
    degree[spec.edges[k].u] += x.x[k];
    degree[spec.edges[k].v] += x.x[k];
    weight += spec.edges[k].weight * x.x[k];
  }
  for (int v = 0; v < spec.vertex_count; ++v) {
    if (degree[v] < spec.deg_lo || degree[v] > spec.deg_hi) return "(ii) degree bound violated at vertex " + std::to_string(v);
    if (parity_mark[v] == 1 && degree[v] % 2 == 0) return "(iii) vertex " + std::to_string(v) + " has even degree";
    if ((parity_mark[v] == 2 || (parity_mark[v] == 0 && spec.unlisted_as_even)) && degree[v] % 2 == 1) {
      return "(iv) vertex " + std::to_string(v) + " has odd degree";
    }
  }
  if (weight != x.weight) return "reported weight differs from c.x";
  return std::nullopt;
}

}  // namespace btsp
