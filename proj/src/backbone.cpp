#include "btsp/backbone.hpp"

#include <algorithm>
#include <map>

#include "btsp/error.hpp"

namespace btsp {

std::vector<int> EulerianBackbone::degrees() const {
  std::vector<int> d(vertex_count, 0);
  for (const auto& e : edges) {
    ++d[e.ends.u];
    ++d[e.ends.v];
  }
  return d;
}

Rational EulerianBackbone::weight_of(EdgeSource source) const {
  Rational total = 0;
  for (const auto& e : edges)
    if (e.source == source) total += e.weight;
  return total;
}

std::optional<std::string> check_backbone(const Instance& inst, const EulerianBackbone& h) {
  const int n = inst.size();
  if (h.vertex_count != n) return "vertex count differs from the instance";
  std::map<Edge, int> multiplicity;
  Rational total = 0;
  std::vector<int> parent(n);
  for (int v = 0; v < n; ++v) parent[v] = v;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < h.edges.size(); ++i) {
    const auto& e = h.edges[i];
    if (e.id != static_cast<int>(i)) return "edge ids are not consecutive";
    if (e.ends.u < 0 || e.ends.v >= n || e.ends.u >= e.ends.v) return "malformed edge " + std::to_string(e.id);
    if (e.weight != inst.weight(e.ends.u, e.ends.v)) return "edge " + std::to_string(e.id) + " has the wrong weight";
    if (++multiplicity[e.ends] > 2) {
      return "pair " + std::to_string(e.ends.u) + "-" + std::to_string(e.ends.v) + " used more than twice";
    }
    total += e.weight;
    parent[find(e.ends.u)] = find(e.ends.v);
  }
  if (total != h.weight) return "recorded weight differs from the edge sum";
  auto deg = h.degrees();
  for (int v = 0; v < n; ++v) {
    if (deg[v] != 2 && deg[v] != 4) return "vertex " + std::to_string(v) + " has degree " + std::to_string(deg[v]);
    if (find(v) != find(0)) return "vertex " + std::to_string(v) + " is disconnected from vertex 0";
  }
  return std::nullopt;
}

EulerianBackbone make_backbone(const Instance& inst, const std::vector<Edge>& edges, int tree_edges) {
  EulerianBackbone h;
  h.vertex_count = inst.size();
  h.weight = 0;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    Edge e = make_edge(edges[i].u, edges[i].v);
    if (e.u < 0 || e.v >= inst.size() || e.u == e.v) throw InvariantViolation("backbone edge out of range");
    const Rational& w = inst.weight(e.u, e.v);
    h.edges.push_back({static_cast<int>(i), e, w,
                       static_cast<int>(i) < tree_edges ? EdgeSource::kTree : EdgeSource::kMatching});
    h.weight += w;
  }
  if (auto problem = check_backbone(inst, h)) throw InvariantViolation("backbone: " + *problem);
  return h;
}

BackboneBuild build_backbone(const Instance& inst, const OneTreeOptions& options, OneTreeStats* stats) {
  const int n = inst.size();
  OneTree tree = min_bounded_one_tree(inst, DegreeBounds::uniform(n, 2), options, stats);
  ParitySpec spec;
  spec.vertex_count = n;
  for (Edge e : all_edges(n)) spec.edges.push_back({e.u, e.v, inst.weight(e.u, e.v)});
  for (Vertex v = 0; v < n; ++v) (tree.degree[v] % 2 ? spec.odd : spec.even).push_back(v);
  auto x = solve_parity_bmatching(spec);
  if (!x) throw InvariantViolation("parity correction is infeasible");
  if (auto problem = certify_parity_solution(spec, *x)) throw InvariantViolation("parity correction: " + *problem);
  std::vector<Edge> edges = tree.edges;
  for (std::size_t i = 0; i < spec.edges.size(); ++i)
    if (x->x[i]) edges.push_back({spec.edges[i].u, spec.edges[i].v});
  EulerianBackbone h = make_backbone(inst, edges, static_cast<int>(tree.edges.size()));
  return {std::move(h), std::move(tree), std::move(*x)};
}

ArcSequence euler_orient(const EulerianBackbone& h) {
  const int n = h.vertex_count;
  const int m = static_cast<int>(h.edges.size());
  std::vector<std::vector<int>> incident(n);
  for (const auto& e : h.edges) {
    incident[e.ends.u].push_back(e.id);
    incident[e.ends.v].push_back(e.id);
  }
  for (int v = 0; v < n; ++v) {
    if (incident[v].size() % 2) throw InvariantViolation("vertex " + std::to_string(v) + " has odd degree");
  }
  std::vector<std::size_t> next(n, 0);  // incident lists are already in id order
  std::vector<bool> used(m, false);
  // Parallel copy of each edge, or -1.
  std::vector<int> twin(m, -1);
  std::map<Edge, int> first_copy;
  for (const auto& e : h.edges) {
    auto [it, fresh] = first_copy.try_emplace(e.ends, e.id);
    if (!fresh) {
      twin[e.id] = it->second;
      twin[it->second] = e.id;
    }
  }
  // Stack of (vertex, arc that reached it).
  std::vector<std::pair<Vertex, int>> stack{{0, -1}};
  std::vector<Arc> reversed;
  while (!stack.empty()) {
    Vertex v = stack.back().first;
    // Crossing one copy of a doubled pair is followed by the other copy, so the
    // two copies always get opposite directions.
    int via = stack.back().second;
    if (via >= 0 && twin[via] >= 0 && !used[twin[via]]) {
      int id = twin[via];
      used[id] = true;
      const auto& e = h.edges[id];
      stack.push_back({e.ends.u == v ? e.ends.v : e.ends.u, id});
      continue;
    }
    auto& i = next[v];
    while (i < incident[v].size() && used[incident[v][i]]) ++i;
    if (i == incident[v].size()) {
      stack.pop_back();
      if (via >= 0) {
        const auto& e = h.edges[via];
        Vertex from = stack.back().first;
        reversed.push_back({via, from, e.ends.u == from ? e.ends.v : e.ends.u});
      }
      continue;
    }
    int id = incident[v][i];
    used[id] = true;
    const auto& e = h.edges[id];
    stack.push_back({e.ends.u == v ? e.ends.v : e.ends.u, id});
  }
  if (static_cast<int>(reversed.size()) != m) throw InvariantViolation("backbone edges are not connected");
  ArcSequence out;
  out.arcs.assign(reversed.rbegin(), reversed.rend());
  out.indegree.assign(n, 0);
  out.outdegree.assign(n, 0);
  for (const auto& a : out.arcs) {
    ++out.outdegree[a.tail];
    ++out.indegree[a.head];
  }
  return out;
}

}  // namespace btsp
