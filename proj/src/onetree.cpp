#include "btsp/onetree.hpp"

#include <algorithm>
#include <numeric>

#include "btsp/error.hpp"
#include "btsp/simplex.hpp"
#include "maxflow.hpp"

namespace btsp {
namespace {

struct DisjointSets {
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
  std::vector<int> parent;
};

bool touches(Edge e, Vertex v) { return e.u == v || e.v == v; }

OneTree assemble(const Instance& inst, Vertex root, std::vector<Edge> edges) {
  OneTree t;
  t.root = root;
  std::sort(edges.begin(), edges.end());
  t.degree.assign(inst.size(), 0);
  t.weight = 0;
  for (Edge e : edges) {
    ++t.degree[e.u];
    ++t.degree[e.v];
    t.weight += inst.weight(e.u, e.v);
  }
  t.edges = std::move(edges);
  return t;
}

// The LP for one root over a shrinking edge support, with rank constraints
// generated on demand.
class RootRelaxation {
 public:
  RootRelaxation(const Instance& inst, const DegreeBounds& b, Vertex root, OneTreeStats* stats)
      : inst_(inst), b_(b), root_(root), stats_(stats), support_(all_edges(inst.size())),
        bounded_(inst.size(), true) {
    bounded_[root] = false;
  }

  const std::vector<Edge>& support() const { return support_; }
  void set_support(std::vector<Edge> s) { support_ = std::move(s); }
  bool bounded(Vertex v) const { return bounded_[v]; }
  void release(Vertex v) { bounded_[v] = false; }
  bool any_bounded() const { return std::find(bounded_.begin(), bounded_.end(), true) != bounded_.end(); }

  // Optimal extreme point over the current support, or nullopt if infeasible.
  std::optional<std::vector<Rational>> solve(Rational* objective = nullptr) {
    while (true) {
      lp::Solution sol = lp::solve(build());
      if (stats_) {
        ++stats_->lp_solves;
        stats_->pivots += sol.pivots;
      }
      if (sol.status == lp::Status::kInfeasible) return std::nullopt;
      if (sol.status != lp::Status::kOptimal) throw InvariantViolation("1-tree LP reported unbounded");
      const auto fresh = separate(sol.x);
      if (fresh.empty()) {
        if (objective) *objective = sol.objective;
        return std::move(sol.x);
      }
      for (auto& s : fresh) cuts_.push_back(s);
      if (stats_) stats_->rank_cuts += static_cast<long>(fresh.size());
    }
  }

 private:
  lp::Problem build() const {
    const int n = inst_.size();
    const int m = static_cast<int>(support_.size());
    lp::Problem p;
    p.num_vars = m;
    p.cost.reserve(m);
    for (Edge e : support_) p.cost.push_back(inst_.weight(e.u, e.v));
    p.upper.assign(m, Rational(1));
    lp::Constraint at_root{{}, lp::Sense::kEqual, Rational(2)};
    lp::Constraint rest{{}, lp::Sense::kEqual, Rational(n - 2)};
    for (int j = 0; j < m; ++j) (touches(support_[j], root_) ? at_root : rest).terms.push_back({j, Rational(1)});
    p.rows.push_back(std::move(at_root));
    p.rows.push_back(std::move(rest));
    for (Vertex v = 0; v < n; ++v) {
      if (!bounded_[v]) continue;
      lp::Constraint row{{}, lp::Sense::kLessEqual, Rational(b_[v])};
      for (int j = 0; j < m; ++j)
        if (touches(support_[j], v)) row.terms.push_back({j, Rational(1)});
      if (static_cast<int>(row.terms.size()) > b_[v]) p.rows.push_back(std::move(row));
    }
    for (const auto& in_set : cuts_) {
      int size = static_cast<int>(std::count(in_set.begin(), in_set.end(), true));
      lp::Constraint row{{}, lp::Sense::kLessEqual, Rational(size - 1)};
      for (int j = 0; j < m; ++j)
        if (in_set[support_[j].u] && in_set[support_[j].v]) row.terms.push_back({j, Rational(1)});
      if (static_cast<int>(row.terms.size()) > size - 1) p.rows.push_back(std::move(row));
    }
    return p;
  }

  // Sets S within V \ {root} with x(E[S]) > |S| - 1, found by one minimum cut
  // per forced member k; earlier k are pushed to the sink side.
  std::vector<std::vector<bool>> separate(const std::vector<Rational>& x) const {
    const int n = inst_.size();
    const int src = n;
    const int sink = n + 1;
    std::vector<Rational> twice_slack(n, Rational(2));  // 2 - x(delta(v)) inside G - root
    Rational total = 0;
    for (std::size_t j = 0; j < support_.size(); ++j) {
      Edge e = support_[j];
      if (touches(e, root_) || x[j] == 0) continue;
      twice_slack[e.u] -= x[j];
      twice_slack[e.v] -= x[j];
      total += 2 * x[j];
    }
    Rational negative = 0;
    for (Vertex v = 0; v < n; ++v) {
      if (v == root_) continue;
      total += abs(twice_slack[v]);
      if (twice_slack[v] < 0) negative += twice_slack[v];
    }
    const Rational infinite = total + 1;
    std::vector<std::vector<bool>> found;
    for (Vertex k = 0; k < n; ++k) {
      if (k == root_) continue;
      detail::MaxFlow flow(n + 2);
      for (std::size_t j = 0; j < support_.size(); ++j) {
        Edge e = support_[j];
        if (touches(e, root_) || x[j] == 0) continue;
        flow.add_arc(e.u, e.v, x[j]);
        flow.add_arc(e.v, e.u, x[j]);
      }
      for (Vertex v = 0; v < n; ++v) {
        if (v == root_) continue;
        if (twice_slack[v] > 0) flow.add_arc(v, sink, twice_slack[v]);
        if (twice_slack[v] < 0) flow.add_arc(src, v, -twice_slack[v]);
        if (v < k) flow.add_arc(v, sink, infinite);
      }
      flow.add_arc(src, k, infinite);
      Rational cut = flow.run(src, sink);
      if (cut + negative >= 2) continue;
      auto side = flow.source_side(src);
      std::vector<bool> in_set(n, false);
      int size = 0;
      for (Vertex v = 0; v < n; ++v) {
        if (v != root_ && side[v]) {
          in_set[v] = true;
          ++size;
        }
      }
      Rational inside = 0;
      for (std::size_t j = 0; j < support_.size(); ++j)
        if (in_set[support_[j].u] && in_set[support_[j].v]) inside += x[j];
      if (inside <= size - 1) throw InvariantViolation("rank separation returned a satisfied set");
      if (std::find(found.begin(), found.end(), in_set) == found.end()) found.push_back(std::move(in_set));
    }
    return found;
  }

  const Instance& inst_;
  const DegreeBounds& b_;
  Vertex root_;
  OneTreeStats* stats_;
  std::vector<Edge> support_;
  std::vector<bool> bounded_;
  std::vector<std::vector<bool>> cuts_;
};

void check_bounds(const Instance& inst, const DegreeBounds& b) {
  if (b.size() != inst.size()) throw DomainError("degree bound vector has wrong length");
}

void check_root(const Instance& inst, Vertex root) {
  if (root < 0 || root >= inst.size()) throw DomainError("root " + std::to_string(root) + " out of range");
}

}  // namespace

DegreeBounds::DegreeBounds(std::vector<int> b) : b_(std::move(b)) {
  for (int x : b_)
    if (x < 1) throw DomainError("degree bounds must be at least 1");
}

std::optional<OneTree> min_one_tree_restricted(const Instance& inst, Vertex root, std::span<const Edge> forced,
                                               std::span<const Edge> forbidden) {
  check_root(inst, root);
  const int n = inst.size();
  const int edge_count = n * (n - 1) / 2;
  std::vector<char> state(edge_count, 0);  // 1 forced, 2 forbidden
  auto index_of = [&](Edge e) {
    if (e.u < 0 || e.v >= n || e.u >= e.v) throw DomainError("malformed edge");
    return edge_index(n, e);
  };
  for (Edge e : forced) state[index_of(e)] = 1;
  for (Edge e : forbidden) {
    int i = index_of(e);
    if (state[i] == 1) throw DomainError("an edge is both forced and forbidden");
    state[i] = 2;
  }
  const auto edges = all_edges(n);
  std::vector<Edge> chosen;
  DisjointSets sets(n);
  int tree_edges = 0;
  int root_edges = 0;
  for (int i = 0; i < edge_count; ++i) {
    if (state[i] != 1) continue;
    Edge e = edges[i];
    if (touches(e, root)) {
      ++root_edges;
    } else {
      if (!sets.unite(e.u, e.v)) return std::nullopt;
      ++tree_edges;
    }
    chosen.push_back(e);
  }
  if (root_edges > 2) return std::nullopt;
  std::vector<int> order;
  for (int i = 0; i < edge_count; ++i)
    if (state[i] == 0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return inst.weight(edges[a].u, edges[a].v) < inst.weight(edges[b].u, edges[b].v);
  });
  for (int i : order) {
    Edge e = edges[i];
    if (touches(e, root)) {
      if (root_edges < 2) {
        ++root_edges;
        chosen.push_back(e);
      }
    } else if (tree_edges < n - 2 && sets.unite(e.u, e.v)) {
      ++tree_edges;
      chosen.push_back(e);
    }
  }
  if (root_edges < 2 || tree_edges < n - 2) return std::nullopt;
  return assemble(inst, root, std::move(chosen));
}

std::optional<Rational> one_tree_lp_bound(const Instance& inst, const DegreeBounds& b, Vertex root) {
  check_bounds(inst, b);
  check_root(inst, root);
  if (b[root] < 2) return std::nullopt;
  RootRelaxation lp(inst, b, root, nullptr);
  Rational value;
  if (!lp.solve(&value)) return std::nullopt;
  return value;
}

std::optional<OneTree> bounded_one_tree_for_root(const Instance& inst, const DegreeBounds& b, Vertex root,
                                                 const OneTreeOptions& options, OneTreeStats* stats) {
  check_bounds(inst, b);
  check_root(inst, root);
  const int n = inst.size();
  if (b[root] < 2) return std::nullopt;

  std::optional<OneTree> plain;
  if (options.shortcut) {
    plain = min_one_tree_restricted(inst, root);
    bool within_b = true;
    for (Vertex v = 0; v < n; ++v) within_b = within_b && plain->degree[v] <= b[v];
    if (within_b) {
      if (stats) ++stats->shortcuts;
      return plain;
    }
  }

  RootRelaxation lp(inst, b, root, stats);
  bool first = true;
  std::vector<Edge> fixed;
  while (true) {
    auto x = lp.solve();
    if (!x) {
      if (first) return std::nullopt;
      throw InvariantViolation("1-tree LP became infeasible after relaxation");
    }
    if (first && plain) {
      bool within_b1 = true;
      for (Vertex v = 0; v < n; ++v) within_b1 = within_b1 && plain->degree[v] <= b[v] + 1;
      if (within_b1) {
        if (stats) ++stats->shortcuts;
        return plain;
      }
    }
    first = false;
    const auto& old_support = lp.support();
    std::vector<Edge> support;
    fixed.clear();
    for (std::size_t j = 0; j < old_support.size(); ++j) {
      if ((*x)[j] == 0) continue;
      support.push_back(old_support[j]);
      if ((*x)[j] == 1) fixed.push_back(old_support[j]);
    }
    bool progress = support.size() < old_support.size();
    std::vector<int> degree(n, 0);
    for (Edge e : support) {
      ++degree[e.u];
      ++degree[e.v];
    }
    lp.set_support(std::move(support));
    for (Vertex v = 0; v < n; ++v) {
      if (lp.bounded(v) && degree[v] <= b[v] + 1) {
        lp.release(v);
        progress = true;
      }
    }
    if (!lp.any_bounded()) break;
    if (!progress) throw InvariantViolation("iterative relaxation made no progress");
  }
  std::vector<Edge> excluded;
  const auto& support = lp.support();
  for (Edge e : all_edges(n))
    if (!std::binary_search(support.begin(), support.end(), e)) excluded.push_back(e);
  auto tree = min_one_tree_restricted(inst, root, fixed, excluded);
  if (!tree) throw InvariantViolation("no 1-tree inside the final LP support");
  return tree;
}

OneTree min_bounded_one_tree(const Instance& inst, const DegreeBounds& b, const OneTreeOptions& options,
                             OneTreeStats* stats) {
  check_bounds(inst, b);
  std::optional<OneTree> best;
  for (Vertex root = 0; root < inst.size(); ++root) {
    auto t = bounded_one_tree_for_root(inst, b, root, options, stats);
    if (t && (!best || t->weight < best->weight)) best = std::move(t);
  }
  if (!best) throw InfeasibleError("no root admits a fractional degree-bounded 1-tree");
  for (Vertex v = 0; v < inst.size(); ++v) {
    if (best->degree[v] > b[v] + 1) throw InvariantViolation("1-tree exceeds degree bound plus one");
  }
  return *best;
}

std::optional<std::string> check_one_tree(const Instance& inst, const OneTree& tree) {
  const int n = inst.size();
  if (tree.root < 0 || tree.root >= n) return "root out of range";
  if (static_cast<int>(tree.edges.size()) != n) return "expected " + std::to_string(n) + " edges";
  std::vector<int> degree(n, 0);
  DisjointSets sets(n);
  Rational weight = 0;
  int at_root = 0;
  for (std::size_t i = 0; i < tree.edges.size(); ++i) {
    Edge e = tree.edges[i];
    if (e.u < 0 || e.v >= n || e.u >= e.v) return "malformed edge";
    if (i > 0 && !(tree.edges[i - 1] < e)) return "edges not sorted or repeated";
    ++degree[e.u];
    ++degree[e.v];
    weight += inst.weight(e.u, e.v);
    if (touches(e, tree.root)) {
      ++at_root;
    } else if (!sets.unite(e.u, e.v)) {
      return "cycle avoiding the root";
    }
  }
  if (at_root != 2) return "root degree is " + std::to_string(at_root);
  if (degree != tree.degree) return "degree vector mismatch";
  if (weight != tree.weight) return "weight mismatch";
  return std::nullopt;
}

}  // namespace btsp
