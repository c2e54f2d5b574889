#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "btsp/graph.hpp"
#include "btsp/instance.hpp"
#include "btsp/rational.hpp"

namespace btsp {

// A spanning tree on V \ {root} plus two edges at root.
struct OneTree {
  Vertex root = 0;
  std::vector<Edge> edges;  // sorted
  std::vector<int> degree;
  Rational weight;
};

class DegreeBounds {
 public:
  // Every entry must be at least 1.
  explicit DegreeBounds(std::vector<int> b);
  static DegreeBounds uniform(int n, int k) { return DegreeBounds(std::vector<int>(n, k)); }

  int size() const noexcept { return static_cast<int>(b_.size()); }
  int operator[](Vertex v) const { return b_[v]; }
  std::span<const int> values() const noexcept { return b_; }

 private:
  std::vector<int> b_;
};

struct OneTreeOptions {
  // Skip the LP for a root whose unconstrained minimum 1-tree already meets
  // the relaxed degree bound (feasibility is still checked).
  bool shortcut = false;
};

struct OneTreeStats {
  long lp_solves = 0;
  long pivots = 0;
  long rank_cuts = 0;
  long shortcuts = 0;
};

// Greedy minimum 1-tree rooted at `root` containing all of `forced` and none of
// `forbidden`; ties go to the smaller edge index. nullopt when none exists.
// Throws DomainError if the two sets intersect.
std::optional<OneTree> min_one_tree_restricted(const Instance& inst, Vertex root,
                                               std::span<const Edge> forced = {},
                                               std::span<const Edge> forbidden = {});

// Optimal value of the degree-bounded 1-tree LP for one root; nullopt if empty.
std::optional<Rational> one_tree_lp_bound(const Instance& inst, const DegreeBounds& b, Vertex root);

// Iterative relaxation for one root: degrees <= b + 1 and weight at most the
// LP value for that root. nullopt if the LP for that root is infeasible.
std::optional<OneTree> bounded_one_tree_for_root(const Instance& inst, const DegreeBounds& b, Vertex root,
                                                 const OneTreeOptions& options = {},
                                                 OneTreeStats* stats = nullptr);

// Best of bounded_one_tree_for_root over all roots (ties: smaller root).
// Throws InfeasibleError if no root admits a fractional solution.
OneTree min_bounded_one_tree(const Instance& inst, const DegreeBounds& b, const OneTreeOptions& options = {},
                             OneTreeStats* stats = nullptr);

// Structural check of a 1-tree against inst; returns a description of the
// first problem found.
std::optional<std::string> check_one_tree(const Instance& inst, const OneTree& tree);

}  // namespace btsp
