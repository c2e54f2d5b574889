#pragma once

#include <deque>
#include <vector>

#include "btsp/rational.hpp"

namespace btsp::detail {

// Edmonds-Karp on exact capacities. Small graphs only.
class MaxFlow {
 public:
  explicit MaxFlow(int nodes) : adj_(nodes) {}

  void add_arc(int from, int to, const Rational& cap) {
    adj_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({to, cap});
    adj_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({from, Rational(0)});
  }

  Rational run(int s, int t) {
    Rational total = 0;
    const int n = static_cast<int>(adj_.size());
    std::vector<int> via(n);
    while (true) {
      std::fill(via.begin(), via.end(), -1);
      std::deque<int> queue{s};
      via[s] = -2;
      while (!queue.empty() && via[t] == -1) {
        int x = queue.front();
        queue.pop_front();
        for (int a : adj_[x]) {
          int y = arcs_[a].to;
          if (via[y] == -1 && arcs_[a].residual > 0) {
            via[y] = a;
            queue.push_back(y);
          }
        }
      }
      if (via[t] == -1) return total;
      Rational push = -1;
      for (int y = t; y != s; y = arcs_[via[y] ^ 1].to) {
        const Rational& r = arcs_[via[y]].residual;
        if (push < 0 || r < push) push = r;
      }
      for (int y = t; y != s; y = arcs_[via[y] ^ 1].to) {
        arcs_[via[y]].residual -= push;
        arcs_[via[y] ^ 1].residual += push;
      }
      total += push;
    }
  }

  // Nodes reachable from s in the residual graph (call after run).
  std::vector<bool> source_side(int s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::deque<int> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      for (int a : adj_[x]) {
        int y = arcs_[a].to;
        if (!seen[y] && arcs_[a].residual > 0) {
          seen[y] = true;
          queue.push_back(y);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    Rational residual;
  };
  std::vector<std::vector<int>> adj_;
  std::vector<Arc> arcs_;
};

}  // namespace btsp::detail
