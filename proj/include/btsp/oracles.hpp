#pragma once

#include <optional>
#include <span>
#include <vector>

#include "btsp/instance.hpp"
#include "btsp/matching.hpp"
#include "btsp/parity.hpp"
#include "btsp/rational.hpp"

namespace btsp {

// Brute-force reference solvers. Each has a hard size guard and throws
// CapacityError beyond it.
inline constexpr int kExactTspMaxN = 20;
inline constexpr int kExhaustiveOneTreeMaxN = 9;
inline constexpr int kExhaustiveParityMaxEdges = 22;
inline constexpr int kExhaustiveMatchingMaxN = 12;

struct ExactTour {
  std::vector<Vertex> order;  // starts at 0
  Rational weight;
};

// Held-Karp over subsets. Among optimal tours returns the lexicographically
// smallest order. Memory is (n-1) * 2^(n-1) table entries: 64-bit integers when
// the weights scaled to a common denominator fit, arbitrary precision otherwise
// (n = 20 needs roughly 80 MB in the integer case).
ExactTour exact_tsp(const Instance& inst);

// Minimum weight over every 1-tree whose vertex degrees respect `b`; all roots
// unless `root` is given.
std::optional<Rational> exhaustive_one_tree(const Instance& inst, std::span<const int> b,
                                           std::optional<Vertex> root = std::nullopt);

// Minimum c.x over all 0/1 vectors meeting the parity constraint system.
std::optional<Rational> exhaustive_parity_bmatching(const ParitySpec& spec);

// Minimum-weight perfect matching by recursion on the lowest exposed vertex.
std::optional<Rational> exhaustive_perfect_matching(const MatchingGraph& g);

// Weight of the closed tour visiting `order`.
Rational tour_weight(const Instance& inst, std::span<const Vertex> order);

}  // namespace btsp
