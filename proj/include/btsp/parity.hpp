#pragma once

#include <optional>
#include <vector>

#include "btsp/instance.hpp"
#include "btsp/matching.hpp"
#include "btsp/rational.hpp"

namespace btsp {

struct CandidateEdge {
  Vertex u;
  Vertex v;
  Rational weight;
};

// Degree-constrained subgraph problem with parity prescriptions:
//   mult_lo <= x_e <= mult_hi, deg_lo <= deg(v) <= deg_hi,
//   deg(v) odd on `odd`, even on `even`.
// Only the configuration l = 0, m = 1, a = 0, b = 2 is solvable here.
struct ParitySpec {
  int vertex_count = 0;
  std::vector<CandidateEdge> edges;
  std::vector<Vertex> odd;
  std::vector<Vertex> even;
  int mult_lo = 0;
  int mult_hi = 1;
  int deg_lo = 0;
  int deg_hi = 2;
  // Vertices in neither parity set are treated as even instead of rejected.
  bool unlisted_as_even = false;
};

struct MultiplicityVector {
  std::vector<int> x;  // per candidate edge
  Rational weight;
};

enum class Parity { kOdd, kEven };

// Per-vertex parity after validation; throws DomainError for overlapping sets,
// unsupported bounds, or a vertex in neither set (unless unlisted_as_even).
std::vector<Parity> resolve_parities(const ParitySpec& spec);

// Gadget whose perfect matchings map onto feasible multiplicity vectors of the
// same weight.
struct Gadget {
  MatchingGraph graph;
  // For each gadget edge: the candidate edge it selects, or -1 for the
  // "unselected" pair edges and the absorbers.
  std::vector<int> selects;
  // Terminal copies per base vertex (1 for odd, 2 for even).
  std::vector<std::vector<Vertex>> copies;
  // Per candidate edge: its two edge-side gadget vertices and their joining edge id.
  std::vector<int> pair_edge;
  // Per base vertex: the absorber edge id, or -1.
  std::vector<int> absorber;
};

Gadget build_gadget(const ParitySpec& spec);

// Maps a perfect matching of the gadget back to x.
MultiplicityVector decode_gadget_matching(const ParitySpec& spec, const Gadget& gadget,
                                          const std::vector<int>& matched_edge_ids);

// Minimizes c.x subject to the constraint system; nullopt iff infeasible.
std::optional<MultiplicityVector> solve_parity_bmatching(const ParitySpec& spec);

// Returns a description of the first violated constraint, or nullopt.
std::optional<std::string> certify_parity_solution(const ParitySpec& spec, const MultiplicityVector& x);

}  // namespace btsp
