#pragma once

#include <optional>
#include <string>
#include <vector>

#include "btsp/graph.hpp"
#include "btsp/instance.hpp"
#include "btsp/onetree.hpp"
#include "btsp/parity.hpp"
#include "btsp/rational.hpp"

namespace btsp {

enum class EdgeSource { kTree, kMatching };

struct BackboneEdge {
  int id = 0;
  Edge ends;
  Rational weight;
  EdgeSource source = EdgeSource::kTree;
};

// Spanning Eulerian multigraph with every degree in {2, 4} and each vertex pair
// used at most twice. Edge ids equal positions; tree edges come first.
struct EulerianBackbone {
  int vertex_count = 0;
  std::vector<BackboneEdge> edges;
  Rational weight;

  std::vector<int> degrees() const;
  Rational weight_of(EdgeSource source) const;
};

// Builds the backbone from an explicit edge list (ids follow list order); the
// first `tree_edges` entries are labelled as tree edges. Throws
// InvariantViolation when the result breaks a backbone invariant.
EulerianBackbone make_backbone(const Instance& inst, const std::vector<Edge>& edges, int tree_edges);

struct BackboneBuild {
  EulerianBackbone backbone;
  OneTree tree;
  MultiplicityVector matching;  // over all edges of K_n in lexicographic order
};

// Degree-3 bounded 1-tree plus a parity-correcting b-matching.
BackboneBuild build_backbone(const Instance& inst, const OneTreeOptions& options = {},
                             OneTreeStats* stats = nullptr);

// Description of the first broken invariant, or nullopt.
std::optional<std::string> check_backbone(const Instance& inst, const EulerianBackbone& h);

struct Arc {
  int id = 0;  // backbone edge id
  Vertex tail = 0;
  Vertex head = 0;

  friend bool operator==(const Arc&, const Arc&) = default;
};

// Closed Euler tour as a sequence of arcs.
struct ArcSequence {
  std::vector<Arc> arcs;
  std::vector<int> indegree;
  std::vector<int> outdegree;
};

// Hierholzer from vertex 0, always leaving along the unused edge of smallest id,
// except that a step along one copy of a doubled pair is answered by its twin.
// Throws InvariantViolation for odd degrees or a disconnected edge set.
ArcSequence euler_orient(const EulerianBackbone& h);

}  // namespace btsp
