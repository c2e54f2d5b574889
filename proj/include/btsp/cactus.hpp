#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "btsp/backbone.hpp"
#include "btsp/graph.hpp"
#include "btsp/instance.hpp"
#include "btsp/rational.hpp"

namespace btsp {

enum class ArcKind { kDirected, kDoubleHeaded };

// Record of a vertex contraction at `at` that replaced arcs `first` and
// `second` (both leaving `at`).
struct Join {
  Vertex at = 0;
  int first = 0;
  int second = 0;

  friend bool operator==(const Join&, const Join&) = default;
};

// Directed arc a -> b, or double-headed arc {a-, b-}.
struct BiArc {
  int id = 0;
  ArcKind kind = ArcKind::kDirected;
  Vertex a = 0;
  Vertex b = 0;
  Rational weight;
  std::optional<Join> join;

  friend bool operator==(const BiArc&, const BiArc&) = default;
};

class BiDigraph {
 public:
  BiDigraph() = default;
  // `base_ids` is the number of arcs of the oriented backbone; Contraction ids are
  // allocated above it. Arc weights are read from `inst`, which must outlive
  // the graph.
  BiDigraph(const Instance& inst, int base_ids)
      : inst_(&inst), n_(inst.size()), base_ids_(base_ids), incident_(inst.size()) {}

  // The oriented backbone: one directed arc per Euler tour arc, same ids.
  static BiDigraph from_tour(const Instance& inst, const EulerianBackbone& h, const ArcSequence& tour);

  const Instance& instance() const { return *inst_; }
  int vertex_count() const noexcept { return n_; }
  int base_ids() const noexcept { return base_ids_; }
  const std::map<int, BiArc>& arcs() const noexcept { return arcs_; }
  bool has_arc(int id) const { return arcs_.count(id) != 0; }
  const BiArc& arc(int id) const;

  void add(BiArc arc);
  BiArc remove(int id);

  // Arc ids touching v, ascending.
  std::vector<int> incident(Vertex v) const;
  int degree(Vertex v) const { return static_cast<int>(incident_[v].size()); }
  // Directed arcs with tail v, ascending id.
  std::vector<int> out_arcs(Vertex v) const;
  int outdegree(Vertex v) const { return static_cast<int>(out_arcs(v).size()); }
  int indegree(Vertex v) const { return degree(v) - outdegree(v); }

  friend bool operator==(const BiDigraph& x, const BiDigraph& y) {
    return x.n_ == y.n_ && x.base_ids_ == y.base_ids_ && x.arcs_ == y.arcs_;
  }

 private:
  const Instance* inst_ = nullptr;
  int n_ = 0;
  int base_ids_ = 0;
  std::map<int, BiArc> arcs_;
  std::vector<std::vector<int>> incident_;
};

// Ids used for arcs created by a vertex contraction at v: one range while contracting the
// oriented backbone and one while finishing the tour.
inline int contraction_arc_id(const BiDigraph& d, Vertex v) { return d.base_ids() + v; }
inline int finishing_arc_id(const BiDigraph& d, Vertex v) { return d.base_ids() + d.vertex_count() + v; }

// Vertex contraction: v must have exactly two out-arcs (v,w), (v,w') with w != w'. They
// are replaced by {w-, w'-} carrying the join record. Throws DomainError.
BiDigraph contract_vertex(BiDigraph d, Vertex v, int new_id);

// Inverse of contract_vertex for the arc `id`; throws DomainError if it has no
// join record.
BiDigraph expand_arc(BiDigraph d, int id);

// Contracts every degree-4 vertex, in `order` if given (it must list
// exactly those vertices) and ascending otherwise.
BiDigraph contract_to_cycles(BiDigraph d, std::span<const Vertex> order = {});

// Optional step log, one line per event.
using Trace = std::vector<std::string>;

struct EntrySite {
  int arc = 0;       // the double-headed arc that was reversed
  Vertex added = 0;  // its join vertex, which becomes an exit point
  int block = 0;     // block that received `added`
};

struct Cactus {
  BiDigraph graph;
  std::map<int, int> block_of;        // arc id -> block id (index of its contracted cycle)
  std::map<int, Vertex> exit_points;  // block id -> exit point
  int root_block = 0;                 // the block holding the starting cycle
  std::vector<EntrySite> entries;
};

// Vertex sets of the cycles of a contracted graph, ordered by smallest vertex.
std::vector<std::vector<Vertex>> cycles_of(const BiDigraph& contracted);

// Grows the cactus from the cycle through vertex 0 by expanding contracted arcs at entry
// sites. Entry sites are found by scanning the tour arcs in id order. With
// `check_each_step` the cactus property is re-verified after every iteration
// (InvariantViolation on failure).
Cactus grow_cactus(const BiDigraph& contracted, const ArcSequence& tour, Trace* trace = nullptr,
                   bool check_each_step = false);

// Description of why `d` (orientations ignored) is not a connected cactus
// whose blocks are the cycles listed in `block_of`, or nullopt.
std::optional<std::string> check_cactus(const BiDigraph& d, const std::map<int, int>* block_of = nullptr);

struct Decision {
  int block = 0;
  Vertex exit_point = 0;
  int cheap = 0;      // arc leaving the exit point first
  int expensive = 0;  // the other block arc at the exit point
};

// Edge partitions tying the tour back to the backbone.
struct PartitionFamilies {
  std::map<int, Edge> cactus_arcs;              // cactus arc id -> endpoints
  std::map<int, std::vector<int>> arc_class;  // cactus arc id -> backbone edge ids (1 or 2)
  std::map<int, std::vector<int>> tour_class;    // tour edge id -> cactus arc ids (1 or 2)
  std::map<int, std::vector<int>> path_class;    // tour edge id -> backbone edge ids (1 to 3)
  std::vector<Decision> decisions;
  std::vector<int> cheap;      // sorted
  std::vector<int> expensive;  // sorted
};

struct OrientedCactus {
  BiDigraph graph;  // every arc directed, join records cleared
  PartitionFamilies families;
};

// Orients every block except the root block as a directed cycle leaving its
// exit point along the cheaper of its two block arcs there (ties: smaller id).
// The root block leaves its smallest vertex towards the smaller neighbour.
OrientedCactus orient_blocks(const Cactus& cactus, Trace* trace = nullptr);

struct TourEdge {
  int id = 0;
  Edge ends;
};

struct FinishedTour {
  BiDigraph graph;
  std::vector<Vertex> order;  // from vertex 0 towards its smaller neighbour
  std::vector<TourEdge> edges;
  PartitionFamilies families;
};

// Contracts every degree-4 vertex, then reads off the Hamiltonian cycle.
FinishedTour finalize_tour(OrientedCactus oriented, Trace* trace = nullptr);

struct TourCertificate {
  int vertex_count = 0;
  std::vector<Vertex> order;
  std::vector<TourEdge> tour_edges;
  std::vector<TourEdge> backbone_edges;  // id -> endpoints
  PartitionFamilies families;
  Rational beta;
  Rational tour_weight;
  Rational backbone_weight;
  // Per decision the lighter of the two classes, and everything else.
  std::vector<int> light_edges;
  std::vector<int> heavy_edges;
  Rational light_weight;
  Rational heavy_weight;
  // Classes of the cheap arcs, and everything else.
  std::vector<int> cheap_side;
  std::vector<int> expensive_side;
  Rational cheap_side_weight;
  Rational expensive_side_weight;
  std::optional<Rational> opt;

  // 3/4 beta + 3/4 beta^2.
  Rational ratio_bound() const;
};

struct PipelineOptions {
  OneTreeOptions one_tree;
  bool check_each_step = false;
  Trace* trace = nullptr;
};

// Every intermediate structure of one run.
struct PipelineRun {
  BackboneBuild backbone;
  ArcSequence tour;
  BiDigraph contracted;
  Cactus cactus;
  OrientedCactus oriented;
  FinishedTour finished;
  TourCertificate certificate;
};

// Requires nonnegative weights and finite beta (DomainError otherwise).
PipelineRun run_pipeline(const Instance& inst, const PipelineOptions& options = {});
// Same, starting from a given backbone (the tree and matching parts are not read).
PipelineRun run_pipeline_on(const Instance& inst, BackboneBuild backbone, const PipelineOptions& options = {});
TourCertificate approximate_tour(const Instance& inst, const PipelineOptions& options = {});

struct Violation {
  std::string check;
  std::string detail;
};

struct VerificationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Re-derives every claim of the certificate from the instance with exact
// arithmetic. Uses cert.opt for the final bound when present.
VerificationReport verify_certificate(const Instance& inst, const TourCertificate& cert);

}  // namespace btsp
