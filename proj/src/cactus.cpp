#include "btsp/cactus.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "btsp/error.hpp"

namespace btsp {
namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + std::to_string(ids[i]);
  return out;
}

Vertex other_end(const BiArc& arc, Vertex v) { return arc.a == v ? arc.b : arc.a; }

}  // namespace

BiDigraph BiDigraph::from_tour(const Instance& inst, const EulerianBackbone& h, const ArcSequence& tour) {
  BiDigraph d(inst, static_cast<int>(h.edges.size()));
  for (const Arc& a : tour.arcs) d.add({a.id, ArcKind::kDirected, a.tail, a.head, inst.weight(a.tail, a.head), std::nullopt});
  return d;
}

const BiArc& BiDigraph::arc(int id) const {
  auto it = arcs_.find(id);
  if (it == arcs_.end()) throw DomainError("no arc with id " + std::to_string(id));
  return it->second;
}

void BiDigraph::add(BiArc arc) {
  if (arc.a == arc.b) throw DomainError("arc " + std::to_string(arc.id) + " would be a loop");
  if (arc.a < 0 || arc.b < 0 || arc.a >= n_ || arc.b >= n_) throw DomainError("arc endpoint out of range");
  if (arcs_.count(arc.id)) throw DomainError("duplicate arc id " + std::to_string(arc.id));
  incident_[arc.a].push_back(arc.id);
  incident_[arc.b].push_back(arc.id);
  arcs_.emplace(arc.id, std::move(arc));
}

BiArc BiDigraph::remove(int id) {
  auto it = arcs_.find(id);
  if (it == arcs_.end()) throw DomainError("no arc with id " + std::to_string(id));
  BiArc arc = std::move(it->second);
  arcs_.erase(it);
  for (Vertex v : {arc.a, arc.b}) {
    auto& list = incident_[v];
    list.erase(std::find(list.begin(), list.end(), id));
  }
  return arc;
}

std::vector<int> BiDigraph::incident(Vertex v) const {
  std::vector<int> ids = incident_[v];
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<int> BiDigraph::out_arcs(Vertex v) const {
  std::vector<int> ids;
  for (int id : incident_[v]) {
    const BiArc& a = arcs_.at(id);
    if (a.kind == ArcKind::kDirected && a.a == v) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

BiDigraph contract_vertex(BiDigraph d, Vertex v, int new_id) {
  if (v < 0 || v >= d.vertex_count()) throw DomainError("vertex out of range");
  auto outs = d.out_arcs(v);
  if (outs.size() != 2) {
    throw DomainError("contraction at vertex " + std::to_string(v) + " needs outdegree 2, found " +
                      std::to_string(outs.size()));
  }
  Vertex w = d.arc(outs[0]).b;
  Vertex w2 = d.arc(outs[1]).b;
  if (w == w2) throw DomainError("contraction at vertex " + std::to_string(v) + ": both out-arcs end at " + std::to_string(w));
  d.remove(outs[0]);
  d.remove(outs[1]);
  d.add({new_id, ArcKind::kDoubleHeaded, w, w2, d.instance().weight(w, w2), Join{v, outs[0], outs[1]}});
  return d;
}

BiDigraph expand_arc(BiDigraph d, int id) {
  const BiArc& arc = d.arc(id);
  if (!arc.join) throw DomainError("arc " + std::to_string(id) + " was not produced by a contraction");
  const Join j = *arc.join;
  const Vertex w = arc.a;
  const Vertex w2 = arc.b;
  d.remove(id);
  const Instance& inst = d.instance();
  d.add({j.first, ArcKind::kDirected, j.at, w, inst.weight(j.at, w), std::nullopt});
  d.add({j.second, ArcKind::kDirected, j.at, w2, inst.weight(j.at, w2), std::nullopt});
  return d;
}

BiDigraph contract_to_cycles(BiDigraph d, std::span<const Vertex> order) {
  std::vector<Vertex> heavy;
  for (Vertex v = 0; v < d.vertex_count(); ++v) {
    int deg = d.degree(v);
    if (deg == 4) {
      heavy.push_back(v);
    } else if (deg != 2) {
      throw InvariantViolation("vertex " + std::to_string(v) + " has degree " + std::to_string(deg));
    }
  }
  std::vector<Vertex> sequence(order.begin(), order.end());
  if (sequence.empty()) {
    sequence = heavy;
  } else {
    std::vector<Vertex> sorted = sequence;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != heavy) throw DomainError("processing order must list exactly the degree-4 vertices");
  }
  for (Vertex v : sequence) d = contract_vertex(std::move(d), v, contraction_arc_id(d, v));
  for (Vertex v = 0; v < d.vertex_count(); ++v) {
    if (d.degree(v) != 2) throw InvariantViolation("contraction left vertex " + std::to_string(v) + " with degree " + std::to_string(d.degree(v)));
  }
  return d;
}

std::vector<std::vector<Vertex>> cycles_of(const BiDigraph& contracted) {
  const int n = contracted.vertex_count();
  std::vector<int> seen(n, 0);
  std::vector<std::vector<Vertex>> out;
  for (Vertex s = 0; s < n; ++s) {
    if (seen[s] || contracted.degree(s) == 0) continue;
    std::vector<Vertex> comp;
    std::vector<Vertex> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (int id : contracted.incident(v)) {
        Vertex u = other_end(contracted.arc(id), v);
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::optional<std::string> check_cactus(const BiDigraph& d, const std::map<int, int>* block_of) {
  const int n = d.vertex_count();
  std::vector<Vertex> present;
  for (Vertex v = 0; v < n; ++v)
    if (d.degree(v) > 0) present.push_back(v);
  if (present.empty()) return "graph has no arcs";
  // Biconnected components by the edge-stack method; arcs are identified by id
  // so parallel arcs are handled.
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<int> edge_stack;
  std::vector<std::vector<int>> components;
  int timer = 0;
  std::function<void(Vertex, int)> dfs = [&](Vertex v, int parent_arc) {
    disc[v] = low[v] = timer++;
    for (int id : d.incident(v)) {
      if (id == parent_arc) continue;
      Vertex u = other_end(d.arc(id), v);
      if (disc[u] < 0) {
        edge_stack.push_back(id);
        dfs(u, id);
        low[v] = std::min(low[v], low[u]);
        if (low[u] >= disc[v]) {
          std::vector<int> comp;
          int top;
          do {
            top = edge_stack.back();
            edge_stack.pop_back();
            comp.push_back(top);
          } while (top != id);
          components.push_back(std::move(comp));
        }
      } else if (disc[u] < disc[v]) {
        edge_stack.push_back(id);
        low[v] = std::min(low[v], disc[u]);
      }
    }
  };
  dfs(present.front(), -1);
  for (Vertex v : present)
    if (disc[v] < 0) return "vertex " + std::to_string(v) + " is not connected to vertex " + std::to_string(present.front());
  std::set<int> block_ids;
  for (auto& comp : components) {
    std::set<Vertex> verts;
    for (int id : comp) {
      verts.insert(d.arc(id).a);
      verts.insert(d.arc(id).b);
    }
    std::sort(comp.begin(), comp.end());
    if (comp.size() != verts.size()) {
      return "block {" + join_ids(comp) + "} is not a cycle (" + std::to_string(comp.size()) + " arcs on " +
             std::to_string(verts.size()) + " vertices)";
    }
    if (block_of) {
      auto it = block_of->find(comp.front());
      if (it == block_of->end()) return "arc " + std::to_string(comp.front()) + " has no block label";
      for (int id : comp) {
        auto jt = block_of->find(id);
        if (jt == block_of->end() || jt->second != it->second) {
          return "block labels disagree with the decomposition at arc " + std::to_string(id);
        }
      }
      if (!block_ids.insert(it->second).second) return "block label " + std::to_string(it->second) + " used twice";
    }
  }
  return std::nullopt;
}

Cactus grow_cactus(const BiDigraph& contracted, const ArcSequence& tour, Trace* trace, bool check_each_step) {
  const int n = contracted.vertex_count();
  const auto cycles = cycles_of(contracted);
  std::vector<int> cycle_of(n, -1);
  for (std::size_t c = 0; c < cycles.size(); ++c)
    for (Vertex v : cycles[c]) cycle_of[v] = static_cast<int>(c);
  for (Vertex v = 0; v < n; ++v)
    if (cycle_of[v] < 0) throw InvariantViolation("vertex " + std::to_string(v) + " lies on no cycle");

  Cactus k;
  k.graph = contracted;
  for (const auto& [id, arc] : contracted.arcs()) k.block_of[id] = cycle_of[arc.a];
  k.root_block = cycle_of[0];
  std::vector<bool> in_k(n, false);
  int covered = 0;
  for (Vertex v : cycles[k.root_block]) {
    in_k[v] = true;
    ++covered;
  }

  std::vector<Arc> scan = tour.arcs;
  std::sort(scan.begin(), scan.end(), [](const Arc& x, const Arc& y) { return x.id < y.id; });
  if (trace) trace->push_back("start block=" + std::to_string(k.root_block) + " vertices=" + join_ids(cycles[k.root_block]));

  while (covered < n) {
    const Arc* crossing = nullptr;
    for (const Arc& a : scan) {
      if (!in_k[a.tail] && in_k[a.head]) {
        crossing = &a;
        break;
      }
    }
    if (!crossing) throw InvariantViolation("no entry site while the cactus misses vertices");
    const Vertex v = crossing->tail;
    const int site = contraction_arc_id(k.graph, v);
    if (!k.graph.has_arc(site)) throw InvariantViolation("entry site arc " + std::to_string(site) + " is missing");
    const BiArc& arc = k.graph.arc(site);
    if (!arc.join || arc.join->at != v || !in_k[arc.a] || !in_k[arc.b]) {
      throw InvariantViolation("arc " + std::to_string(site) + " is not an entry site");
    }
    const Join j = *arc.join;
    const int block = k.block_of.at(site);
    if (trace) {
      trace->push_back("entry-site arc=" + std::to_string(site) + " ends=" + std::to_string(arc.a) + "," +
                       std::to_string(arc.b) + " via=" + std::to_string(crossing->id) + " block=" + std::to_string(block));
    }
    k.graph = expand_arc(std::move(k.graph), site);
    k.block_of.erase(site);
    k.block_of[j.first] = block;
    k.block_of[j.second] = block;
    k.exit_points[cycle_of[v]] = v;
    k.entries.push_back({site, v, block});
    for (Vertex u : cycles[cycle_of[v]]) {
      in_k[u] = true;
      ++covered;
    }
    if (trace) {
      trace->push_back("reverse arc=" + std::to_string(site) + " restores=" + std::to_string(j.first) + "," +
                       std::to_string(j.second) + " at=" + std::to_string(v));
      trace->push_back("exit-point block=" + std::to_string(cycle_of[v]) + " vertex=" + std::to_string(v));
    }
    if (check_each_step) {
      BiDigraph sub(contracted.instance(), contracted.base_ids());
      std::map<int, int> labels;
      for (const auto& [id, a] : k.graph.arcs()) {
        if (in_k[a.a] && in_k[a.b]) {
          sub.add(a);
          labels[id] = k.block_of.at(id);
        }
      }
      if (auto problem = check_cactus(sub, &labels)) throw InvariantViolation("cactus check: " + *problem);
    }
  }
  return k;
}

namespace {

// Walks the cycle `block_arcs` from `start` leaving along `first`; returns
// (arc id, tail, head) triples in walk order.
std::vector<std::tuple<int, Vertex, Vertex>> walk_block(const BiDigraph& g, const std::set<int>& block_arcs,
                                                        Vertex start, int first) {
  std::vector<std::tuple<int, Vertex, Vertex>> out;
  Vertex at = start;
  int via = first;
  while (true) {
    Vertex next = other_end(g.arc(via), at);
    out.emplace_back(via, at, next);
    if (out.size() > block_arcs.size()) throw InvariantViolation("block walk does not close");
    at = next;
    if (at == start && out.size() == block_arcs.size()) return out;
    int follow = -1;
    for (int id : g.incident(at)) {
      if (id != via && block_arcs.count(id)) {
        follow = id;
        break;
      }
    }
    if (follow < 0) throw InvariantViolation("block walk is stuck at vertex " + std::to_string(at));
    via = follow;
  }
}

std::vector<int> block_arcs_at(const BiDigraph& g, const std::set<int>& block_arcs, Vertex v) {
  std::vector<int> out;
  for (int id : g.incident(v))
    if (block_arcs.count(id)) out.push_back(id);
  return out;
}

}  // namespace

OrientedCactus orient_blocks(const Cactus& cactus, Trace* trace) {
  const BiDigraph& g = cactus.graph;
  std::map<int, std::set<int>> blocks;
  for (const auto& [id, block] : cactus.block_of) {
    if (!g.has_arc(id)) throw InvariantViolation("block label for a missing arc " + std::to_string(id));
    blocks[block].insert(id);
  }
  OrientedCactus out;
  out.graph = BiDigraph(g.instance(), g.base_ids());
  auto& fam = out.families;
  for (const auto& [id, arc] : g.arcs()) {
    fam.cactus_arcs[id] = make_edge(arc.a, arc.b);
    fam.arc_class[id] = arc.join ? std::vector<int>{std::min(arc.join->first, arc.join->second),
                                                       std::max(arc.join->first, arc.join->second)}
                                    : std::vector<int>{id};
  }
  auto emit = [&](const std::vector<std::tuple<int, Vertex, Vertex>>& walk) {
    for (const auto& [id, tail, head] : walk) {
      out.graph.add({id, ArcKind::kDirected, tail, head, g.arc(id).weight, std::nullopt});
    }
  };
  for (const auto& [block, arcs] : blocks) {
    if (block == cactus.root_block) continue;
    auto it = cactus.exit_points.find(block);
    if (it == cactus.exit_points.end()) throw InvariantViolation("block " + std::to_string(block) + " has no exit point");
    const Vertex v = it->second;
    auto at_v = block_arcs_at(g, arcs, v);
    if (at_v.size() != 2) throw InvariantViolation("exit point " + std::to_string(v) + " is not on its block cycle");
    int e = at_v[0];
    int e2 = at_v[1];
    if (g.arc(e2).weight < g.arc(e).weight) std::swap(e, e2);
    fam.decisions.push_back({block, v, e, e2});
    fam.cheap.push_back(e);
    fam.expensive.push_back(e2);
    if (trace) {
      trace->push_back("orient block=" + std::to_string(block) + " exit=" + std::to_string(v) + " first=" +
                       std::to_string(e) + " second=" + std::to_string(e2));
    }
    emit(walk_block(g, arcs, v, e));
  }
  const auto& root_arcs = blocks.at(cactus.root_block);
  Vertex start = g.vertex_count();
  for (int id : root_arcs) start = std::min({start, g.arc(id).a, g.arc(id).b});
  auto at_start = block_arcs_at(g, root_arcs, start);
  if (at_start.size() != 2) throw InvariantViolation("root block is not a cycle");
  int first = at_start[0];
  if (other_end(g.arc(at_start[1]), start) < other_end(g.arc(first), start)) first = at_start[1];
  if (trace) {
    trace->push_back("orient root block=" + std::to_string(cactus.root_block) + " start=" + std::to_string(start) +
                     " first=" + std::to_string(first));
  }
  emit(walk_block(g, root_arcs, start, first));
  std::sort(fam.cheap.begin(), fam.cheap.end());
  std::sort(fam.expensive.begin(), fam.expensive.end());
  if (out.graph.arcs().size() != g.arcs().size()) throw InvariantViolation("orientation missed some arcs");
  return out;
}

FinishedTour finalize_tour(OrientedCactus oriented, Trace* trace) {
  FinishedTour out;
  BiDigraph g = std::move(oriented.graph);
  out.families = std::move(oriented.families);
  const int n = g.vertex_count();
  for (Vertex v = 0; v < n; ++v) {
    if (g.degree(v) != 4) continue;
    const int id = finishing_arc_id(g, v);
    g = contract_vertex(std::move(g), v, id);
    const BiArc& arc = g.arc(id);
    out.families.tour_class[id] = {std::min(arc.join->first, arc.join->second),
                                   std::max(arc.join->first, arc.join->second)};
    if (trace) {
      trace->push_back("join vertex=" + std::to_string(v) + " arcs=" + std::to_string(arc.join->first) + "," +
                       std::to_string(arc.join->second) + " new=" + std::to_string(id) + " ends=" +
                       std::to_string(arc.a) + "," + std::to_string(arc.b));
    }
  }
  for (const auto& [id, arc] : g.arcs()) {
    if (!out.families.tour_class.count(id)) out.families.tour_class[id] = {id};
    out.edges.push_back({id, make_edge(arc.a, arc.b)});
    std::vector<int> cls;
    for (int k : out.families.tour_class[id]) {
      const auto& part = out.families.arc_class.at(k);
      cls.insert(cls.end(), part.begin(), part.end());
    }
    std::sort(cls.begin(), cls.end());
    out.families.path_class[id] = std::move(cls);
  }
  for (Vertex v = 0; v < n; ++v) {
    if (g.degree(v) != 2) throw InvariantViolation("final graph has vertex " + std::to_string(v) + " of degree " + std::to_string(g.degree(v)));
  }
  // Read off the cycle from vertex 0 towards its smaller neighbour.
  auto at0 = g.incident(0);
  int via = at0[0];
  if (other_end(g.arc(at0[1]), 0) < other_end(g.arc(via), 0)) via = at0[1];
  Vertex at = 0;
  std::vector<bool> seen(n, false);
  do {
    if (seen[at]) throw InvariantViolation("final graph is not a single cycle");
    seen[at] = true;
    out.order.push_back(at);
    at = other_end(g.arc(via), at);
    auto inc = g.incident(at);
    via = inc[0] == via ? inc[1] : inc[0];
  } while (at != 0);
  if (static_cast<int>(out.order.size()) != n) throw InvariantViolation("final graph is not a single spanning cycle");
  out.graph = std::move(g);
  return out;
}

Rational TourCertificate::ratio_bound() const { return Rational(3, 4) * beta + Rational(3, 4) * beta * beta; }

namespace {

std::vector<int> class_union(const PartitionFamilies& fam, const std::vector<int>& arc_ids) {
  std::vector<int> out;
  for (int k : arc_ids) {
    const auto& part = fam.arc_class.at(k);
    out.insert(out.end(), part.begin(), part.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> complement(int m, const std::vector<int>& ids) {
  std::vector<bool> in(m, false);
  for (int id : ids) in[id] = true;
  std::vector<int> out;
  for (int id = 0; id < m; ++id)
    if (!in[id]) out.push_back(id);
  return out;
}

Rational weight_of(const std::vector<TourEdge>& edges_by_id, const Instance& inst, const std::vector<int>& ids) {
  Rational total = 0;
  for (int id : ids) total += inst.weight(edges_by_id[id].ends.u, edges_by_id[id].ends.v);
  return total;
}

// Class of the lighter side for every decision (ties: the cheap arc's class).
std::vector<int> lighter_classes(const PartitionFamilies& fam, const std::vector<TourEdge>& backbone,
                                 const Instance& inst) {
  std::vector<int> out;
  for (const auto& d : fam.decisions) {
    const auto& a = fam.arc_class.at(d.cheap);
    const auto& b = fam.arc_class.at(d.expensive);
    const auto& pick = weight_of(backbone, inst, b) < weight_of(backbone, inst, a) ? b : a;
    out.insert(out.end(), pick.begin(), pick.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

PipelineRun run_pipeline(const Instance& inst, const PipelineOptions& options) {
  if (!inst.nonnegative()) throw DomainError("the tour construction needs nonnegative weights");
  effective_beta(inst);
  return run_pipeline_on(inst, build_backbone(inst, options.one_tree), options);
}

PipelineRun run_pipeline_on(const Instance& inst, BackboneBuild backbone, const PipelineOptions& options) {
  if (!inst.nonnegative()) throw DomainError("the tour construction needs nonnegative weights");
  const Rational beta = effective_beta(inst);
  if (auto problem = check_backbone(inst, backbone.backbone)) throw DomainError("backbone: " + *problem);
  Trace* trace = options.trace;
  PipelineRun run;
  run.backbone = std::move(backbone);
  const auto& h = run.backbone.backbone;
  run.tour = euler_orient(h);
  if (trace) {
    std::ostringstream line;
    line << "euler";
    for (const Arc& a : run.tour.arcs) line << " " << a.id << ":" << a.tail << ">" << a.head;
    trace->push_back(line.str());
  }
  run.contracted = contract_to_cycles(BiDigraph::from_tour(inst, h, run.tour));
  if (trace) {
    for (const auto& [id, arc] : run.contracted.arcs()) {
      if (!arc.join) continue;
      trace->push_back("contract vertex=" + std::to_string(arc.join->at) + " arcs=" + std::to_string(arc.join->first) +
                       "," + std::to_string(arc.join->second) + " new=" + std::to_string(id) + " ends=" +
                       std::to_string(arc.a) + "," + std::to_string(arc.b));
    }
  }
  run.cactus = grow_cactus(run.contracted, run.tour, trace, options.check_each_step);
  run.oriented = orient_blocks(run.cactus, trace);
  run.finished = finalize_tour(run.oriented, trace);

  auto& cert = run.certificate;
  const int m = static_cast<int>(h.edges.size());
  cert.vertex_count = inst.size();
  cert.order = run.finished.order;
  cert.tour_edges = run.finished.edges;
  for (const auto& e : h.edges) cert.backbone_edges.push_back({e.id, e.ends});
  cert.families = run.finished.families;
  cert.beta = beta;
  cert.tour_weight = 0;
  for (const auto& e : cert.tour_edges) cert.tour_weight += inst.weight(e.ends.u, e.ends.v);
  cert.backbone_weight = h.weight;
  cert.light_edges = lighter_classes(cert.families, cert.backbone_edges, inst);
  cert.heavy_edges = complement(m, cert.light_edges);
  cert.light_weight = weight_of(cert.backbone_edges, inst, cert.light_edges);
  cert.heavy_weight = weight_of(cert.backbone_edges, inst, cert.heavy_edges);
  cert.cheap_side = class_union(cert.families, cert.families.cheap);
  cert.expensive_side = complement(m, cert.cheap_side);
  cert.cheap_side_weight = weight_of(cert.backbone_edges, inst, cert.cheap_side);
  cert.expensive_side_weight = weight_of(cert.backbone_edges, inst, cert.expensive_side);
  return run;
}

TourCertificate approximate_tour(const Instance& inst, const PipelineOptions& options) {
  return run_pipeline(inst, options).certificate;
}

namespace {

// True when the edges can be ordered into a walk from s to t using each once.
bool forms_walk(const std::vector<Edge>& edges, Vertex s, Vertex t) {
  std::vector<bool> used(edges.size(), false);
  std::function<bool(Vertex, std::size_t)> go = [&](Vertex at, std::size_t count) {
    if (count == edges.size()) return at == t;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (used[i] || (edges[i].u != at && edges[i].v != at)) continue;
      used[i] = true;
      bool ok = go(edges[i].u == at ? edges[i].v : edges[i].u, count + 1);
      used[i] = false;
      if (ok) return true;
    }
    return false;
  };
  return !edges.empty() && go(s, 0);
}

std::string edge_text(Edge e) { return "{" + std::to_string(e.u) + "," + std::to_string(e.v) + "}"; }

}  // namespace

VerificationReport verify_certificate(const Instance& inst, const TourCertificate& cert) {
  VerificationReport report;
  auto fail = [&](std::string check, std::string detail) { report.violations.push_back({std::move(check), std::move(detail)}); };
  const int n = inst.size();
  if (cert.vertex_count != n) {
    fail("instance-size", "certificate has " + std::to_string(cert.vertex_count) + " vertices, instance " + std::to_string(n));
    return report;
  }

  // Tour.
  std::vector<Vertex> sorted = cert.order;
  std::sort(sorted.begin(), sorted.end());
  bool permutation = static_cast<int>(sorted.size()) == n;
  for (int i = 0; permutation && i < n; ++i) permutation = sorted[i] == i;
  if (!permutation || cert.order.empty() || cert.order.front() != 0) {
    fail("tour", "order is not a permutation of the vertices starting at 0");
    return report;
  }
  std::multiset<Edge> from_order, from_edges;
  for (int i = 0; i < n; ++i) from_order.insert(make_edge(cert.order[i], cert.order[(i + 1) % n]));
  std::map<int, Edge> tour_by_id;
  for (const auto& e : cert.tour_edges) {
    from_edges.insert(e.ends);
    if (!tour_by_id.emplace(e.id, e.ends).second) fail("tour", "tour edge id " + std::to_string(e.id) + " repeated");
  }
  if (from_order != from_edges) fail("tour", "tour edges do not match the vertex order");
  Rational tour_weight = 0;
  for (const auto& e : cert.tour_edges) tour_weight += inst.weight(e.ends.u, e.ends.v);
  if (tour_weight != cert.tour_weight) fail("tour-weight", "recorded " + to_fraction(cert.tour_weight) + ", actual " + to_fraction(tour_weight));

  // Backbone.
  std::vector<Edge> h_edges;
  for (std::size_t i = 0; i < cert.backbone_edges.size(); ++i) {
    if (cert.backbone_edges[i].id != static_cast<int>(i)) {
      fail("backbone", "backbone edge ids are not consecutive");
      return report;
    }
    h_edges.push_back(cert.backbone_edges[i].ends);
  }
  const int m = static_cast<int>(h_edges.size());
  EulerianBackbone h;
  h.vertex_count = n;
  h.weight = 0;
  for (int i = 0; i < m; ++i) {
    const Edge e = h_edges[i];
    if (e.u < 0 || e.v >= n || e.u >= e.v) {
      fail("backbone", "malformed backbone edge " + std::to_string(i));
      return report;
    }
    h.edges.push_back({i, e, inst.weight(e.u, e.v), EdgeSource::kTree});
    h.weight += inst.weight(e.u, e.v);
  }
  if (auto problem = check_backbone(inst, h)) fail("backbone", *problem);
  if (h.weight != cert.backbone_weight) fail("backbone-weight", "recorded " + to_fraction(cert.backbone_weight) + ", actual " + to_fraction(h.weight));

  const auto& fam = cert.families;
  auto valid_h = [&](int id) { return id >= 0 && id < m; };

  // Cactus arc classes: each a walk of one or two backbone edges between the arc's ends.
  std::vector<int> h_owner(m, 0);
  for (const auto& [k, cls] : fam.arc_class) {
    auto ends = fam.cactus_arcs.find(k);
    if (ends == fam.cactus_arcs.end()) {
      fail("arc-classes", "arc " + std::to_string(k) + " has no endpoints");
      continue;
    }
    if (cls.empty() || cls.size() > 2 || !std::all_of(cls.begin(), cls.end(), valid_h)) {
      fail("arc-classes", "arc " + std::to_string(k) + " has a malformed class");
      continue;
    }
    std::vector<Edge> es;
    for (int id : cls) {
      es.push_back(h_edges[id]);
      ++h_owner[id];
    }
    if (!forms_walk(es, ends->second.u, ends->second.v)) {
      fail("arc-classes", "class of arc " + std::to_string(k) + " does not join " + edge_text(ends->second));
    }
  }
  if (fam.cactus_arcs.size() != fam.arc_class.size()) fail("arc-classes", "arc and class tables differ in size");
  for (int id = 0; id < m; ++id) {
    if (h_owner[id] != 1) fail("arc-partition", "backbone edge " + std::to_string(id) + " lies in " + std::to_string(h_owner[id]) + " classes");
  }

  // Tour classes over cactus arcs.
  std::map<int, int> k_owner;
  for (const auto& [k, ends] : fam.cactus_arcs) k_owner[k] = 0;
  if (fam.tour_class.size() != tour_by_id.size()) fail("tour-classes", "class count differs from tour length");
  std::set<int> cheap(fam.cheap.begin(), fam.cheap.end());
  for (const auto& [f, cls] : fam.tour_class) {
    auto ends = tour_by_id.find(f);
    if (ends == tour_by_id.end()) {
      fail("tour-classes", "class for unknown tour edge " + std::to_string(f));
      continue;
    }
    std::vector<Edge> es;
    bool ok = !cls.empty() && cls.size() <= 2;
    for (int k : cls) {
      auto it = fam.cactus_arcs.find(k);
      if (it == fam.cactus_arcs.end()) {
        ok = false;
        break;
      }
      es.push_back(it->second);
      ++k_owner[k];
    }
    if (!ok) {
      fail("tour-classes", "tour edge " + std::to_string(f) + " has a malformed class");
      continue;
    }
    if (!forms_walk(es, ends->second.u, ends->second.v)) {
      fail("tour-classes", "class of tour edge " + std::to_string(f) + " does not join " + edge_text(ends->second));
    }
    if (cls.size() == 2) {
      // One side an original backbone edge, the other a cheap arc.
      const int a = cls[0], b = cls[1];
      auto single = [&](int k) { return fam.arc_class.count(k) && fam.arc_class.at(k).size() == 1; };
      if (!((single(a) && cheap.count(b)) || (single(b) && cheap.count(a)))) {
        fail("joined-edge", "tour edge " + std::to_string(f) + " does not pair a backbone edge with a cheap arc");
      }
    }
  }
  for (const auto& [k, count] : k_owner) {
    if (count != 1) fail("tour-partition", "arc " + std::to_string(k) + " lies in " + std::to_string(count) + " tour classes");
  }

  // Composed classes: short walks partitioning the backbone.
  std::vector<int> p_owner(m, 0);
  if (fam.path_class.size() != tour_by_id.size()) fail("path-classes", "class count differs from tour length");
  for (const auto& [f, cls] : fam.path_class) {
    auto ends = tour_by_id.find(f);
    auto parts = fam.tour_class.find(f);
    if (ends == tour_by_id.end() || parts == fam.tour_class.end()) {
      fail("path-classes", "class for unknown tour edge " + std::to_string(f));
      continue;
    }
    if (cls.empty() || cls.size() > 3 || !std::all_of(cls.begin(), cls.end(), valid_h)) {
      fail("path-classes", "tour edge " + std::to_string(f) + " has " + std::to_string(cls.size()) + " backbone edges");
      continue;
    }
    bool composed = true;
    std::vector<int> expect;
    for (int k : parts->second) {
      auto it = fam.arc_class.find(k);
      if (it == fam.arc_class.end()) {
        composed = false;
        break;
      }
      expect.insert(expect.end(), it->second.begin(), it->second.end());
    }
    std::sort(expect.begin(), expect.end());
    if (!composed || expect != cls) fail("path-classes", "class of tour edge " + std::to_string(f) + " is not the composition of its parts");
    std::vector<Edge> es;
    for (int id : cls) {
      es.push_back(h_edges[id]);
      ++p_owner[id];
    }
    if (!forms_walk(es, ends->second.u, ends->second.v)) {
      fail("path-classes", "class of tour edge " + std::to_string(f) + " is not a walk joining " + edge_text(ends->second));
    }
  }
  for (int id = 0; id < m; ++id) {
    if (p_owner[id] != 1) fail("path-partition", "backbone edge " + std::to_string(id) + " lies in " + std::to_string(p_owner[id]) + " classes");
  }

  // Orientation decisions.
  std::vector<int> dc, de;
  for (const auto& d : fam.decisions) {
    dc.push_back(d.cheap);
    de.push_back(d.expensive);
    auto a = fam.cactus_arcs.find(d.cheap);
    auto b = fam.cactus_arcs.find(d.expensive);
    if (a == fam.cactus_arcs.end() || b == fam.cactus_arcs.end() || d.cheap == d.expensive) {
      fail("decisions", "decision at vertex " + std::to_string(d.exit_point) + " names unknown arcs");
      continue;
    }
    auto touches_exit = [&](Edge e) { return e.u == d.exit_point || e.v == d.exit_point; };
    if (!touches_exit(a->second) || !touches_exit(b->second)) {
      fail("decisions", "decision arcs do not meet exit point " + std::to_string(d.exit_point));
    }
    if (inst.weight(b->second.u, b->second.v) < inst.weight(a->second.u, a->second.v)) {
      fail("decisions", "cheap arc " + std::to_string(d.cheap) + " is heavier than " + std::to_string(d.expensive));
    }
  }
  std::sort(dc.begin(), dc.end());
  std::sort(de.begin(), de.end());
  if (dc != fam.cheap || de != fam.expensive) fail("decisions", "cheap/expensive sets differ from the decision list");
  std::vector<int> both;
  std::set_intersection(fam.cheap.begin(), fam.cheap.end(), fam.expensive.begin(), fam.expensive.end(), std::back_inserter(both));
  if (!both.empty()) fail("decisions", "arc " + std::to_string(both.front()) + " is both cheap and expensive");
  if (!report.ok()) return report;

  // Weight accounting.
  const auto light_edges = lighter_classes(fam, cert.backbone_edges, inst);
  const auto heavy_edges = complement(m, light_edges);
  const Rational c_star = weight_of(cert.backbone_edges, inst, light_edges);
  const Rational c_prime_star = weight_of(cert.backbone_edges, inst, heavy_edges);
  if (light_edges != cert.light_edges || heavy_edges != cert.heavy_edges) fail("light", "recorded sets differ from the decisions");
  if (c_star != cert.light_weight || c_prime_star != cert.heavy_weight) fail("light", "recorded weights differ");
  const auto m_lit = class_union(fam, fam.cheap);
  if (m_lit != cert.cheap_side || complement(m, m_lit) != cert.expensive_side) fail("cheap-side", "recorded sets differ from the cheap arcs");
  if (weight_of(cert.backbone_edges, inst, m_lit) != cert.cheap_side_weight ||
      weight_of(cert.backbone_edges, inst, complement(m, m_lit)) != cert.expensive_side_weight) {
    fail("cheap-side", "recorded weights differ");
  }
  const Beta actual = beta_of(inst);
  if (actual.is_infinite() || cert.beta < actual.value()) {
    fail("beta", "certificate beta " + to_fraction(cert.beta) + " is below the instance beta " + actual.to_string());
    return report;
  }
  const Rational& beta = cert.beta;
  if (c_star > c_prime_star) fail("light-balance", to_fraction(c_star) + " > " + to_fraction(c_prime_star));
  if (c_star + c_prime_star != h.weight) fail("light-sum", "classes do not add up to the backbone weight");
  const Rational charged = beta * c_prime_star + beta * beta * c_star;
  if (tour_weight > charged) fail("tour-vs-classes", to_fraction(tour_weight) + " > " + to_fraction(charged));
  const Rational half = (beta + beta * beta) * h.weight / 2;
  if (charged > half) fail("classes-vs-backbone", to_fraction(charged) + " > " + to_fraction(half));
  if (cert.opt) {
    const Rational limit = cert.ratio_bound() * *cert.opt;
    if (tour_weight > limit) fail("approximation", to_fraction(tour_weight) + " > " + to_fraction(limit));
  }
  return report;
}

}  // namespace btsp
