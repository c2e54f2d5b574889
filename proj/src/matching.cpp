// Weighted general matching by the primal-dual blossom method (Edmonds, with
// Galil's O(n^3) bookkeeping of least-slack edges per blossom). The solver
// maximizes the negated weights subject to maximum cardinality, which on a
// graph with a perfect matching is exactly the minimum-weight perfect matching.
//
// Conventions follow the classic formulation: every edge k has two endpoint
// indices 2k and 2k+1, `mate[v]` stores the remote endpoint index, vertex duals
// are stored doubled so that edge slack is dual(i) + dual(j) - 2 w(k).

#include "btsp/matching.hpp"

#include <algorithm>
#include <cassert>

#include "btsp/error.hpp"

namespace btsp {

int MatchingGraph::add_edge(Vertex u, Vertex v, Rational weight) {
  edges.push_back({u, v, std::move(weight)});
  return static_cast<int>(edges.size()) - 1;
}

namespace {

class BlossomSolver {
 public:
  explicit BlossomSolver(const MatchingGraph& g)
      : nv_(g.vertex_count), ne_(static_cast<int>(g.edges.size())) {
    for (const auto& e : g.edges) {
      if (e.u == e.v) throw DomainError("matching graph has a self-loop at " + std::to_string(e.u));
      if (e.u < 0 || e.v < 0 || e.u >= nv_ || e.v >= nv_) throw DomainError("matching edge endpoint out of range");
      eu_.push_back(e.u);
      ev_.push_back(e.v);
      wt_.push_back(-e.weight);
    }
    Rational maxweight = 0;
    for (const auto& w : wt_) maxweight = std::max(maxweight, w);

    endpoint_.resize(2 * ne_);
    for (int p = 0; p < 2 * ne_; ++p) endpoint_[p] = (p % 2 == 0) ? eu_[p / 2] : ev_[p / 2];
    neighbend_.assign(nv_, {});
    for (int k = 0; k < ne_; ++k) {
      neighbend_[eu_[k]].push_back(2 * k + 1);
      neighbend_[ev_[k]].push_back(2 * k);
    }
    mate_.assign(nv_, -1);
    label_.assign(2 * nv_, 0);
    labelend_.assign(2 * nv_, -1);
    inblossom_.resize(nv_);
    for (int v = 0; v < nv_; ++v) inblossom_[v] = v;
    parent_.assign(2 * nv_, -1);
    childs_.assign(2 * nv_, {});
    base_.assign(2 * nv_, -1);
    for (int v = 0; v < nv_; ++v) base_[v] = v;
    endps_.assign(2 * nv_, {});
    bestedge_.assign(2 * nv_, -1);
    bestedges_.assign(2 * nv_, {});
    has_bestedges_.assign(2 * nv_, false);
    for (int b = 2 * nv_ - 1; b >= nv_; --b) unused_.push_back(b);
    std::reverse(unused_.begin(), unused_.end());
    dual_.assign(2 * nv_, Rational(0));
    for (int v = 0; v < nv_; ++v) dual_[v] = maxweight;
    allowedge_.assign(ne_, false);
  }

  void run();

  int vertex_count() const { return nv_; }
  // Matched edge id per vertex, -1 when exposed.
  int matched_edge(int v) const { return mate_[v] < 0 ? -1 : mate_[v] / 2; }

  MatchingCertificate certificate() const;

 private:
  Rational slack(int k) const { return dual_[eu_[k]] + dual_[ev_[k]] - 2 * wt_[k]; }

  int child(int b, int j) const {
    const int len = static_cast<int>(childs_[b].size());
    return childs_[b][((j % len) + len) % len];
  }
  int endp(int b, int j) const {
    const int len = static_cast<int>(endps_[b].size());
    return endps_[b][((j % len) + len) % len];
  }

  void leaves(int b, std::vector<int>& out) const {
    if (b < nv_) {
      out.push_back(b);
      return;
    }
    for (int t : childs_[b]) leaves(t, out);
  }
  std::vector<int> leaves(int b) const {
    std::vector<int> out;
    leaves(b, out);
    return out;
  }

  void assign_label(int w, int t, int p);
  int scan_blossom(int v, int w);
  void add_blossom(int base, int k);
  void expand_blossom(int b, bool endstage);
  void augment_blossom(int b, int v);
  void augment_matching(int k);

  int nv_;
  int ne_;
  std::vector<int> eu_, ev_;
  std::vector<Rational> wt_;
  std::vector<int> endpoint_;
  std::vector<std::vector<int>> neighbend_;
  std::vector<int> mate_;
  std::vector<int> label_;
  std::vector<int> labelend_;
  std::vector<int> inblossom_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> childs_;
  std::vector<int> base_;
  std::vector<std::vector<int>> endps_;
  std::vector<int> bestedge_;
  std::vector<std::vector<int>> bestedges_;
  std::vector<bool> has_bestedges_;
  std::vector<int> unused_;
  std::vector<Rational> dual_;
  std::vector<bool> allowedge_;
  std::vector<int> queue_;
};

void BlossomSolver::assign_label(int w, int t, int p) {
  int b = inblossom_[w];
  assert(label_[w] == 0 && label_[b] == 0);
  label_[w] = label_[b] = t;
  labelend_[w] = labelend_[b] = p;
  bestedge_[w] = bestedge_[b] = -1;
  if (t == 1) {
    leaves(b, queue_);
  } else if (t == 2) {
    int base = base_[b];
    assert(mate_[base] >= 0);
    assign_label(endpoint_[mate_[base]], 1, mate_[base] ^ 1);
  }
}

// Walks back from v and w towards the roots of their alternating trees; returns
// the base of the new blossom or -1 when the two trees differ (augmenting path).
int BlossomSolver::scan_blossom(int v, int w) {
  std::vector<int> path;
  int base = -1;
  while (v != -1 || w != -1) {
    int b = inblossom_[v];
    if (label_[b] & 4) {
      base = base_[b];
      break;
    }
    assert(label_[b] == 1);
    path.push_back(b);
    label_[b] = 5;
    if (labelend_[b] == -1) {
      v = -1;
    } else {
      v = endpoint_[labelend_[b]];
      b = inblossom_[v];
      assert(label_[b] == 2);
      v = endpoint_[labelend_[b]];
    }
    if (w != -1) std::swap(v, w);
  }
  for (int b : path) label_[b] = 1;
  return base;
}

void BlossomSolver::add_blossom(int base, int k) {
  int v = eu_[k];
  int w = ev_[k];
  int bb = inblossom_[base];
  int bv = inblossom_[v];
  int bw = inblossom_[w];
  int b = unused_.back();
  unused_.pop_back();
  base_[b] = base;
  parent_[b] = -1;
  parent_[bb] = b;
  std::vector<int> path;
  std::vector<int> endps;
  while (bv != bb) {
    parent_[bv] = b;
    path.push_back(bv);
    endps.push_back(labelend_[bv]);
    v = endpoint_[labelend_[bv]];
    bv = inblossom_[v];
  }
  path.push_back(bb);
  std::reverse(path.begin(), path.end());
  std::reverse(endps.begin(), endps.end());
  endps.push_back(2 * k);
  while (bw != bb) {
    parent_[bw] = b;
    path.push_back(bw);
    endps.push_back(labelend_[bw] ^ 1);
    w = endpoint_[labelend_[bw]];
    bw = inblossom_[w];
  }
  assert(label_[bb] == 1);
  childs_[b] = path;
  endps_[b] = endps;
  label_[b] = 1;
  labelend_[b] = labelend_[bb];
  dual_[b] = 0;
  for (int leaf : leaves(b)) {
    if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
    inblossom_[leaf] = b;
  }
  // Least-slack edges from the new blossom to each neighbouring S-blossom.
  std::vector<int> bestedgeto(2 * nv_, -1);
  for (int sub : path) {
    std::vector<std::vector<int>> nblists;
    if (!has_bestedges_[sub]) {
      for (int leaf : leaves(sub)) {
        std::vector<int> ks;
        for (int p : neighbend_[leaf]) ks.push_back(p / 2);
        nblists.push_back(std::move(ks));
      }
    } else {
      nblists.push_back(bestedges_[sub]);
    }
    for (const auto& nblist : nblists) {
      for (int kk : nblist) {
        int i = eu_[kk];
        int j = ev_[kk];
        if (inblossom_[j] == b) std::swap(i, j);
        int bj = inblossom_[j];
        if (bj != b && label_[bj] == 1 && (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj]))) {
          bestedgeto[bj] = kk;
        }
      }
    }
    bestedges_[sub].clear();
    has_bestedges_[sub] = false;
    bestedge_[sub] = -1;
  }
  bestedges_[b].clear();
  for (int kk : bestedgeto)
    if (kk != -1) bestedges_[b].push_back(kk);
  has_bestedges_[b] = true;
  bestedge_[b] = -1;
  for (int kk : bestedges_[b]) {
    if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
  }
}

void BlossomSolver::expand_blossom(int b, bool endstage) {
  const std::vector<int> kids = childs_[b];
  for (int s : kids) {
    parent_[s] = -1;
    if (s < nv_) {
      inblossom_[s] = s;
    } else if (endstage && dual_[s] == 0) {
      expand_blossom(s, endstage);
    } else {
      for (int leaf : leaves(s)) inblossom_[leaf] = s;
    }
  }
  if (!endstage && label_[b] == 2) {
    // Relabel the sub-blossoms on the even-length path from the entry child to the base.
    int entrychild = inblossom_[endpoint_[labelend_[b] ^ 1]];
    const int len = static_cast<int>(childs_[b].size());
    int j = static_cast<int>(std::find(childs_[b].begin(), childs_[b].end(), entrychild) - childs_[b].begin());
    int jstep, endptrick;
    if (j & 1) {
      j -= len;
      jstep = 1;
      endptrick = 0;
    } else {
      jstep = -1;
      endptrick = 1;
    }
    int p = labelend_[b];
    while (j != 0) {
      label_[endpoint_[p ^ 1]] = 0;
      label_[endpoint_[endp(b, j - endptrick) ^ endptrick ^ 1]] = 0;
      assign_label(endpoint_[p ^ 1], 2, p);
      allowedge_[endp(b, j - endptrick) / 2] = true;
      j += jstep;
      p = endp(b, j - endptrick) ^ endptrick;
      allowedge_[p / 2] = true;
      j += jstep;
    }
    int bv = child(b, j);
    label_[endpoint_[p ^ 1]] = label_[bv] = 2;
    labelend_[endpoint_[p ^ 1]] = labelend_[bv] = p;
    bestedge_[bv] = -1;
    j += jstep;
    while (child(b, j) != entrychild) {
      bv = child(b, j);
      if (label_[bv] == 1) {
        j += jstep;
        continue;
      }
      int v = -1;
      for (int leaf : leaves(bv)) {
        v = leaf;
        if (label_[leaf] != 0) break;
      }
      if (label_[v] != 0) {
        assert(label_[v] == 2);
        assert(inblossom_[v] == bv);
        label_[v] = 0;
        label_[endpoint_[mate_[base_[bv]]]] = 0;
        assign_label(v, 2, labelend_[v]);
      }
      j += jstep;
    }
  }
  label_[b] = labelend_[b] = -1;
  childs_[b].clear();
  endps_[b].clear();
  base_[b] = -1;
  bestedges_[b].clear();
  has_bestedges_[b] = false;
  bestedge_[b] = -1;
  unused_.push_back(b);
}

// Swaps matched and unmatched edges along the even path from v to the base of b.
void BlossomSolver::augment_blossom(int b, int v) {
  int t = v;
  while (parent_[t] != b) t = parent_[t];
  if (t >= nv_) augment_blossom(t, v);
  const int len = static_cast<int>(childs_[b].size());
  const int i = static_cast<int>(std::find(childs_[b].begin(), childs_[b].end(), t) - childs_[b].begin());
  int j = i;
  int jstep, endptrick;
  if (i & 1) {
    j -= len;
    jstep = 1;
    endptrick = 0;
  } else {
    jstep = -1;
    endptrick = 1;
  }
  while (j != 0) {
    j += jstep;
    t = child(b, j);
    int p = endp(b, j - endptrick) ^ endptrick;
    if (t >= nv_) augment_blossom(t, endpoint_[p]);
    j += jstep;
    t = child(b, j);
    if (t >= nv_) augment_blossom(t, endpoint_[p ^ 1]);
    mate_[endpoint_[p]] = p ^ 1;
    mate_[endpoint_[p ^ 1]] = p;
  }
  std::rotate(childs_[b].begin(), childs_[b].begin() + i, childs_[b].end());
  std::rotate(endps_[b].begin(), endps_[b].begin() + i, endps_[b].end());
  base_[b] = base_[childs_[b][0]];
  assert(base_[b] == v);
}

void BlossomSolver::augment_matching(int k) {
  const int ends[2][2] = {{eu_[k], 2 * k + 1}, {ev_[k], 2 * k}};
  for (const auto& start : ends) {
    int s = start[0];
    int p = start[1];
    while (true) {
      int bs = inblossom_[s];
      assert(label_[bs] == 1);
      if (bs >= nv_) augment_blossom(bs, s);
      mate_[s] = p;
      if (labelend_[bs] == -1) break;
      int t = endpoint_[labelend_[bs]];
      int bt = inblossom_[t];
      assert(label_[bt] == 2);
      s = endpoint_[labelend_[bt]];
      int j = endpoint_[labelend_[bt] ^ 1];
      assert(base_[bt] == t);
      if (bt >= nv_) augment_blossom(bt, j);
      mate_[j] = labelend_[bt];
      p = labelend_[bt] ^ 1;
    }
  }
}

void BlossomSolver::run() {
  for (int stage = 0; stage < nv_; ++stage) {
    std::fill(label_.begin(), label_.end(), 0);
    std::fill(bestedge_.begin(), bestedge_.end(), -1);
    for (int b = nv_; b < 2 * nv_; ++b) {
      bestedges_[b].clear();
      has_bestedges_[b] = false;
    }
    std::fill(allowedge_.begin(), allowedge_.end(), false);
    queue_.clear();
    for (int v = 0; v < nv_; ++v) {
      if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);
    }
    bool augmented = false;
    while (true) {
      while (!queue_.empty() && !augmented) {
        int v = queue_.back();
        queue_.pop_back();
        assert(label_[inblossom_[v]] == 1);
        for (int p : neighbend_[v]) {
          int k = p / 2;
          int w = endpoint_[p];
          if (inblossom_[v] == inblossom_[w]) continue;
          Rational kslack;
          if (!allowedge_[k]) {
            kslack = slack(k);
            if (kslack <= 0) allowedge_[k] = true;
          }
          if (allowedge_[k]) {
            if (label_[inblossom_[w]] == 0) {
              assign_label(w, 2, p ^ 1);
            } else if (label_[inblossom_[w]] == 1) {
              int base = scan_blossom(v, w);
              if (base >= 0) {
                add_blossom(base, k);
              } else {
                augment_matching(k);
                augmented = true;
                break;
              }
            } else if (label_[w] == 0) {
              assert(label_[inblossom_[w]] == 2);
              label_[w] = 2;
              labelend_[w] = p ^ 1;
            }
          } else if (label_[inblossom_[w]] == 1) {
            int b = inblossom_[v];
            if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
          } else if (label_[w] == 0) {
            if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
          }
        }
      }
      if (augmented) break;

      // Dual adjustment; vertex duals are unconstrained because we insist on
      // maximum cardinality.
      int deltatype = -1;
      Rational delta;
      int deltaedge = -1;
      int deltablossom = -1;
      for (int v = 0; v < nv_; ++v) {
        if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
          Rational d = slack(bestedge_[v]);
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 2;
            deltaedge = bestedge_[v];
          }
        }
      }
      for (int b = 0; b < 2 * nv_; ++b) {
        if (parent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1) {
          Rational d = slack(bestedge_[b]) / 2;
          if (deltatype == -1 || d < delta) {
            delta = d;
            deltatype = 3;
            deltaedge = bestedge_[b];
          }
        }
      }
      for (int b = nv_; b < 2 * nv_; ++b) {
        if (base_[b] >= 0 && parent_[b] == -1 && label_[b] == 2 && (deltatype == -1 || dual_[b] < delta)) {
          delta = dual_[b];
          deltatype = 4;
          deltablossom = b;
        }
      }
      if (deltatype == -1) {
        // No further progress possible: the matching has maximum cardinality.
        deltatype = 1;
        delta = 0;
        for (int v = 0; v < nv_; ++v) delta = (v == 0) ? dual_[v] : std::min(delta, dual_[v]);
        if (delta < 0) delta = 0;
      }
      for (int v = 0; v < nv_; ++v) {
        int l = label_[inblossom_[v]];
        if (l == 1) {
          dual_[v] -= delta;
        } else if (l == 2) {
          dual_[v] += delta;
        }
      }
      for (int b = nv_; b < 2 * nv_; ++b) {
        if (base_[b] >= 0 && parent_[b] == -1) {
          if (label_[b] == 1) {
            dual_[b] += delta;
          } else if (label_[b] == 2) {
            dual_[b] -= delta;
          }
        }
      }
      if (deltatype == 1) {
        break;
      } else if (deltatype == 2) {
        allowedge_[deltaedge] = true;
        int i = eu_[deltaedge];
        int j = ev_[deltaedge];
        if (label_[inblossom_[i]] == 0) std::swap(i, j);
        assert(label_[inblossom_[i]] == 1);
        queue_.push_back(i);
      } else if (deltatype == 3) {
        allowedge_[deltaedge] = true;
        int i = eu_[deltaedge];
        assert(label_[inblossom_[i]] == 1);
        queue_.push_back(i);
      } else {
        expand_blossom(deltablossom, false);
      }
    }
    if (!augmented) break;
    for (int b = nv_; b < 2 * nv_; ++b) {
      if (parent_[b] == -1 && base_[b] >= 0 && label_[b] == 1 && dual_[b] == 0) expand_blossom(b, true);
    }
  }
}

MatchingCertificate BlossomSolver::certificate() const {
  // Internal duals refer to the negated weights: slack/2 = w - y(u) - y(v) + sum z
  // with y = -dual/2 and z = blossom dual.
  MatchingCertificate cert;
  cert.vertex_dual.reserve(nv_);
  for (int v = 0; v < nv_; ++v) cert.vertex_dual.push_back(-dual_[v] / 2);
  for (int b = nv_; b < 2 * nv_; ++b) {
    if (base_[b] < 0 || dual_[b] == 0) continue;
    DualBlossom blossom;
    blossom.members = leaves(b);
    std::sort(blossom.members.begin(), blossom.members.end());
    blossom.z = dual_[b];
    cert.blossoms.push_back(std::move(blossom));
  }
  std::sort(cert.blossoms.begin(), cert.blossoms.end(),
            [](const DualBlossom& a, const DualBlossom& b) { return a.members < b.members; });
  return cert;
}

bool contains(const std::vector<Vertex>& sorted, Vertex v) { return std::binary_search(sorted.begin(), sorted.end(), v); }

}  // namespace

std::optional<PerfectMatching> min_weight_perfect_matching(const MatchingGraph& g) {
  if (g.vertex_count % 2 != 0) return std::nullopt;
  if (g.vertex_count == 0) return PerfectMatching{};
  BlossomSolver solver(g);
  solver.run();
  PerfectMatching result;
  result.weight = 0;
  for (int v = 0; v < g.vertex_count; ++v) {
    int k = solver.matched_edge(v);
    if (k < 0) return std::nullopt;
    if (g.edges[k].u == v) {
      result.edge_ids.push_back(k);
      result.weight += g.edges[k].weight;
    }
  }
  std::sort(result.edge_ids.begin(), result.edge_ids.end());
  result.certificate = solver.certificate();
  return result;
}

Rational reduced_cost(const MatchingGraph& g, const MatchingCertificate& cert, int edge_id) {
  const auto& e = g.edges[edge_id];
  Rational rc = e.weight - cert.vertex_dual[e.u] - cert.vertex_dual[e.v];
  for (const auto& b : cert.blossoms) {
    if (contains(b.members, e.u) && contains(b.members, e.v)) rc += b.z;
  }
  return rc;
}

std::optional<std::string> check_matching_certificate(const MatchingGraph& g, const PerfectMatching& m) {
  const int n = g.vertex_count;
  const int ne = static_cast<int>(g.edges.size());
  if (static_cast<int>(m.certificate.vertex_dual.size()) != n) return "vertex dual vector has wrong length";
  std::vector<int> cover(n, 0);
  std::vector<bool> matched(ne, false);
  Rational weight = 0;
  for (int k : m.edge_ids) {
    if (k < 0 || k >= ne) return "matched edge id " + std::to_string(k) + " out of range";
    if (matched[k]) return "edge " + std::to_string(k) + " matched twice";
    matched[k] = true;
    ++cover[g.edges[k].u];
    ++cover[g.edges[k].v];
    weight += g.edges[k].weight;
  }
  for (int v = 0; v < n; ++v) {
    if (cover[v] != 1) return "vertex " + std::to_string(v) + " covered " + std::to_string(cover[v]) + " times";
  }
  if (weight != m.weight) return "reported weight differs from the matched edges";
  for (const auto& b : m.certificate.blossoms) {
    if (b.z < 0) return "negative blossom dual";
    if (b.members.size() % 2 == 0) return "blossom with an even number of vertices";
    if (!std::is_sorted(b.members.begin(), b.members.end())) return "blossom members not sorted";
    std::size_t inside = 0;
    for (int k : m.edge_ids) {
      if (contains(b.members, g.edges[k].u) && contains(b.members, g.edges[k].v)) ++inside;
    }
    if (b.z > 0 && 2 * inside + 1 != b.members.size()) return "blossom with positive dual is not full";
  }
  for (int k = 0; k < ne; ++k) {
    Rational rc = reduced_cost(g, m.certificate, k);
    if (rc < 0) return "edge " + std::to_string(k) + " has negative reduced cost";
    if (matched[k] && rc != 0) return "matched edge " + std::to_string(k) + " has nonzero reduced cost";
  }
  return std::nullopt;
}

}  // namespace btsp
