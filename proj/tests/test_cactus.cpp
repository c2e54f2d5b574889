#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "btsp/cactus.hpp"
#include "btsp/error.hpp"
#include "btsp/oracles.hpp"
#include "fixtures.hpp"

using namespace btsp;
using namespace btsp::testing;

namespace {

struct Oriented {
  Instance inst;
  EulerianBackbone h;
  ArcSequence tour;
  BiDigraph d;
};

Oriented oriented(Instance inst, const std::vector<Edge>& edges) {
  Oriented o{std::move(inst), {}, {}, {}};
  o.h = make_backbone(o.inst, edges, static_cast<int>(edges.size()));
  o.tour = euler_orient(o.h);
  o.d = BiDigraph::from_tour(o.inst, o.h, o.tour);
  return o;
}

BackboneBuild wrap(EulerianBackbone h) {
  BackboneBuild b;
  b.backbone = std::move(h);
  return b;
}

}  // namespace

TEST_CASE("contraction on two squares") {
  auto o = oriented(two_squares_instance(), two_squares_edges());
  CHECK(o.d.out_arcs(1) == std::vector<int>{1, 5});
  auto d = contract_vertex(o.d, 1, contraction_arc_id(o.d, 1));
  const BiArc& a = d.arc(9);
  CHECK(a.kind == ArcKind::kDoubleHeaded);
  CHECK(a.a == 4);
  CHECK(a.b == 2);
  CHECK(a.weight == 1);
  REQUIRE(a.join);
  CHECK(*a.join == Join{1, 1, 5});
  CHECK_FALSE(d.has_arc(1));
  CHECK_FALSE(d.has_arc(5));
  CHECK(d.degree(1) == 2);
  CHECK(expand_arc(d, 9) == o.d);
  CHECK_THROWS_AS(contract_vertex(o.d, 0, 20), DomainError);
  CHECK_THROWS_AS(expand_arc(o.d, 0), DomainError);
}

TEST_CASE("contraction rejects a repeated head") {
  Instance inst = uniform(3, 1);
  BiDigraph d(inst, 4);
  d.add({0, ArcKind::kDirected, 0, 1, 1, std::nullopt});
  d.add({1, ArcKind::kDirected, 0, 1, 1, std::nullopt});
  d.add({2, ArcKind::kDirected, 1, 2, 1, std::nullopt});
  CHECK_THROWS_AS(contract_vertex(d, 0, 9), DomainError);
}

TEST_CASE("contraction") {
  auto tri = oriented(uniform(3, 1), {{0, 1}, {1, 2}, {0, 2}});
  CHECK(contract_to_cycles(tri.d) == tri.d);

  auto bow = oriented(uniform(5, 1), bow_tie_edges());
  auto c = contract_to_cycles(bow.d);
  CHECK(c.arcs().size() == 5);
  CHECK(cycles_of(c) == std::vector<std::vector<Vertex>>{{0, 1, 2, 3, 4}});
  CHECK(c.arc(6).a == 1);
  CHECK(c.arc(6).b == 3);

  auto e = oriented(two_squares_instance(), two_squares_edges());
  auto ce = contract_to_cycles(e.d);
  CHECK(cycles_of(ce) == std::vector<std::vector<Vertex>>{{0, 1, 3}, {2, 4, 5}});
  CHECK(ce.arc(10).a == 1);
  CHECK(ce.arc(10).b == 3);
  Vertex reversed[] = {2, 1};
  CHECK(contract_to_cycles(e.d, reversed) == ce);
  Vertex wrong[] = {1};
  CHECK_THROWS_AS(contract_to_cycles(e.d, wrong), DomainError);
  auto back = expand_arc(ce, 10);
  CHECK(back.arc(4).a == 2);
  CHECK(back.arc(4).b == 1);
  CHECK(back.arc(6).a == 2);
  CHECK(back.arc(6).b == 3);
}

TEST_CASE("two squares through the whole construction") {
  auto o = oriented(two_squares_instance(), two_squares_edges());
  auto contracted = contract_to_cycles(o.d);
  Trace trace;
  auto k = grow_cactus(contracted, o.tour, &trace, true);
  REQUIRE(k.entries.size() == 1);
  CHECK(k.entries[0].arc == 10);
  CHECK(k.entries[0].added == 2);
  CHECK(k.root_block == 0);
  CHECK(k.exit_points == std::map<int, Vertex>{{1, 2}});
  CHECK_FALSE(check_cactus(k.graph, &k.block_of));
  std::vector<int> root_arcs;
  for (const auto& [id, b] : k.block_of)
    if (b == 0) root_arcs.push_back(id);
  CHECK(root_arcs == std::vector<int>{0, 4, 6, 7});

  auto oc = orient_blocks(k, &trace);
  CHECK(oc.families.cheap == std::vector<int>{9});
  CHECK(oc.families.expensive == std::vector<int>{3});
  CHECK(oc.families.cactus_arcs.at(9) == Edge{2, 4});
  CHECK(oc.families.arc_class.at(9) == std::vector<int>{1, 5});
  auto dir = [&](int id) { return std::pair(oc.graph.arc(id).a, oc.graph.arc(id).b); };
  CHECK(dir(9) == std::pair(2, 4));
  CHECK(dir(2) == std::pair(4, 5));
  CHECK(dir(3) == std::pair(5, 2));
  CHECK(dir(6) == std::pair(2, 3));
  CHECK(dir(7) == std::pair(3, 0));
  CHECK(dir(0) == std::pair(0, 1));
  CHECK(dir(4) == std::pair(1, 2));

  auto fin = finalize_tour(oc, &trace);
  std::vector<Edge> edges;
  for (const auto& e : fin.edges) edges.push_back(e.ends);
  std::sort(edges.begin(), edges.end());
  CHECK(edges == std::vector<Edge>{{0, 1}, {0, 3}, {1, 2}, {2, 5}, {3, 4}, {4, 5}});
  CHECK(fin.order == std::vector<Vertex>{0, 1, 2, 5, 4, 3});
  const int joined = finishing_arc_id(fin.graph, 2);
  CHECK(fin.families.tour_class.at(joined) == std::vector<int>{6, 9});
  CHECK(fin.families.path_class.at(joined) == std::vector<int>{1, 5, 6});

  CHECK(std::find(trace.begin(), trace.end(), "entry-site arc=10 ends=1,3 via=4 block=0") != trace.end());
  CHECK(std::find(trace.begin(), trace.end(), "exit-point block=1 vertex=2") != trace.end());
  CHECK(std::find(trace.begin(), trace.end(), "orient block=1 exit=2 first=9 second=3") != trace.end());
  CHECK(std::find(trace.begin(), trace.end(), "join vertex=2 arcs=6,9 new=16 ends=3,4") != trace.end());
}

TEST_CASE("two squares certificate") {
  auto inst = two_squares_instance();
  auto run = run_pipeline_on(inst, wrap(make_backbone(inst, two_squares_edges(), 8)));
  const auto& cert = run.certificate;
  auto report = verify_certificate(inst, cert);
  CHECK(report.ok());
  int three = 0;
  for (const auto& [f, cls] : cert.families.path_class) three += cls.size() == 3;
  CHECK(three == 1);
  CHECK(cert.cheap_side == std::vector<int>{1, 5});
}

TEST_CASE("single-cycle pipeline") {
  auto inst = skewed_triangle();
  auto run = run_pipeline(inst);
  CHECK(run.cactus.entries.empty());
  CHECK(run.oriented.families.cheap.empty());
  auto cert = run.certificate;
  CHECK(cert.tour_weight == 5);
  CHECK(cert.light_weight == 0);
  cert.opt = exact_tsp(inst).weight;
  CHECK(verify_certificate(inst, cert).ok());
}

TEST_CASE("distinct K4 bound") {
  auto inst = k4_distinct();
  auto cert = approximate_tour(inst);
  CHECK(cert.beta == Rational(5, 3));
  CHECK(cert.ratio_bound() * 10 == Rational(100, 3));
  cert.opt = Rational(10);
  CHECK(cert.tour_weight <= Rational(100, 3));
  CHECK(verify_certificate(inst, cert).ok());
}

TEST_CASE("tampered certificates are rejected") {
  auto inst = two_squares_instance();
  auto base = run_pipeline_on(inst, wrap(make_backbone(inst, two_squares_edges(), 8))).certificate;

  auto c1 = base;
  auto& cls = c1.families.path_class.begin()->second;
  cls.pop_back();
  auto r1 = verify_certificate(inst, c1);
  REQUIRE_FALSE(r1.ok());
  bool partition = false;
  for (const auto& v : r1.violations) partition |= v.check == "path-partition";
  CHECK(partition);

  auto c2 = base;
  c2.tour_weight += 1;
  CHECK_FALSE(verify_certificate(inst, c2).ok());

  auto c3 = base;
  std::swap(c3.order[1], c3.order[2]);
  CHECK_FALSE(verify_certificate(inst, c3).ok());

  auto c4 = base;
  c4.opt = Rational(1);
  auto r4 = verify_certificate(inst, c4);
  REQUIRE_FALSE(r4.ok());
  CHECK(r4.violations.back().check == "approximation");

  auto c5 = base;
  std::swap(c5.families.decisions[0].cheap, c5.families.decisions[0].expensive);
  CHECK_FALSE(verify_certificate(inst, c5).ok());
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(approximate_tour(lower("neg", {{-1}, {1, 1}})), DomainError);
  CHECK_THROWS_AS(approximate_tour(lower("inf", {{0}, {0, 1}})), DomainError);
}

TEST_CASE("random pipelines") {
  std::mt19937_64 rng(17);
  const Rational betas[] = {Rational(1), Rational(3, 2), Rational(2), Rational(3)};
  for (int s = 0; s < 60; ++s) {
    const int n = 3 + s % 9;
    Instance inst = s % 3 == 2 ? gen_euclidean_power(n, Rational(1 + s % 2), s) : gen_uniform_beta(n, betas[s % 4], s);
    PipelineOptions opt;
    opt.check_each_step = true;
    auto run = run_pipeline(inst, opt);
    CHECK(run.cactus.entries.size() + 1 == cycles_of(run.contracted).size());
    CHECK(run.cactus.exit_points.size() == run.cactus.entries.size());
    CHECK_FALSE(run.cactus.exit_points.count(run.cactus.root_block));
    CHECK_FALSE(check_cactus(run.cactus.graph, &run.cactus.block_of));

    std::vector<Vertex> order;
    for (Vertex v = 0; v < n; ++v)
      if (run.tour.outdegree[v] == 2) order.push_back(v);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(order.begin(), order.end(), rng);
      CHECK(contract_to_cycles(BiDigraph::from_tour(inst, run.backbone.backbone, run.tour), order) == run.contracted);
    }

    auto cert = run.certificate;
    cert.opt = exact_tsp(inst).weight;
    auto report = verify_certificate(inst, cert);
    std::string first = report.ok() ? std::string() : report.violations[0].check + ": " + report.violations[0].detail;
    INFO(first);
    CHECK(report.ok());
    if (beta_of(inst).value() == 1) CHECK(cert.tour_weight <= Rational(3, 2) * *cert.opt);
  }
}

TEST_CASE("determinism") {
  auto inst = gen_uniform_beta(11, Rational(2), 99);
  Trace a, b;
  PipelineOptions oa, ob;
  oa.trace = &a;
  ob.trace = &b;
  auto ca = approximate_tour(inst, oa);
  auto cb = approximate_tour(inst, ob);
  CHECK(a == b);
  CHECK(ca.order == cb.order);
  CHECK(ca.families.path_class == cb.families.path_class);
}
