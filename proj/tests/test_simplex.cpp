#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "btsp/error.hpp"
#include "btsp/simplex.hpp"

using namespace btsp;
using namespace btsp::lp;

namespace {

Constraint row(std::vector<Rational> coefs, Sense sense, Rational rhs) {
  Constraint c;
  for (int j = 0; j < static_cast<int>(coefs.size()); ++j)
    if (coefs[j] != 0) c.terms.push_back({j, coefs[j]});
  c.sense = sense;
  c.rhs = rhs;
  return c;
}

// Solves A x = b by Gaussian elimination; nullopt if singular.
std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const int n = static_cast<int>(a.size());
  for (int c = 0; c < n; ++c) {
    int p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational f = a[r][c] / a[c][c];
      for (int k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (int r = 0; r < n; ++r) b[r] /= a[r][r];
  return b;
}

bool feasible(const Problem& p, const std::vector<Rational>& x) {
  for (int j = 0; j < p.num_vars; ++j) {
    if (x[j] < 0) return false;
    if (p.upper[j] && x[j] > *p.upper[j]) return false;
  }
  for (const auto& c : p.rows) {
    Rational lhs = 0;
    for (const auto& [j, a] : c.terms) lhs += a * x[j];
    if (c.sense == Sense::kLessEqual && lhs > c.rhs) return false;
    if (c.sense == Sense::kGreaterEqual && lhs < c.rhs) return false;
    if (c.sense == Sense::kEqual && lhs != c.rhs) return false;
  }
  return true;
}

// Best objective over all vertices of a bounded polytope.
std::optional<Rational> vertex_enumeration(const Problem& p) {
  // Candidate hyperplanes: every row, x_j = 0, x_j = upper_j.
  std::vector<std::pair<std::vector<Rational>, Rational>> planes;
  for (const auto& c : p.rows) {
    std::vector<Rational> a(p.num_vars, Rational(0));
    for (const auto& [j, v] : c.terms) a[j] += v;
    planes.push_back({a, c.rhs});
  }
  for (int j = 0; j < p.num_vars; ++j) {
    std::vector<Rational> a(p.num_vars, Rational(0));
    a[j] = 1;
    planes.push_back({a, Rational(0)});
    if (p.upper[j]) planes.push_back({a, *p.upper[j]});
  }
  const int k = static_cast<int>(planes.size());
  const int n = p.num_vars;
  std::optional<Rational> best;
  std::vector<int> pick(n);
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      std::vector<std::vector<Rational>> a;
      std::vector<Rational> b;
      for (int i : pick) {
        a.push_back(planes[i].first);
        b.push_back(planes[i].second);
      }
      auto x = solve_square(a, b);
      if (!x || !feasible(p, *x)) return;
      Rational obj = 0;
      for (int j = 0; j < n; ++j) obj += p.cost[j] * (*x)[j];
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int i = start; i < k; ++i) {
      pick[depth] = i;
      self(self, i + 1, depth + 1);
    }
  };
  rec(rec, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("textbook maximization as minimization") {
  // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
  Problem p;
  p.num_vars = 2;
  p.cost = {-3, -5};
  p.upper = {std::nullopt, std::nullopt};
  p.rows = {row({1, 0}, Sense::kLessEqual, 4), row({0, 2}, Sense::kLessEqual, 12),
            row({3, 2}, Sense::kLessEqual, 18)};
  auto s = solve(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.objective == -36);
  CHECK(s.x[0] == 2);
  CHECK(s.x[1] == 6);
}

TEST_CASE("equality and greater-equal rows with negative rhs") {
  // min x + y st x + y >= 1, x - y = -1/2  ->  x = 1/4, y = 3/4
  Problem p;
  p.num_vars = 2;
  p.cost = {1, 1};
  p.upper = {std::nullopt, std::nullopt};
  p.rows = {row({1, 1}, Sense::kGreaterEqual, 1), row({1, -1}, Sense::kEqual, Rational(-1, 2))};
  auto s = solve(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.objective == 1);
  CHECK(s.x[0] == Rational(1, 4));
  CHECK(s.x[1] == Rational(3, 4));
}

TEST_CASE("upper bounds and bound flips") {
  // min -x - y - z st x + y + z <= 5/2, all in [0,1]
  Problem p;
  p.num_vars = 3;
  p.cost = {-1, -2, -3};
  p.upper = {Rational(1), Rational(1), Rational(1)};
  p.rows = {row({1, 1, 1}, Sense::kLessEqual, Rational(5, 2))};
  auto s = solve(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.objective == Rational(-11, 2));
  CHECK(s.x[0] == Rational(1, 2));
  CHECK(s.x[1] == 1);
  CHECK(s.x[2] == 1);
}

TEST_CASE("infeasible and unbounded") {
  Problem p;
  p.num_vars = 2;
  p.cost = {1, 1};
  p.upper = {Rational(1), Rational(1)};
  p.rows = {row({1, 1}, Sense::kGreaterEqual, 3)};
  CHECK(solve(p).status == Status::kInfeasible);

  Problem q;
  q.num_vars = 2;
  q.cost = {-1, 0};
  q.upper = {std::nullopt, Rational(1)};
  q.rows = {row({1, -1}, Sense::kGreaterEqual, 0)};
  CHECK(solve(q).status == Status::kUnbounded);
}

TEST_CASE("redundant equality rows") {
  Problem p;
  p.num_vars = 3;
  p.cost = {1, 2, 3};
  p.upper = {Rational(1), Rational(1), Rational(1)};
  p.rows = {row({1, 1, 1}, Sense::kEqual, 2), row({2, 2, 2}, Sense::kEqual, 4)};
  auto s = solve(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.objective == 3);
}

TEST_CASE("bad input") {
  Problem p;
  p.num_vars = 1;
  p.cost = {1};
  p.upper = {Rational(-1)};
  CHECK_THROWS_AS(solve(p), DomainError);
  p.upper = {};
  CHECK_THROWS_AS(solve(p), DomainError);
}

TEST_CASE("random bounded programs agree with vertex enumeration") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    Problem p;
    p.num_vars = 2 + static_cast<int>(rng() % 3);
    for (int j = 0; j < p.num_vars; ++j) {
      p.cost.push_back(coef(rng));
      Rational u(1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2));
      u.canonicalize();
      p.upper.push_back(u);
    }
    const int rows = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < rows; ++i) {
      std::vector<Rational> a;
      for (int j = 0; j < p.num_vars; ++j) a.push_back(coef(rng));
      Sense s = static_cast<Sense>(rng() % 3);
      p.rows.push_back(row(a, s, coef(rng)));
    }
    auto got = solve(p);
    auto want = vertex_enumeration(p);
    if (!want) {
      CHECK(got.status == Status::kInfeasible);
      continue;
    }
    ++checked;
    REQUIRE(got.status == Status::kOptimal);
    CHECK(got.objective == *want);
    CHECK(feasible(p, got.x));
  }
  CHECK(checked > 100);
}
