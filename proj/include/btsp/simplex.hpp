#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "btsp/rational.hpp"

namespace btsp::lp {

enum class Sense { kLessEqual, kEqual, kGreaterEqual };

struct Constraint {
  std::vector<std::pair<int, Rational>> terms;  // (variable, coefficient)
  Sense sense = Sense::kLessEqual;
  Rational rhs;
};

// minimize cost.x subject to rows, 0 <= x_j <= upper_j (nullopt: unbounded above).
struct Problem {
  int num_vars = 0;
  std::vector<Rational> cost;
  std::vector<std::optional<Rational>> upper;
  std::vector<Constraint> rows;
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Solution {
  Status status = Status::kInfeasible;
  std::vector<Rational> x;  // a basic (extreme-point) optimum when kOptimal
  Rational objective;
  long pivots = 0;
};

// Two-phase bounded-variable primal simplex on a dense rational tableau.
// Pricing is Dantzig's rule; after a run of degenerate pivots it switches to
// Bland's smallest-index rule until the objective moves, so it cannot cycle.
Solution solve(const Problem& problem);

}  // namespace btsp::lp
