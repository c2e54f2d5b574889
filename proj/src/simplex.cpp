#include "btsp/simplex.hpp"

#include <cassert>

#include "btsp/error.hpp"

namespace btsp::lp {
namespace {

constexpr int kDegenerateStreakBeforeBland = 30;

class Tableau {
 public:
  explicit Tableau(const Problem& p);

  // Runs the simplex method on the current cost row. Returns false if unbounded.
  bool optimize();

  void set_phase_one_costs();
  bool drop_artificials();  // false if an artificial stays positive
  void set_costs(const std::vector<Rational>& cost);

  Rational value_of(int col) const {
    if (row_of_[col] >= 0) return val_[row_of_[col]];
    return at_upper_[col] ? *upper_[col] : Rational(0);
  }
  Rational artificial_sum() const {
    Rational s = 0;
    for (int j = first_art_; j < ncols_; ++j) s += value_of(j);
    return s;
  }
  long pivots() const { return pivots_; }

 private:
  void pivot(int r, int j);
  void price_from_costs(const std::vector<Rational>& cost);

  int m_ = 0;
  int ncols_ = 0;
  int first_art_ = 0;
  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> val_;
  std::vector<Rational> d_;  // reduced costs
  std::vector<std::optional<Rational>> upper_;
  std::vector<bool> at_upper_;
  std::vector<bool> active_;  // artificial columns are deactivated after phase one
  std::vector<int> basis_;
  std::vector<int> row_of_;
  long pivots_ = 0;
};

Tableau::Tableau(const Problem& p) {
  m_ = static_cast<int>(p.rows.size());
  int nslack = 0;
  for (const auto& row : p.rows)
    if (row.sense != Sense::kEqual) ++nslack;
  // Decide per row whether its slack can start basic (needs +1 and rhs >= 0).
  std::vector<int> sign(m_, 1);
  std::vector<bool> needs_art(m_, false);
  for (int i = 0; i < m_; ++i) {
    const auto& row = p.rows[i];
    if (row.rhs < 0) sign[i] = -1;
    int slack_sign = row.sense == Sense::kLessEqual ? 1 : row.sense == Sense::kGreaterEqual ? -1 : 0;
    needs_art[i] = slack_sign * sign[i] != 1;
  }
  int nart = 0;
  for (bool a : needs_art) nart += a;
  first_art_ = p.num_vars + nslack;
  ncols_ = first_art_ + nart;
  t_.assign(m_, std::vector<Rational>(ncols_, Rational(0)));
  val_.assign(m_, Rational(0));
  upper_.assign(ncols_, std::nullopt);
  for (int j = 0; j < p.num_vars; ++j) upper_[j] = p.upper[j];
  at_upper_.assign(ncols_, false);
  active_.assign(ncols_, true);
  basis_.assign(m_, -1);
  row_of_.assign(ncols_, -1);
  int slack = p.num_vars;
  int art = first_art_;
  for (int i = 0; i < m_; ++i) {
    const auto& row = p.rows[i];
    for (const auto& [var, coef] : row.terms) t_[i][var] += sign[i] * coef;
    val_[i] = sign[i] * row.rhs;
    if (row.sense != Sense::kEqual) {
      t_[i][slack] = (row.sense == Sense::kLessEqual ? 1 : -1) * sign[i];
      if (!needs_art[i]) {
        basis_[i] = slack;
        row_of_[slack] = i;
      }
      ++slack;
    }
    if (needs_art[i]) {
      t_[i][art] = 1;
      basis_[i] = art;
      row_of_[art] = i;
      ++art;
    }
  }
  d_.assign(ncols_, Rational(0));
}

void Tableau::price_from_costs(const std::vector<Rational>& cost) {
  for (int j = 0; j < ncols_; ++j) d_[j] = cost[j];
  for (int i = 0; i < m_; ++i) {
    const Rational& cb = cost[basis_[i]];
    if (cb == 0) continue;
    for (int j = 0; j < ncols_; ++j)
      if (t_[i][j] != 0) d_[j] -= cb * t_[i][j];
  }
}

void Tableau::set_phase_one_costs() {
  std::vector<Rational> cost(ncols_, Rational(0));
  for (int j = first_art_; j < ncols_; ++j) cost[j] = 1;
  price_from_costs(cost);
}

void Tableau::set_costs(const std::vector<Rational>& cost) {
  std::vector<Rational> full(ncols_, Rational(0));
  for (std::size_t j = 0; j < cost.size(); ++j) full[j] = cost[j];
  price_from_costs(full);
}

bool Tableau::drop_artificials() {
  if (artificial_sum() != 0) return false;
  // Pivot basic artificials (all at zero) out where possible; rows where that is
  // impossible are redundant and are removed.
  for (int i = m_ - 1; i >= 0; --i) {
    if (basis_[i] < first_art_) continue;
    int col = -1;
    for (int j = 0; j < first_art_; ++j) {
      if (row_of_[j] < 0 && t_[i][j] != 0) {
        col = j;
        break;
      }
    }
    if (col >= 0) {
      // Degenerate exchange: the entering column keeps its nonbasic value.
      Rational entering = value_of(col);
      pivot(i, col);
      val_[i] = entering;
      continue;
    }
    row_of_[basis_[i]] = -1;
    t_.erase(t_.begin() + i);
    val_.erase(val_.begin() + i);
    basis_.erase(basis_.begin() + i);
    --m_;
    for (int r = 0; r < m_; ++r) row_of_[basis_[r]] = r;
  }
  for (int j = first_art_; j < ncols_; ++j) active_[j] = false;
  return true;
}

void Tableau::pivot(int r, int j) {
  const Rational p = t_[r][j];
  std::vector<int> nz;
  for (int c = 0; c < ncols_; ++c) {
    if (t_[r][c] != 0) {
      t_[r][c] /= p;
      nz.push_back(c);
    }
  }
  Rational f;
  for (int i = 0; i < m_; ++i) {
    if (i == r || t_[i][j] == 0) continue;
    f = t_[i][j];
    for (int c : nz) t_[i][c] -= f * t_[r][c];
  }
  if (d_[j] != 0) {
    f = d_[j];
    for (int c : nz) d_[c] -= f * t_[r][c];
  }
  row_of_[basis_[r]] = -1;
  basis_[r] = j;
  row_of_[j] = r;
  ++pivots_;
}

bool Tableau::optimize() {
  int degenerate_streak = 0;
  while (true) {
    const bool bland = degenerate_streak >= kDegenerateStreakBeforeBland;
    int enter = -1;
    Rational best;
    for (int j = 0; j < ncols_; ++j) {
      if (!active_[j] || row_of_[j] >= 0) continue;
      if (upper_[j] && *upper_[j] == 0) continue;
      bool eligible = at_upper_[j] ? d_[j] > 0 : d_[j] < 0;
      if (!eligible) continue;
      if (bland) {
        enter = j;
        break;
      }
      Rational score = abs(d_[j]);
      if (enter < 0 || score > best) {
        enter = j;
        best = score;
      }
    }
    if (enter < 0) return true;
    const int dir = at_upper_[enter] ? -1 : 1;

    // Ratio test; ties go to the smallest basic column index.
    int leave = -1;
    bool leave_to_upper = false;
    Rational theta;
    for (int i = 0; i < m_; ++i) {
      const Rational& a = t_[i][enter];
      if (a == 0) continue;
      Rational ratio;
      bool to_upper;
      if ((dir > 0) == (a > 0)) {
        ratio = val_[i] / abs(a);
        to_upper = false;
      } else {
        const auto& ub = upper_[basis_[i]];
        if (!ub) continue;
        ratio = (*ub - val_[i]) / abs(a);
        to_upper = true;
      }
      if (leave < 0 || ratio < theta || (ratio == theta && basis_[i] < basis_[leave])) {
        leave = i;
        theta = ratio;
        leave_to_upper = to_upper;
      }
    }
    const auto& own = upper_[enter];
    if (own && (leave < 0 || *own <= theta)) {
      // Bound flip: the entering column moves to its other bound, basis unchanged.
      const Rational step = *own;
      for (int i = 0; i < m_; ++i)
        if (t_[i][enter] != 0) val_[i] -= dir * step * t_[i][enter];
      at_upper_[enter] = !at_upper_[enter];
      degenerate_streak = step == 0 ? degenerate_streak + 1 : 0;
      continue;
    }
    if (leave < 0) return false;
    const Rational entering_value = (at_upper_[enter] ? *own : Rational(0)) + dir * theta;
    if (theta != 0) {
      for (int i = 0; i < m_; ++i)
        if (t_[i][enter] != 0) val_[i] -= dir * theta * t_[i][enter];
    }
    const int leaving_col = basis_[leave];
    pivot(leave, enter);
    val_[leave] = entering_value;
    at_upper_[enter] = false;
    at_upper_[leaving_col] = leave_to_upper;
    degenerate_streak = theta == 0 ? degenerate_streak + 1 : 0;
  }
}

}  // namespace

Solution solve(const Problem& problem) {
  if (static_cast<int>(problem.cost.size()) != problem.num_vars ||
      static_cast<int>(problem.upper.size()) != problem.num_vars) {
    throw DomainError("lp: cost/upper vectors do not match num_vars");
  }
  for (const auto& u : problem.upper)
    if (u && *u < 0) throw DomainError("lp: negative upper bound");
  Tableau tab(problem);
  Solution out;
  tab.set_phase_one_costs();
  tab.optimize();
  if (!tab.drop_artificials()) {
    out.status = Status::kInfeasible;
    out.pivots = tab.pivots();
    return out;
  }
  tab.set_costs(problem.cost);
  if (!tab.optimize()) {
    out.status = Status::kUnbounded;
    out.pivots = tab.pivots();
    return out;
  }
  out.status = Status::kOptimal;
  out.x.resize(problem.num_vars);
  out.objective = 0;
  for (int j = 0; j < problem.num_vars; ++j) {
    out.x[j] = tab.value_of(j);
    out.objective += problem.cost[j] * out.x[j];
  }
  out.pivots = tab.pivots();
  return out;
}

}  // namespace btsp::lp
