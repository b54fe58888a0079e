#include <algorithm>
#include <cmath>

#include "stochmatch/error.hpp"
#include "stochmatch/lp.hpp"

namespace stochmatch {

std::size_t LinearProgram::add_variable(std::string name, double lower, double upper,
                                        double objective) {
  variables.push_back({std::move(name), lower, upper, objective});
  return variables.size() - 1;
}

void LinearProgram::add_constraint(std::string name,
                                   std::vector<std::pair<std::size_t, double>> terms,
                                   double rhs) {
  constraints.push_back({std::move(name), std::move(terms), rhs});
}

double max_violation(const LinearProgram& lp, std::span<const double> values) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.variables.size(); ++j) {
    worst = std::max(worst, lp.variables[j].lower - values[j]);
    worst = std::max(worst, values[j] - lp.variables[j].upper);
  }
  for (const auto& row : lp.constraints) {
    double lhs = 0.0;
    for (auto [j, a] : row.terms) lhs += a * values[j];
    worst = std::max(worst, lhs - row.rhs);
  }
  return worst;
}

namespace {

constexpr double kCostEps = 1e-10;
constexpr double kPivotEps = 1e-9;
constexpr double kSnapEps = 1e-12;
constexpr std::size_t kMaxPivots = 200000;

// Tableau over y = x - lower >= 0. Each row reads sum_j a_ij y_j = rhs_i
// with one basic column per row.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : cols_(cols), a_(rows, std::vector<double>(cols, 0.0)), rhs_(rows, 0.0),
        basis_(rows, 0), cost_(cols, 0.0) {}

  std::size_t rows() const { return a_.size(); }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t i, std::size_t j) { return a_[i][j]; }
  double& rhs(std::size_t i) { return rhs_[i]; }
  std::size_t& basis(std::size_t i) { return basis_[i]; }

  void erase_row(std::size_t i) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(i));
    rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(i));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
  }

  // Sets reduced costs for maximizing sum c_j y_j under the current basis.
  void price(const std::vector<double>& c) {
    cost_ = c;
    value_ = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) cost_[j] -= cb * a_[i][j];
      value_ += cb * rhs_[i];
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const double piv = a_[r][c];
    for (auto& v : a_[r]) v /= piv;
    rhs_[r] /= piv;
    a_[r][c] = 1.0;
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i == r) continue;
      const double f = a_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols_; ++j) a_[i][j] -= f * a_[r][j];
      a_[i][c] = 0.0;
      rhs_[i] -= f * rhs_[r];
    }
    const double f = cost_[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j < cols_; ++j) cost_[j] -= f * a_[r][j];
      cost_[c] = 0.0;
      value_ += f * rhs_[r];
    }
    basis_[r] = c;
  }

  // Bland's rule. Columns at or beyond `allowed` never enter.
  // Returns false at optimality; throws on unboundedness.
  bool step(std::size_t allowed) {
    std::size_t enter = cols_;
    for (std::size_t j = 0; j < allowed; ++j) {
      if (cost_[j] > kCostEps) {
        enter = j;
        break;
      }
    }
    if (enter == cols_) return false;
    std::size_t leave = rows();
    double best = 0.0;
    for (std::size_t i = 0; i < rows(); ++i) {
      if (a_[i][enter] <= kPivotEps) continue;
      const double ratio = rhs_[i] / a_[i][enter];
      if (leave == rows() || ratio < best - 1e-12 ||
          (ratio <= best + 1e-12 && basis_[i] < basis_[leave])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave == rows()) throw Error(ErrorCode::unbounded, "linear program is unbounded");
    pivot(leave, enter);
    return true;
  }

  void optimize(std::size_t allowed) {
    std::size_t pivots = 0;
    while (step(allowed)) {
      if (++pivots > kMaxPivots) throw Error(ErrorCode::internal, "simplex pivot limit reached");
    }
  }

  double value() const { return value_; }

 private:
  std::size_t cols_;
  std::vector<std::vector<double>> a_;
  std::vector<double> rhs_;
  std::vector<std::size_t> basis_;
  std::vector<double> cost_;
  double value_ = 0.0;
};

struct Row {
  std::vector<std::pair<std::size_t, double>> terms;
  double rhs;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.variables.size();
  for (const auto& v : lp.variables) {
    if (!std::isfinite(v.lower) || std::isnan(v.upper) || !std::isfinite(v.objective))
      throw Error(ErrorCode::invalid_argument, "variable '" + v.name + "' has invalid data");
    if (v.lower > v.upper)
      throw Error(ErrorCode::infeasible, "variable '" + v.name + "' has lower > upper");
  }

  std::vector<Row> rows;
  for (const auto& c : lp.constraints) {
    if (!std::isfinite(c.rhs))
      throw Error(ErrorCode::invalid_argument, "constraint '" + c.name + "' has non-finite rhs");
    double shift = 0.0;
    for (auto [j, a] : c.terms) {
      if (j >= n || !std::isfinite(a))
        throw Error(ErrorCode::invalid_argument, "constraint '" + c.name + "' has invalid term");
      shift += a * lp.variables[j].lower;
    }
    rows.push_back({c.terms, c.rhs - shift});
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = lp.variables[j];
    if (std::isfinite(v.upper)) rows.push_back({{{j, 1.0}}, v.upper - v.lower});
  }

  const std::size_t m = rows.size();
  std::size_t artificial = 0;
  for (const auto& r : rows)
    if (r.rhs < 0.0) ++artificial;

  // Columns: structural [0,n), slack [n,n+m), artificial [n+m, n+m+artificial).
  const std::size_t first_art = n + m;
  Tableau t(m, n + m + artificial);
  std::size_t next_art = first_art;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = rows[i].rhs < 0.0 ? -1.0 : 1.0;
    for (auto [j, a] : rows[i].terms) t.at(i, j) += sign * a;
    t.at(i, n + i) = sign;
    t.rhs(i) = sign * rows[i].rhs;
    if (sign < 0.0) {
      t.at(i, next_art) = 1.0;
      t.basis(i) = next_art++;
    } else {
      t.basis(i) = n + i;
    }
  }

  if (artificial > 0) {
    std::vector<double> phase1(t.cols(), 0.0);
    for (std::size_t j = first_art; j < t.cols(); ++j) phase1[j] = -1.0;
    t.price(phase1);
    t.optimize(first_art);
    double scale = 1.0;
    for (const auto& r : rows) scale = std::max(scale, std::abs(r.rhs));
    if (t.value() < -kFeasibilityTolerance * scale)
      throw Error(ErrorCode::infeasible, "linear program is infeasible");
    // Drive remaining zero-level artificials out of the basis.
    for (std::size_t i = 0; i < t.rows();) {
      if (t.basis(i) < first_art) {
        ++i;
        continue;
      }
      std::size_t col = first_art;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (std::abs(t.at(i, j)) > kPivotEps) {
          col = j;
          break;
        }
      }
      if (col == first_art) {
        t.erase_row(i);  // redundant row
      } else {
        t.pivot(i, col);
        ++i;
      }
    }
  }

  std::vector<double> phase2(t.cols(), 0.0);
  for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.variables[j].objective;
  t.price(phase2);
  t.optimize(first_art);

  LpSolution sol;
  sol.values.assign(n, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i)
    if (t.basis(i) < n) sol.values[t.basis(i)] = t.rhs(i);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& v = lp.variables[j];
    double x = std::clamp(sol.values[j] + v.lower, v.lower, v.upper);
    // Snap pivoting residue onto the nearest bound.
    if (std::abs(x - v.lower) < kSnapEps) x = v.lower;
    if (std::abs(v.upper - x) < kSnapEps) x = v.upper;
    sol.values[j] = x;
    sol.objective_value += v.objective * sol.values[j];
  }
  return sol;
}

}  // namespace stochmatch
