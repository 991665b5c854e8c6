#include "epictrl/simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "epictrl/error.hpp"

namespace epictrl::lp {

std::size_t Problem::add_variable(double cost, double upper) {
  if (!(upper >= 0.0)) throw ValidationError("variable upper bound must be >= 0");
  costs_.push_back(cost);
  uppers_.push_back(upper);
  columns_.emplace_back();
  return costs_.size() - 1;
}

std::size_t Problem::add_row(double rhs) {
  if (!(rhs >= 0.0)) throw ValidationError("row right-hand side must be >= 0");
  rhs_.push_back(rhs);
  return rhs_.size() - 1;
}

void Problem::add_coefficient(std::size_t row, std::size_t var, double value) {
  if (row >= rhs_.size() || var >= costs_.size())
    throw ValidationError("coefficient index out of range");
  auto& col = columns_[var];
  for (Entry& e : col) {
    if (e.row == row) {
      e.value += value;
      return;
    }
  }
  col.push_back({static_cast<std::uint32_t>(row), value});
}

std::size_t Problem::num_nonzeros() const {
  std::size_t total = 0;
  for (const auto& col : columns_) total += col.size();
  return total;
}

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr double kInf = std::numeric_limits<double>::infinity();

class Solver {
 public:
  Solver(const Problem& problem, const Options& options)
      : p_(problem),
        opt_(options),
        n_(problem.num_variables()),
        m_(problem.num_rows()),
        basis_(m_),
        row_of_(n_ + m_, -1),
        at_upper_(n_ + m_, 0),
        x_basic_(m_),
        binv_(RowMatrix::Identity(m_, m_)) {
    for (std::size_t i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      row_of_[n_ + i] = static_cast<std::ptrdiff_t>(i);
      x_basic_(i) = p_.rhs()[i];
    }
    refactor_interval_ = std::max<std::size_t>(200, m_);
    max_iterations_ = opt_.max_iterations ? opt_.max_iterations : 50 * (n_ + m_) + 10000;
  }

  Result run() {
    Result result;
    bool bland = false;
    std::size_t degenerate = 0;
    std::size_t since_refactor = 0;
    for (;;) {
      if (iterations_ >= max_iterations_) {
        result.status = Status::IterationLimit;
        break;
      }
      if (since_refactor >= refactor_interval_) {
        refactor();
        since_refactor = 0;
      }
      compute_duals();
      auto entering = choose_entering(bland);
      if (!entering) {
        // Confirm optimality against a fresh factorization.
        if (since_refactor == 0) break;
        refactor();
        since_refactor = 0;
        compute_duals();
        entering = choose_entering(bland);
        if (!entering) break;
      }
      const double step = pivot(*entering, bland);
      ++iterations_;
      ++since_refactor;
      if (step <= 1e-12) {
        if (++degenerate > opt_.degenerate_limit) bland = true;
      } else {
        degenerate = 0;
        bland = false;
      }
    }
    refactor();
    result.x = primal_values();
    result.iterations = iterations_;
    for (std::size_t j = 0; j < n_; ++j) {
      result.objective += p_.costs()[j] * result.x[j];
      const double lo_v = -result.x[j];
      const double hi_v = result.x[j] - p_.uppers()[j];
      result.max_bound_violation = std::max({result.max_bound_violation, lo_v, hi_v});
    }
    std::vector<double> lhs(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j)
      for (const Entry& e : p_.column(j)) lhs[e.row] += e.value * result.x[j];
    for (std::size_t i = 0; i < m_; ++i)
      result.max_row_violation = std::max(result.max_row_violation, lhs[i] - p_.rhs()[i]);
    return result;
  }

 private:
  struct Entering {
    std::size_t var;
    double reduced_cost;
  };

  double cost(std::size_t var) const { return var < n_ ? p_.costs()[var] : 0.0; }
  double upper(std::size_t var) const { return var < n_ ? p_.uppers()[var] : kInf; }

  double nonbasic_value(std::size_t var) const {
    return at_upper_[var] ? upper(var) : 0.0;
  }

  void compute_duals() {
    Eigen::VectorXd cb(m_);
    for (std::size_t i = 0; i < m_; ++i) cb(i) = cost(basis_[i]);
    duals_.noalias() = binv_.transpose() * cb;
  }

  double reduced_cost(std::size_t var) const {
    if (var >= n_) return -duals_(var - n_);
    double d = p_.costs()[var];
    for (const Entry& e : p_.column(var)) d -= duals_(e.row) * e.value;
    return d;
  }

  std::optional<Entering> choose_entering(bool bland) const {
    std::optional<Entering> best;
    double best_score = 0.0;
    for (std::size_t var = 0; var < n_ + m_; ++var) {
      if (row_of_[var] >= 0) continue;
      const double d = reduced_cost(var);
      const bool improves = at_upper_[var] ? d > opt_.optimality_tol
                                           : (d < -opt_.optimality_tol && upper(var) > 0.0);
      if (!improves) continue;
      if (bland) return Entering{var, d};
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = Entering{var, d};
      }
    }
    return best;
  }

  Eigen::VectorXd column_times_binv(std::size_t var) const {
    if (var >= n_) return binv_.col(var - n_);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_);
    for (const Entry& e : p_.column(var)) alpha += e.value * binv_.col(e.row);
    return alpha;
  }

  // Returns the step length taken.
  double pivot(const Entering& in, bool bland) {
    const std::size_t q = in.var;
    const double dir = at_upper_[q] ? -1.0 : 1.0;
    const Eigen::VectorXd alpha = column_times_binv(q);

    double step = upper(q);
    std::ptrdiff_t leave_row = -1;
    bool leave_to_upper = false;
    double leave_pivot = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double delta = dir * alpha(i);
      if (std::abs(delta) <= opt_.pivot_tol) continue;
      double limit;
      bool to_upper;
      if (delta > 0.0) {
        limit = std::max(x_basic_(i), 0.0) / delta;
        to_upper = false;
      } else {
        const double ub = upper(basis_[i]);
        if (std::isinf(ub)) continue;
        limit = std::max(ub - x_basic_(i), 0.0) / -delta;
        to_upper = true;
      }
      bool take = false;
      if (limit < step - 1e-12) {
        take = true;
      } else if (leave_row >= 0 && limit <= step + 1e-12) {
        take = bland ? basis_[i] < basis_[static_cast<std::size_t>(leave_row)]
                     : std::abs(delta) > leave_pivot;
      }
      if (take) {
        step = std::min(step, limit);
        leave_row = static_cast<std::ptrdiff_t>(i);
        leave_to_upper = to_upper;
        leave_pivot = std::abs(delta);
      }
    }

    if (leave_row < 0) {
      if (std::isinf(step)) throw SolverError("LP is unbounded");
      // Bound flip: the entering variable crosses to its other bound.
      x_basic_ -= dir * step * alpha;
      at_upper_[q] = at_upper_[q] ? 0 : 1;
      return step;
    }

    const auto r = static_cast<std::size_t>(leave_row);
    const double entering_value = at_upper_[q] ? upper(q) - step : step;
    x_basic_ -= dir * step * alpha;
    const std::size_t out = basis_[r];
    row_of_[out] = -1;
    at_upper_[out] = leave_to_upper ? 1 : 0;
    basis_[r] = q;
    row_of_[q] = static_cast<std::ptrdiff_t>(r);
    at_upper_[q] = 0;
    x_basic_(r) = entering_value;

    const double pivot_value = alpha(r);
    Eigen::RowVectorXd pivot_row = binv_.row(r) / pivot_value;
    binv_.noalias() -= alpha * pivot_row;
    binv_.row(r) = pivot_row;
    return step;
  }

  void refactor() {
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(m_, m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t var = basis_[i];
      if (var >= n_) {
        basis_matrix(var - n_, i) = 1.0;
      } else {
        for (const Entry& e : p_.column(var)) basis_matrix(e.row, i) = e.value;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis_matrix);
    binv_ = lu.inverse();

    Eigen::VectorXd residual(m_);
    for (std::size_t i = 0; i < m_; ++i) residual(i) = p_.rhs()[i];
    for (std::size_t var = 0; var < n_; ++var) {
      if (row_of_[var] >= 0 || !at_upper_[var]) continue;
      for (const Entry& e : p_.column(var)) residual(e.row) -= e.value * upper(var);
    }
    x_basic_.noalias() = binv_ * residual;
  }

  std::vector<double> primal_values() const {
    std::vector<double> x(n_);
    for (std::size_t var = 0; var < n_; ++var) {
      const double v = row_of_[var] >= 0 ? x_basic_(row_of_[var]) : nonbasic_value(var);
      // Snap round-off onto the box.
      x[var] = std::clamp(v, 0.0, upper(var));
      if (std::abs(x[var] - v) > opt_.feasibility_tol * 1e3) x[var] = v;
    }
    return x;
  }

  const Problem& p_;
  Options opt_;
  std::size_t n_;
  std::size_t m_;
  std::vector<std::size_t> basis_;
  std::vector<std::ptrdiff_t> row_of_;
  std::vector<std::uint8_t> at_upper_;
  Eigen::VectorXd x_basic_;
  Eigen::VectorXd duals_;
  RowMatrix binv_;
  std::size_t iterations_ = 0;
  std::size_t refactor_interval_ = 200;
  std::size_t max_iterations_ = 0;
};

}  // namespace

Result solve(const Problem& problem, const Options& options) {
  return Solver(problem, options).run();
}

}  // namespace epictrl::lp
