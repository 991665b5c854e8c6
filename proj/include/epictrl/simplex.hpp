#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace epictrl::lp {

struct Entry {
  std::uint32_t row;
  double value;
};

// min c'x  subject to  A x <= b,  0 <= x <= upper,  with b >= 0.
//
// Every LP built in this project has that shape (propagation rows with
// right-hand side 0 plus one budget row), so the origin is feasible and a
// primal simplex can start from the all-slack basis without a phase one.
class Problem {
 public:
  std::size_t add_variable(double cost, double upper);
  std::size_t add_row(double rhs);
  // Adds `value` to A(row, var).
  void add_coefficient(std::size_t row, std::size_t var, double value);

  std::size_t num_variables() const { return costs_.size(); }
  std::size_t num_rows() const { return rhs_.size(); }
  std::size_t num_nonzeros() const;

  const std::vector<double>& costs() const { return costs_; }
  const std::vector<double>& uppers() const { return uppers_; }
  const std::vector<double>& rhs() const { return rhs_; }
  const std::vector<Entry>& column(std::size_t var) const { return columns_[var]; }

 private:
  std::vector<double> costs_;
  std::vector<double> uppers_;
  std::vector<double> rhs_;
  std::vector<std::vector<Entry>> columns_;
};

enum class Status { Optimal, IterationLimit };

struct Options {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  std::size_t max_iterations = 0;  // 0 picks a size-based default
  // Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_limit = 50;
};

struct Result {
  Status status = Status::Optimal;
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  double max_row_violation = 0.0;     // max(A x - b, 0)
  double max_bound_violation = 0.0;
};

// Bounded-variable revised primal simplex with an explicit basis inverse,
// refactored periodically. Deterministic for a fixed problem.
Result solve(const Problem& problem, const Options& options = {});

}  // namespace epictrl::lp
