#pragma once

#include <vector>

namespace tslab::detail {

// Dense two-phase simplex for small programs:
//   minimize c.x  subject to  rows (<=, =, >=) rhs,  x >= 0.
// Bland's rule; intended for a handful of constraints over many columns.
struct LinearProgram {
  enum class Sense { Le, Eq, Ge };
  std::vector<double> c;
  std::vector<std::vector<double>> rows;
  std::vector<Sense> senses;
  std::vector<double> rhs;

  void add(std::vector<double> row, Sense sense, double b) {
    rows.push_back(std::move(row));
    senses.push_back(sense);
    rhs.push_back(b);
  }
};

struct LpSolution {
  enum class Status { Optimal, Infeasible, Unbounded } status = Status::Infeasible;
  double value = 0.0;
  std::vector<double> x;
};

LpSolution solve(const LinearProgram& lp);

}  // namespace tslab::detail
