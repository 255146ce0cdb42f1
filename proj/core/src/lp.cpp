#include "lp.hpp"

#include <cmath>
#include <limits>

namespace tslab::detail {

namespace {

constexpr double kEps = 1e-11;

// Tableau with an objective row at index m; column n is the right-hand side.
struct Tableau {
  std::size_t m = 0, n = 0;
  std::vector<std::vector<double>> t;
  std::vector<std::size_t> basis;

  void pivot(std::size_t r, std::size_t col) {
    const double inv = 1.0 / t[r][col];
    for (auto& x : t[r]) x *= inv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r) continue;
      const double f = t[i][col];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n; ++j) t[i][j] -= f * t[r][j];
    }
    basis[r] = col;
  }

  // Minimizes the objective row over columns < limit; false when unbounded.
  bool optimize(std::size_t limit) {
    while (true) {
      std::size_t enter = limit;
      for (std::size_t j = 0; j < limit; ++j) {
        if (t[m][j] < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter == limit) return true;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) {
        if (t[i][enter] > kEps) {
          const double ratio = t[i][n] / t[i][enter];
          if (ratio < best - kEps || (ratio <= best + kEps && leave < m && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpSolution solve(const LinearProgram& lp) {
  const std::size_t m = lp.rows.size(), nx = lp.c.size();
  std::size_t slacks = 0;
  for (auto s : lp.senses) slacks += s != LinearProgram::Sense::Eq;
  // Columns: x, slacks, artificials.
  const std::size_t ns = nx + slacks, n = ns + m;
  Tableau tab;
  tab.m = m;
  tab.n = n;
  tab.t.assign(m + 1, std::vector<double>(n + 1, 0.0));
  tab.basis.assign(m, 0);
  std::size_t s = nx;
  for (std::size_t i = 0; i < m; ++i) {
    double sign = lp.rhs[i] < 0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nx; ++j) tab.t[i][j] = sign * lp.rows[i][j];
    if (lp.senses[i] == LinearProgram::Sense::Le) tab.t[i][s++] = sign;
    if (lp.senses[i] == LinearProgram::Sense::Ge) tab.t[i][s++] = -sign;
    tab.t[i][ns + i] = 1.0;
    tab.t[i][n] = sign * lp.rhs[i];
    tab.basis[i] = ns + i;
  }
  // Phase one: minimize the sum of artificials.
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j <= n; ++j)
      if (j < ns || j == n) tab.t[m][j] -= tab.t[i][j];
  tab.optimize(n);
  LpSolution out;
  // Read infeasibility off the basic artificials; the objective row drifts.
  double residual = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis[i] >= ns) residual += std::abs(tab.t[i][n]);
  if (residual > 1e-9) return out;  // infeasible
  // Drive remaining artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (tab.basis[i] < ns) continue;
    for (std::size_t j = 0; j < ns; ++j) {
      if (std::abs(tab.t[i][j]) > 1e-9) {
        tab.pivot(i, j);
        break;
      }
    }
  }
  // Phase two over x and slacks only.
  std::fill(tab.t[m].begin(), tab.t[m].end(), 0.0);
  for (std::size_t j = 0; j < nx; ++j) tab.t[m][j] = lp.c[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis[i];
    if (b < nx && lp.c[b] != 0.0) {
      const double f = tab.t[m][b];
      for (std::size_t j = 0; j <= n; ++j) tab.t[m][j] -= f * tab.t[i][j];
    }
  }
  // Artificial columns stay out of phase two.
  for (std::size_t i = 0; i <= m; ++i)
    for (std::size_t j = ns; j < n; ++j)
      if (i == m || tab.basis[i] != j) tab.t[i][j] = 0.0;
  if (!tab.optimize(ns)) {
    out.status = LpSolution::Status::Unbounded;
    return out;
  }
  out.status = LpSolution::Status::Optimal;
  out.x.assign(nx, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis[i] < nx) out.x[tab.basis[i]] = tab.t[i][n];
  out.value = 0.0;
  for (std::size_t j = 0; j < nx; ++j) out.value += lp.c[j] * out.x[j];
  return out;
}

}  // namespace tslab::detail
