#include "stitforest/lp.hpp"

#include <cmath>
#include <cstddef>
#include <limits>

namespace stitforest {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kFeasTol = 1e-9;

// Dense simplex tableau over columns [structural | slack | artificial | rhs].
// Free variables are split as x = xp - xm, so structural count is 2*dim.
struct Tableau {
  std::size_t rows, cols;  // cols excludes the rhs column
  std::vector<double> t;   // (rows+1) x (cols+1); last row is the objective
  std::vector<std::size_t> basis;

  Tableau(std::size_t r, std::size_t c) : rows(r), cols(c), t((r + 1) * (c + 1), 0.0), basis(r, 0) {}

  double& at(std::size_t i, std::size_t j) { return t[i * (cols + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return t[i * (cols + 1) + j]; }
  double& rhs(std::size_t i) { return t[i * (cols + 1) + cols]; }
  double rhs(std::size_t i) const { return t[i * (cols + 1) + cols]; }
  double& obj(std::size_t j) { return t[rows * (cols + 1) + j]; }
  double obj(std::size_t j) const { return t[rows * (cols + 1) + j]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t j = 0; j <= cols; ++j) at(pr, j) /= p;
    for (std::size_t i = 0; i <= rows; ++i) {
      if (i == pr) continue;
      const double f = at(i, pc);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) at(i, j) -= f * at(pr, j);
      at(i, pc) = 0.0;
    }
    if (pr < rows) basis[pr] = pc;
  }

  // Bland's rule: entering = lowest eligible column index, leaving = lowest
  // basis index among the minimum-ratio rows.  Returns false on unbounded.
  bool iterate(std::size_t usable_cols) {
    const std::size_t max_iter = 10000 + 100 * (rows + cols);
    for (std::size_t it = 0; it <= max_iter; ++it) {
      std::size_t enter = usable_cols;
      for (std::size_t j = 0; j < usable_cols; ++j) {
        if (obj(j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (enter == usable_cols) return true;  // optimal
      std::size_t leave = rows;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best_ratio - kPivotTol ||
            (ratio < best_ratio + kPivotTol && (leave == rows || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave == rows) return false;  // unbounded
      pivot(leave, enter);
    }
    throw Error("simplex iteration limit exceeded");
  }
};

}  // namespace

LpResult lp_maximize(const Vec& c, const Mat& G, const Vec& h) {
  if (G.cols != c.size() || G.rows != h.size())
    throw DimensionMismatch("lp_maximize: inconsistent dimensions");
  const std::size_t m = G.rows;
  const std::size_t d = G.cols;
  const std::size_t n_struct = 2 * d;       // x = xp - xm
  const std::size_t n_slack = m;
  // Artificials only for rows whose rhs is negative after slack insertion.
  std::size_t n_art = 0;
  for (std::size_t i = 0; i < m; ++i)
    if (h[i] < 0.0) ++n_art;

  Tableau tab(m, n_struct + n_slack + n_art);
  const std::size_t art0 = n_struct + n_slack;

  std::size_t art = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double sign = h[i] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      tab.at(i, j) = sign * G.at(i, j);
      tab.at(i, d + j) = -sign * G.at(i, j);
    }
    tab.at(i, n_struct + i) = sign;
    tab.rhs(i) = sign * h[i];
    if (sign < 0.0) {
      tab.at(i, art0 + art) = 1.0;
      tab.basis[i] = art0 + art;
      ++art;
    } else {
      tab.basis[i] = n_struct + i;
    }
  }

  LpResult res;
  if (n_art > 0) {
    // Phase 1: minimize the artificial sum.
    for (std::size_t j = 0; j < n_art; ++j) tab.obj(art0 + j) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis[i] >= art0) {
        for (std::size_t j = 0; j <= tab.cols; ++j)
          tab.t[m * (tab.cols + 1) + j] -= tab.at(i, j);
      }
    }
    tab.iterate(tab.cols);  // bounded below by zero, cannot be unbounded
    const double art_sum = -tab.t[m * (tab.cols + 1) + tab.cols];
    if (art_sum > kFeasTol) {
      res.status = LpStatus::infeasible;
      return res;
    }
    // Drive any residual basic artificial out or drop its (redundant) row.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis[i] < art0) continue;
      std::size_t pc = art0;
      for (std::size_t j = 0; j < art0; ++j) {
        if (std::abs(tab.at(i, j)) > kPivotTol) {
          pc = j;
          break;
        }
      }
      if (pc < art0) {
        tab.pivot(i, pc);
      } else {
        for (std::size_t j = 0; j <= tab.cols; ++j) tab.at(i, j) = 0.0;
        tab.rhs(i) = 0.0;
      }
    }
  }

  // Phase 2: minimize -<c, x>; artificial columns are excluded from entering.
  for (std::size_t j = 0; j <= tab.cols; ++j) tab.obj(j) = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    tab.obj(j) = -c[j];
    tab.obj(d + j) = c[j];
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis[i];
    if (b >= art0) continue;
    const double cost = tab.obj(b);
    if (cost == 0.0) continue;
    for (std::size_t j = 0; j <= tab.cols; ++j)
      tab.t[m * (tab.cols + 1) + j] -= cost * tab.at(i, j);
  }
  if (!tab.iterate(art0)) {
    res.status = LpStatus::unbounded;
    return res;
  }

  res.status = LpStatus::optimal;
  res.x.assign(d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis[i];
    if (b < d)
      res.x[b] += tab.rhs(i);
    else if (b < 2 * d)
      res.x[b - d] -= tab.rhs(i);
  }
  res.value = dot(c, res.x);
  return res;
}

}  // namespace stitforest
