#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "stitforest/errors.hpp"

namespace stitforest {

using Vec = std::vector<double>;

// Row-major dense matrix; dimensions here are tiny (d, m <= a few dozen).
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void scale(Vec& a, double c) {
  for (double& x : a) x *= c;
}

// y += c * x
inline void axpy(double c, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline Vec scaled(std::span<const double> a, double c) {
  Vec out(a.begin(), a.end());
  scale(out, c);
  return out;
}

inline Vec normalized(std::span<const double> a) {
  double n = norm2(a);
  if (!(n > 0.0)) throw DegenerateZonotope("cannot normalize a zero vector");
  return scaled(a, 1.0 / n);
}

// rows(B) must be orthonormal; returns B * x (coordinates of x in the basis).
inline Vec basis_coords(const Mat& basis, std::span<const double> x) {
  if (basis.cols != x.size()) throw DimensionMismatch("basis/vector dims differ");
  Vec out(basis.rows, 0.0);
  for (std::size_t i = 0; i < basis.rows; ++i)
    out[i] = dot(std::span<const double>(basis.data).subspan(i * basis.cols, basis.cols), x);
  return out;
}

// Projection of x onto the row span of an orthonormal basis.
inline Vec project_onto_rows(const Mat& basis, std::span<const double> x) {
  Vec coords = basis_coords(basis, x);
  Vec out(x.size(), 0.0);
  for (std::size_t i = 0; i < basis.rows; ++i)
    axpy(coords[i], std::span<const double>(basis.data).subspan(i * basis.cols, basis.cols), out);
  return out;
}

// Singular values of M, descending.  One-sided Jacobi on the columns of the
// taller orientation: rotations orthogonalize column pairs, singular values
// are the final column norms.  Relative accuracy ~1e-14 on these sizes.
inline Vec singular_values(const Mat& m_in) {
  const bool transpose = m_in.rows < m_in.cols;
  const std::size_t n = transpose ? m_in.cols : m_in.rows;  // long axis
  const std::size_t k = transpose ? m_in.rows : m_in.cols;  // short axis
  if (k == 0) return {};
  // cols[j] holds column j of the tall matrix.
  std::vector<Vec> cols(k, Vec(n, 0.0));
  for (std::size_t i = 0; i < m_in.rows; ++i)
    for (std::size_t j = 0; j < m_in.cols; ++j) {
      if (transpose)
        cols[i][j] = m_in.at(i, j);
      else
        cols[j][i] = m_in.at(i, j);
    }

  constexpr double kTol = 1e-15;
  constexpr int kMaxSweeps = 60;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        double app = dot(cols[p], cols[p]);
        double aqq = dot(cols[q], cols[q]);
        double apq = dot(cols[p], cols[q]);
        if (std::abs(apq) <= kTol * std::sqrt(app * aqq)) continue;
        rotated = true;
        double theta = 0.5 * std::atan2(2.0 * apq, app - aqq);
        double c = std::cos(theta), s = std::sin(theta);
        for (std::size_t i = 0; i < n; ++i) {
          double vp = cols[p][i], vq = cols[q][i];
          cols[p][i] = c * vp + s * vq;
          cols[q][i] = -s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vec sv(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) sv[j] = norm2(cols[j]);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      if (sv[b] > sv[a]) std::swap(sv[a], sv[b]);
  return sv;
}

// Orthonormalizes the rows of m in place (modified Gram-Schmidt); returns the
// numeric rank at the given relative tolerance and drops dependent rows.
inline std::size_t orthonormalize_rows(Mat& m, double rel_tol = 1e-12) {
  std::vector<Vec> rows;
  double max_norm = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    Vec r(m.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols),
          m.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * m.cols));
    max_norm = std::max(max_norm, norm2(r));
    for (const Vec& q : rows) axpy(-dot(q, r), q, r);
    for (const Vec& q : rows) axpy(-dot(q, r), q, r);  // second pass for stability
    double n = norm2(r);
    if (n > rel_tol * std::max(1.0, max_norm)) {
      scale(r, 1.0 / n);
      rows.push_back(std::move(r));
    }
  }
  Mat out(rows.size(), m.cols);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out.at(i, j) = rows[i][j];
  m = std::move(out);
  return m.rows;
}

// |det| of a square matrix via partially pivoted Gaussian elimination.
inline double abs_det(Mat m) {
  if (m.rows != m.cols) throw DimensionMismatch("determinant of non-square matrix");
  const std::size_t n = m.rows;
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m.at(r, c)) > std::abs(m.at(piv, c))) piv = r;
    if (m.at(piv, c) == 0.0) return 0.0;
    if (piv != c)
      for (std::size_t j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(c, j));
    det *= m.at(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      double f = m.at(r, c) / m.at(c, c);
      for (std::size_t j = c; j < n; ++j) m.at(r, j) -= f * m.at(c, j);
    }
  }
  return std::abs(det);
}

}  // namespace stitforest
