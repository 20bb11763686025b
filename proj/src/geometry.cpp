#include "stitforest/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stitforest/errors.hpp"
#include "stitforest/lp.hpp"

namespace stitforest {
namespace {

// Chebyshev center: maximize r subject to <n_i, x> + r <= b_i (unit normals).
// Optimal r is the inradius; negative means no feasible point exists.
LpResult chebyshev(std::size_t dim, const std::vector<Halfspace>& faces) {
  Mat g(faces.size(), dim + 1);
  Vec h(faces.size(), 0.0);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) g.at(i, j) = faces[i].normal[j];
    g.at(i, dim) = 1.0;
    h[i] = faces[i].offset;
  }
  Vec c(dim + 1, 0.0);
  c[dim] = 1.0;
  return lp_maximize(c, g, h);
}

void normalize_faces(std::size_t dim, std::vector<Halfspace>& faces) {
  for (Halfspace& f : faces) {
    if (f.normal.size() != dim) throw DimensionMismatch("halfspace normal has wrong dimension");
    const double n = norm2(f.normal);
    if (!(n > 0.0)) throw DimensionMismatch("halfspace normal is zero");
    if (std::abs(n - 1.0) > 1e-14) {
      scale(f.normal, 1.0 / n);
      f.offset /= n;
    }
  }
}

}  // namespace

HPolytope HPolytope::box(const Vec& lo, const Vec& hi) {
  const std::size_t d = lo.size();
  if (hi.size() != d || d == 0) throw DimensionMismatch("box bounds have inconsistent dimension");
  HPolytope p;
  p.dim_ = d;
  p.center_.assign(d, 0.0);
  p.inradius_ = std::numeric_limits<double>::infinity();
  p.faces_.reserve(2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!(hi[i] - lo[i] > 2 * kSliverTol)) throw InfeasiblePolytope("box side is degenerate");
    Vec up(d, 0.0), dn(d, 0.0);
    up[i] = 1.0;
    dn[i] = -1.0;
    p.faces_.push_back({std::move(up), hi[i]});
    p.faces_.push_back({std::move(dn), -lo[i]});
    p.center_[i] = 0.5 * (lo[i] + hi[i]);
    p.inradius_ = std::min(p.inradius_, 0.5 * (hi[i] - lo[i]));
  }
  return p;
}

HPolytope HPolytope::build(std::size_t dim, std::vector<Halfspace> faces, double min_inradius) {
  auto p = try_build(dim, std::move(faces), min_inradius);
  if (!p) throw InfeasiblePolytope("polytope has no interior at tolerance");
  return *std::move(p);
}

std::optional<HPolytope> HPolytope::try_build(std::size_t dim, std::vector<Halfspace> faces,
                                              double min_inradius) {
  if (dim == 0 || faces.empty()) throw DimensionMismatch("polytope needs dim > 0 and faces");
  normalize_faces(dim, faces);
  LpResult r = chebyshev(dim, faces);
  if (r.status == LpStatus::unbounded)
    throw UnboundedObjective("halfspace intersection contains arbitrarily large balls");
  if (r.status != LpStatus::optimal || r.value < min_inradius) return std::nullopt;
  HPolytope p;
  p.dim_ = dim;
  p.faces_ = std::move(faces);
  p.center_.assign(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(dim));
  p.inradius_ = r.value;
  return p;
}

bool HPolytope::contains(std::span<const double> x, double tol) const {
  if (x.size() != dim_) throw DimensionMismatch("point has wrong dimension");
  for (const Halfspace& f : faces_)
    if (dot(f.normal, x) > f.offset + tol) return false;
  return true;
}

double HPolytope::support(std::span<const double> u) const {
  if (u.size() != dim_) throw DimensionMismatch("direction has wrong dimension");
  Mat g(faces_.size(), dim_);
  Vec h(faces_.size(), 0.0);
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    for (std::size_t j = 0; j < dim_; ++j) g.at(i, j) = faces_[i].normal[j];
    h[i] = faces_[i].offset;
  }
  Vec c(u.begin(), u.end());
  LpResult r = lp_maximize(c, g, h);
  if (r.status == LpStatus::unbounded)
    throw UnboundedObjective("support queried along a recession direction");
  if (r.status != LpStatus::optimal)
    throw InfeasiblePolytope("support query on an empty polytope");
  return r.value;
}

double HPolytope::width(std::span<const double> u) const {
  Vec neg(u.begin(), u.end());
  scale(neg, -1.0);
  return support(u) + support(neg);
}

std::optional<std::pair<Vec, Vec>> HPolytope::as_axis_box() const {
  Vec lo(dim_, -std::numeric_limits<double>::infinity());
  Vec hi(dim_, std::numeric_limits<double>::infinity());
  for (const Halfspace& f : faces_) {
    std::size_t axis = dim_;
    double sign = 0.0;
    for (std::size_t j = 0; j < dim_; ++j) {
      const double v = f.normal[j];
      if (std::abs(std::abs(v) - 1.0) <= 1e-12) {
        if (axis != dim_) return std::nullopt;
        axis = j;
        sign = v > 0 ? 1.0 : -1.0;
      } else if (std::abs(v) > 1e-12) {
        return std::nullopt;
      }
    }
    if (axis == dim_) return std::nullopt;
    if (sign > 0)
      hi[axis] = std::min(hi[axis], f.offset);
    else
      lo[axis] = std::max(lo[axis], -f.offset);
  }
  for (std::size_t j = 0; j < dim_; ++j)
    if (!std::isfinite(lo[j]) || !std::isfinite(hi[j])) return std::nullopt;
  return std::make_pair(std::move(lo), std::move(hi));
}

std::pair<std::optional<HPolytope>, std::optional<HPolytope>> split(const HPolytope& p,
                                                                    const Hyperplane& h) {
  if (h.normal.size() != p.dim()) throw DimensionMismatch("split plane has wrong dimension");
  std::vector<Halfspace> lower = p.faces();
  lower.push_back({h.normal, h.offset});
  std::vector<Halfspace> upper = p.faces();
  Vec neg = h.normal;
  scale(neg, -1.0);
  upper.push_back({std::move(neg), -h.offset});
  return {HPolytope::try_build(p.dim(), std::move(lower)),
          HPolytope::try_build(p.dim(), std::move(upper))};
}

double projected_width(const HPolytope& p, const Mat& basis, std::span<const double> u_sub) {
  if (basis.cols != p.dim() || basis.rows != u_sub.size())
    throw DimensionMismatch("projected_width: basis/direction mismatch");
  Vec u(p.dim(), 0.0);
  for (std::size_t i = 0; i < basis.rows; ++i)
    axpy(u_sub[i], std::span<const double>(basis.data).subspan(i * basis.cols, basis.cols), u);
  return p.width(u);
}

double diameter_estimate(const HPolytope& p, const Mat& basis, std::size_t n_dirs, Rng& rng) {
  if (basis.cols != p.dim()) throw DimensionMismatch("diameter_estimate: basis mismatch");
  const std::size_t s = basis.rows;
  if (s == 0) return 0.0;

  // Exact closed form for axis boxes projected onto coordinate subspaces.
  if (auto bounds = p.as_axis_box()) {
    bool coordinate = true;
    std::vector<std::size_t> axes;
    for (std::size_t i = 0; i < s && coordinate; ++i) {
      std::size_t axis = basis.cols;
      for (std::size_t j = 0; j < basis.cols; ++j) {
        const double v = basis.at(i, j);
        if (std::abs(std::abs(v) - 1.0) <= 1e-12) {
          if (axis != basis.cols) coordinate = false;
          axis = j;
        } else if (std::abs(v) > 1e-12) {
          coordinate = false;
        }
      }
      if (axis == basis.cols) coordinate = false;
      if (coordinate) axes.push_back(axis);
    }
    if (coordinate) {
      double sq = 0.0;
      for (std::size_t a : axes) {
        const double side = bounds->second[a] - bounds->first[a];
        sq += side * side;
      }
      return std::sqrt(sq);
    }
  }

  // One-dimensional projections have an exact extremal direction.
  if (s == 1) {
    Vec u_sub{1.0};
    return projected_width(p, basis, u_sub);
  }

  double best = 0.0;
  Vec u_sub(s, 0.0);
  for (std::size_t k = 0; k < n_dirs; ++k) {
    double n = 0.0;
    do {
      for (std::size_t i = 0; i < s; ++i) u_sub[i] = rng.normal();
      n = norm2(u_sub);
    } while (!(n > 1e-12));
    scale(u_sub, 1.0 / n);
    best = std::max(best, projected_width(p, basis, u_sub));
  }
  return best;
}

}  // namespace stitforest
