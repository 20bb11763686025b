#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stitforest/linalg.hpp"
#include "stitforest/rng.hpp"

namespace stitforest {

// <normal, x> <= offset with a unit normal.
struct Halfspace {
  Vec normal;
  double offset = 0.0;
};

// <normal, x> = offset with a unit normal.
struct Hyperplane {
  Vec normal;
  double offset = 0.0;
};

// Sides thinner than this are treated as empty when splitting.
constexpr double kSliverTol = 1e-9;

// Bounded intersection of halfspaces with a certified interior point (the
// Chebyshev center, computed once at construction).
class HPolytope {
 public:
  static HPolytope box(const Vec& lo, const Vec& hi);

  // Throws InfeasiblePolytope when no ball of radius min_inradius fits and
  // UnboundedObjective when inscribed balls grow without bound.
  static HPolytope build(std::size_t dim, std::vector<Halfspace> faces,
                         double min_inradius = kSliverTol);

  // nullopt instead of InfeasiblePolytope; still throws on unboundedness.
  static std::optional<HPolytope> try_build(std::size_t dim, std::vector<Halfspace> faces,
                                            double min_inradius = kSliverTol);

  std::size_t dim() const { return dim_; }
  const std::vector<Halfspace>& faces() const { return faces_; }
  const Vec& interior_point() const { return center_; }
  double inradius() const { return inradius_; }

  bool contains(std::span<const double> x, double tol = 1e-9) const;

  // sup over the polytope of <u, x>; throws UnboundedObjective along
  // recession directions.
  double support(std::span<const double> u) const;

  // support(u) + support(-u)
  double width(std::span<const double> u) const;

  // Axis-aligned bounds when every face normal is +-e_i.
  std::optional<std::pair<Vec, Vec>> as_axis_box() const;

 private:
  HPolytope() = default;
  std::size_t dim_ = 0;
  std::vector<Halfspace> faces_;
  Vec center_;
  double inradius_ = 0.0;
};

// Halves of P across H: first keeps <u,x> <= t, second keeps <u,x> >= t.
// A side thinner than kSliverTol comes back as nullopt.
std::pair<std::optional<HPolytope>, std::optional<HPolytope>> split(const HPolytope& p,
                                                                    const Hyperplane& h);

// Width of the projection of P onto the row span of an orthonormal basis,
// along the subspace direction u_sub (coordinates in that basis).
double projected_width(const HPolytope& p, const Mat& basis, std::span<const double> u_sub);

// Max projected width over n_dirs random subspace directions.  A biased-low
// estimator (sampling can miss the extremal direction); exact for axis boxes
// projected onto coordinate subspaces, where the closed form
// sqrt(sum of squared sides) is used instead.
double diameter_estimate(const HPolytope& p, const Mat& basis, std::size_t n_dirs, Rng& rng);

}  // namespace stitforest
