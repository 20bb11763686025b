#include "stitforest/oblique.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "stitforest/errors.hpp"

namespace stitforest {

FeatureMatrix::FeatureMatrix(Mat a) : a_(std::move(a)) {
  if (a_.rows == 0 || a_.cols == 0) throw DimensionMismatch("feature matrix is empty");
  if (a_.rows > a_.cols)
    throw RankDeficient("feature matrix needs at least as many features as dimensions");
  col_norms_.assign(a_.cols, 0.0);
  for (std::size_t j = 0; j < a_.cols; ++j) {
    double sq = 0.0;
    for (std::size_t i = 0; i < a_.rows; ++i) sq += a_.at(i, j) * a_.at(i, j);
    col_norms_[j] = std::sqrt(sq);
    if (!(col_norms_[j] > 0.0)) throw RankDeficient("feature matrix has a zero column");
    norm21_ += col_norms_[j];
  }
  Vec sv = singular_values(a_);
  if (sv.size() < a_.rows || !(sv[a_.rows - 1] > 1e-9 * std::max(1.0, sv[0])))
    throw RankDeficient("feature matrix does not have full row rank");
}

Vec FeatureMatrix::column(std::size_t j) const {
  if (j >= a_.cols) throw IndexOutOfRange("feature column index out of range");
  Vec out(a_.rows);
  for (std::size_t i = 0; i < a_.rows; ++i) out[i] = a_.at(i, j);
  return out;
}

FeatureMatrix FeatureMatrix::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open feature matrix file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("feature matrix file is empty: " + path);
  std::size_t cols = 1;
  for (char ch : line)
    if (ch == ',') ++cols;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::size_t got = 0;
    while (std::getline(ss, tok, ',')) {
      try {
        values.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw IoError("feature matrix has a non-numeric entry: " + tok);
      }
      ++got;
    }
    if (got != cols) throw IoError("feature matrix rows have inconsistent lengths");
    ++rows;
  }
  Mat a(rows, cols);
  a.data = std::move(values);
  return FeatureMatrix(std::move(a));
}

void FeatureMatrix::to_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write feature matrix file: " + path);
  for (std::size_t j = 0; j < a_.cols; ++j) out << (j ? "," : "") << "f" << (j + 1);
  out << "\n";
  char buf[32];
  for (std::size_t i = 0; i < a_.rows; ++i) {
    for (std::size_t j = 0; j < a_.cols; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", a_.at(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("failed writing feature matrix file: " + path);
}

DirectionalDistribution dirdist_from_matrix(const FeatureMatrix& a) {
  const std::size_t d = a.dim();
  std::vector<Vec> reps;
  Vec mass;
  for (std::size_t j = 0; j < a.n_features(); ++j) {
    Vec v = a.column(j);
    scale(v, 1.0 / a.col_norm(j));
    bool merged = false;
    for (std::size_t g = 0; g < reps.size(); ++g) {
      if (std::abs(dot(reps[g], v)) > 1.0 - 1e-12) {
        mass[g] += a.col_norm(j);
        merged = true;
        break;
      }
    }
    if (!merged) {
      reps.push_back(std::move(v));
      mass.push_back(a.col_norm(j));
    }
  }
  for (double& w : mass) w /= a.norm21();
  (void)d;
  return DirectionalDistribution::discrete(std::move(reps), std::move(mass));
}

SubspaceSpec SubspaceSpec::from_rows(Mat rows) {
  const std::size_t want = rows.rows;
  if (want == 0 || rows.cols == 0) throw DimensionMismatch("subspace needs at least one row");
  if (orthonormalize_rows(rows) != want)
    throw RankDeficient("subspace rows are linearly dependent");
  return SubspaceSpec{std::move(rows)};
}

SubspaceSpec SubspaceSpec::coordinate(std::size_t s, std::size_t d) {
  if (s == 0 || s > d) throw DimensionMismatch("subspace dimension out of range");
  Mat basis(s, d);
  for (std::size_t i = 0; i < s; ++i) basis.at(i, i) = 1.0;
  return SubspaceSpec{std::move(basis)};
}

LiftedPartition lifted_partition(const Mat& points, const FeatureMatrix& a, double lambda,
                                 Rng& rng, double padding_factor) {
  if (points.cols != a.dim()) throw DimensionMismatch("points and feature matrix disagree");
  if (!(lambda > 0.0)) throw DimensionMismatch("lifetime must be positive");
  if (!(padding_factor > 0.0)) throw DimensionMismatch("padding factor must be positive");
  const std::size_t n = points.rows;
  const std::size_t m = a.n_features();
  if (n == 0) throw DimensionMismatch("lifted partition needs at least one point");

  // y_j = A^T x_j
  Mat lifted(n, m);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.dim(); ++i) s += a.matrix().at(i, j) * points.at(r, i);
      lifted.at(r, j) = s;
    }

  const double pad = padding_factor * 2.0 * a.norm21() / lambda;
  AxisBox window{Vec(m, 0.0), Vec(m, 0.0)};
  for (std::size_t j = 0; j < m; ++j) {
    double lo = lifted.at(0, j), hi = lifted.at(0, j);
    for (std::size_t r = 1; r < n; ++r) {
      lo = std::min(lo, lifted.at(r, j));
      hi = std::max(hi, lifted.at(r, j));
    }
    window.lo[j] = lo - pad;
    window.hi[j] = hi + pad;
  }

  const double lifted_lifetime =
      static_cast<double>(m) * lambda / a.norm21();
  WeightedMondrianSpec spec{Vec(m, 1.0 / static_cast<double>(m)), lifted_lifetime};
  TessellationTree tree = mondrian_sample(window, spec, rng);

  LiftedPartition out{std::vector<int>(n, -1), std::move(tree), lifted_lifetime};
  Vec y(m);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t j = 0; j < m; ++j) y[j] = lifted.at(r, j);
    out.labels[r] = out.tree.locate(y);
  }
  return out;
}

HPolytope oblique_zero_cell(const FeatureMatrix& a, double lambda, Rng& rng) {
  if (!(lambda > 0.0)) throw DimensionMismatch("lifetime must be positive");
  const double rate = lambda / a.norm21();
  std::vector<Halfspace> faces;
  faces.reserve(2 * a.n_features());
  for (std::size_t j = 0; j < a.n_features(); ++j) {
    Vec v = a.column(j);
    scale(v, 1.0 / a.col_norm(j));
    const double t_low = rng.exponential(rate) / a.col_norm(j);
    const double t_high = rng.exponential(rate) / a.col_norm(j);
    Vec neg = v;
    scale(neg, -1.0);
    faces.push_back({std::move(neg), t_low});  // <a_i, y> >= -T1
    faces.push_back({std::move(v), t_high});   // <a_i, y> <= T2
  }
  return HPolytope::build(a.dim(), std::move(faces), 0.0);
}

double sigma_s(const FeatureMatrix& a, const SubspaceSpec& s) {
  if (s.ambient_dim() != a.dim()) throw DimensionMismatch("subspace lives in the wrong space");
  Mat b(s.dim(), a.n_features());
  for (std::size_t i = 0; i < s.dim(); ++i)
    for (std::size_t j = 0; j < a.n_features(); ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < a.dim(); ++t) acc += s.basis.at(i, t) * a.matrix().at(t, j);
      b.at(i, j) = acc;
    }
  Vec sv = singular_values(b);
  return sv.empty() ? 0.0 : sv.back();
}

double perp_norm21(const FeatureMatrix& a, const SubspaceSpec& s) {
  if (s.ambient_dim() != a.dim()) throw DimensionMismatch("subspace lives in the wrong space");
  double total = 0.0;
  for (std::size_t j = 0; j < a.n_features(); ++j) {
    Vec col = a.column(j);
    Vec proj = project_onto_rows(s.basis, col);
    double sq = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
      const double r = col[i] - proj[i];
      sq += r * r;
    }
    total += std::sqrt(sq);
  }
  return total;
}

namespace {

// c_{d,k} = kappa_k pi^{k/2} d^{k/2} / k! with kappa_k the unit-ball volume
// pi^{k/2} / Gamma(k/2 + 1).
double c_dk(std::size_t d, std::size_t k) {
  const double kd = static_cast<double>(k);
  const double kappa = std::pow(M_PI, kd / 2.0) / std::tgamma(kd / 2.0 + 1.0);
  double k_fact = 1.0;
  for (std::size_t i = 2; i <= k; ++i) k_fact *= static_cast<double>(i);
  return kappa * std::pow(M_PI * static_cast<double>(d), kd / 2.0) / k_fact;
}

}  // namespace

RiskBound c1_bound(const RiskBoundInputs& in, const FeatureMatrix& a, const SubspaceSpec& s) {
  if (std::abs(a.norm21() - 1.0) > 1e-9)
    throw NotNormalized("c1 bound requires |A|_{2,1} = 1");
  if (!(in.beta > 0.0) || in.beta > 1.0) throw DimensionMismatch("beta must lie in (0, 1]");
  if (!(in.lambda > 0.0) || in.n == 0) throw DimensionMismatch("lambda and n must be positive");

  const double m = static_cast<double>(a.n_features());
  const double d = static_cast<double>(a.dim());
  const std::size_t sd = s.dim();
  const double sig = sigma_s(a, s);
  const double eps = perp_norm21(a, s);

  RiskBound out;
  out.bias = 9.0 * in.lipschitz * in.lipschitz * std::pow(m, 4.0 * in.beta) /
             (std::pow(d, 2.0 * in.beta) * std::pow(in.lambda, 2.0 * in.beta) *
              std::pow(sig, 2.0 * in.beta));

  double cell_terms = 0.0;
  for (std::size_t k = 0; k <= a.dim(); ++k) {
    const double base = c_dk(a.dim(), k) * std::pow(in.lambda, static_cast<double>(k));
    if (k > sd)
      cell_terms += base * std::pow(eps, static_cast<double>(k - sd));
    else
      cell_terms += base;
  }
  out.variance = (5.0 * in.sup_f * in.sup_f + 2.0 * in.noise_sd * in.noise_sd) /
                 static_cast<double>(in.n) * cell_terms;
  out.total = out.bias + out.variance;
  return out;
}

DeterministicDiameterBound deter_bound(std::size_t m, std::size_t d, double sigma_s_value,
                                       std::size_t k) {
  if (!(sigma_s_value > 0.0)) throw DimensionMismatch("sigma_s must be positive");
  // Gamma(2m+k)/Gamma(2m) as an exact integer product.
  double ratio = 1.0;
  for (std::size_t i = 0; i < k; ++i) ratio *= static_cast<double>(2 * m + i);
  const double md = static_cast<double>(m), dd = static_cast<double>(d);
  DeterministicDiameterBound out;
  out.proof = std::pow(md / (dd * sigma_s_value), static_cast<double>(k)) * ratio;
  out.statement = out.proof / std::pow(2.0, static_cast<double>(k));
  return out;
}

LifetimeSchedule lifetime_schedule(const std::string& rule, std::size_t n, std::size_t s,
                                   std::size_t d, double beta, double lipschitz, double eps_n,
                                   double multiplier) {
  if (n == 0 || s == 0 || s > d) throw DimensionMismatch("schedule needs 1 <= s <= d, n >= 1");
  if (!(beta > 0.0) || beta > 1.0) throw DimensionMismatch("beta must lie in (0, 1]");
  if (!(lipschitz > 0.0) || eps_n < 0.0 || !(multiplier > 0.0))
    throw DimensionMismatch("schedule parameters out of range");

  double extra = 0.0;
  if (rule == "c1")
    extra = 0.0;
  else if (rule == "c2")
    extra = 2.0;
  else
    throw ConfigError("unknown lifetime schedule rule: " + rule);

  const double l2n = lipschitz * lipschitz * static_cast<double>(n);
  const double sd = static_cast<double>(s), dd = static_cast<double>(d);
  const double aligned = std::pow(l2n, 1.0 / (sd + extra + 2.0 * beta));
  double lambda = aligned;
  if (eps_n > 0.0 && d > s) {
    const double mis = std::pow(l2n, 1.0 / (dd + extra + 2.0 * beta)) *
                       std::pow(eps_n, -(dd - sd) / (dd + extra + 2.0 * beta));
    lambda = std::min(aligned, mis);
  }
  LifetimeSchedule out;
  out.lambda = multiplier * lambda;
  out.tree_floor = 1;
  if (rule == "c2") {
    // backed-off ceiling so representation error cannot bump the floor
    const double p = std::pow(out.lambda, 2.0 * beta);
    out.tree_floor = static_cast<std::size_t>(std::max(1.0, std::ceil(p * (1.0 - 1e-12))));
  }
  return out;
}

}  // namespace stitforest
