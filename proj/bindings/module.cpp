// Python bindings for the main operations: tessellation samplers, forest
// fitting and prediction, and the closed-form bound evaluators.  Matrices
// cross the boundary as nested lists of rows; model persistence reuses the
// library's JSON format, so files interoperate with the CLI.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stitforest/errors.hpp"
#include "stitforest/experiments.hpp"
#include "stitforest/forest.hpp"
#include "stitforest/mondrian.hpp"
#include "stitforest/oblique.hpp"
#include "stitforest/rng.hpp"

namespace py = pybind11;
using namespace stitforest;

namespace {

using Rows = std::vector<std::vector<double>>;

Mat to_mat(const Rows& rows, const char* what) {
  if (rows.empty() || rows.front().empty())
    throw ConfigError(std::string(what) + " must be a nonempty matrix");
  Mat m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols)
      throw ConfigError(std::string(what) + " must be rectangular");
    for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

SamplerSpec make_sampler(const std::string& kind, double lifetime,
                         const std::optional<Vec>& weights, const std::optional<Rows>& features,
                         const std::optional<Rows>& directions,
                         const std::optional<Vec>& direction_weights,
                         const std::optional<std::pair<Vec, Vec>>& window,
                         double padding_factor) {
  SamplerSpec spec;
  if (kind == "mondrian")
    spec.kind = SamplerSpec::Kind::mondrian;
  else if (kind == "stit")
    spec.kind = SamplerSpec::Kind::stit;
  else if (kind == "oblique")
    spec.kind = SamplerSpec::Kind::oblique;
  else
    throw ConfigError("kind must be one of mondrian, stit, oblique");
  spec.lifetime = lifetime;
  spec.padding_factor = padding_factor;
  if (weights) spec.weights = *weights;
  if (features) spec.feature_matrix = to_mat(*features, "feature_matrix");
  if (directions) {
    if (!direction_weights) throw ConfigError("directions require direction_weights");
    const Mat d = to_mat(*directions, "directions");
    std::vector<Vec> reps(d.rows);
    for (std::size_t i = 0; i < d.rows; ++i) {
      reps[i].resize(d.cols);
      for (std::size_t j = 0; j < d.cols; ++j) reps[i][j] = d.at(i, j);
    }
    spec.directions = DirectionalDistribution::discrete(reps, *direction_weights);
  }
  if (window) spec.window = AxisBox{window->first, window->second};
  return spec;
}

Dataset make_dataset(const Rows& x, const Vec& y) {
  Dataset data;
  data.x = to_mat(x, "x");
  data.y = y;
  data.validate();
  return data;
}

}  // namespace

PYBIND11_MODULE(_stitforest, m) {
  m.doc() = "Random tessellation forests: samplers, estimators, bound evaluators.";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "StitForestError");

  m.def(
      "expected_leaf_count",
      [](const Vec& lo, const Vec& hi, const Vec& weights, double lifetime) {
        return expected_leaf_count(AxisBox{lo, hi}, WeightedMondrianSpec{weights, lifetime}).value;
      },
      py::arg("lo"), py::arg("hi"), py::arg("weights"), py::arg("lifetime"),
      "prod_i (1 + lifetime * weights[i] * side[i]) for the box [lo, hi].");

  m.def(
      "sample_mondrian",
      [](const Vec& lo, const Vec& hi, const Vec& weights, double lifetime, std::uint64_t seed) {
        Rng rng(seed);
        const TessellationTree tree =
            mondrian_sample(AxisBox{lo, hi}, WeightedMondrianSpec{weights, lifetime}, rng);
        std::vector<std::pair<Vec, Vec>> out;
        for (const AxisBox& box : leaf_boxes(tree)) out.emplace_back(box.lo, box.hi);
        return out;
      },
      py::arg("lo"), py::arg("hi"), py::arg("weights"), py::arg("lifetime"), py::arg("seed"),
      "Leaf boxes (lo, hi) of one weighted-Mondrian draw on [lo, hi].");

  m.def(
      "zero_cell",
      [](const Vec& weights, double lifetime, std::uint64_t seed) {
        Rng rng(seed);
        const AxisBox cell = zero_cell_sample(WeightedMondrianSpec{weights, lifetime}, rng);
        return std::make_pair(cell.lo, cell.hi);
      },
      py::arg("weights"), py::arg("lifetime"), py::arg("seed"),
      "One draw of the cell containing the origin; sides are Gamma(2, lifetime * w_i).");

  m.def(
      "suboptimality_bound",
      [](const Vec& a, double lifetime, const Vec& weights, double noise_sd, std::size_t n) {
        const SuboptimalityBound b = suboptimality_closed_form(a, lifetime, weights, noise_sd, n);
        py::dict out;
        out["bias"] = b.bias;
        out["variance"] = b.variance;
        out["total"] = b.total;
        out["vacuous_bias"] = b.vacuous_bias;
        return out;
      },
      py::arg("a"), py::arg("lifetime"), py::arg("weights"), py::arg("noise_sd"), py::arg("n"),
      "Single-tree risk lower bound for y = <a, x> + noise on the unit cube.");

  m.def(
      "c1_bound",
      [](const Rows& a, const Rows& subspace_rows, double lipschitz, double beta, double sup_f,
         double noise_sd, std::size_t n, double lifetime) {
        const FeatureMatrix fm(to_mat(a, "a"));
        const SubspaceSpec sub = SubspaceSpec::from_rows(to_mat(subspace_rows, "subspace_rows"));
        RiskBoundInputs in;
        in.lipschitz = lipschitz;
        in.beta = beta;
        in.sup_f = sup_f;
        in.noise_sd = noise_sd;
        in.n = n;
        in.lambda = lifetime;
        const RiskBound b = c1_bound(in, fm, sub);
        py::dict out;
        out["bias"] = b.bias;
        out["variance"] = b.variance;
        out["total"] = b.total;
        return out;
      },
      py::arg("a"), py::arg("subspace_rows"), py::kw_only(), py::arg("lipschitz") = 1.0,
      py::arg("beta") = 1.0, py::arg("sup_f") = 1.0, py::arg("noise_sd") = 0.0, py::arg("n") = 1,
      py::arg("lifetime") = 1.0,
      "Forest risk upper bound for a (2,1)-normalized feature matrix.");

  py::class_<ForestModel>(m, "Forest", "Fitted randomized-tessellation forest.")
      .def_property_readonly("dim", &ForestModel::dim)
      .def_property_readonly("n_trees",
                             [](const ForestModel& f) { return f.trees().size(); })
      .def(
          "predict_one",
          [](const ForestModel& f, const Vec& x) { return f.predict(x); }, py::arg("x"))
      .def(
          "predict",
          [](const ForestModel& f, const Rows& xs) {
            Vec out(xs.size(), 0.0);
            for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f.predict(xs[i]);
            return out;
          },
          py::arg("x"), "Mean tree prediction per row; empty leaves contribute zero.")
      .def(
          "save", [](const ForestModel& f, const std::string& path) { f.save(path); },
          py::arg("path"))
      .def_static(
          "load", [](const std::string& path) { return ForestModel::load(path); },
          py::arg("path"));

  m.def(
      "fit",
      [](const Rows& x, const Vec& y, const std::string& kind, double lifetime,
         std::size_t trees, std::uint64_t seed, unsigned threads, const std::optional<Vec>& weights,
         const std::optional<Rows>& feature_matrix, const std::optional<Rows>& directions,
         const std::optional<Vec>& direction_weights,
         const std::optional<std::pair<Vec, Vec>>& window, double padding_factor) {
        if (trees == 0) throw ConfigError("trees must be positive");
        const Dataset data = make_dataset(x, y);
        const SamplerSpec spec = make_sampler(kind, lifetime, weights, feature_matrix, directions,
                                              direction_weights, window, padding_factor);
        return fit_forest(data, spec, trees, seed, threads);
      },
      py::arg("x"), py::arg("y"), py::kw_only(), py::arg("kind") = "mondrian",
      py::arg("lifetime") = 1.0, py::arg("trees") = 16, py::arg("seed") = 1,
      py::arg("threads") = 1, py::arg("weights") = std::nullopt,
      py::arg("feature_matrix") = std::nullopt, py::arg("directions") = std::nullopt,
      py::arg("direction_weights") = std::nullopt, py::arg("window") = std::nullopt,
      py::arg("padding_factor") = 3.0,
      "Fit a forest of independent randomized trees; seeds make refits bit-identical.");
}
