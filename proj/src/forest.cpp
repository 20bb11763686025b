#include "stitforest/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stitforest/errors.hpp"
#include "stitforest/oblique.hpp"
#include "stitforest/parallel.hpp"
#include "stitforest/stit.hpp"

namespace stitforest {

namespace {

constexpr std::uint64_t kTreeStreamTag = 0x74726565;  // per-tree stream domain

std::vector<double> parse_csv_rows(std::ifstream& in, std::size_t cols,
                                   const std::string& path, std::size_t* rows_out) {
  std::vector<double> values;
  std::string line;
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
        throw IoError("non-numeric entry in " + path + ": " + tok);
      }
      ++got;
    }
    if (got != cols) throw IoError("rows of " + path + " have inconsistent lengths");
    ++rows;
  }
  *rows_out = rows;
  return values;
}

}  // namespace

void Dataset::validate() const {
  if (x.rows == 0 || x.cols == 0) throw DimensionMismatch("dataset is empty");
  if (y.size() != x.rows) throw DimensionMismatch("labels do not match covariate rows");
  for (double v : x.data)
    if (!std::isfinite(v)) throw DimensionMismatch("covariates contain a non-finite entry");
  for (double v : y)
    if (!std::isfinite(v)) throw DimensionMismatch("labels contain a non-finite entry");
}

Dataset Dataset::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  std::string header;
  if (!std::getline(in, header)) throw IoError("dataset file is empty: " + path);
  std::size_t cols = 1;
  for (char ch : header)
    if (ch == ',') ++cols;
  if (cols < 2) throw IoError("dataset needs at least one covariate and the label column");
  std::size_t rows = 0;
  std::vector<double> values = parse_csv_rows(in, cols, path, &rows);
  if (rows == 0) throw IoError("dataset has no data rows: " + path);

  Dataset data{Mat(rows, cols - 1), Vec(rows)};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c + 1 < cols; ++c) data.x.at(r, c) = values[r * cols + c];
    data.y[r] = values[r * cols + cols - 1];
  }
  data.validate();
  return data;
}

void Dataset::to_csv(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file: " + path);
  for (std::size_t c = 0; c < x.cols; ++c) out << "x" << (c + 1) << ",";
  out << "y\n";
  char buf[32];
  for (std::size_t r = 0; r < x.rows; ++r) {
    for (std::size_t c = 0; c < x.cols; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", x.at(r, c));
      out << buf << ",";
    }
    std::snprintf(buf, sizeof buf, "%.17g", y[r]);
    out << buf << "\n";
  }
  if (!out) throw IoError("failed writing dataset file: " + path);
}

SamplerSpec resolve_sampler(const SamplerSpec& spec, const Dataset& data) {
  data.validate();
  const std::size_t d = data.dim();
  SamplerSpec out = spec;
  if (!(out.lifetime > 0.0)) throw ConfigError("sampler lifetime must be positive");
  if (out.margin < 0.0) throw ConfigError("sampler margin must be nonnegative");
  if (!(out.padding_factor > 0.0)) throw ConfigError("padding factor must be positive");

  switch (out.kind) {
    case SamplerSpec::Kind::mondrian:
      if (out.weights.empty()) out.weights.assign(d, 1.0 / static_cast<double>(d));
      if (out.weights.size() != d) throw DimensionMismatch("mondrian weights need one entry per axis");
      for (double w : out.weights)
        if (!(w > 0.0)) throw ConfigError("mondrian weights must be positive");
      break;
    case SamplerSpec::Kind::stit:
      if (!out.directions) throw ConfigError("stit sampler needs a directional distribution");
      if (out.directions->dim() != d)
        throw DimensionMismatch("directional distribution lives in the wrong dimension");
      break;
    case SamplerSpec::Kind::oblique:
      if (!out.feature_matrix) throw ConfigError("oblique sampler needs a feature matrix");
      if (out.feature_matrix->rows != d)
        throw DimensionMismatch("feature matrix rows must match the covariate dimension");
      FeatureMatrix(*out.feature_matrix);  // full validation
      break;
  }

  if (!out.window) {
    AxisBox box{Vec(d, 0.0), Vec(d, 0.0)};
    for (std::size_t c = 0; c < d; ++c) {
      double lo = data.x.at(0, c), hi = lo;
      for (std::size_t r = 1; r < data.size(); ++r) {
        lo = std::min(lo, data.x.at(r, c));
        hi = std::max(hi, data.x.at(r, c));
      }
      const double pad = out.margin * std::max(hi - lo, 1.0);
      box.lo[c] = lo - pad;
      box.hi[c] = hi + pad;
    }
    out.window = std::move(box);
  } else {
    if (out.window->dim() != d) throw DimensionMismatch("window dimension mismatch");
    Vec row(d);
    for (std::size_t r = 0; r < data.size(); ++r) {
      for (std::size_t c = 0; c < d; ++c) row[c] = data.x.at(r, c);
      if (!out.window->contains(row))
        throw OutOfWindow("training row outside the fixed window");
    }
  }
  return out;
}

TreeEstimator::TreeEstimator(TessellationTree tree, std::optional<Mat> lift,
                             AxisBox query_window, std::vector<std::int64_t> counts, Vec sums)
    : tree_(std::move(tree)),
      lift_(std::move(lift)),
      query_window_(std::move(query_window)),
      locate_box_{Vec{}, Vec{}},
      counts_(std::move(counts)),
      sums_(std::move(sums)) {
  if (counts_.size() != static_cast<std::size_t>(tree_.leaf_count()) ||
      sums_.size() != counts_.size())
    throw DimensionMismatch("leaf statistics do not match the tree");
  auto box = tree_.window().as_axis_box();
  if (!box) throw DimensionMismatch("tree estimators need an axis-box tessellation window");
  locate_box_ = AxisBox{std::move(box->first), std::move(box->second)};
  if (lift_) {
    if (lift_->rows != query_window_.dim() || lift_->cols != locate_box_.dim())
      throw DimensionMismatch("lift shape does not match the windows");
  } else if (locate_box_.dim() != query_window_.dim()) {
    throw DimensionMismatch("tessellation window does not match the query window");
  }
}

int TreeEstimator::route(std::span<const double> x, bool* clamped) const {
  if (x.size() != query_window_.dim()) throw DimensionMismatch("query dimension mismatch");
  Vec q(x.begin(), x.end());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double c = std::clamp(q[i], query_window_.lo[i], query_window_.hi[i]);
    if (c != q[i] && clamped) *clamped = true;
    q[i] = c;
  }
  if (!lift_) return tree_.locate(q);
  Vec y(locate_box_.dim());
  for (std::size_t j = 0; j < y.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += lift_->at(i, j) * q[i];
    y[j] = std::clamp(s, locate_box_.lo[j], locate_box_.hi[j]);
  }
  return tree_.locate(y);
}

double TreeEstimator::predict(std::span<const double> x, bool* clamped) const {
  const int leaf = route(x, clamped);
  const std::int64_t c = counts_[static_cast<std::size_t>(leaf)];
  return c == 0 ? 0.0 : sums_[static_cast<std::size_t>(leaf)] / static_cast<double>(c);
}

Partition sample_partition(const SamplerSpec& spec, Rng& rng) {
  if (!spec.window) throw ConfigError("partition sampling needs a window");
  const std::size_t d = spec.window->dim();
  if (!(spec.lifetime > 0.0)) throw ConfigError("sampler lifetime must be positive");

  switch (spec.kind) {
    case SamplerSpec::Kind::mondrian: {
      Vec w = spec.weights;
      if (w.empty()) w.assign(d, 1.0 / static_cast<double>(d));
      if (w.size() != d) throw DimensionMismatch("mondrian weights need one entry per axis");
      return Partition{mondrian_sample(*spec.window, WeightedMondrianSpec{w, spec.lifetime}, rng),
                       std::nullopt};
    }
    case SamplerSpec::Kind::stit: {
      if (!spec.directions) throw ConfigError("stit sampler needs a directional distribution");
      return Partition{
          stit_sample(spec.window->as_polytope(), *spec.directions, spec.lifetime, rng),
          std::nullopt};
    }
    case SamplerSpec::Kind::oblique: {
      if (!spec.feature_matrix) throw ConfigError("oblique sampler needs a feature matrix");
      FeatureMatrix a(*spec.feature_matrix);
      if (a.dim() != d) throw DimensionMismatch("feature matrix does not match the window");
      const std::size_t m = a.n_features();
      // lifted window covers the transform of the whole covariate window
      const double pad = spec.padding_factor * 2.0 * a.norm21() / spec.lifetime;
      AxisBox lifted{Vec(m, 0.0), Vec(m, 0.0)};
      for (std::size_t j = 0; j < m; ++j) {
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
          const double v = a.matrix().at(i, j);
          lo += std::min(v * spec.window->lo[i], v * spec.window->hi[i]);
          hi += std::max(v * spec.window->lo[i], v * spec.window->hi[i]);
        }
        lifted.lo[j] = lo - pad;
        lifted.hi[j] = hi + pad;
      }
      const double lifted_lifetime = static_cast<double>(m) * spec.lifetime / a.norm21();
      WeightedMondrianSpec lifted_spec{Vec(m, 1.0 / static_cast<double>(m)), lifted_lifetime};
      return Partition{mondrian_sample(lifted, lifted_spec, rng), *spec.feature_matrix};
    }
  }
  throw ConfigError("unknown sampler kind");
}

TreeEstimator fit_tree(const Dataset& data, const SamplerSpec& spec, Rng& rng) {
  const SamplerSpec s = resolve_sampler(spec, data);
  const std::size_t d = data.dim();

  Partition part = sample_partition(s, rng);
  std::optional<TessellationTree> tree(std::move(part.tree));
  std::optional<Mat> lift(std::move(part.lift));

  // training rows sit inside the window, so the routing below matches what
  // TreeEstimator::route computes after its no-op clamps
  std::vector<std::vector<double>> buckets(static_cast<std::size_t>(tree->leaf_count()));
  const std::size_t md = lift ? lift->cols : d;
  Vec row(d), y(md);
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) row[c] = data.x.at(r, c);
    int leaf;
    if (lift) {
      for (std::size_t j = 0; j < md; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < d; ++i) acc += lift->at(i, j) * row[i];
        y[j] = acc;
      }
      leaf = tree->locate(y);
    } else {
      leaf = tree->locate(row);
    }
    buckets[static_cast<std::size_t>(leaf)].push_back(data.y[r]);
  }
  // summing each leaf's labels in sorted order makes the aggregates
  // independent of the row order
  std::vector<std::int64_t> counts(buckets.size(), 0);
  Vec sums(buckets.size(), 0.0);
  for (std::size_t leaf = 0; leaf < buckets.size(); ++leaf) {
    auto& b = buckets[leaf];
    std::sort(b.begin(), b.end());
    counts[leaf] = static_cast<std::int64_t>(b.size());
    double acc = 0.0;
    for (double v : b) acc += v;
    sums[leaf] = acc;
  }
  return TreeEstimator(std::move(*tree), std::move(lift), *s.window, std::move(counts),
                       std::move(sums));
}

ForestModel::ForestModel(std::vector<TreeEstimator> trees, SamplerSpec resolved,
                         std::uint64_t seed)
    : trees_(std::move(trees)), sampler_(std::move(resolved)), seed_(seed) {
  if (trees_.empty()) throw DimensionMismatch("a forest needs at least one tree");
  for (const auto& t : trees_)
    if (t.dim() != trees_.front().dim()) throw DimensionMismatch("trees disagree on dimension");
}

double ForestModel::predict(std::span<const double> x, bool* clamped) const {
  double acc = 0.0;
  for (const auto& t : trees_) acc += t.predict(x, clamped);
  return acc / static_cast<double>(trees_.size());
}

Rng tree_stream(std::uint64_t seed, std::size_t tree_index) {
  return Rng::stream(seed, {kTreeStreamTag, tree_index});
}

ForestModel fit_forest(const Dataset& data, const SamplerSpec& spec, std::size_t n_trees,
                       std::uint64_t seed, unsigned threads) {
  if (n_trees == 0) throw ConfigError("a forest needs at least one tree");
  const SamplerSpec s = resolve_sampler(spec, data);
  std::vector<std::optional<TreeEstimator>> slots(n_trees);
  parallel_for(n_trees, threads, [&](std::size_t t) {
    Rng rng = tree_stream(seed, t);
    slots[t] = fit_tree(data, s, rng);
  });
  std::vector<TreeEstimator> trees;
  trees.reserve(n_trees);
  for (auto& slot : slots) trees.push_back(std::move(*slot));
  return ForestModel(std::move(trees), s, seed);
}

namespace {

nlohmann::json mat_to_json(const Mat& m) {
  return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Mat mat_from_json(const nlohmann::json& j) {
  Mat m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols)
    throw SchemaVersionMismatch("matrix payload has the wrong length");
  return m;
}

const char* kind_name(SamplerSpec::Kind k) {
  switch (k) {
    case SamplerSpec::Kind::mondrian: return "mondrian";
    case SamplerSpec::Kind::stit: return "stit";
    case SamplerSpec::Kind::oblique: return "oblique";
  }
  throw ConfigError("unknown sampler kind");
}

SamplerSpec::Kind kind_from_name(const std::string& name) {
  if (name == "mondrian") return SamplerSpec::Kind::mondrian;
  if (name == "stit") return SamplerSpec::Kind::stit;
  if (name == "oblique") return SamplerSpec::Kind::oblique;
  throw SchemaVersionMismatch("unknown sampler kind: " + name);
}

nlohmann::json sampler_to_json(const SamplerSpec& s) {
  nlohmann::json j{{"kind", kind_name(s.kind)},
                   {"lifetime", s.lifetime},
                   {"margin", s.margin},
                   {"padding_factor", s.padding_factor}};
  if (s.window) j["window"] = {{"lo", s.window->lo}, {"hi", s.window->hi}};
  if (!s.weights.empty()) j["weights"] = s.weights;
  if (s.directions) {
    j["directions"] = s.directions->directions();
    j["direction_weights"] = s.directions->weights();
  }
  if (s.feature_matrix) j["feature_matrix"] = mat_to_json(*s.feature_matrix);
  return j;
}

SamplerSpec sampler_from_json(const nlohmann::json& j) {
  SamplerSpec s;
  s.kind = kind_from_name(j.at("kind").get<std::string>());
  s.lifetime = j.at("lifetime").get<double>();
  s.margin = j.at("margin").get<double>();
  s.padding_factor = j.at("padding_factor").get<double>();
  if (j.contains("window"))
    s.window = AxisBox{j.at("window").at("lo").get<Vec>(), j.at("window").at("hi").get<Vec>()};
  if (j.contains("weights")) s.weights = j.at("weights").get<Vec>();
  if (j.contains("directions"))
    s.directions = DirectionalDistribution::discrete(
        j.at("directions").get<std::vector<Vec>>(), j.at("direction_weights").get<Vec>());
  if (j.contains("feature_matrix")) s.feature_matrix = mat_from_json(j.at("feature_matrix"));
  return s;
}

}  // namespace

void ForestModel::save(const std::string& path) const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) {
    trees.push_back({{"tessellation", t.tree().to_json()},
                     {"counts", t.counts()},
                     {"sums", t.sums()}});
  }
  nlohmann::json j{{"format", "stitforest-model"},
                   {"version", 1},
                   {"dim", dim()},
                   {"seed", seed_},
                   {"sampler", sampler_to_json(sampler_)},
                   {"trees", std::move(trees)}};

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write model file: " + tmp);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing model file: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move model into place: " + ec.message());
}

static ForestModel load_model_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "stitforest-model")
    throw SchemaVersionMismatch("not a model file");
  if (j.value("version", 0) != 1) throw SchemaVersionMismatch("unsupported model version");
  SamplerSpec s = sampler_from_json(j.at("sampler"));
  if (!s.window) throw SchemaVersionMismatch("model sampler is missing its window");
  const auto dim = j.at("dim").get<std::size_t>();
  if (s.window->dim() != dim) throw SchemaVersionMismatch("model window dimension mismatch");

  std::vector<TreeEstimator> trees;
  for (const auto& jt : j.at("trees")) {
    TessellationTree tree = TessellationTree::from_json(jt.at("tessellation"));
    std::optional<Mat> lift;
    if (s.kind == SamplerSpec::Kind::oblique) lift = *s.feature_matrix;
    trees.emplace_back(std::move(tree), std::move(lift), *s.window,
                       jt.at("counts").get<std::vector<std::int64_t>>(),
                       jt.at("sums").get<Vec>());
  }
  if (trees.empty()) throw SchemaVersionMismatch("model has no trees");
  return ForestModel(std::move(trees), std::move(s), j.at("seed").get<std::uint64_t>());
}

ForestModel ForestModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaVersionMismatch(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    return load_model_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaVersionMismatch(std::string("model payload malformed: ") + e.what());
  }
}

}  // namespace stitforest
