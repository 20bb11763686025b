#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "stitforest/csvio.hpp"
#include "stitforest/errors.hpp"
#include "stitforest/experiments.hpp"
#include "stitforest/forest.hpp"
#include "stitforest/runconfig.hpp"
#include "stitforest/targets.hpp"

namespace stitforest {

namespace {

using nlohmann::json;

constexpr std::uint64_t kCliRatesTag = 0x636c6972;
constexpr std::uint64_t kCliSuboptTag = 0x636c6973;

double num_or(const json& p, const char* key, double dflt) {
  return p.contains(key) ? p[key].get<double>() : dflt;
}

std::size_t uint_or(const json& p, const char* key, std::size_t dflt) {
  return p.contains(key) ? p[key].get<std::size_t>() : dflt;
}

std::string str_or(const json& p, const char* key, const std::string& dflt) {
  return p.contains(key) ? p[key].get<std::string>() : dflt;
}

Mat mat_of(const json& v) {
  Mat m(v.size(), v.front().size());
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = v[i][j].get<double>();
  return m;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  const std::filesystem::path dir(cfg.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + cfg.out);
  return (dir / name).string();
}

SamplerSpec sampler_from_params(const json& p) {
  SamplerSpec spec;
  const std::string family = str_or(p, "family", "mondrian");
  if (family == "mondrian") {
    spec.kind = SamplerSpec::Kind::mondrian;
  } else if (family == "stit") {
    spec.kind = SamplerSpec::Kind::stit;
    if (!p.contains("directions") || !p.contains("direction_weights"))
      throw ConfigError("the stit family needs directions and direction_weights");
  } else if (family == "oblique") {
    spec.kind = SamplerSpec::Kind::oblique;
    if (!p.contains("feature_matrix"))
      throw ConfigError("the oblique family needs a feature_matrix");
  } else {
    throw ConfigError("unknown family: " + family);
  }

  spec.lifetime = num_or(p, "lifetime", 3.0);
  spec.padding_factor = num_or(p, "padding_factor", 3.0);
  spec.margin = num_or(p, "margin", 1e-6);
  if (p.contains("weights")) spec.weights = p["weights"].get<Vec>();
  if (p.contains("directions")) {
    std::vector<Vec> dirs;
    for (const json& row : p["directions"]) dirs.push_back(row.get<Vec>());
    spec.directions =
        DirectionalDistribution::discrete(dirs, p["direction_weights"].get<Vec>());
  }
  if (p.contains("feature_matrix")) spec.feature_matrix = mat_of(p["feature_matrix"]);
  if (p.contains("window_lo") != p.contains("window_hi"))
    throw ConfigError("window_lo and window_hi come as a pair");
  if (p.contains("window_lo")) {
    AxisBox window{p["window_lo"].get<Vec>(), p["window_hi"].get<Vec>()};
    if (window.lo.size() != window.hi.size() || window.lo.empty())
      throw ConfigError("window bounds must share a positive dimension");
    for (std::size_t i = 0; i < window.lo.size(); ++i)
      if (!(window.lo[i] < window.hi[i]))
        throw ConfigError("window_lo must lie strictly below window_hi");
    spec.window = std::move(window);
  }
  return spec;
}

int run_sample_tessellation(const RunConfig& cfg, std::ostream& out) {
  const json& p = cfg.params;
  const std::size_t dim = uint_or(p, "dim", 2);
  if (dim == 0) throw ConfigError("dim must be positive");
  SamplerSpec spec = sampler_from_params(p);
  if (!spec.window) spec.window = AxisBox{Vec(dim, 0.0), Vec(dim, 1.0)};
  if (spec.window->dim() != dim)
    throw ConfigError("window dimension does not match dim");
  Rng rng(cfg.seed);
  const Partition part = sample_partition(spec, rng);
  const std::string path = out_path(cfg, str_or(p, "out_file", "tessellation.json"));
  write_text_atomic(path, part.tree.to_json().dump(2) + "\n");
  out << "sample-tessellation: " << part.tree.leaf_count() << " leaves -> " << path << "\n";
  return 0;
}

int run_fit(const RunConfig& cfg, std::ostream& out) {
  const json& p = cfg.params;
  const Dataset data = Dataset::from_csv(p["data"].get<std::string>());
  const SamplerSpec spec = sampler_from_params(p);
  const std::size_t trees = uint_or(p, "trees", 16);
  if (trees == 0) throw ConfigError("trees must be positive");
  const ForestModel model = fit_forest(data, spec, trees, cfg.seed, cfg.threads);
  const std::string path = out_path(cfg, str_or(p, "out_file", "model.json"));
  model.save(path);
  out << "fit: " << trees << " trees on " << data.size() << " rows -> " << path << "\n";
  return 0;
}

// Covariate rows with an optional trailing label column, which predict
// ignores.
Mat read_covariates(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in.good()) throw IoError("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty dataset: " + path);
  const auto split = [](const std::string& text) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      cells.push_back(text.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  const std::vector<std::string> header = split(line);
  const bool labeled = !header.empty() && header.back() == "y";
  const std::size_t cols = header.size();
  if (cols - (labeled ? 1 : 0) != dim)
    throw DimensionMismatch("dataset columns do not match the model dimension");

  std::vector<Vec> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split(line);
    if (cells.size() != cols) throw IoError("ragged csv row in " + path);
    Vec row(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
      char* end = nullptr;
      row[j] = std::strtod(cells[j].c_str(), &end);
      if (end == cells[j].c_str() || *end != '\0')
        throw IoError("non-numeric cell in " + path);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("no data rows in " + path);
  Mat x(rows.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) x.at(i, j) = rows[i][j];
  return x;
}

int run_predict(const RunConfig& cfg, std::ostream& out) {
  const json& p = cfg.params;
  const ForestModel model = ForestModel::load(p["model"].get<std::string>());
  const Mat x = read_covariates(p["data"].get<std::string>(), model.dim());

  CsvTable table;
  for (std::size_t j = 0; j < model.dim(); ++j)
    table.header.push_back("x" + std::to_string(j + 1));
  table.header.push_back("prediction");
  for (std::size_t i = 0; i < x.rows; ++i) {
    Vec row(model.dim(), 0.0);
    std::vector<std::string> cells;
    for (std::size_t j = 0; j < model.dim(); ++j) {
      row[j] = x.at(i, j);
      cells.push_back(fmt_full(row[j]));
    }
    cells.push_back(fmt_full(model.predict(row)));
    table.rows.push_back(std::move(cells));
  }
  const std::string path = out_path(cfg, str_or(p, "out_file", "predictions.csv"));
  write_csv_atomic(path, table);
  out << "predict: " << x.rows << " rows -> " << path << "\n";
  return 0;
}

struct CheckCount {
  std::size_t failed = 0;
  std::size_t total = 0;
};

CheckCount run_rates(const RunConfig& cfg, std::ostream& out) {
  const json& p = cfg.params;
  const Mat target_a = p.contains("target_a") ? mat_of(p["target_a"]) : Mat(1, 3, 1.0);
  // Default noise keeps the clean lambda/n estimation term dominant at desk
  // scale; with weak noise the fitted slope absorbs fast-decaying edge and
  // kink transients and overshoots the lifetime-schedule exponent.
  const RidgeTarget target(target_a, str_or(p, "link", "abs-sum"), num_or(p, "noise_sd", 0.5));

  RateConfig base;
  base.mu = str_or(p, "mu", "uniform-ball");
  if (p.contains("grid_n")) base.grid_n = p["grid_n"].get<std::vector<std::size_t>>();
  base.replicates = uint_or(p, "replicates", 20);
  base.n_test = uint_or(p, "n_test", 400);
  if (p.contains("multiplier_grid")) base.multiplier_grid = p["multiplier_grid"].get<Vec>();

  json estimators;
  if (p.contains("estimators")) {
    estimators = p["estimators"];
  } else {
    estimators = json::array({
        {{"name", "oblique"},
         {"family", "oblique"},
         {"m_trees", 16},
         {"slope_target", -2.0 / 3.0}},
        {{"name", "mondrian"},
         {"family", "mondrian"},
         {"m_trees", 1},
         {"slope_target", -0.4}},
    });
  }

  CheckCount checks;
  std::vector<std::pair<std::string, RateFit>> fits;
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    const json& e = estimators[i];
    RateConfig rc = base;
    rc.family = e["family"].get<std::string>();
    rc.rule = e.contains("rule") ? e["rule"].get<std::string>() : std::string("c1");
    rc.m_trees = e.contains("m_trees") ? e["m_trees"].get<std::size_t>() : 16;
    if (e.contains("feature_matrix"))
      rc.feature_matrix = mat_of(e["feature_matrix"]);
    else if (rc.family == "oblique")
      rc.feature_matrix = aligned_feature_matrix(target.subspace());
    const std::string name = e.contains("name") ? e["name"].get<std::string>() : rc.family;

    const std::uint64_t est_seed = Rng::stream(cfg.seed, {kCliRatesTag, i}).next_u64();
    const RateFit fit = rate_experiment(rc, target, est_seed, cfg.threads);
    if (e.contains("slope_target")) {
      const double tol = e.contains("slope_tol") ? e["slope_tol"].get<double>() : 0.15;
      ++checks.total;
      if (std::abs(fit.slope - e["slope_target"].get<double>()) > tol) ++checks.failed;
    }
    fits.emplace_back(name, fit);
  }

  for (const auto& [name, fit] : fits)
    write_rates_csv(out_path(cfg, "rates_" + name + ".csv"), fit);
  if (cfg.plot) write_rates_plot(out_path(cfg, "rates.svg"), fits);

  out << "experiment rates:";
  for (const auto& [name, fit] : fits) out << " " << name << " slope " << fmt_short(fit.slope);
  out << ", " << (checks.total - checks.failed) << "/" << checks.total
      << " slope checks passed -> " << cfg.out << "\n";
  return checks;
}

CheckCount run_suboptimality(const RunConfig& cfg, std::ostream& out) {
  const json& p = cfg.params;
  const Vec a = p.contains("a") ? p["a"].get<Vec>() : Vec{1.0, 1.0};
  const double noise_sd = num_or(p, "noise_sd", 0.1);
  const std::size_t n = uint_or(p, "n", 10000);
  const std::size_t replicates = uint_or(p, "replicates", 24);
  const Vec lambdas = p.contains("lambdas") ? p["lambdas"].get<Vec>() : Vec{5.0, 10.0};
  std::vector<Vec> weight_sets{{0.5, 0.5}, {0.7, 0.3}};
  if (p.contains("weight_sets")) {
    weight_sets.clear();
    for (const json& row : p["weight_sets"]) weight_sets.push_back(row.get<Vec>());
  }

  CheckCount checks;
  std::vector<SuboptimalityCell> cells;
  std::size_t idx = 0;
  for (const double lambda : lambdas)
    for (const Vec& w : weight_sets) {
      const std::uint64_t cell_seed = Rng::stream(cfg.seed, {kCliSuboptTag, idx++}).next_u64();
      cells.push_back(
          suboptimality_check(a, lambda, w, noise_sd, n, replicates, cell_seed, cfg.threads));
      ++checks.total;
      if (!cells.back().pass) ++checks.failed;
    }

  const std::string path = out_path(cfg, "suboptimality.csv");
  write_suboptimality_csv(path, cells);
  out << "experiment suboptimality: " << (checks.total - checks.failed) << "/" << checks.total
      << " cells above the bound -> " << path << "\n";
  return checks;
}

CheckCount run_geometry(const RunConfig& cfg, std::ostream& out) {
  const std::vector<GeometryRow> rows = geometry_suite(cfg.seed, cfg.threads);
  CheckCount checks;
  checks.total = rows.size();
  for (const GeometryRow& row : rows)
    if (!row.pass) ++checks.failed;
  const std::string path = out_path(cfg, "geometry.csv");
  write_geometry_csv(path, rows);
  out << "experiment geometry: " << (checks.total - checks.failed) << "/" << checks.total
      << " checks passed -> " << path << "\n";
  return checks;
}

CheckCount run_equivalence(const RunConfig& cfg, std::ostream& out) {
  const std::size_t replicates = uint_or(cfg.params, "replicates", 10000);
  const std::vector<EquivalenceRow> rows =
      equivalence_experiment(replicates, cfg.seed, cfg.threads);
  CheckCount checks;
  checks.total = rows.size();
  for (const EquivalenceRow& row : rows)
    if (!row.pass) ++checks.failed;
  const std::string path = out_path(cfg, "equivalence.csv");
  write_equivalence_csv(path, rows);
  out << "experiment equivalence: " << (checks.total - checks.failed) << "/" << checks.total
      << " pairs agree -> " << path << "\n";
  return checks;
}

CheckCount run_bias(const RunConfig& cfg, std::ostream& out) {
  const json& p = cfg.params;
  const std::size_t dim = uint_or(p, "dim", 1);
  const Vec lambdas = p.contains("lambdas") ? p["lambdas"].get<Vec>() : Vec{2.0, 5.0, 10.0};
  const std::vector<BiasRow> rows =
      bias_experiment(dim, lambdas, uint_or(p, "n_mc", 20000), uint_or(p, "n_eval", 4000),
                      uint_or(p, "replicates", 16), cfg.seed, cfg.threads);
  CheckCount checks;
  checks.total = rows.size();
  for (const BiasRow& row : rows)
    if (!row.pass) ++checks.failed;
  const std::string path = out_path(cfg, "bias.csv");
  write_bias_csv(path, rows);
  out << "experiment bias: " << (checks.total - checks.failed) << "/" << checks.total
      << " lifetimes within the bound -> " << path << "\n";
  return checks;
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "sample-tessellation") return run_sample_tessellation(cfg, out);
    if (cfg.command == "fit") return run_fit(cfg, out);
    if (cfg.command == "predict") return run_predict(cfg, out);

    CheckCount checks;
    if (cfg.experiment == "rates")
      checks = run_rates(cfg, out);
    else if (cfg.experiment == "suboptimality")
      checks = run_suboptimality(cfg, out);
    else if (cfg.experiment == "geometry")
      checks = run_geometry(cfg, out);
    else if (cfg.experiment == "equivalence")
      checks = run_equivalence(cfg, out);
    else if (cfg.experiment == "bias")
      checks = run_bias(cfg, out);
    else
      throw ConfigError("unknown experiment kind: " + cfg.experiment);

    if (cfg.assert_checks && checks.failed > 0) {
      err << "error[assert]: " << checks.failed << " of " << checks.total
          << " checks failed\n";
      return 3;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error[config]: " << e.what() << "\n";
    return 2;
  } catch (const InvalidTarget& e) {
    err << "error[invalid-target]: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "error[io]: " << e.what() << "\n";
    return 1;
  } catch (const SchemaVersionMismatch& e) {
    err << "error[schema]: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error[runtime]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace stitforest
