#include "stitforest/runconfig.hpp"

#include <algorithm>
#include <fstream>
#include <vector>

#include "stitforest/errors.hpp"

namespace stitforest {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

enum class Kind { number, uinteger, string, boolean, vec, mat, uvec };

bool is_vec(const json& v) {
  if (!v.is_array()) return false;
  return std::all_of(v.begin(), v.end(), [](const json& e) { return e.is_number(); });
}

bool is_uvec(const json& v) {
  if (!v.is_array()) return false;
  return std::all_of(v.begin(), v.end(),
                     [](const json& e) { return e.is_number_unsigned(); });
}

bool is_mat(const json& v) {
  if (!v.is_array() || v.empty()) return false;
  std::size_t cols = 0;
  for (const json& row : v) {
    if (!is_vec(row) || row.empty()) return false;
    if (cols == 0) cols = row.size();
    if (row.size() != cols) return false;
  }
  return true;
}

void check_kind(const json& v, Kind kind, const std::string& where) {
  switch (kind) {
    case Kind::number:
      if (!v.is_number()) fail(where + " must be a number");
      break;
    case Kind::uinteger:
      if (!v.is_number_unsigned()) fail(where + " must be a nonnegative integer");
      break;
    case Kind::string:
      if (!v.is_string()) fail(where + " must be a string");
      break;
    case Kind::boolean:
      if (!v.is_boolean()) fail(where + " must be a boolean");
      break;
    case Kind::vec:
      if (!is_vec(v)) fail(where + " must be an array of numbers");
      break;
    case Kind::mat:
      if (!is_mat(v)) fail(where + " must be a rectangular array of number arrays");
      break;
    case Kind::uvec:
      if (!is_uvec(v)) fail(where + " must be an array of nonnegative integers");
      break;
  }
}

struct FieldSpec {
  const char* key;
  Kind kind;
  bool required = false;
};

void check_fields(const json& obj, const std::vector<FieldSpec>& fields,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const auto spec = std::find_if(fields.begin(), fields.end(), [&](const FieldSpec& f) {
      return it.key() == f.key;
    });
    if (spec == fields.end()) fail("unknown key \"" + it.key() + "\" in " + where);
    check_kind(it.value(), spec->kind, where + "." + it.key());
  }
  for (const FieldSpec& f : fields)
    if (f.required && !obj.contains(f.key))
      fail(where + "." + std::string(f.key) + " is required");
}

const std::vector<FieldSpec> kSamplerFields = {
    {"family", Kind::string},         {"dim", Kind::uinteger},
    {"lifetime", Kind::number},       {"weights", Kind::vec},
    {"directions", Kind::mat},        {"direction_weights", Kind::vec},
    {"feature_matrix", Kind::mat},    {"window_lo", Kind::vec},
    {"window_hi", Kind::vec},         {"padding_factor", Kind::number},
    {"out_file", Kind::string},
};

const std::vector<FieldSpec> kFitFields = {
    {"data", Kind::string, true},     {"family", Kind::string},
    {"lifetime", Kind::number},       {"weights", Kind::vec},
    {"directions", Kind::mat},        {"direction_weights", Kind::vec},
    {"feature_matrix", Kind::mat},    {"padding_factor", Kind::number},
    {"window_lo", Kind::vec},         {"window_hi", Kind::vec},
    {"margin", Kind::number},         {"trees", Kind::uinteger},
    {"out_file", Kind::string},
};

const std::vector<FieldSpec> kPredictFields = {
    {"model", Kind::string, true},
    {"data", Kind::string, true},
    {"out_file", Kind::string},
};

const std::vector<FieldSpec> kRatesFields = {
    {"target_a", Kind::mat},       {"link", Kind::string},
    {"noise_sd", Kind::number},    {"mu", Kind::string},
    {"grid_n", Kind::uvec},        {"replicates", Kind::uinteger},
    {"n_test", Kind::uinteger},    {"multiplier_grid", Kind::vec},
    {"estimators", Kind::number},  // placeholder; validated structurally below
};

const std::vector<FieldSpec> kEstimatorFields = {
    {"name", Kind::string},          {"family", Kind::string, true},
    {"rule", Kind::string},          {"m_trees", Kind::uinteger},
    {"feature_matrix", Kind::mat},   {"slope_target", Kind::number},
    {"slope_tol", Kind::number},
};

const std::vector<FieldSpec> kSuboptFields = {
    {"a", Kind::vec},           {"noise_sd", Kind::number},
    {"n", Kind::uinteger},      {"replicates", Kind::uinteger},
    {"lambdas", Kind::vec},     {"weight_sets", Kind::mat},
};

const std::vector<FieldSpec> kEquivalenceFields = {
    {"replicates", Kind::uinteger},
};

const std::vector<FieldSpec> kBiasFields = {
    {"dim", Kind::uinteger},    {"lambdas", Kind::vec},
    {"n_mc", Kind::uinteger},   {"n_eval", Kind::uinteger},
    {"replicates", Kind::uinteger},
};

void validate_params(const RunConfig& cfg) {
  const json& p = cfg.params;
  const std::string where = "params";
  if (cfg.command == "sample-tessellation") {
    check_fields(p, kSamplerFields, where);
  } else if (cfg.command == "fit") {
    check_fields(p, kFitFields, where);
  } else if (cfg.command == "predict") {
    check_fields(p, kPredictFields, where);
  } else if (cfg.experiment == "rates") {
    // estimators is an array of objects, outside the scalar kinds
    json flat = p;
    json estimators;
    if (flat.contains("estimators")) {
      estimators = flat["estimators"];
      flat.erase("estimators");
    }
    check_fields(flat, kRatesFields, where);
    if (!estimators.is_null()) {
      if (!estimators.is_array() || estimators.empty())
        fail("params.estimators must be a nonempty array");
      for (const json& e : estimators) {
        if (!e.is_object()) fail("params.estimators entries must be objects");
        check_fields(e, kEstimatorFields, "params.estimators[]");
      }
    }
  } else if (cfg.experiment == "suboptimality") {
    check_fields(p, kSuboptFields, where);
  } else if (cfg.experiment == "geometry") {
    check_fields(p, {}, where);
  } else if (cfg.experiment == "equivalence") {
    check_fields(p, kEquivalenceFields, where);
  } else if (cfg.experiment == "bias") {
    check_fields(p, kBiasFields, where);
  }
}

}  // namespace

RunConfig make_run_config(const std::string& command, const std::string& experiment,
                          const CliOverrides& overrides) {
  static const std::vector<std::string> kCommands = {"sample-tessellation", "fit", "predict",
                                                     "experiment"};
  static const std::vector<std::string> kExperiments = {"rates", "suboptimality", "geometry",
                                                        "equivalence", "bias"};
  if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
    fail("unknown command: " + command);
  if (command == "experiment" &&
      std::find(kExperiments.begin(), kExperiments.end(), experiment) == kExperiments.end())
    fail("unknown experiment kind: " + experiment);

  RunConfig cfg;
  cfg.command = command;
  cfg.experiment = command == "experiment" ? experiment : "";

  if (overrides.config_path) {
    std::ifstream in(*overrides.config_path);
    if (!in.good()) fail("cannot open config file: " + *overrides.config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      fail("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_object()) fail("config root must be an object");
    static const std::vector<FieldSpec> kTopFields = {
        {"version", Kind::uinteger, true}, {"command", Kind::string},
        {"experiment", Kind::string},      {"seed", Kind::uinteger},
        {"threads", Kind::uinteger},       {"out", Kind::string},
        {"plot", Kind::boolean},           {"assert", Kind::boolean},
        {"params", Kind::number},  // placeholder; object-checked below
    };
    json flat = j;
    json params;
    if (flat.contains("params")) {
      params = flat["params"];
      flat.erase("params");
    }
    check_fields(flat, kTopFields, "config");
    if (j["version"].get<std::uint64_t>() != 1) fail("config version must be 1");
    if (j.contains("command") && j["command"].get<std::string>() != command)
      fail("config command does not match the subcommand");
    if (j.contains("experiment") && j["experiment"].get<std::string>() != cfg.experiment)
      fail("config experiment does not match the subcommand");
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("plot")) cfg.plot = j["plot"].get<bool>();
    if (j.contains("assert")) cfg.assert_checks = j["assert"].get<bool>();
    if (!params.is_null()) {
      if (!params.is_object()) fail("config.params must be an object");
      cfg.params = params;
    }
  }

  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.threads) cfg.threads = *overrides.threads;
  if (overrides.out) cfg.out = *overrides.out;
  if (overrides.assert_checks) cfg.assert_checks = true;
  if (overrides.plot) cfg.plot = true;
  if (cfg.threads == 0) fail("threads must be at least 1");

  validate_params(cfg);
  return cfg;
}

}  // namespace stitforest
