#include "tailfit/tailfit.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tailfit/bench.hpp"
#include "tailfit/error.hpp"
#include "tailfit/io.hpp"
#include "tailfit/mestim.hpp"
#include "tailfit/parallel.hpp"
#include "tailfit/simulate.hpp"
#include "tailfit/spatial.hpp"

using nlohmann::ordered_json;
using namespace tailfit;

struct tf_table {
  Table table;
};

struct tf_coords {
  Coordinates coords;
};

struct tf_sim_spec {
  SimSpec spec;
};

struct tf_fit {
  FamilyId family;
  WeightPreset weights;
  PairIndex columns;
  BivariateFit fit;
  std::optional<Eigen::MatrixXd> covariance;
};

struct tf_spatial_fit {
  std::string method;
  WeightPreset weights;
  std::size_t m = 0;
  PairwiseFits pairwise;
  std::optional<SpatialFit> fit;
};

struct tf_study {
  StudySpec spec;
};

struct tf_study_result {
  StudySpec spec;
  StudyResult result;
};

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

thread_local std::string last_error;

tf_status status_of(ErrorCode code) { return static_cast<tf_status>(static_cast<int>(code) + 1); }

template <class F>
tf_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TF_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TF_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TF_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || end != value.data() + value.size())
    fail(ErrorCode::Parse, key + ": expected a number, got '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || end != value.data() + value.size())
    fail(ErrorCode::Parse, key + ": expected a non-negative integer, got '" + value + "'");
  return v;
}

std::string preset_name(WeightPreset p) { return "g" + std::to_string(static_cast<int>(p)); }

WeightPreset preset_or_default(const char* name) {
  return name == nullptr ? WeightPreset::G1 : weight_preset_from_name(name);
}

std::string model_name(SimModel m) {
  switch (m) {
    case SimModel::M1: return "m1";
    case SimModel::M2: return "m2";
    case SimModel::M3: return "m3";
    case SimModel::SpatialIBR: return "spatial";
  }
  return "";
}

ordered_json generator_json(const SimSpec& s) {
  ordered_json j;
  j["model"] = model_name(s.model);
  ordered_json params;
  switch (s.model) {
    case SimModel::M1: params["theta"] = s.theta; break;
    case SimModel::M2:
      params["nu"] = s.logistic.nu;
      params["phi"] = s.logistic.phi;
      params["r"] = s.logistic.r;
      break;
    case SimModel::M3: params["lambda"] = s.lambda; break;
    case SimModel::SpatialIBR:
      params["alpha"] = s.alpha;
      params["beta"] = s.beta;
      params["sites"] = s.coords.size();
      params["algorithm"] = s.algorithm == SpatialAlgorithm::ExtremalFunctions ? "exact" : "normalized";
      break;
  }
  j["params"] = params;
  j["n"] = s.n;
  j["noise"] = s.noise_alpha ? ordered_json(*s.noise_alpha) : ordered_json(nullptr);
  j["margins"] = s.margins == Margins::Frechet ? "frechet" : "uniform";
  j["seed"] = s.seed;
  return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

extern "C" {

const char* tf_status_name(tf_status status) {
  if (status == TF_OK) return "Ok";
  if (status > TF_OK && status < TF_ERR_INTERNAL)
    return to_string(static_cast<ErrorCode>(static_cast<int>(status) - 1));
  return "Internal";
}

const char* tf_last_error(void) { return last_error.c_str(); }

const char* tf_version(void) { return "0.1.0"; }

void tf_string_free(char* text) { delete[] text; }

// ---- tables

tf_status tf_table_create(size_t rows, size_t cols, const double* row_major, tf_table** out) {
  return guarded([&] {
    require(out, "out");
    if (rows * cols > 0) require(row_major, "data");
    auto t = std::make_unique<tf_table>();
    t->table.values = Matrix(rows, cols, std::vector<double>(row_major, row_major + rows * cols));
    for (std::size_t j = 0; j < cols; ++j) t->table.header.push_back("x" + std::to_string(j + 1));
    *out = t.release();
  });
}

tf_status tf_table_read_csv(const char* path, tf_table** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new tf_table{read_csv_file(path)};
  });
}

tf_status tf_table_write_csv(const tf_table* table, const char* path) {
  return guarded([&] {
    require(table, "table");
    require(path, "path");
    write_csv_file(path, table->table.header, table->table.values);
  });
}

size_t tf_table_rows(const tf_table* table) { return table ? table->table.values.rows() : 0; }
size_t tf_table_cols(const tf_table* table) { return table ? table->table.values.cols() : 0; }
const double* tf_table_data(const tf_table* table) { return table ? table->table.values.data().data() : nullptr; }

const char* tf_table_column_name(const tf_table* table, size_t col) {
  if (!table || col >= table->table.header.size()) return nullptr;
  return table->table.header[col].c_str();
}

void tf_table_free(tf_table* table) { delete table; }

// ---- coordinates

tf_status tf_coords_create(size_t sites, const double* x, const double* y, tf_coords** out) {
  return guarded([&] {
    require(out, "out");
    if (sites > 0) {
      require(x, "x");
      require(y, "y");
    }
    *out = new tf_coords{Coordinates{{x, x + sites}, {y, y + sites}}};
  });
}

tf_status tf_coords_random(size_t sites, double side, uint64_t seed, tf_coords** out) {
  return guarded([&] {
    require(out, "out");
    if (sites < 2) fail(ErrorCode::InvalidArgument, "at least two sites are required");
    if (!(side > 0.0) || !std::isfinite(side)) fail(ErrorCode::InvalidArgument, "side must be positive");
    *out = new tf_coords{random_layout(sites, side, seed)};
  });
}

tf_status tf_coords_read_csv(const char* path, tf_coords** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new tf_coords{read_coords_csv_file(path)};
  });
}

tf_status tf_coords_write_csv(const tf_coords* coords, const char* path) {
  return guarded([&] {
    require(coords, "coords");
    require(path, "path");
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    write_coords_csv(f, coords->coords);
    if (!f.flush()) fail(ErrorCode::Io, std::string("write to '") + path + "' failed");
  });
}

size_t tf_coords_size(const tf_coords* coords) { return coords ? coords->coords.size() : 0; }

double tf_coords_x(const tf_coords* coords, size_t site) {
  return coords && site < coords->coords.size() ? coords->coords.x[site] : kNaN;
}

double tf_coords_y(const tf_coords* coords, size_t site) {
  return coords && site < coords->coords.size() ? coords->coords.y[site] : kNaN;
}

void tf_coords_free(tf_coords* coords) { delete coords; }

// ---- simulation

tf_status tf_sim_spec_create(const char* model, tf_sim_spec** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const std::string m = model;
    auto s = std::make_unique<tf_sim_spec>();
    if (m == "m1") s->spec.model = SimModel::M1;
    else if (m == "m2") s->spec.model = SimModel::M2;
    else if (m == "m3") s->spec.model = SimModel::M3;
    else if (m == "spatial") s->spec.model = SimModel::SpatialIBR;
    else fail(ErrorCode::InvalidArgument, "unknown model '" + m + "' (expected m1, m2, m3 or spatial)");
    *out = s.release();
  });
}

tf_status tf_sim_spec_set(tf_sim_spec* spec, const char* key, const char* value) {
  return guarded([&] {
    require(spec, "spec");
    require(key, "key");
    require(value, "value");
    const std::string k = key, v = value;
    SimSpec& s = spec->spec;
    if (k == "theta") s.theta = parse_double(k, v);
    else if (k == "nu") s.logistic.nu = parse_double(k, v);
    else if (k == "phi") s.logistic.phi = parse_double(k, v);
    else if (k == "r") s.logistic.r = parse_double(k, v);
    else if (k == "lambda") s.lambda = parse_double(k, v);
    else if (k == "alpha") s.alpha = parse_double(k, v);
    else if (k == "beta") s.beta = parse_double(k, v);
    else if (k == "n") s.n = parse_u64(k, v);
    else if (k == "seed") s.seed = parse_u64(k, v);
    else if (k == "stream") s.stream = parse_u64(k, v);
    else if (k == "spectral_cap") s.spectral_cap = parse_u64(k, v);
    else if (k == "noise") {
      if (v == "none") s.noise_alpha.reset();
      else s.noise_alpha = parse_double(k, v);
    } else if (k == "margins") {
      if (v == "uniform") s.margins = Margins::Uniform;
      else if (v == "frechet") s.margins = Margins::Frechet;
      else fail(ErrorCode::InvalidArgument, "margins: expected uniform or frechet");
    } else if (k == "algorithm") {
      if (v == "exact") s.algorithm = SpatialAlgorithm::ExtremalFunctions;
      else if (v == "normalized") s.algorithm = SpatialAlgorithm::NormalizedSpectral;
      else fail(ErrorCode::InvalidArgument, "algorithm: expected exact or normalized");
    } else fail(ErrorCode::InvalidArgument, "unknown simulation key '" + k + "'");
  });
}

tf_status tf_sim_spec_set_coords(tf_sim_spec* spec, const tf_coords* coords) {
  return guarded([&] {
    require(spec, "spec");
    require(coords, "coords");
    spec->spec.coords = coords->coords;
  });
}

tf_status tf_sim_spec_validate(const tf_sim_spec* spec) {
  return guarded([&] {
    require(spec, "spec");
    spec->spec.validate();
  });
}

tf_status tf_simulate(const tf_sim_spec* spec, tf_table** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    spec->spec.validate();
    auto t = std::make_unique<tf_table>();
    t->table.values = simulate(spec->spec);
    if (spec->spec.model == SimModel::SpatialIBR) {
      for (std::size_t j = 0; j < t->table.values.cols(); ++j) t->table.header.push_back("s" + std::to_string(j + 1));
    } else {
      t->table.header = {"x", "y"};
    }
    *out = t.release();
  });
}

tf_status tf_sim_spec_json(const tf_sim_spec* spec, char** out) {
  return guarded([&] {
    require(spec, "spec");
    require(out, "out");
    *out = copy_string(dump(generator_json(spec->spec)));
  });
}

void tf_sim_spec_free(tf_sim_spec* spec) { delete spec; }

// ---- bivariate fits

void tf_fit_options_init(tf_fit_options* options) {
  if (!options) return;
  *options = tf_fit_options{};
  options->column2 = 1;
  options->restarts = 8;
}

tf_status tf_fit_bivariate(const tf_table* data, const tf_fit_options* options, tf_fit** out) {
  return guarded([&] {
    require(data, "data");
    require(options, "options");
    require(out, "out");
    require(options->family, "family");
    if ((options->k == 0) == (options->m == 0))
      fail(ErrorCode::InvalidArgument, "exactly one of k and m must be given");
    const Matrix& x = data->table.values;
    if (options->column1 >= x.cols() || options->column2 >= x.cols() || options->column1 == options->column2)
      fail(ErrorCode::InvalidArgument, "columns must be two distinct indices below " + std::to_string(x.cols()));
    const TailFamily family = TailFamily::from_name(options->family);
    const WeightPreset preset = preset_or_default(options->weights);
    const WeightScheme weights = WeightScheme::preset(family, family.default_reference(), preset);
    const RankedSample sample = RankedSample::from_data(x);
    const PairIndex pair{options->column1, options->column2};
    const TailIndexChoice choice =
        options->k ? TailIndexChoice::fixed_k(options->k) : TailIndexChoice::effective_m(options->m);
    FitOptions fo;
    fo.restarts = options->restarts;
    fo.seed = options->seed;
    auto f = std::make_unique<tf_fit>(tf_fit{family.id(), preset, pair, fit_bivariate(sample, pair, family, weights, choice, fo), {}});
    if (options->covariance) {
      if (!family.product_form())
        fail(ErrorCode::UnsupportedFamily, "the plug-in covariance needs a product-form family (ihr or ial)");
      f->covariance = plugin_covariance_ai(family, f->fit, weights);
    }
    *out = f.release();
  });
}

size_t tf_fit_dimension(const tf_fit* fit) { return fit ? fit->fit.theta_hat.size() : 0; }

double tf_fit_theta(const tf_fit* fit, size_t index) {
  return fit && index < fit->fit.theta_hat.size() ? fit->fit.theta_hat[index] : kNaN;
}

double tf_fit_zeta(const tf_fit* fit) { return fit ? fit->fit.zeta_hat : kNaN; }
double tf_fit_sigma(const tf_fit* fit) { return fit ? fit->fit.sigma_hat : kNaN; }
double tf_fit_eta(const tf_fit* fit) { return fit ? fit->fit.eta_hat : kNaN; }
double tf_fit_objective(const tf_fit* fit) { return fit ? fit->fit.objective : kNaN; }
size_t tf_fit_k(const tf_fit* fit) { return fit ? fit->fit.k_used : 0; }
size_t tf_fit_m(const tf_fit* fit) { return fit ? fit->fit.m_used : 0; }
int tf_fit_converged(const tf_fit* fit) { return fit && fit->fit.converged; }
int tf_fit_at_boundary(const tf_fit* fit) { return fit && fit->fit.at_boundary; }
int tf_fit_has_covariance(const tf_fit* fit) { return fit && fit->covariance.has_value(); }

double tf_fit_covariance(const tf_fit* fit, size_t row, size_t col) {
  if (!fit || !fit->covariance) return kNaN;
  const auto& c = *fit->covariance;
  if (row >= static_cast<size_t>(c.rows()) || col >= static_cast<size_t>(c.cols())) return kNaN;
  return c(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

tf_status tf_fit_json(const tf_fit* fit, char** out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    const BivariateFit& f = fit->fit;
    ordered_json j;
    j["family"] = std::string(TailFamily(fit->family).name());
    j["weights"] = preset_name(fit->weights);
    j["columns"] = {fit->columns.first, fit->columns.second};
    j["n"] = f.n;
    ordered_json theta = ordered_json::array();
    for (double t : f.theta_hat) theta.push_back(number(t));
    j["theta_hat"] = theta;
    j["zeta_hat"] = number(f.zeta_hat);
    j["sigma_hat"] = number(f.sigma_hat);
    j["eta_hat"] = number(f.eta_hat);
    j["objective"] = number(f.objective);
    j["k"] = f.k_used;
    j["m"] = f.m_used;
    j["converged"] = f.converged;
    j["boundary_flag"] = f.at_boundary;
    j["evaluations"] = f.evaluations;
    if (fit->covariance) {
      ordered_json rows = ordered_json::array();
      for (Eigen::Index r = 0; r < fit->covariance->rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index c = 0; c < fit->covariance->cols(); ++c) row.push_back(number((*fit->covariance)(r, c)));
        rows.push_back(row);
      }
      j["covariance"] = rows;
    }
    *out = copy_string(dump(j));
  });
}

void tf_fit_free(tf_fit* fit) { delete fit; }

// ---- spatial fits

void tf_spatial_options_init(tf_spatial_options* options) {
  if (!options) return;
  *options = tf_spatial_options{};
  options->method = "ls";
  options->restarts = 8;
}

tf_status tf_fit_spatial(const tf_table* data, const tf_coords* coords, const tf_spatial_options* options,
                         tf_spatial_fit** out) {
  return guarded([&] {
    require(data, "data");
    require(coords, "coords");
    require(options, "options");
    require(out, "out");
    const std::string method = options->method ? options->method : "ls";
    if (method != "pairwise" && method != "ls" && method != "joint")
      fail(ErrorCode::InvalidArgument, "unknown method '" + method + "' (expected pairwise, ls or joint)");
    if (options->m == 0) fail(ErrorCode::InvalidArgument, "m must be positive");
    const Matrix& x = data->table.values;
    if (x.cols() != coords->coords.size())
      fail(ErrorCode::InvalidArgument, "data has " + std::to_string(x.cols()) + " columns but there are " +
                                           std::to_string(coords->coords.size()) + " sites");
    const SpatialModel model(coords->coords);
    const WeightPreset preset = preset_or_default(options->weights);
    const WeightScheme weights = spatial_weights(preset);
    SpatialOptions so;
    so.restarts = options->restarts;
    so.bivariate.restarts = options->restarts;
    so.seed = options->seed;
    so.bivariate.seed = options->seed;
    so.threads = options->threads;
    auto f = std::make_unique<tf_spatial_fit>();
    f->method = method;
    f->weights = preset;
    f->m = options->m;
    f->pairwise = pairwise_fits(RankedSample::from_data(x), model, options->m, weights, so);
    if (method == "ls") f->fit = fit_least_squares(f->pairwise, so);
    else if (method == "joint") f->fit = fit_joint(f->pairwise, weights, so);
    else if (f->pairwise.usable() == 0) fail(ErrorCode::SpatialNoData, "no pair has usable tail data");
    *out = f.release();
  });
}

double tf_spatial_alpha(const tf_spatial_fit* fit) { return fit && fit->fit ? fit->fit->alpha_hat : kNaN; }
double tf_spatial_beta(const tf_spatial_fit* fit) { return fit && fit->fit ? fit->fit->beta_hat : kNaN; }
size_t tf_spatial_pair_count(const tf_spatial_fit* fit) { return fit ? fit->pairwise.pairs.size() : 0; }
size_t tf_spatial_usable_pairs(const tf_spatial_fit* fit) { return fit ? fit->pairwise.usable() : 0; }

tf_status tf_spatial_pair(const tf_spatial_fit* fit, size_t index, size_t* site1, size_t* site2, double* distance,
                          double* theta) {
  return guarded([&] {
    require(fit, "fit");
    if (index >= fit->pairwise.pairs.size()) fail(ErrorCode::InvalidArgument, "pair index out of range");
    const PairEstimate& p = fit->pairwise.pairs[index];
    if (site1) *site1 = p.pair.first;
    if (site2) *site2 = p.pair.second;
    if (distance) *distance = p.distance;
    if (theta) *theta = p.fit ? p.fit->theta_hat[0] : kNaN;
  });
}

tf_status tf_spatial_json(const tf_spatial_fit* fit, char** out) {
  return guarded([&] {
    require(fit, "fit");
    require(out, "out");
    ordered_json j;
    j["method"] = fit->method;
    j["weights"] = preset_name(fit->weights);
    j["m"] = fit->m;
    j["usable_pairs"] = fit->pairwise.usable();
    std::size_t sites = 0;
    for (const auto& p : fit->pairwise.pairs) sites = std::max(sites, p.pair.second + 1);
    j["sites"] = sites;
    if (fit->fit) {
      const SpatialFit& s = *fit->fit;
      j["alpha_hat"] = number(s.alpha_hat);
      j["beta_hat"] = number(s.beta_hat);
      j["objective"] = number(s.objective);
      j["converged"] = s.converged;
      j["evaluations"] = s.evaluations;
    }
    ordered_json pairs = ordered_json::array();
    for (const auto& p : fit->pairwise.pairs) {
      ordered_json row;
      row["site1"] = p.pair.first;
      row["site2"] = p.pair.second;
      row["distance"] = number(p.distance);
      row["k"] = p.k;
      row["m"] = p.m;
      row["theta_hat"] = p.fit ? number(p.fit->theta_hat[0]) : ordered_json(nullptr);
      if (fit->fit) {
        row["theta_spatial"] = number(link_theta(p.distance, fit->fit->alpha_hat, fit->fit->beta_hat));
        const auto& used = fit->fit->pairs;
        for (std::size_t u = 0; u < used.size() && u < fit->fit->zeta_hats.size(); ++u)
          if (used[u].first == p.pair.first && used[u].second == p.pair.second)
            row["zeta_hat"] = number(fit->fit->zeta_hats[u]);
      }
      if (!p.warning.empty()) row["warning"] = p.warning;
      pairs.push_back(row);
    }
    j["pairs"] = pairs;
    std::vector<std::string> warnings = fit->pairwise.warnings;
    if (fit->fit) warnings.insert(warnings.end(), fit->fit->warnings.begin(), fit->fit->warnings.end());
    j["warnings"] = warnings;
    *out = copy_string(dump(j));
  });
}

void tf_spatial_free(tf_spatial_fit* fit) { delete fit; }

// ---- studies

tf_status tf_study_load(const char* path, tf_study** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto s = std::make_unique<tf_study>(tf_study{load_study_config(path)});
    s->spec.validate();
    *out = s.release();
  });
}

tf_status tf_study_parse(const char* text, tf_study** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    std::istringstream in(text);
    auto s = std::make_unique<tf_study>(tf_study{parse_study_config(in)});
    s->spec.validate();
    *out = s.release();
  });
}

tf_status tf_study_set_seed(tf_study* study, uint64_t seed) {
  return guarded([&] {
    require(study, "study");
    study->spec.seed = seed;
  });
}

tf_status tf_study_set_threads(tf_study* study, unsigned threads) {
  return guarded([&] {
    require(study, "study");
    study->spec.threads = threads;
  });
}

tf_status tf_study_json(const tf_study* study, char** out) {
  return guarded([&] {
    require(study, "study");
    require(out, "out");
    const StudySpec& s = study->spec;
    ordered_json j;
    j["study"] = std::string(study_kind_name(s.kind));
    ordered_json generator = generator_json(s.generator);
    generator.erase("seed");  // replications draw from the study seed
    if (!s.grid.empty())
      for (const char* key : {"theta", "nu", "phi", "lambda"}) generator["params"].erase(key);
    j["generator"] = generator;
    j["family"] = std::string(TailFamily(s.fit_family()).name());
    j["weights"] = preset_name(s.weights);
    if (s.kind == StudyKind::Spatial) j["m"] = s.m_values;
    else j["k"] = s.k_values;
    if (!s.grid.empty()) j["grid"] = s.grid;
    j["truth"] = !s.grid.empty() ? ordered_json(nullptr)
                                                   : ordered_json(generator_truth(s.generator, s.fit_family()));
    j["replications"] = s.replications;
    j["seed"] = s.seed;
    std::vector<std::string> metrics;
    for (Metric m : s.metrics) metrics.emplace_back(metric_name(m));
    j["metrics"] = metrics;
    j["intervals"] = s.intervals;
    j["threads"] = resolve_threads(s.threads);
    j["restarts"] = s.fit.restarts;
    *out = copy_string(dump(j));
  });
}

tf_status tf_study_run(const tf_study* study, tf_study_result** out) {
  return guarded([&] {
    require(study, "study");
    require(out, "out");
    auto r = std::make_unique<tf_study_result>();
    r->spec = study->spec;
    r->result = run_study(study->spec);
    *out = r.release();
  });
}

tf_status tf_study_write_tidy(const tf_study_result* result, const char* path) {
  return guarded([&] {
    require(result, "result");
    require(path, "path");
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    write_tidy_csv(result->result, result->spec, f);
    if (!f.flush()) fail(ErrorCode::Io, std::string("write to '") + path + "' failed");
  });
}

tf_status tf_study_write_summary(const tf_study_result* result, const char* path) {
  return guarded([&] {
    require(result, "result");
    require(path, "path");
    std::ofstream f(path, std::ios::binary);
    if (!f) fail(ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    write_summary_csv(result->result, result->spec, f);
    if (!f.flush()) fail(ErrorCode::Io, std::string("write to '") + path + "' failed");
  });
}

size_t tf_study_attempts(const tf_study_result* result) { return result ? result->result.attempts() : 0; }
size_t tf_study_failures(const tf_study_result* result) { return result ? result->result.failures() : 0; }
double tf_study_wall_seconds(const tf_study_result* result) { return result ? result->result.wall_seconds : kNaN; }

void tf_study_free(tf_study* study) { delete study; }
void tf_study_result_free(tf_study_result* result) { delete result; }

}  // extern "C"
