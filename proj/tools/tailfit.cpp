// tailfit: simulate, fit, fit-spatial and study front end over the C API.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tailfit/tailfit.h"

namespace {

using nlohmann::ordered_json;

constexpr int kOk = 0, kRuntime = 1, kUsage = 2;

// Raised with the exit code a failed library call maps to.
struct Failure {
  int code;
  std::string message;
};

bool is_argument_error(tf_status s) {
  return s == TF_ERR_INVALID_ARGUMENT || s == TF_ERR_PARSE || s == TF_ERR_THETA_OUT_OF_DOMAIN ||
         s == TF_ERR_PARAM_OUT_OF_RANGE || s == TF_ERR_UNSUPPORTED_FAMILY;
}

void check(tf_status s) {
  if (s == TF_OK) return;
  throw Failure{is_argument_error(s) ? kUsage : kRuntime,
                std::string(tf_status_name(s)) + ": " + tf_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using Table = Handle<tf_table, tf_table_free>;
using Coords = Handle<tf_coords, tf_coords_free>;
using SimSpec = Handle<tf_sim_spec, tf_sim_spec_free>;
using Fit = Handle<tf_fit, tf_fit_free>;
using SpatialFit = Handle<tf_spatial_fit, tf_spatial_free>;
using Study = Handle<tf_study, tf_study_free>;
using StudyResult = Handle<tf_study_result, tf_study_result_free>;

// `call` fills a library-owned string through its char** argument.
template <class Call>
ordered_json take_json(Call call) {
  char* text = nullptr;
  check(call(&text));
  std::unique_ptr<char, Deleter<char, tf_string_free>> owned(text);
  return ordered_json::parse(owned.get());
}

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  std::string format = "json";
};

// ---- table rendering

std::string scalar_text(const ordered_json& v) {
  if (v.is_null()) return "-";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    std::ostringstream s;
    s << std::setprecision(6) << v.get<double>();
    return s.str();
  }
  return v.dump();
}

bool is_record_list(const ordered_json& v) {
  return v.is_array() && !v.empty() && v.front().is_object();
}

void print_records(std::ostream& out, const std::string& title, const ordered_json& rows) {
  std::vector<std::string> cols;
  for (const auto& row : rows)
    for (const auto& [key, _] : row.items())
      if (std::find(cols.begin(), cols.end(), key) == cols.end()) cols.push_back(key);
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width;
  for (const auto& c : cols) width.push_back(c.size());
  for (const auto& row : rows) {
    std::vector<std::string> line;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      line.push_back(row.contains(cols[c]) ? scalar_text(row[cols[c]]) : "");
      width[c] = std::max(width[c], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  out << "\n" << title << "\n";
  for (std::size_t c = 0; c < cols.size(); ++c) out << std::setw(static_cast<int>(width[c]) + 2) << cols[c];
  out << "\n";
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << std::setw(static_cast<int>(width[c]) + 2) << line[c];
    out << "\n";
  }
}

void flatten(const ordered_json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows,
             std::vector<std::pair<std::string, ordered_json>>& tables) {
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) flatten(value, name, rows, tables);
    else if (is_record_list(value)) tables.emplace_back(name, value);
    else if (value.is_array()) {
      std::string text;
      for (const auto& item : value) {
        if (!text.empty()) text += ", ";
        text += item.is_array() ? item.dump() : scalar_text(item);
      }
      rows.emplace_back(name, "[" + text + "]");
    } else rows.emplace_back(name, scalar_text(value));
  }
}

void emit(const ordered_json& j, const Globals& g) {
  if (g.format == "json") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  std::vector<std::pair<std::string, ordered_json>> tables;
  flatten(j, "", rows, tables);
  std::size_t w = 0;
  for (const auto& [k, _] : rows) w = std::max(w, k.size());
  for (const auto& [k, v] : rows) std::cout << std::left << std::setw(static_cast<int>(w) + 2) << k << v << "\n";
  std::cout << std::right;
  for (const auto& [name, t] : tables) print_records(std::cout, name, t);
}

// ---- simulate

struct SimulateArgs {
  std::string model;
  std::optional<double> theta, nu, phi, r, lambda, alpha, beta, noise;
  std::size_t n = 1000;
  std::string margins = "frechet";
  std::string algorithm = "exact";
  std::string coords_path;
  std::size_t sites = 10;
  double side = 3.0;
  std::uint64_t layout_seed = 1;
  std::string out;
};

std::string coords_path_for(const std::string& out) {
  std::filesystem::path p(out);
  std::filesystem::path stem = p.parent_path() / p.stem();
  return stem.string() + ".coords.csv";
}

std::string text(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

int cmd_simulate(const SimulateArgs& a, const Globals& g) {
  const auto need = [&](const std::optional<double>& v, const char* flag) {
    if (!v) throw Failure{kUsage, std::string("--model ") + a.model + " requires " + flag};
  };
  if (a.model == "m1") need(a.theta, "--theta");
  if (a.model == "m2") {
    need(a.nu, "--nu");
    need(a.phi, "--phi");
  }
  if (a.model == "m3") need(a.lambda, "--lambda");
  if (a.model == "spatial") {
    need(a.alpha, "--alpha");
    need(a.beta, "--beta");
  }

  tf_sim_spec* raw = nullptr;
  check(tf_sim_spec_create(a.model.c_str(), &raw));
  SimSpec spec(raw);
  const auto set = [&](const char* key, const std::string& value) { check(tf_sim_spec_set(spec.get(), key, value.c_str())); };
  const std::pair<const char*, const std::optional<double>*> params[] = {
      {"theta", &a.theta}, {"nu", &a.nu}, {"phi", &a.phi}, {"r", &a.r},
      {"lambda", &a.lambda}, {"alpha", &a.alpha}, {"beta", &a.beta}};
  for (const auto& [key, value] : params)
    if (*value) set(key, text(**value));
  set("n", std::to_string(a.n));
  set("seed", std::to_string(g.seed.value_or(0)));
  set("margins", a.margins);
  set("algorithm", a.algorithm);
  if (a.noise) set("noise", text(*a.noise));

  Coords coords;
  if (a.model == "spatial") {
    tf_coords* c = nullptr;
    if (!a.coords_path.empty()) check(tf_coords_read_csv(a.coords_path.c_str(), &c));
    else check(tf_coords_random(a.sites, a.side, a.layout_seed, &c));
    coords.reset(c);
    check(tf_sim_spec_set_coords(spec.get(), coords.get()));
  }
  check(tf_sim_spec_validate(spec.get()));

  tf_table* t = nullptr;
  check(tf_simulate(spec.get(), &t));
  Table table(t);
  check(tf_table_write_csv(table.get(), a.out.c_str()));

  ordered_json manifest = take_json([&](char** js) { return tf_sim_spec_json(spec.get(), js); });
  manifest["rows"] = tf_table_rows(table.get());
  manifest["columns"] = tf_table_cols(table.get());
  manifest["output"] = a.out;
  if (coords) {
    const std::string cpath = coords_path_for(a.out);
    check(tf_coords_write_csv(coords.get(), cpath.c_str()));
    manifest["coords"] = cpath;
  }
  emit(manifest, g);
  return kOk;
}

// ---- fit

struct FitArgs {
  std::string data;
  std::string family;
  std::optional<std::size_t> k, m;
  std::vector<std::size_t> columns{0, 1};
  std::string weights = "g1";
  unsigned restarts = 8;
  bool covariance = false;
  std::string coords;
  std::string method = "ls";
};

Table load_table(const std::string& path) {
  tf_table* t = nullptr;
  check(tf_table_read_csv(path.c_str(), &t));
  return Table(t);
}

int cmd_fit_spatial(const FitArgs& a, const Globals& g) {
  if (a.k) throw Failure{kUsage, "spatial fits select k per pair from --m; --k is not accepted"};
  if (!a.m) throw Failure{kUsage, "spatial fits require --m"};
  Table data = load_table(a.data);
  tf_coords* c = nullptr;
  check(tf_coords_read_csv(a.coords.c_str(), &c));
  Coords coords(c);
  tf_spatial_options o;
  tf_spatial_options_init(&o);
  o.method = a.method.c_str();
  o.weights = a.weights.c_str();
  o.m = *a.m;
  o.restarts = a.restarts;
  o.seed = g.seed.value_or(0);
  o.threads = g.threads;
  tf_spatial_fit* f = nullptr;
  check(tf_fit_spatial(data.get(), coords.get(), &o, &f));
  SpatialFit fit(f);
  emit(take_json([&](char** js) { return tf_spatial_json(fit.get(), js); }), g);
  return kOk;
}

int cmd_fit(const FitArgs& a, const Globals& g) {
  if (!a.coords.empty()) return cmd_fit_spatial(a, g);
  if (a.family.empty()) throw Failure{kUsage, "--family is required"};
  if (!a.k && !a.m) throw Failure{kUsage, "one of --k or --m is required"};
  Table data = load_table(a.data);
  tf_fit_options o;
  tf_fit_options_init(&o);
  o.family = a.family.c_str();
  o.weights = a.weights.c_str();
  o.column1 = a.columns[0];
  o.column2 = a.columns[1];
  o.k = a.k.value_or(0);
  o.m = a.m.value_or(0);
  o.restarts = a.restarts;
  o.seed = g.seed.value_or(0);
  o.covariance = a.covariance;
  tf_fit* f = nullptr;
  check(tf_fit_bivariate(data.get(), &o, &f));
  Fit fit(f);
  emit(take_json([&](char** js) { return tf_fit_json(fit.get(), js); }), g);
  return kOk;
}

// ---- study

struct StudyArgs {
  std::string config;
  std::string out_dir = ".";
  std::string name;
};

int cmd_study(const StudyArgs& a, const Globals& g) {
  tf_study* s = nullptr;
  check(tf_study_load(a.config.c_str(), &s));
  Study study(s);
  if (g.seed) check(tf_study_set_seed(study.get(), *g.seed));
  if (g.threads) check(tf_study_set_threads(study.get(), g.threads));
  ordered_json config = take_json([&](char** js) { return tf_study_json(study.get(), js); });

  std::filesystem::create_directories(a.out_dir);
  const std::string name = a.name.empty() ? std::filesystem::path(a.config).stem().string() : a.name;
  const std::string tidy = (std::filesystem::path(a.out_dir) / (name + ".tidy.csv")).string();
  const std::string summary = (std::filesystem::path(a.out_dir) / (name + ".summary.csv")).string();

  tf_study_result* r = nullptr;
  check(tf_study_run(study.get(), &r));
  StudyResult result(r);
  check(tf_study_write_tidy(result.get(), tidy.c_str()));
  check(tf_study_write_summary(result.get(), summary.c_str()));

  ordered_json out;
  out["config"] = config;
  out["outputs"] = {{"tidy", tidy}, {"summary", summary}};
  out["attempts"] = tf_study_attempts(result.get());
  out["failures"] = tf_study_failures(result.get());
  out["wall_seconds"] = tf_study_wall_seconds(result.get());
  emit(out, g);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank-based extremal dependence estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tf_version()));

  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (64-bit)");
  app.add_option("--threads", g.threads, "Maximum threads; 0 uses TAILFIT_THREADS or all cores");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "table"}));
  app.fallthrough();

  const std::vector<std::string> presets{"g1", "g2", "g3", "g4", "g5", "g6", "g7"};

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Draw a sample from M1, M2, M3 or the spatial model");
  sim->add_option("--model", sa.model, "m1, m2, m3 or spatial")->required()->check(CLI::IsMember({"m1", "m2", "m3", "spatial"}));
  sim->add_option("--theta", sa.theta, "M1 coefficient theta in (1/2, 1]");
  sim->add_option("--nu", sa.nu, "M2 asymmetry nu");
  sim->add_option("--phi", sa.phi, "M2 asymmetry phi");
  sim->add_option("--r", sa.r, "M2 dependence r (default 2)");
  sim->add_option("--lambda", sa.lambda, "M3 ratio alpha_R / alpha_W");
  sim->add_option("--alpha", sa.alpha, "Spatial variogram exponent in (0, 2]");
  sim->add_option("--beta", sa.beta, "Spatial variogram scale");
  sim->add_option("--n", sa.n, "Sample size")->capture_default_str();
  sim->add_option("--noise", sa.noise, "Add independent Pareto noise with this index");
  sim->add_option("--margins", sa.margins, "frechet or uniform")->check(CLI::IsMember({"frechet", "uniform"}))->capture_default_str();
  sim->add_option("--algorithm", sa.algorithm, "Spatial sampler: exact or normalized")->check(CLI::IsMember({"exact", "normalized"}))->capture_default_str();
  auto* coords_in = sim->add_option("--coords", sa.coords_path, "Site coordinates CSV (id,x,y)")->check(CLI::ExistingFile);
  sim->add_option("--sites", sa.sites, "Random layout: number of sites")->excludes(coords_in)->capture_default_str();
  sim->add_option("--side", sa.side, "Random layout: square side")->excludes(coords_in)->capture_default_str();
  sim->add_option("--layout-seed", sa.layout_seed, "Random layout: seed")->excludes(coords_in)->capture_default_str();
  sim->add_option("--out", sa.out, "Output CSV")->required();

  FitArgs fa;
  const auto add_fit_options = [&](CLI::App* cmd, bool spatial) {
    cmd->add_option("--data", fa.data, "Input CSV with a header row")->required()->check(CLI::ExistingFile);
    auto* k = cmd->add_option("--k", fa.k, "Number of upper order statistics");
    auto* m = cmd->add_option("--m", fa.m, "Target number of joint exceedances");
    k->excludes(m);
    m->excludes(k);
    cmd->add_option("--weights", fa.weights, "Weight scheme g1..g7")->check(CLI::IsMember(presets))->capture_default_str();
    cmd->add_option("--restarts", fa.restarts, "Optimizer restarts")->capture_default_str();
    auto* coords = cmd->add_option("--coords", fa.coords, "Site coordinates CSV (id,x,y)")->check(CLI::ExistingFile);
    auto* method = cmd->add_option("--method", fa.method, "Spatial estimator")->check(CLI::IsMember({"pairwise", "ls", "joint"}))->capture_default_str();
    if (spatial) {
      coords->required();
    } else {
      method->needs(coords);
      cmd->add_option("--family", fa.family, "ihr, ial, rs, hr-ad or al-ad")
          ->check(CLI::IsMember({"ihr", "ial", "rs", "hr-ad", "al-ad", "inverted-husler-reiss", "inverted-asym-logistic",
                                 "random-scale", "husler-reiss-ad", "asym-logistic-ad"}));
      cmd->add_option("--columns", fa.columns, "Two zero-based column indices")->expected(2)->capture_default_str();
      cmd->add_flag("--covariance", fa.covariance, "Report the plug-in covariance of (theta, sigma)");
    }
  };
  auto* fit = app.add_subcommand("fit", "Fit a bivariate tail model (or a spatial model with --coords)");
  add_fit_options(fit, false);
  auto* fit_spatial = app.add_subcommand("fit-spatial", "Fit the spatial model to all pairs of sites");
  add_fit_options(fit_spatial, true);

  StudyArgs st;
  auto* study = app.add_subcommand("study", "Run a Monte Carlo study from a configuration file");
  study->add_option("--config", st.config, "Study configuration file")->required()->check(CLI::ExistingFile);
  study->add_option("--out-dir", st.out_dir, "Directory for the CSV outputs")->capture_default_str();
  study->add_option("--name", st.name, "Output file stem (default: the config file stem)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*sim) return cmd_simulate(sa, g);
    if (*fit) return cmd_fit(fa, g);
    if (*fit_spatial) return cmd_fit_spatial(fa, g);
    if (*study) return cmd_study(st, g);
  } catch (const Failure& f) {
    std::cerr << "tailfit: " << f.message << "\n";
    if (f.code == kUsage) std::cerr << "Run with --help for usage.\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "tailfit: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
