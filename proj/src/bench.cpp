#include "tailfit/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tailfit/empirical.hpp"
#include "tailfit/error.hpp"
#include "tailfit/io.hpp"
#include "tailfit/parallel.hpp"

namespace tailfit {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kZ975 = 1.959963984540054;

// Linear interpolation between order statistics (type 7).
double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return kNan;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double iqr(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  return quantile_sorted(x, 0.75) - quantile_sorted(x, 0.25);
}

CoordinateSummary summarize(const std::vector<double>& values, double truth) {
  CoordinateSummary s;
  s.truth = truth;
  const double n = static_cast<double>(values.size());
  if (values.empty()) {
    s.mean = s.bias = s.rmse = s.variance = s.mc_se = s.coverage = kNan;
    s.quantiles.fill(kNan);
    return s;
  }
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  s.bias = s.mean - truth;
  double ss = 0.0, sq = 0.0;
  for (double v : values) {
    ss += (v - s.mean) * (v - s.mean);
    sq += (v - truth) * (v - truth);
  }
  s.variance = ss / n;
  s.rmse = std::sqrt(sq / n);
  s.mc_se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : kNan;
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t q = 0; q < kBoxplotLevels.size(); ++q) s.quantiles[q] = quantile_sorted(sorted, kBoxplotLevels[q]);
  s.coverage = kNan;
  return s;
}

FamilyId default_family(SimModel model) {
  switch (model) {
    case SimModel::M1: return FamilyId::InvertedHuslerReiss;
    case SimModel::M2: return FamilyId::InvertedAsymLogistic;
    case SimModel::M3: return FamilyId::RandomScale;
    case SimModel::SpatialIBR: return FamilyId::InvertedHuslerReiss;
  }
  return FamilyId::InvertedHuslerReiss;
}

SimSpec apply_grid_point(SimSpec g, std::span<const double> point) {
  switch (g.model) {
    case SimModel::M1: g.theta = point[0]; break;
    case SimModel::M2:
      g.logistic.nu = point[0];
      g.logistic.phi = point[1];
      break;
    case SimModel::M3: g.lambda = point[0]; break;
    case SimModel::SpatialIBR: fail(ErrorCode::InvalidArgument, "parameter grids are bivariate only");
  }
  return g;
}

std::size_t grid_dimension(SimModel model) { return model == SimModel::M2 ? 2 : 1; }

std::string join(std::span<const double> v, char sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + format_double(v[i]);
  return s;
}

// One fit on ranked data; errors become failed records.
ReplicateRecord fit_record(const RankedSample& r, const StudySpec& spec, const TailFamily& family,
                           const WeightScheme& weights, std::size_t k, std::size_t point,
                           std::size_t rep) {
  ReplicateRecord rec;
  rec.point = point;
  rec.rep = rep;
  try {
    const BivariateFit fit = fit_bivariate(r, {0, 1}, family, weights, TailIndexChoice::fixed_k(k), spec.fit);
    rec.k = fit.k_used;
    rec.m = fit.m_used;
    rec.theta_hat = fit.theta_hat;
    rec.zeta_hat = fit.zeta_hat;
    rec.eta_hat = fit.eta_hat;
    rec.objective = fit.objective;
    rec.converged = fit.converged;
    rec.at_boundary = fit.at_boundary;
    if (spec.intervals) {
      const Eigen::MatrixXd cov = plugin_covariance_ai(family, fit, weights);
      for (std::size_t j = 0; j < fit.theta_hat.size(); ++j)
        rec.se.push_back(std::sqrt(std::max(0.0, cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)))));
    }
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error = std::string(to_string(e.code())) + ": " + e.what();
    rec.theta_hat.assign(family.dimension(), kNan);
    if (spec.intervals) rec.se.assign(family.dimension(), kNan);
  }
  return rec;
}

PointSummary summarize_point(const std::vector<ReplicateRecord>& recs, std::span<const double> truth,
                             bool intervals) {
  PointSummary ps;
  const std::size_t p = truth.size();
  std::vector<std::vector<double>> values(p);
  std::vector<std::size_t> covered(p, 0);
  double sq_norm = 0.0;
  for (const auto& r : recs) {
    if (!r.ok) {
      ++ps.failed;
      continue;
    }
    ++ps.ok;
    double dist = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      values[j].push_back(r.theta_hat[j]);
      dist += (r.theta_hat[j] - truth[j]) * (r.theta_hat[j] - truth[j]);
      if (intervals && std::abs(r.theta_hat[j] - truth[j]) <= kZ975 * r.se[j]) ++covered[j];
    }
    sq_norm += dist;
  }
  double bias_norm = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    CoordinateSummary s = summarize(values[j], truth[j]);
    if (intervals && ps.ok > 0) s.coverage = static_cast<double>(covered[j]) / static_cast<double>(ps.ok);
    bias_norm += s.bias * s.bias;
    ps.coords.push_back(s);
  }
  ps.euclid_bias = ps.ok ? std::sqrt(bias_norm) : kNan;
  ps.euclid_rmse = ps.ok ? std::sqrt(sq_norm / static_cast<double>(ps.ok)) : kNan;
  return ps;
}

SimSpec replicate_generator(const StudySpec& spec, const SimSpec& base, std::size_t data_point,
                            std::size_t rep) {
  SimSpec g = base;
  g.seed = spec.seed;
  g.stream = replication_stream(data_point, rep);
  return g;
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Metric metric_from_name(std::string_view name) {
  if (name == "bias") return Metric::Bias;
  if (name == "rmse") return Metric::Rmse;
  if (name == "euclid_bias") return Metric::EuclidBias;
  if (name == "euclid_rmse") return Metric::EuclidRmse;
  if (name == "sup_theta_curve_error") return Metric::SupThetaCurveError;
  if (name == "boxplot_quantiles") return Metric::BoxplotQuantiles;
  fail(ErrorCode::InvalidArgument, "unknown metric '" + std::string(name) + "'");
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::Bias: return "bias";
    case Metric::Rmse: return "rmse";
    case Metric::EuclidBias: return "euclid_bias";
    case Metric::EuclidRmse: return "euclid_rmse";
    case Metric::SupThetaCurveError: return "sup_theta_curve_error";
    case Metric::BoxplotQuantiles: return "boxplot_quantiles";
  }
  return "";
}

StudyKind study_kind_from_name(std::string_view name) {
  if (name == "bias_vs_k") return StudyKind::BiasVsK;
  if (name == "parameter_grid") return StudyKind::ParameterGrid;
  if (name == "spatial") return StudyKind::Spatial;
  fail(ErrorCode::InvalidArgument, "unknown study '" + std::string(name) + "'");
}

std::string_view study_kind_name(StudyKind kind) {
  switch (kind) {
    case StudyKind::BiasVsK: return "bias_vs_k";
    case StudyKind::ParameterGrid: return "parameter_grid";
    case StudyKind::Spatial: return "spatial";
  }
  return "";
}

FamilyId StudySpec::fit_family() const { return family.value_or(default_family(generator.model)); }

std::size_t StudySpec::sweep_size() const {
  switch (kind) {
    case StudyKind::BiasVsK: return k_values.size() * std::max<std::size_t>(1, grid.size());
    case StudyKind::ParameterGrid: return grid.size();
    case StudyKind::Spatial: return m_values.size();
  }
  return 0;
}

void StudySpec::validate() const {
  if (replications < 2) fail(ErrorCode::InvalidArgument, "a study needs at least two replications");
  if (sweep_size() == 0) fail(ErrorCode::InvalidArgument, "the sweep list is empty");
  const bool spatial_model = generator.model == SimModel::SpatialIBR;
  if ((kind == StudyKind::Spatial) != spatial_model)
    fail(ErrorCode::InvalidArgument, "spatial studies need the spatial generator and vice versa");
  if (kind == StudyKind::ParameterGrid && k_values.size() != 1)
    fail(ErrorCode::InvalidArgument, "a parameter grid uses exactly one k");
  if (!grid.empty()) {
    for (const auto& point : grid) {
      if (point.size() != grid_dimension(generator.model))
        fail(ErrorCode::InvalidArgument, "grid point has the wrong number of coordinates");
      apply_grid_point(generator, point).validate();
    }
  } else {
    generator.validate();
  }
  for (std::size_t k : k_values)
    if (k == 0 || k > generator.n) fail(ErrorCode::InvalidArgument, "k must be in 1..n");
  for (std::size_t m : m_values)
    if (m == 0 || m > generator.n) fail(ErrorCode::InvalidArgument, "m must be in 1..n");
  if (!spatial_model) {
    if (fit_family() != default_family(generator.model))
      fail(ErrorCode::InvalidArgument, "the fitted family must be the generator's own family so that the truth is defined");
    if (intervals && !TailFamily(fit_family()).product_form())
      fail(ErrorCode::UnsupportedFamily, "plug-in intervals are available for the product families only");
  }
}

std::vector<double> generator_truth(const SimSpec& generator, FamilyId family) {
  if (family != default_family(generator.model))
    fail(ErrorCode::InvalidArgument, "no truth for this generator and family");
  switch (generator.model) {
    case SimModel::M1: return {generator.theta};
    case SimModel::M2: {
      const auto t = inverted_asym_logistic_theta(generator.logistic);
      return {t[0], t[1]};
    }
    case SimModel::M3: return {generator.lambda};
    case SimModel::SpatialIBR: return {generator.alpha, generator.beta};
  }
  return {};
}

std::size_t StudyResult::failures() const noexcept {
  std::size_t f = 0;
  for (const auto& r : records) f += !r.ok;
  for (const auto& r : spatial_records) f += !r.ok;
  return f;
}

std::size_t StudyResult::attempts() const noexcept { return records.size() + spatial_records.size(); }

StudyResult run_bias_rmse_vs_k(const StudySpec& spec) {
  spec.validate();
  if (spec.kind != StudyKind::BiasVsK) fail(ErrorCode::InvalidArgument, "not a bias-vs-k study");
  const auto start = std::chrono::steady_clock::now();
  const TailFamily family(spec.fit_family());
  const WeightScheme weights = WeightScheme::preset(family, family.default_reference(), spec.weights);
  std::vector<SimSpec> generators;
  if (spec.grid.empty()) generators.push_back(spec.generator);
  for (const auto& point : spec.grid) generators.push_back(apply_grid_point(spec.generator, point));
  const std::size_t ks = spec.k_values.size(), reps = spec.replications;

  StudyResult result;
  result.kind = spec.kind;
  result.seed = spec.seed;
  if (spec.grid.empty()) result.truth = generator_truth(spec.generator, family.id());
  result.records.resize(generators.size() * ks * reps);
  // Every k sees the same datasets: replication r of truth g uses stream (g, r).
  parallel_for(generators.size() * reps, spec.threads, [&](std::size_t job) {
    const std::size_t g = job / reps, rep = job % reps;
    const RankedSample r = rank_transform(simulate(replicate_generator(spec, generators[g], g, rep)));
    for (std::size_t i = 0; i < ks; ++i) {
      const std::size_t p = g * ks + i;
      result.records[p * reps + rep] = fit_record(r, spec, family, weights, spec.k_values[i], p, rep);
    }
  });
  for (std::size_t p = 0; p < generators.size() * ks; ++p) {
    const std::size_t g = p / ks;
    std::vector<ReplicateRecord> slice(result.records.begin() + static_cast<std::ptrdiff_t>(p * reps),
                                       result.records.begin() + static_cast<std::ptrdiff_t>((p + 1) * reps));
    const std::vector<double> truth = generator_truth(generators[g], family.id());
    PointSummary ps = summarize_point(slice, truth, spec.intervals);
    ps.point = p;
    ps.k = spec.k_values[p % ks];
    ps.label = "k=" + std::to_string(ps.k);
    ps.generator_params = truth;
    if (!spec.grid.empty()) {
      ps.label = join(spec.grid[g], ':') + "/" + ps.label;
      ps.generator_params = spec.grid[g];
    }
    result.summaries.push_back(std::move(ps));
  }
  result.wall_seconds = elapsed(start);
  return result;
}

StudyResult run_parameter_grid(const StudySpec& spec) {
  spec.validate();
  if (spec.kind != StudyKind::ParameterGrid) fail(ErrorCode::InvalidArgument, "not a parameter-grid study");
  const auto start = std::chrono::steady_clock::now();
  const TailFamily family(spec.fit_family());
  const WeightScheme weights = WeightScheme::preset(family, family.default_reference(), spec.weights);
  const std::size_t points = spec.grid.size(), reps = spec.replications;
  const std::size_t k = spec.k_values.front();

  StudyResult result;
  result.kind = spec.kind;
  result.seed = spec.seed;
  result.records.resize(points * reps);
  std::vector<SimSpec> generators;
  for (const auto& point : spec.grid) generators.push_back(apply_grid_point(spec.generator, point));
  parallel_for(points * reps, spec.threads, [&](std::size_t job) {
    const std::size_t p = job / reps, rep = job % reps;
    const RankedSample r = rank_transform(simulate(replicate_generator(spec, generators[p], p, rep)));
    result.records[job] = fit_record(r, spec, family, weights, k, p, rep);
  });
  for (std::size_t p = 0; p < points; ++p) {
    std::vector<ReplicateRecord> slice(result.records.begin() + static_cast<std::ptrdiff_t>(p * reps),
                                       result.records.begin() + static_cast<std::ptrdiff_t>((p + 1) * reps));
    const std::vector<double> truth = generator_truth(generators[p], family.id());
    PointSummary ps = summarize_point(slice, truth, spec.intervals);
    ps.point = p;
    ps.k = k;
    ps.generator_params = spec.grid[p];
    ps.label = join(spec.grid[p], ':');
    result.summaries.push_back(std::move(ps));
  }
  result.wall_seconds = elapsed(start);
  return result;
}

double sup_theta_curve_error(double alpha_hat, double beta_hat, double alpha0, double beta0) {
  double sup = 0.0;
  for (int i = 0; i <= 300; ++i) {
    const double d = 3.0 * i / 300.0;
    sup = std::max(sup, std::abs(link_theta(d, alpha_hat, beta_hat) - link_theta(d, alpha0, beta0)));
  }
  return sup;
}

std::vector<std::size_t> test_pair_indices(const SpatialModel& model) {
  const auto dist = model.distances();
  std::vector<std::size_t> out;
  for (double target : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < dist.size(); ++s)
      if (std::abs(dist[s] - target) < std::abs(dist[best] - target)) best = s;
    if (std::find(out.begin(), out.end(), best) == out.end()) out.push_back(best);
  }
  return out;
}

StudyResult run_spatial_study(const StudySpec& spec) {
  spec.validate();
  if (spec.kind != StudyKind::Spatial) fail(ErrorCode::InvalidArgument, "not a spatial study");
  const auto start = std::chrono::steady_clock::now();
  const SpatialModel model(spec.generator.coords);
  const WeightScheme weights = spatial_weights(spec.weights);
  const double alpha0 = spec.generator.alpha, beta0 = spec.generator.beta;
  const std::vector<std::size_t> tests = test_pair_indices(model);
  const std::size_t points = spec.m_values.size(), reps = spec.replications;

  StudyResult result;
  result.kind = spec.kind;
  result.seed = spec.seed;
  result.truth = {alpha0, beta0};
  for (std::size_t t : tests) result.test_pairs.push_back(model.pairs()[t]);
  result.spatial_records.resize(points * reps);

  SpatialOptions opt = spec.spatial;
  opt.threads = 1;  // parallelism is across replications
  parallel_for(reps, spec.threads, [&](std::size_t rep) {
    const RankedSample r = rank_transform(simulate(replicate_generator(spec, spec.generator, 0, rep)));
    for (std::size_t p = 0; p < points; ++p) {
      SpatialRecord& rec = result.spatial_records[p * reps + rep];
      rec.point = p;
      rec.rep = rep;
      try {
        const PairwiseFits fits = pairwise_fits(r, model, spec.m_values[p], weights, opt);
        const SpatialFit ls = fit_least_squares(fits, opt);
        const SpatialFit joint = fit_joint(fits, weights, opt);
        rec.usable_pairs = fits.usable();
        rec.alpha_ls = ls.alpha_hat;
        rec.beta_ls = ls.beta_hat;
        rec.alpha_joint = joint.alpha_hat;
        rec.beta_joint = joint.beta_hat;
        rec.sup_ls = sup_theta_curve_error(ls.alpha_hat, ls.beta_hat, alpha0, beta0);
        rec.sup_joint = sup_theta_curve_error(joint.alpha_hat, joint.beta_hat, alpha0, beta0);
        for (std::size_t t : tests) {
          const auto& est = fits.pairs[t];
          rec.pairwise_theta.push_back(est.fit ? est.fit->theta_hat[0] : kNan);
          rec.spatial_theta.push_back(link_theta(est.distance, ls.alpha_hat, ls.beta_hat));
        }
        rec.ok = true;
      } catch (const Error& e) {
        rec.ok = false;
        rec.error = std::string(to_string(e.code())) + ": " + e.what();
        rec.pairwise_theta.assign(tests.size(), kNan);
        rec.spatial_theta.assign(tests.size(), kNan);
      }
    }
  });

  for (std::size_t p = 0; p < points; ++p) {
    SpatialSummary s;
    s.point = p;
    s.m = spec.m_values[p];
    std::vector<double> al, bl, aj, bj, sl, sj, da, db;
    std::vector<std::vector<double>> pw(tests.size()), sp(tests.size());
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const SpatialRecord& rec = result.spatial_records[p * reps + rep];
      if (!rec.ok) {
        ++s.failed;
        continue;
      }
      ++s.ok;
      al.push_back(rec.alpha_ls);
      bl.push_back(rec.beta_ls);
      aj.push_back(rec.alpha_joint);
      bj.push_back(rec.beta_joint);
      sl.push_back(rec.sup_ls);
      sj.push_back(rec.sup_joint);
      da.push_back(std::abs(rec.alpha_ls - rec.alpha_joint));
      db.push_back(std::abs(rec.beta_ls - rec.beta_joint));
      for (std::size_t t = 0; t < tests.size(); ++t) {
        if (!std::isnan(rec.pairwise_theta[t])) pw[t].push_back(rec.pairwise_theta[t]);
        sp[t].push_back(rec.spatial_theta[t]);
      }
    }
    s.alpha_ls = summarize(al, alpha0);
    s.beta_ls = summarize(bl, beta0);
    s.alpha_joint = summarize(aj, alpha0);
    s.beta_joint = summarize(bj, beta0);
    auto avg = [](const std::vector<double>& v) {
      return v.empty() ? kNan : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    s.mean_sup_ls = avg(sl);
    s.mean_sup_joint = avg(sj);
    s.mean_abs_diff_alpha = avg(da);
    s.mean_abs_diff_beta = avg(db);
    for (std::size_t t = 0; t < tests.size(); ++t) {
      s.test_distances.push_back(model.distances()[tests[t]]);
      s.iqr_pairwise.push_back(pw[t].empty() ? kNan : iqr(pw[t]));
      s.iqr_spatial.push_back(sp[t].empty() ? kNan : iqr(sp[t]));
    }
    result.spatial_summaries.push_back(std::move(s));
  }
  result.wall_seconds = elapsed(start);
  return result;
}

StudyResult run_study(const StudySpec& spec) {
  switch (spec.kind) {
    case StudyKind::BiasVsK: return run_bias_rmse_vs_k(spec);
    case StudyKind::ParameterGrid: return run_parameter_grid(spec);
    case StudyKind::Spatial: return run_spatial_study(spec);
  }
  fail(ErrorCode::InvalidArgument, "unknown study kind");
}

// ---------------------------------------------------------------------------
// CSV output

namespace {

bool wants(const StudySpec& spec, Metric m) {
  return std::find(spec.metrics.begin(), spec.metrics.end(), m) != spec.metrics.end();
}

std::string csv_text(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '"') c = ';';
  return s;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
  out << '\n';
}

std::string fd(double v) { return format_double(v); }

void coordinate_columns(std::vector<std::string>& header, const std::string& name, const StudySpec& spec,
                        bool intervals) {
  if (wants(spec, Metric::Bias)) header.push_back("bias_" + name);
  if (wants(spec, Metric::Rmse)) header.push_back("rmse_" + name);
  header.push_back("mean_" + name);
  header.push_back("variance_" + name);
  header.push_back("mc_se_" + name);
  if (wants(spec, Metric::BoxplotQuantiles))
    for (const char* q : {"q025_", "q25_", "q50_", "q75_", "q975_"}) header.push_back(q + name);
  if (intervals) header.push_back("coverage_" + name);
}

void coordinate_values(std::vector<std::string>& row, const CoordinateSummary& c, const StudySpec& spec,
                       bool intervals) {
  if (wants(spec, Metric::Bias)) row.push_back(fd(c.bias));
  if (wants(spec, Metric::Rmse)) row.push_back(fd(c.rmse));
  row.push_back(fd(c.mean));
  row.push_back(fd(c.variance));
  row.push_back(fd(c.mc_se));
  if (wants(spec, Metric::BoxplotQuantiles))
    for (double q : c.quantiles) row.push_back(fd(q));
  if (intervals) row.push_back(fd(c.coverage));
}

}  // namespace

void write_tidy_csv(const StudyResult& result, const StudySpec& spec, std::ostream& out) {
  if (result.kind == StudyKind::Spatial) {
    std::vector<std::string> header{"point", "m", "rep", "status", "usable_pairs", "alpha_ls", "beta_ls",
                                    "alpha_joint", "beta_joint", "sup_error_ls", "sup_error_joint"};
    for (std::size_t t = 0; t < result.test_pairs.size(); ++t) {
      header.push_back("pairwise_theta_" + std::to_string(t + 1));
      header.push_back("spatial_theta_" + std::to_string(t + 1));
    }
    header.push_back("error");
    write_row(out, header);
    for (const auto& r : result.spatial_records) {
      std::vector<std::string> row{std::to_string(r.point), std::to_string(spec.m_values[r.point]),
                                   std::to_string(r.rep), r.ok ? "ok" : "failed",
                                   std::to_string(r.usable_pairs)};
      for (double v : {r.alpha_ls, r.beta_ls, r.alpha_joint, r.beta_joint, r.sup_ls, r.sup_joint})
        row.push_back(r.ok ? fd(v) : "nan");
      for (std::size_t t = 0; t < r.pairwise_theta.size(); ++t) {
        row.push_back(fd(r.pairwise_theta[t]));
        row.push_back(fd(r.spatial_theta[t]));
      }
      row.push_back(csv_text(r.error));
      write_row(out, row);
    }
    return;
  }
  const std::size_t p = TailFamily(spec.fit_family()).dimension();
  std::vector<std::string> header{"point", "sweep", "rep", "status", "k", "m"};
  for (std::size_t j = 0; j < p; ++j) header.push_back("theta_hat_" + std::to_string(j + 1));
  if (spec.intervals)
    for (std::size_t j = 0; j < p; ++j) header.push_back("se_" + std::to_string(j + 1));
  for (const char* h : {"zeta_hat", "eta_hat", "objective", "converged", "at_boundary", "error"}) header.push_back(h);
  write_row(out, header);
  for (const auto& r : result.records) {
    std::vector<std::string> row{std::to_string(r.point), result.summaries[r.point].label, std::to_string(r.rep),
                                 r.ok ? "ok" : "failed", std::to_string(r.k), std::to_string(r.m)};
    for (double v : r.theta_hat) row.push_back(fd(v));
    for (double v : r.se) row.push_back(fd(v));
    row.push_back(r.ok ? fd(r.zeta_hat) : "nan");
    row.push_back(r.ok ? fd(r.eta_hat) : "nan");
    row.push_back(r.ok ? fd(r.objective) : "nan");
    row.push_back(r.converged ? "1" : "0");
    row.push_back(r.at_boundary ? "1" : "0");
    row.push_back(csv_text(r.error));
    write_row(out, row);
  }
}

void write_summary_csv(const StudyResult& result, const StudySpec& spec, std::ostream& out) {
  if (result.kind == StudyKind::Spatial) {
    std::vector<std::string> header{"point", "m", "ok", "failed"};
    for (const char* name : {"alpha_ls", "beta_ls", "alpha_joint", "beta_joint"})
      coordinate_columns(header, name, spec, false);
    if (wants(spec, Metric::SupThetaCurveError)) {
      header.push_back("mean_sup_error_ls");
      header.push_back("mean_sup_error_joint");
    }
    header.push_back("mean_abs_diff_alpha");
    header.push_back("mean_abs_diff_beta");
    for (std::size_t t = 0; t < result.test_pairs.size(); ++t) {
      header.push_back("distance_" + std::to_string(t + 1));
      header.push_back("iqr_pairwise_" + std::to_string(t + 1));
      header.push_back("iqr_spatial_" + std::to_string(t + 1));
    }
    write_row(out, header);
    for (const auto& s : result.spatial_summaries) {
      std::vector<std::string> row{std::to_string(s.point), std::to_string(s.m), std::to_string(s.ok),
                                   std::to_string(s.failed)};
      for (const CoordinateSummary* c : {&s.alpha_ls, &s.beta_ls, &s.alpha_joint, &s.beta_joint})
        coordinate_values(row, *c, spec, false);
      if (wants(spec, Metric::SupThetaCurveError)) {
        row.push_back(fd(s.mean_sup_ls));
        row.push_back(fd(s.mean_sup_joint));
      }
      row.push_back(fd(s.mean_abs_diff_alpha));
      row.push_back(fd(s.mean_abs_diff_beta));
      for (std::size_t t = 0; t < s.test_distances.size(); ++t) {
        row.push_back(fd(s.test_distances[t]));
        row.push_back(fd(s.iqr_pairwise[t]));
        row.push_back(fd(s.iqr_spatial[t]));
      }
      write_row(out, row);
    }
    return;
  }
  const std::size_t p = TailFamily(spec.fit_family()).dimension();
  std::vector<std::string> header{"point", "sweep", "k", "ok", "failed"};
  for (std::size_t j = 0; j < p; ++j) header.push_back("truth_" + std::to_string(j + 1));
  for (std::size_t j = 0; j < p; ++j) coordinate_columns(header, std::to_string(j + 1), spec, spec.intervals);
  if (wants(spec, Metric::EuclidBias)) header.push_back("euclid_bias");
  if (wants(spec, Metric::EuclidRmse)) header.push_back("euclid_rmse");
  write_row(out, header);
  for (const auto& s : result.summaries) {
    std::vector<std::string> row{std::to_string(s.point), s.label, std::to_string(s.k), std::to_string(s.ok),
                                 std::to_string(s.failed)};
    for (const auto& c : s.coords) row.push_back(fd(c.truth));
    for (const auto& c : s.coords) coordinate_values(row, c, spec, spec.intervals);
    if (wants(spec, Metric::EuclidBias)) row.push_back(fd(s.euclid_bias));
    if (wants(spec, Metric::EuclidRmse)) row.push_back(fd(s.euclid_rmse));
    write_row(out, row);
  }
}

// ---------------------------------------------------------------------------
// Config files

namespace {

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trimmed(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& v) {
  std::size_t used = 0;
  const double x = std::stod(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

std::uint64_t to_u64(const std::string& v) {
  if (v.empty() || v[0] == '-') throw std::invalid_argument(v);
  std::size_t used = 0;
  const unsigned long long x = std::stoull(v, &used);
  if (used != v.size()) throw std::invalid_argument(v);
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(v);
}

}  // namespace

StudySpec parse_study_config(std::istream& in) {
  StudySpec spec;
  std::map<std::string, std::pair<std::string, std::size_t>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trimmed(line.substr(0, eq)), value = trimmed(line.substr(eq + 1));
    if (key.empty() || value.empty())
      fail(ErrorCode::Parse, "line " + std::to_string(lineno) + ": expected key = value");
    if (!entries.emplace(key, std::make_pair(value, lineno)).second)
      fail(ErrorCode::Parse, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
  }

  std::size_t sites = 10;
  double side = 3.0;
  std::uint64_t layout_seed = 1;
  for (const auto& [key, entry] : entries) {
    const auto& [value, at] = entry;
    const std::string where = "line " + std::to_string(at) + " (" + key + "): ";
    try {
      if (key == "study") spec.kind = study_kind_from_name(value);
      else if (key == "model") {
        if (value == "m1") spec.generator.model = SimModel::M1;
        else if (value == "m2") spec.generator.model = SimModel::M2;
        else if (value == "m3") spec.generator.model = SimModel::M3;
        else if (value == "spatial") spec.generator.model = SimModel::SpatialIBR;
        else throw std::invalid_argument(value);
      } else if (key == "theta") spec.generator.theta = to_double(value);
      else if (key == "nu") spec.generator.logistic.nu = to_double(value);
      else if (key == "phi") spec.generator.logistic.phi = to_double(value);
      else if (key == "r") spec.generator.logistic.r = to_double(value);
      else if (key == "lambda") spec.generator.lambda = to_double(value);
      else if (key == "alpha") spec.generator.alpha = to_double(value);
      else if (key == "beta") spec.generator.beta = to_double(value);
      else if (key == "n") spec.generator.n = to_u64(value);
      else if (key == "noise") {
        if (value == "none") spec.generator.noise_alpha.reset();
        else spec.generator.noise_alpha = to_double(value);
      } else if (key == "margins") {
        if (value == "uniform") spec.generator.margins = Margins::Uniform;
        else if (value == "frechet") spec.generator.margins = Margins::Frechet;
        else throw std::invalid_argument(value);
      } else if (key == "algorithm") {
        if (value == "exact") spec.generator.algorithm = SpatialAlgorithm::ExtremalFunctions;
        else if (value == "normalized") spec.generator.algorithm = SpatialAlgorithm::NormalizedSpectral;
        else throw std::invalid_argument(value);
      } else if (key == "sites") sites = to_u64(value);
      else if (key == "side") side = to_double(value);
      else if (key == "layout_seed") layout_seed = to_u64(value);
      else if (key == "family") spec.family = TailFamily::from_name(value).id();
      else if (key == "weights") spec.weights = weight_preset_from_name(value);
      else if (key == "k") {
        spec.k_values.clear();
        for (const auto& item : split_list(value, ',')) spec.k_values.push_back(to_u64(item));
      } else if (key == "m") {
        spec.m_values.clear();
        for (const auto& item : split_list(value, ',')) spec.m_values.push_back(to_u64(item));
      } else if (key == "grid") {
        spec.grid.clear();
        for (const auto& item : split_list(value, ',')) {
          std::vector<double> point;
          for (const auto& c : split_list(item, ':')) point.push_back(to_double(c));
          spec.grid.push_back(point);
        }
      } else if (key == "replications") spec.replications = to_u64(value);
      else if (key == "seed") spec.seed = to_u64(value);
      else if (key == "metrics") {
        spec.metrics.clear();
        for (const auto& item : split_list(value, ',')) spec.metrics.push_back(metric_from_name(item));
      } else if (key == "intervals") spec.intervals = to_bool(value);
      else if (key == "threads") spec.threads = static_cast<unsigned>(to_u64(value));
      else if (key == "restarts") spec.fit.restarts = spec.spatial.restarts = static_cast<unsigned>(to_u64(value));
      else fail(ErrorCode::InvalidArgument, "unknown key");
    } catch (const Error& e) {
      fail(e.code(), where + e.what());
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, where + "invalid value '" + value + "'");
    }
  }
  if (spec.generator.model == SimModel::SpatialIBR) spec.generator.coords = random_layout(sites, side, layout_seed);
  return spec;
}

StudySpec load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  try {
    return parse_study_config(in);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

}  // namespace tailfit
