// Acceptance suite: one PASS/FAIL line per criterion. With arguments, only
// the listed criterion numbers run.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "tailfit/bench.hpp"
#include "tailfit/empirical.hpp"
#include "tailfit/error.hpp"
#include "tailfit/families.hpp"
#include "tailfit/io.hpp"
#include "tailfit/mestim.hpp"
#include "tailfit/numeric.hpp"
#include "tailfit/parallel.hpp"
#include "tailfit/simulate.hpp"
#include "tailfit/spatial.hpp"

using namespace tailfit;
using namespace tailfit::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Shared M1 study: theta in {0.6, 0.75, 0.9}, n = 5000, k = 800, Par(4) noise.
StudySpec m1_study(bool noise) {
  StudySpec s;
  s.kind = StudyKind::ParameterGrid;
  s.generator.model = SimModel::M1;
  s.generator.n = 5000;
  if (noise) s.generator.noise_alpha = 4.0;
  s.k_values = {800};
  s.grid = {{0.6}, {0.75}, {0.9}};
  s.replications = 200;
  s.seed = 20240601;
  s.intervals = true;
  s.metrics = {Metric::Bias, Metric::Rmse, Metric::BoxplotQuantiles};
  return s;
}

StudySpec m3_study() {
  StudySpec s;
  s.kind = StudyKind::ParameterGrid;
  s.generator.model = SimModel::M3;
  s.generator.n = 5000;
  s.generator.noise_alpha = 4.0;
  s.k_values = {400};
  for (int i = 1; i <= 9; ++i) s.grid.push_back({0.2 * i});
  s.replications = 200;
  s.seed = 20240602;
  s.metrics = {Metric::Bias, Metric::Rmse, Metric::BoxplotQuantiles};
  return s;
}

StudySpec spatial_study() {
  StudySpec s;
  s.kind = StudyKind::Spatial;
  s.generator.model = SimModel::SpatialIBR;
  s.generator.coords = random_layout(10, 3.0, 1);
  s.generator.alpha = 1.0;
  s.generator.beta = 3.0;
  s.generator.n = 5000;
  s.generator.noise_alpha = 4.0;
  s.m_values = {150};
  s.replications = 100;
  s.seed = 20240603;
  s.metrics = {Metric::Bias, Metric::Rmse, Metric::SupThetaCurveError};
  return s;
}

std::string csv_bytes(const StudyResult& r, const StudySpec& s) {
  std::ostringstream out;
  write_tidy_csv(r, s, out);
  out << "--\n";
  write_summary_csv(r, s, out);
  return out.str();
}

// Studies are shared between criteria; each runs once.
const StudyResult& cached(const std::string& key, const StudySpec& spec) {
  static std::map<std::string, StudyResult> cache;
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, run_study(spec)).first;
  return it->second;
}

// 1. Exact rectangle integral vs a 2000 x 2000 Riemann grid.
void criterion_1(Outcome& o) {
  CounterRng rng(101);
  double worst = 0.0;
  std::vector<Rectangle> rects;
  for (int i = 1; i <= 5; ++i) rects.push_back(basic_rectangle(i));
  for (int s = 0; s < 20; ++s) {
    const RankedSample sample = rank_transform(correlated_normals(50, 2, rng));
    const auto k = static_cast<std::size_t>(5 + rng() % 21);
    std::vector<Rectangle> all = rects;
    const double a = 2.0 * rng.uniform(), b = 2.0 * rng.uniform();
    all.push_back({a, a + 0.2 + rng.uniform(), b, b + 0.2 + rng.uniform()});
    for (const Rectangle& r : all) {
      const double err = std::abs(rect_integral_q(sample, {0, 1}, k, r) - riemann_oracle(sample, k, r, 2000));
      worst = std::max(worst, err / r.area());
    }
  }
  o.detail << "max |exact - grid| / area = " << fmt(worst, 3);
  o.require(worst < 2e-3, "error above 2e-3 * area");
}

// 2. c(1,1) = 1, homogeneity, stable tail function bounds and convexity.
void criterion_2(Outcome& o) {
  CounterRng rng(102);
  double norm_err = 0.0, homog_err = 0.0;
  std::size_t bound_violations = 0, convexity_violations = 0;
  for (const auto& family : all_families()) {
    for (int trial = 0; trial < 100; ++trial) {
      const ThetaVector theta(family, random_interior_theta(family, rng));
      norm_err = std::max(norm_err, std::abs(eval_c(family, theta, 1.0, 1.0) - 1.0));
      const double p = 1.0 / eta_of(family, theta);
      for (int j = 0; j < 5; ++j) {
        const double x = uniform_in(rng, 0.05, 3.0), y = uniform_in(rng, 0.05, 3.0), t = uniform_in(rng, 0.1, 5.0);
        const double lhs = eval_c(family, theta, t * x, t * y);
        const double rhs = std::pow(t, p) * eval_c(family, theta, x, y);
        homog_err = std::max(homog_err, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
      }
    }
  }
  for (int trial = 0; trial < 100; ++trial) {
    const HuslerReissParams hr{uniform_in(rng, 0.05, 3.0)};
    const AsymLogisticParams al{uniform_in(rng, 0.0, 1.0), uniform_in(rng, 0.0, 1.0), uniform_in(rng, 1.0, 8.0)};
    for (int j = 0; j < 20; ++j) {
      const double x1 = uniform_in(rng, 0.0, 3.0), y1 = uniform_in(rng, 0.0, 3.0);
      const double x2 = uniform_in(rng, 0.0, 3.0), y2 = uniform_in(rng, 0.0, 3.0);
      for (int which = 0; which < 2; ++which) {
        auto l = [&](double x, double y) { return which ? eval_stdf(al, x, y) : eval_stdf(hr, x, y); };
        const double v = l(x1, y1);
        if (v < std::max(x1, y1) - 1e-12 || v > x1 + y1 + 1e-12) ++bound_violations;
        if (l(0.5 * (x1 + x2), 0.5 * (y1 + y2)) > 0.5 * (v + l(x2, y2)) + 1e-12) ++convexity_violations;
      }
    }
  }
  o.detail << "max |c(1,1)-1| = " << fmt(norm_err, 2) << ", max homogeneity error = " << fmt(homog_err, 2)
           << ", bound/convexity violations = " << bound_violations << "/" << convexity_violations;
  o.require(norm_err <= 1e-12, "c(1,1) != 1");
  o.require(homog_err <= 1e-9, "homogeneity");
  o.require(bound_violations == 0 && convexity_violations == 0, "stable tail function bounds/convexity");
}

// 3. Noise-free inversion for every family.
void criterion_3(Outcome& o) {
  CounterRng rng(103);
  double worst_theta = 0.0, worst_zeta = 0.0;
  std::size_t failures = 0;
  for (const auto& family : all_families()) {
    const WeightScheme w = WeightScheme::standard(family);
    for (int trial = 0; trial < 50; ++trial) {
      const std::vector<double> truth = random_interior_theta(family, rng);
      const double zeta = uniform_in(rng, 0.1, 2.0);
      auto b = model_moment_vector(family, ThetaVector(family, truth), w);
      for (double& x : b) x *= zeta;
      FitOptions opt;
      opt.seed = static_cast<std::uint64_t>(trial);
      try {
        const BivariateFit fit = fit_to_moments(family, w, b, 100, 50, 1000, opt);
        const auto expected = canonical_theta(family, truth);
        for (std::size_t i = 0; i < truth.size(); ++i)
          worst_theta = std::max(worst_theta, std::abs(fit.theta_hat[i] - expected[i]));
        worst_zeta = std::max(worst_zeta, std::abs(fit.zeta_hat - zeta));
      } catch (const Error&) {
        ++failures;
      }
    }
  }
  o.detail << "250 truths, max |theta error| = " << fmt(worst_theta, 2) << ", max |zeta error| = "
           << fmt(worst_zeta, 2);
  o.require(failures == 0, "fit threw");
  o.require(worst_theta < 1e-6 && worst_zeta < 1e-6, "recovery above 1e-6");
}

// 4. M1 recovery.
void criterion_4(Outcome& o) {
  const StudySpec spec = m1_study(true);
  const StudyResult& r = cached("m1", spec);
  for (const auto& s : r.summaries) {
    const auto& c = s.coords[0];
    o.detail << "theta=" << s.label << ": bias " << fmt(c.bias, 3) << ", rmse " << fmt(c.rmse, 3) << "; ";
    o.require(std::abs(c.bias) <= 0.05, "bias at theta=" + s.label);
    o.require(c.rmse <= 0.10, "rmse at theta=" + s.label);
  }
  o.detail << "failed reps " << r.failures() << "/" << r.attempts();
  o.require(r.summaries[0].coords[0].bias < 0.0, "bias at theta=0.6 not negative");
  o.require(r.failures() * 100 < r.attempts(), "failed-replication fraction >= 1%");
}

// 5. M3 regime behavior.
void criterion_5(Outcome& o) {
  const StudySpec spec = m3_study();
  const StudyResult& r = cached("m3", spec);
  std::size_t worst = 0;
  for (std::size_t p = 0; p < r.summaries.size(); ++p) {
    o.detail << r.summaries[p].label << ":" << fmt(r.summaries[p].coords[0].bias, 2) << " ";
    if (std::abs(r.summaries[p].coords[0].bias) > std::abs(r.summaries[worst].coords[0].bias)) worst = p;
  }
  const double rmse04 = r.summaries[1].coords[0].rmse;
  const double worst_lambda = spec.grid[worst][0];
  o.detail << "; rmse(0.4) = " << fmt(rmse04, 3) << ", max |bias| at lambda=" << fmt(worst_lambda, 2);
  o.require(rmse04 <= 0.10, "rmse at lambda=0.4");
  o.require(std::abs(worst_lambda - 0.8) < 1e-9 || std::abs(worst_lambda - 1.0) < 1e-9,
            "maximum bias not at lambda 0.8 or 1.0");
  o.require(r.failures() * 100 < r.attempts(), "failed-replication fraction >= 1%");
}

// 6. Rank invariance (bit-identical) and noise invariance.
void criterion_6(Outcome& o) {
  CounterRng rng(106);
  std::size_t mismatches = 0, checks = 0;
  for (const auto& family : all_families()) {
    const WeightScheme w = WeightScheme::standard(family);
    for (int trial = 0; trial < 4; ++trial) {
      SimSpec g;
      g.model = trial % 2 ? SimModel::M3 : SimModel::M1;
      g.lambda = 0.7;
      g.theta = 0.75;
      g.n = 2000;
      g.seed = 600 + static_cast<std::uint64_t>(trial);
      const Matrix data = simulate(g);
      Matrix t = data;
      for (std::size_t i = 0; i < t.rows(); ++i) {
        t(i, 0) = std::log(data(i, 0)) * 7.0 - 2.0;
        t(i, 1) = std::atan(data(i, 1)) + std::cbrt(data(i, 1));
      }
      const auto choice = TailIndexChoice::fixed_k(200);
      const BivariateFit a = fit_bivariate(rank_transform(data), {0, 1}, family, w, choice);
      const BivariateFit b = fit_bivariate(rank_transform(t), {0, 1}, family, w, choice);
      ++checks;
      if (a.theta_hat != b.theta_hat || a.zeta_hat != b.zeta_hat) ++mismatches;
    }
  }
  StudySpec clean = m1_study(false);
  clean.grid = {{0.75}};
  clean.intervals = false;
  StudySpec noisy = clean;
  noisy.generator.noise_alpha = 4.0;
  const StudyResult& rc = cached("m1-clean-075", clean);
  const StudyResult& rn = cached("m1-noisy-075", noisy);
  const auto& c0 = rc.summaries[0].coords[0];
  const auto& c1 = rn.summaries[0].coords[0];
  const double shift = c1.mean - c0.mean;
  const double se = c0.mc_se;
  o.detail << "rank-transform fits identical " << checks - mismatches << "/" << checks << "; noise shift "
           << fmt(shift, 3) << " vs 2 MC se " << fmt(2.0 * se, 3);
  o.require(mismatches == 0, "estimates changed under monotone transforms");
  o.require(std::abs(shift) < 2.0 * se, "noise shifts mean estimate");
}

// 7. Spatial study.
void criterion_7(Outcome& o) {
  const StudySpec spec = spatial_study();
  const StudyResult& r = cached("spatial", spec);
  const SpatialSummary& s = r.spatial_summaries[0];
  o.detail << "mean sup error " << fmt(s.mean_sup_ls, 3) << ", mean |LS - joint| = (" << fmt(s.mean_abs_diff_alpha, 3)
           << ", " << fmt(s.mean_abs_diff_beta, 3) << "), IQR spatial/pairwise:";
  bool iqr_ok = true;
  for (std::size_t t = 0; t < s.test_distances.size(); ++t) {
    o.detail << " " << fmt(s.iqr_spatial[t], 2) << "/" << fmt(s.iqr_pairwise[t], 2);
    iqr_ok = iqr_ok && s.iqr_spatial[t] <= s.iqr_pairwise[t];
  }
  o.detail << "; failed reps " << r.failures();
  o.require(s.mean_sup_ls <= 0.1, "mean sup error");
  o.require(s.mean_abs_diff_alpha <= 0.05 && s.mean_abs_diff_beta <= 0.05, "LS vs joint agreement");
  o.require(s.test_distances.size() == 5 && iqr_ok, "IQR comparison");
  o.require(r.failures() * 100 < r.attempts(), "failed-replication fraction >= 1%");
}

// 8. Simulator validation.
void criterion_8(Outcome& o) {
  const Coordinates coords = random_layout(10, 3.0, 1);
  double worst[2] = {0.0, 0.0};
  for (int alg = 0; alg < 2; ++alg) {
    CounterRng rng(108 + static_cast<std::uint64_t>(alg));
    Matrix z = sample_brown_resnick(coords, 1.0, 3.0, 100000, rng,
                                    alg ? SpatialAlgorithm::NormalizedSpectral : SpatialAlgorithm::ExtremalFunctions);
    for (double& v : z.data()) v = std::exp(-1.0 / v);
    for (std::size_t a = 0; a < coords.size(); ++a)
      for (std::size_t b = a + 1; b < coords.size(); ++b) {
        const double truth = 2.0 * normal_cdf(0.5 * std::sqrt(fractal_variogram(coords.distance(a, b), 1.0, 3.0)));
        worst[alg] = std::max(worst[alg], std::abs(madogram_extremal_coefficient(z.column(a), z.column(b)) - truth));
      }
  }
  CounterRng rng(110);
  double min_p = 1.0;
  const Matrix hr = sample_ev_copula(HuslerReissParams{1.0}, 100000, rng);
  const Matrix al = sample_ev_copula(AsymLogisticParams{0.5, 0.8, 2.5}, 100000, rng);
  for (const Matrix* m : {&hr, &al})
    for (std::size_t j = 0; j < 2; ++j) min_p = std::min(min_p, ks_uniform_pvalue(m->column(j)));
  o.detail << "max extremal coefficient error exact/approximate = " << fmt(worst[0], 3) << "/" << fmt(worst[1], 3)
           << ", min KS p-value = " << fmt(min_p, 3);
  o.require(worst[0] <= 0.03 && worst[1] <= 0.03, "extremal coefficients");
  o.require(min_p > 0.01, "KS uniformity");
}

// 9. Covariance kernel vs Monte Carlo, interval coverage.
void criterion_9(Outcome& o) {
  CounterRng rng(109);
  double worst = 0.0;
  const TailFamily ihr(FamilyId::InvertedHuslerReiss), ial(FamilyId::InvertedAsymLogistic);
  const std::pair<const TailFamily*, std::vector<double>> cases[] = {{&ihr, {0.7}}, {&ial, {0.6, 0.8}}};
  for (const auto& [family, th] : cases) {
    const ThetaVector theta(*family, th);
    const WeightScheme w = WeightScheme::standard(*family);
    const Eigen::MatrixXd a = ai_covariance_kernel(*family, theta, w);
    const double e1 = th[0], e2 = th.size() > 1 ? th[1] : th[0];
    for (std::size_t j = 0; j < w.size(); ++j)
      for (std::size_t l = j; l < w.size(); ++l) {
        const Rectangle& r = w.rects()[j];
        const Rectangle& s = w.rects()[l];
        const int draws = 1000000;
        double sum = 0.0;
        for (int i = 0; i < draws; ++i) {
          const double x = r.x_lo + (r.x_hi - r.x_lo) * rng.uniform();
          const double y = r.y_lo + (r.y_hi - r.y_lo) * rng.uniform();
          const double xp = s.x_lo + (s.x_hi - s.x_lo) * rng.uniform();
          const double yp = s.y_lo + (s.y_hi - s.y_lo) * rng.uniform();
          sum += std::pow(std::min(x, xp), e1) * std::pow(std::min(y, yp), e2);
        }
        const double mc = sum / draws * r.area() * s.area() / (w.norms()[j] * w.norms()[l]);
        worst = std::max(worst, std::abs(a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) - mc) / mc);
      }
  }
  const StudyResult& r = cached("m1", m1_study(true));
  o.detail << "max relative kernel error " << fmt(worst, 2) << "; coverage";
  // Gated at theta = 0.75; the other grid points are reported only.
  bool coverage_ok = false;
  for (const auto& s : r.summaries) {
    o.detail << " theta=" << s.label << ":" << fmt(s.coords[0].coverage, 3);
    if (s.generator_params[0] == 0.75) coverage_ok = s.coords[0].coverage >= 0.85;
  }
  o.require(worst < 0.01, "kernel vs Monte Carlo");
  o.require(coverage_ok, "coverage below 0.85");
}

// 10. Byte-identical reruns across thread counts. The shared studies ran
// with the automatic thread count; the rerun uses a different one.
void criterion_10(Outcome& o) {
  const unsigned automatic = resolve_threads(0);
  const unsigned other = automatic == 1 ? 8 : 1;
  StudySpec k_sweep = m1_study(true);
  k_sweep.kind = StudyKind::BiasVsK;
  k_sweep.grid.clear();
  k_sweep.intervals = false;
  k_sweep.generator.theta = 0.75;
  k_sweep.k_values = {200, 400, 800, 1600};
  k_sweep.replications = 50;
  const std::vector<std::pair<std::string, StudySpec>> studies{
      {"m1", m1_study(true)}, {"m3", m3_study()}, {"spatial", spatial_study()}, {"k-sweep", k_sweep}};
  std::size_t identical = 0;
  for (const auto& [key, spec] : studies) {
    const std::string first = csv_bytes(cached(key, spec), spec);
    StudySpec rerun = spec;
    rerun.threads = other;
    const bool same = first == csv_bytes(run_study(rerun), rerun);
    identical += same;
    o.detail << key << (same ? " identical" : " DIFFERS") << "; ";
  }
  o.detail << "threads " << automatic << " vs " << other;
  o.require(identical == studies.size(), "output depends on the thread count");
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    std::string name;
    std::function<void(Outcome&)> run;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria{
      {"analytic oracle: exact rectangle integral vs Riemann grid", criterion_1, 30},
      {"family invariants", criterion_2, 10},
      {"noise-free inversion, all families", criterion_3, 60},
      {"M1 recovery (n=5000, k=800, 200 reps)", criterion_4, 900},
      {"M3 regime behavior (n=5000, k=400, 200 reps)", criterion_5, 900},
      {"rank and noise invariance", criterion_6, 600},
      {"spatial study (d=10, m=150, 100 reps)", criterion_7, 1800},
      {"simulator validation", criterion_8, 300},
      {"plug-in covariance sanity", criterion_9, 1200},
      {"determinism across thread counts", criterion_10, 3600},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    const auto start = Clock::now();
    try {
      criteria[i].run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double t = seconds_since(start);
    o.require(t < criteria[i].budget_seconds, "runtime budget " + fmt(criteria[i].budget_seconds) + " s");
    std::printf("%s [%d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].name.c_str(),
                o.detail.str().c_str(), t);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
