#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tailfit/families.hpp"
#include "tailfit/mestim.hpp"
#include "tailfit/simulate.hpp"
#include "tailfit/spatial.hpp"

namespace tailfit {

enum class StudyKind { BiasVsK, ParameterGrid, Spatial };

enum class Metric { Bias, Rmse, EuclidBias, EuclidRmse, SupThetaCurveError, BoxplotQuantiles };

// Throws InvalidArgument on unknown names.
Metric metric_from_name(std::string_view name);
std::string_view metric_name(Metric metric);
StudyKind study_kind_from_name(std::string_view name);
std::string_view study_kind_name(StudyKind kind);

inline constexpr std::array<double, 5> kBoxplotLevels{0.025, 0.25, 0.5, 0.75, 0.975};

struct StudySpec {
  StudyKind kind = StudyKind::BiasVsK;
  SimSpec generator;                   // template; the grid overwrites its parameters
  std::optional<FamilyId> family;      // defaults to the family matching generator.model
  WeightPreset weights = WeightPreset::G1;
  std::vector<std::size_t> k_values;   // BiasVsK sweep; ParameterGrid uses the single entry
  std::vector<std::size_t> m_values;   // Spatial sweep
  // ParameterGrid points in generator coordinates: {theta} for M1, {nu, phi}
  // for M2 (r from the template), {lambda} for M3. A BiasVsK study with a
  // grid sweeps every k at every point (point-major).
  std::vector<std::vector<double>> grid;
  std::size_t replications = 200;
  std::uint64_t seed = 1;
  std::vector<Metric> metrics{Metric::Bias, Metric::Rmse};
  bool intervals = false;              // plug-in 95% intervals (product families)
  unsigned threads = 0;                // 0 = automatic
  FitOptions fit{};
  SpatialOptions spatial{};

  // Throws InvalidArgument (replications < 2, empty sweep, ...).
  void validate() const;
  FamilyId fit_family() const;
  std::size_t sweep_size() const;
};

// Truth in fit-family coordinates for a generator.
std::vector<double> generator_truth(const SimSpec& generator, FamilyId family);

// Per-replication outcome for the bivariate studies.
struct ReplicateRecord {
  std::size_t point = 0;
  std::size_t rep = 0;
  bool ok = false;
  std::string error;
  std::size_t k = 0;
  std::size_t m = 0;
  std::vector<double> theta_hat;
  std::vector<double> se;  // plug-in standard errors, when requested
  double zeta_hat = 0.0;
  double eta_hat = 0.0;
  double objective = 0.0;
  bool converged = false;
  bool at_boundary = false;
};

// Per-replication outcome of the spatial study.
struct SpatialRecord {
  std::size_t point = 0;
  std::size_t rep = 0;
  bool ok = false;
  std::string error;
  std::size_t usable_pairs = 0;
  double alpha_ls = 0.0, beta_ls = 0.0, alpha_joint = 0.0, beta_joint = 0.0;
  double sup_ls = 0.0, sup_joint = 0.0;
  std::vector<double> pairwise_theta;  // at the test pairs
  std::vector<double> spatial_theta;   // theta(distance; LS estimate) at the test pairs
};

struct CoordinateSummary {
  double truth = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double rmse = 0.0;
  double variance = 0.0;  // divisor N, so rmse^2 = bias^2 + variance
  double mc_se = 0.0;     // standard error of the mean, divisor N - 1
  std::array<double, 5> quantiles{};
  double coverage = 0.0;  // fraction of 95% intervals covering the truth
};

struct PointSummary {
  std::size_t point = 0;
  std::string label;
  std::size_t k = 0;
  std::vector<double> generator_params;
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::vector<CoordinateSummary> coords;
  double euclid_bias = 0.0;
  double euclid_rmse = 0.0;
};

struct SpatialSummary {
  std::size_t point = 0;
  std::size_t m = 0;
  std::size_t ok = 0;
  std::size_t failed = 0;
  CoordinateSummary alpha_ls, beta_ls, alpha_joint, beta_joint;
  double mean_sup_ls = 0.0, mean_sup_joint = 0.0;
  double mean_abs_diff_alpha = 0.0, mean_abs_diff_beta = 0.0;
  std::vector<double> test_distances;
  std::vector<double> iqr_pairwise, iqr_spatial;
};

struct StudyResult {
  StudyKind kind = StudyKind::BiasVsK;
  std::uint64_t seed = 0;
  std::vector<double> truth;  // fit-family truth (BiasVsK) or (alpha, beta) (Spatial)
  std::vector<ReplicateRecord> records;  // point-major, then replication
  std::vector<PointSummary> summaries;
  std::vector<SpatialRecord> spatial_records;
  std::vector<SpatialSummary> spatial_summaries;
  std::vector<PairIndex> test_pairs;
  double wall_seconds = 0.0;

  std::size_t failures() const noexcept;
  std::size_t attempts() const noexcept;
};

StudyResult run_bias_rmse_vs_k(const StudySpec& spec);
StudyResult run_parameter_grid(const StudySpec& spec);
StudyResult run_spatial_study(const StudySpec& spec);
StudyResult run_study(const StudySpec& spec);

// sup over a 301-point grid on [0, 3] of |theta(D; a, b) - theta(D; a0, b0)|.
double sup_theta_curve_error(double alpha_hat, double beta_hat, double alpha0, double beta0);

// Pairs whose distances are closest to 0.5, 1, 1.5, 2 and 2.5.
std::vector<std::size_t> test_pair_indices(const SpatialModel& model);

// CSV artifacts; byte-stable for a fixed result (wall-clock is not written).
void write_tidy_csv(const StudyResult& result, const StudySpec& spec, std::ostream& out);
void write_summary_csv(const StudyResult& result, const StudySpec& spec, std::ostream& out);

// Key-value study configuration: one `key = value` per line, '#' starts a
// comment, lists are comma-separated and grid points use ':' between
// coordinates. Throws Parse with the line number.
StudySpec parse_study_config(std::istream& in);
StudySpec load_study_config(const std::string& path);

}  // namespace tailfit
