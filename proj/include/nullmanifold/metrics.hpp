#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nullmanifold/gpis.hpp"
#include "nullmanifold/sampling.hpp"

namespace nullmanifold {

// Axis-aligned evaluation grid; point(flat) decodes row-major, last axis fastest.
struct GridSpec {
  std::vector<std::vector<double>> axes;

  size_t total() const;
  Eigen::VectorXd point(size_t flat) const;
};

// Grid values anchored at integer multiples of `spacing` inside [lo_i, hi_i).
GridSpec anchored_grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                       double spacing);
// Grid values lo_i + k * resolution < hi_i (always contains lo_i).
GridSpec stepped_grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                      double resolution);

struct CoverageParams {
  double spacing = 0.05;   // grid spacing s [rad]
  double radius = 0.5;     // neighborhood radius eps [rad]
  Eigen::VectorXd lo;      // empty = -pi per axis
  Eigen::VectorXd hi;      // empty = +pi per axis
  long mc_points = 1000000;  // Monte Carlo budget for dims > 3
  std::uint64_t mc_seed = 0;

  void validate() const;
};

struct CoverageResult {
  double volume = 0.0;
  double standard_error = 0.0;  // 0 for the exhaustive grid
  long covered = 0;
  long evaluated = 0;
  bool monte_carlo = false;
};

// Volume of the grid cells whose point lies within `radius` (wrapped joint
// metric) of some sample: exhaustive for dims <= 3, Monte Carlo above.
CoverageResult coverage_volume(const SampleSet& samples, const CoverageParams& params);

double mean_residual_norm(const TaskInstance& task, const SampleSet& samples);

// RMSE of the model distance field against the exact nearest-sample distance of
// a dense oracle set, over the queries whose ground-truth distance is below
// `cutoff` (cutoff <= 0 means 3 * lengthscale).
double distance_rmse(const GpisModel& model, const SampleSet& oracle_samples,
                     const std::vector<Eigen::VectorXd>& queries, double cutoff = -1.0);

struct BenchCell {
  std::string label;
  std::string robot_file;
  std::string task_file;
  std::string method;  // newton | zigzag | random-ik | family
  double beta = 0.5;
  int count = 0;       // random-ik sample count
  bool coverage = true;
  bool build_gp = false;
  int restarts = 0;
  double lengthscale = kDefaultLengthscale;
  double noise = kDefaultNoise;
  double threshold = kDefaultMembershipThreshold;
};

struct BenchConfig {
  std::uint64_t seed = 0;
  CoverageParams coverage;
  TraversalParams traversal;  // beta overridden per cell
  std::vector<BenchCell> cells;
};

struct BenchRow {
  std::string label;
  std::string method;
  std::string param_name;   // "beta" or "n"
  double param_value = 0.0;
  long samples = 0;
  double sampling_ms = 0.0;
  double gp_build_ms = -1.0;       // < 0 when not built
  double coverage_volume = -1.0;   // < 0 when not computed
  double coverage_stderr = 0.0;
  double mean_residual = -1.0;
  double residual_rmse = -1.0;     // RMS of per-sample residual norms (family)
  std::string error;               // nonempty for failed cells
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

// Runs every configured cell sequentially, capturing wall time, coverage,
// residual statistics, and sample counts. Per-cell failures become error rows.
BenchReport run_benchmark(const BenchConfig& config);

}  // namespace nullmanifold
