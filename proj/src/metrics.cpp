#include "nullmanifold/metrics.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <unordered_map>

#include "nullmanifold/errors.hpp"
#include "nullmanifold/io.hpp"
#include "nullmanifold/parallel.hpp"

namespace nullmanifold {

namespace {

constexpr double kPi = std::numbers::pi;

// Bucket index over the joint torus for the fixed-radius neighbor predicate.
// Cells tile [-pi, pi) per axis with width >= radius, so checking the 3^n
// adjacent cells is exhaustive.
class TorusBuckets {
 public:
  TorusBuckets(const std::vector<Configuration>& points, double radius)
      : dims_(static_cast<int>(points.front().size())) {
    cells_per_axis_ = std::max(1, static_cast<int>(std::floor(2.0 * kPi / radius)));
    cell_width_ = 2.0 * kPi / cells_per_axis_;
    for (size_t i = 0; i < points.size(); ++i)
      buckets_[key_of(points[i])].push_back(static_cast<int>(i));
    points_ = &points;
  }

  bool any_within(const Eigen::VectorXd& q, double radius) const {
    std::vector<int> cell(dims_);
    for (int a = 0; a < dims_; ++a) cell[a] = axis_cell(q[a]);
    std::vector<int> offset(dims_, -1);
    while (true) {
      std::uint64_t key = 0;
      for (int a = 0; a < dims_; ++a) {
        int c = (cell[a] + offset[a] + cells_per_axis_) % cells_per_axis_;
        key = key * static_cast<std::uint64_t>(cells_per_axis_) +
              static_cast<std::uint64_t>(c);
      }
      auto it = buckets_.find(key);
      if (it != buckets_.end()) {
        for (int idx : it->second)
          if (wrapped_distance(q, (*points_)[static_cast<size_t>(idx)]) < radius)
            return true;
      }
      int a = dims_ - 1;
      while (a >= 0 && offset[a] == 1) offset[a--] = -1;
      if (a < 0) break;
      ++offset[a];
    }
    return false;
  }

 private:
  int axis_cell(double x) const {
    int c = static_cast<int>(std::floor((wrap_angle(x) + kPi) / cell_width_));
    return std::clamp(c, 0, cells_per_axis_ - 1);
  }
  std::uint64_t key_of(const Eigen::VectorXd& q) const {
    std::uint64_t key = 0;
    for (int a = 0; a < dims_; ++a)
      key = key * static_cast<std::uint64_t>(cells_per_axis_) +
            static_cast<std::uint64_t>(axis_cell(q[a]));
    return key;
  }

  int dims_;
  int cells_per_axis_ = 1;
  double cell_width_ = 2.0 * kPi;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
  const std::vector<Configuration>* points_ = nullptr;
};

bool brute_within(const std::vector<Configuration>& points, const Eigen::VectorXd& q,
                  double radius) {
  for (const Configuration& p : points)
    if (wrapped_distance(q, p) < radius) return true;
  return false;
}

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

size_t GridSpec::total() const {
  size_t t = 1;
  for (const auto& axis : axes) t *= axis.size();
  return t;
}

Eigen::VectorXd GridSpec::point(size_t flat) const {
  Eigen::VectorXd p(static_cast<Eigen::Index>(axes.size()));
  for (int a = static_cast<int>(axes.size()) - 1; a >= 0; --a) {
    const size_t count = axes[static_cast<size_t>(a)].size();
    p[a] = axes[static_cast<size_t>(a)][flat % count];
    flat /= count;
  }
  return p;
}

GridSpec anchored_grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                       double spacing) {
  if (spacing <= 0.0) throw input_error("grid spacing must be positive");
  if (lo.size() != hi.size() || lo.size() == 0)
    throw input_error("grid bounds are empty or mismatched");
  GridSpec grid;
  grid.axes.resize(static_cast<size_t>(lo.size()));
  for (Eigen::Index a = 0; a < lo.size(); ++a) {
    if (!(lo[a] < hi[a])) throw input_error("grid bounds must satisfy lo < hi");
    auto& axis = grid.axes[static_cast<size_t>(a)];
    for (long k = static_cast<long>(std::ceil(lo[a] / spacing));
         static_cast<double>(k) * spacing < hi[a]; ++k)
      axis.push_back(static_cast<double>(k) * spacing);
    if (axis.empty()) throw input_error("grid axis has no points; shrink the spacing");
  }
  return grid;
}

GridSpec stepped_grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                      double resolution) {
  if (resolution <= 0.0) throw input_error("grid resolution must be positive");
  if (lo.size() != hi.size() || lo.size() == 0)
    throw input_error("grid bounds are empty or mismatched");
  GridSpec grid;
  grid.axes.resize(static_cast<size_t>(lo.size()));
  for (Eigen::Index a = 0; a < lo.size(); ++a) {
    if (!(lo[a] < hi[a])) throw input_error("grid bounds must satisfy lo < hi");
    auto& axis = grid.axes[static_cast<size_t>(a)];
    for (double x = lo[a]; x < hi[a]; x += resolution) axis.push_back(x);
  }
  return grid;
}

void CoverageParams::validate() const {
  if (spacing <= 0.0) throw input_error("coverage spacing must be positive");
  if (radius <= 0.0) throw input_error("coverage radius must be positive");
  if (lo.size() != hi.size()) throw input_error("coverage bounds mismatched");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw input_error("coverage bounds must satisfy lo < hi");
  if (mc_points < 1) throw input_error("coverage mc_points must be positive");
}

CoverageResult coverage_volume(const SampleSet& samples, const CoverageParams& params) {
  params.validate();
  CoverageResult result;
  if (samples.samples.empty()) return result;

  const int dims = static_cast<int>(samples.samples.front().size());
  Eigen::VectorXd lo = params.lo.size() ? params.lo
                                        : Eigen::VectorXd::Constant(dims, -kPi);
  Eigen::VectorXd hi = params.hi.size() ? params.hi
                                        : Eigen::VectorXd::Constant(dims, kPi);
  if (lo.size() != dims) throw input_error("coverage bounds do not match sample dims");

  const bool use_buckets = dims <= 3 && samples.samples.size() > 64;
  std::unique_ptr<TorusBuckets> buckets;
  if (use_buckets)
    buckets = std::make_unique<TorusBuckets>(samples.samples, params.radius);
  auto covered_by = [&](const Eigen::VectorXd& q) {
    return use_buckets ? buckets->any_within(q, params.radius)
                       : brute_within(samples.samples, q, params.radius);
  };

  if (dims <= 3) {
    const GridSpec grid = anchored_grid(lo, hi, params.spacing);
    const size_t total = grid.total();
    if (total > 500000000ull)
      throw input_error("coverage grid exceeds 5e8 points; increase the spacing");
    std::atomic<long> covered{0};
    parallel_for(total, [&](size_t begin, size_t end) {
      long local = 0;
      for (size_t flat = begin; flat < end; ++flat)
        if (covered_by(grid.point(flat))) ++local;
      covered += local;
    });
    result.covered = covered.load();
    result.evaluated = static_cast<long>(total);
    result.volume = static_cast<double>(result.covered) *
                    std::pow(params.spacing, dims);
    return result;
  }

  // Monte Carlo estimate for high-dimensional spaces; draws are sequential so
  // results depend only on the seed.
  std::mt19937_64 rng(params.mc_seed);
  std::vector<Eigen::VectorXd> draws(static_cast<size_t>(params.mc_points));
  for (auto& d : draws) {
    d.resize(dims);
    for (int a = 0; a < dims; ++a) {
      std::uniform_real_distribution<double> u(lo[a], hi[a]);
      d[a] = u(rng);
    }
  }
  std::atomic<long> hits{0};
  parallel_for(draws.size(), [&](size_t begin, size_t end) {
    long local = 0;
    for (size_t i = begin; i < end; ++i)
      if (covered_by(draws[i])) ++local;
    hits += local;
  });
  double bounds_volume = 1.0;
  for (int a = 0; a < dims; ++a) bounds_volume *= hi[a] - lo[a];
  const double fraction =
      static_cast<double>(hits.load()) / static_cast<double>(params.mc_points);
  result.monte_carlo = true;
  result.covered = hits.load();
  result.evaluated = params.mc_points;
  result.volume = fraction * bounds_volume;
  result.standard_error = bounds_volume * std::sqrt(fraction * (1.0 - fraction) /
                                                    static_cast<double>(params.mc_points));
  return result;
}

double mean_residual_norm(const TaskInstance& task, const SampleSet& samples) {
  if (samples.samples.empty())
    throw input_error("mean_residual_norm: empty sample set");
  double sum = 0.0;
  for (const Configuration& q : samples.samples) sum += residual(task, q).norm();
  return sum / static_cast<double>(samples.samples.size());
}

double distance_rmse(const GpisModel& model, const SampleSet& oracle_samples,
                     const std::vector<Eigen::VectorXd>& queries, double cutoff) {
  if (queries.empty()) throw input_error("distance_rmse: empty query grid");
  if (oracle_samples.samples.empty())
    throw input_error("distance_rmse: empty oracle sample set");
  if (cutoff <= 0.0) cutoff = 3.0 * model.lengthscale;

  std::vector<double> sq_err(queries.size(), -1.0);
  parallel_for(queries.size(), [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      const Eigen::VectorXd& q = queries[i];
      double ground_truth = std::numeric_limits<double>::infinity();
      for (const Configuration& s : oracle_samples.samples)
        ground_truth = std::min(ground_truth, (q - s).norm());
      if (ground_truth > cutoff) continue;
      const double err = distance(model, q) - ground_truth;
      sq_err[i] = err * err;
    }
  });
  double sum = 0.0;
  long used = 0;
  for (double e : sq_err) {
    if (e >= 0.0) {
      sum += e;
      ++used;
    }
  }
  if (used == 0)
    throw input_error("distance_rmse: no queries within the ground-truth cutoff");
  return std::sqrt(sum / static_cast<double>(used));
}

BenchReport run_benchmark(const BenchConfig& config) {
  BenchReport report;
  std::uint64_t cell_index = 0;
  for (const BenchCell& cell : config.cells) {
    ++cell_index;
    BenchRow row;
    row.label = cell.label.empty() ? cell.method : cell.label;
    row.method = cell.method;
    row.param_name = cell.method == "random-ik" ? "n" : "beta";
    row.param_value = cell.method == "random-ik" ? static_cast<double>(cell.count)
                                                 : cell.beta;
    try {
      const Robot robot = load_robot(cell.robot_file);
      const TaskSpec spec = load_task_spec(cell.task_file, robot);
      TraversalParams params = config.traversal;
      params.beta = cell.beta;
      params.restarts = cell.restarts;
      params.seed = config.seed + 0x9e3779b97f4a7c15ULL * cell_index;

      SampleSet set;
      const auto t0 = Clock::now();
      if (cell.method == "family") {
        if (!spec.family)
          throw input_error("bench cell '" + row.label + "': task file is not a family");
        if (!robot.chain)
          throw input_error("bench cell '" + row.label + "': family tasks need a spatial chain");
        const auto tasks = discretize_family(*spec.family, robot.chain);
        set = sample_family(tasks, params).samples;
      } else if (cell.method == "random-ik") {
        if (!spec.single)
          throw input_error("bench cell '" + row.label + "': task file is a family");
        set = random_ik_sample(*spec.single, cell.count, params.eps_proj, params.seed);
      } else if (cell.method == "newton" || cell.method == "zigzag") {
        if (!spec.single)
          throw input_error("bench cell '" + row.label + "': task file is a family");
        std::mt19937_64 rng(params.seed);
        std::uniform_real_distribution<double> u(-kPi, kPi);
        Configuration start(spec.single->dof());
        Configuration on_manifold;
        bool found = false;
        for (int attempt = 0; attempt < 20 && !found; ++attempt) {
          for (Eigen::Index i = 0; i < start.size(); ++i) start[i] = u(rng);
          try {
            on_manifold = gauss_newton_solve(*spec.single, start, params.eps_proj);
            found = true;
          } catch (const convergence_error&) {
          }
        }
        if (!found)
          throw sampling_error("bench cell '" + row.label + "': no on-manifold start found");
        set = traverse_with_restarts(*spec.single, on_manifold, params, cell.method);
      } else {
        throw input_error("bench cell '" + row.label + "': unknown method '" +
                          cell.method + "'");
      }
      row.sampling_ms = ms_since(t0);
      row.samples = static_cast<long>(set.size());

      if (spec.single) {
        row.mean_residual = mean_residual_norm(*spec.single, set);
      } else if (!set.residual_norms.empty()) {
        double sum = 0.0;
        for (double r : set.residual_norms) sum += r;
        row.mean_residual = sum / static_cast<double>(set.residual_norms.size());
      }
      if (!set.residual_norms.empty()) {
        double sq = 0.0;
        for (double r : set.residual_norms) sq += r * r;
        row.residual_rmse = std::sqrt(sq / static_cast<double>(set.residual_norms.size()));
      }

      if (cell.coverage) {
        CoverageParams cov = config.coverage;
        cov.mc_seed = params.seed;
        const CoverageResult coverage = coverage_volume(set, cov);
        row.coverage_volume = coverage.volume;
        row.coverage_stderr = coverage.standard_error;
      }
      if (cell.build_gp) {
        const auto g0 = Clock::now();
        build_model(set, cell.lengthscale, cell.noise, cell.threshold);
        row.gp_build_ms = ms_since(g0);
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace nullmanifold
