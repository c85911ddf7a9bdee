#pragma once

#include <optional>
#include <string>

#include "nullmanifold/metrics.hpp"

namespace nullmanifold {

// %.17g rendering; round-trips doubles exactly.
std::string format_double(double value);
// Fixed two-decimal milliseconds, matching report tables.
std::string format_ms(double ms);

// Robot description file: {"type":"planar","link_lengths":[...]} or
// {"type":"chain","joints":[{"axis":[...],"origin":{"translation":[...],
// "rotation_rpy":[...]}},...],"tool":{...}}. rpy is fixed-axis XYZ.
Robot load_robot(const std::string& path);

struct TaskSpec {
  std::optional<TaskInstance> single;
  std::optional<TaskFamily> family;
};

// Task file: {"kind":...,"target":...} for a single instance, or
// {"family":"line"|"rectangle",...} for a task family.
TaskSpec load_task_spec(const std::string& path, const Robot& robot);

// Sample CSV (header q0,...,q{n-1},residual_norm[,family_0,...]) plus a
// sidecar JSON holding method, beta, timing, and the recorded tangent sign.
void save_samples(const SampleSet& samples, const std::string& csv_path);
SampleSet load_samples(const std::string& csv_path);
std::string sidecar_path(const std::string& csv_path);

// Model file: {"lengthscale":...,"noise":...,"threshold":...,"points":[[...]],
// "alpha":[...]}.
void save_model(const GpisModel& model, const std::string& path);
GpisModel load_model(const std::string& path);

BenchConfig load_bench_config(const std::string& path);
void write_bench_csv(const BenchReport& report, const std::string& path);
void write_bench_markdown(const BenchReport& report, const std::string& path);

}  // namespace nullmanifold
