#include "nullmanifold/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nullmanifold/errors.hpp"

namespace nullmanifold {

namespace {

using json = nlohmann::ordered_json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw input_error("failed to parse " + path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write file: " + path);
  out << text;
}

Eigen::VectorXd vector_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw input_error(what + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json vector_to(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Eigen::Matrix3d rotation_from_rpy(const Eigen::Vector3d& rpy) {
  return (Eigen::AngleAxisd(rpy[2], Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(rpy[1], Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(rpy[0], Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Pose pose_from(const json& j, const std::string& what) {
  Pose p;
  if (j.contains("translation"))
    p.translation = Eigen::Vector3d(vector_from(j.at("translation"), what + ".translation"));
  if (j.contains("rotation_rpy"))
    p.rotation = rotation_from_rpy(
        Eigen::Vector3d(vector_from(j.at("rotation_rpy"), what + ".rotation_rpy")));
  return p;
}

Eigen::Matrix3d orientation_from(const json& j, const std::string& what) {
  if (j.is_string()) {
    if (j.get<std::string>() == "down") return downward_orientation();
    throw input_error(what + ": unknown orientation '" + j.get<std::string>() + "'");
  }
  return rotation_from_rpy(Eigen::Vector3d(vector_from(j, what)));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw input_error(what + ": trailing characters in '" + s + "'");
    return v;
  } catch (const std::exception&) {
    throw input_error(what + ": cannot parse number '" + s + "'");
  }
}

std::string resolve_relative(const std::string& base_file, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || std::filesystem::exists(p)) return path;
  return (std::filesystem::path(base_file).parent_path() / p).string();
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string format_ms(double ms) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", ms);
  return buf;
}

Robot load_robot(const std::string& path) {
  const json j = parse_file(path);
  const std::string type = j.value("type", "");
  Robot robot;
  if (type == "planar") {
    robot.planar = std::make_shared<PlanarChain>(
        vector_from(j.at("link_lengths"), "link_lengths"));
    return robot;
  }
  if (type == "chain") {
    auto chain = std::make_shared<KinematicChain>();
    if (!j.contains("joints") || !j.at("joints").is_array())
      throw input_error(path + ": chain robot needs a joints array");
    for (const auto& joint_json : j.at("joints")) {
      JointSpec joint;
      joint.axis = Eigen::Vector3d(vector_from(joint_json.at("axis"), "joint axis"));
      const double norm = joint.axis.norm();
      if (norm <= 0.0) throw input_error(path + ": joint axis must be nonzero");
      joint.axis /= norm;
      if (joint_json.contains("origin"))
        joint.origin = pose_from(joint_json.at("origin"), "joint origin");
      chain->joints.push_back(joint);
    }
    if (j.contains("tool")) chain->tool = pose_from(j.at("tool"), "tool");
    chain->validate();
    robot.chain = std::move(chain);
    return robot;
  }
  throw input_error(path + ": robot type must be 'planar' or 'chain'");
}

TaskSpec load_task_spec(const std::string& path, const Robot& robot) {
  const json j = parse_file(path);
  TaskSpec spec;
  if (j.contains("family")) {
    TaskFamily family;
    const std::string kind = j.at("family").get<std::string>();
    if (kind == "line") {
      family.kind = TaskFamily::Kind::line;
      family.count = j.value("count", 30);
    } else if (kind == "rectangle") {
      family.kind = TaskFamily::Kind::rectangle;
      if (j.contains("counts")) {
        const auto counts = j.at("counts");
        family.counts = {counts.at(0).get<int>(), counts.at(1).get<int>()};
      }
    } else {
      throw input_error(path + ": family must be 'line' or 'rectangle'");
    }
    family.from = Eigen::Vector2d(vector_from(j.at("from"), "from"));
    family.to = Eigen::Vector2d(vector_from(j.at("to"), "to"));
    family.z = j.at("z").get<double>();
    if (j.contains("orientation"))
      family.orientation = orientation_from(j.at("orientation"), "orientation");
    family.validate();
    spec.family = family;
    return spec;
  }

  const std::string kind = j.value("kind", "");
  if (kind == "planar_position") {
    if (!robot.planar) throw input_error(path + ": planar_position task needs a planar robot");
    spec.single = make_planar_position_task(
        robot.planar, Eigen::Vector2d(vector_from(j.at("target"), "target")));
  } else if (kind == "position3") {
    if (!robot.chain) throw input_error(path + ": position3 task needs a chain robot");
    spec.single = make_position3_task(
        robot.chain, Eigen::Vector3d(vector_from(j.at("target"), "target")));
  } else if (kind == "pose6") {
    if (!robot.chain) throw input_error(path + ": pose6 task needs a chain robot");
    spec.single = make_pose6_task(robot.chain, pose_from(j.at("target"), "target"));
  } else if (kind == "position_fixed_orientation") {
    if (!robot.chain)
      throw input_error(path + ": position_fixed_orientation task needs a chain robot");
    const Eigen::Matrix3d orientation =
        j.contains("orientation") ? orientation_from(j.at("orientation"), "orientation")
                                  : downward_orientation();
    spec.single = make_fixed_orientation_task(
        robot.chain, Eigen::Vector3d(vector_from(j.at("target"), "target")), orientation);
  } else {
    throw input_error(path + ": unknown task kind '" + kind + "'");
  }
  return spec;
}

std::string sidecar_path(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".meta.json");
  return p.string();
}

void save_samples(const SampleSet& samples, const std::string& csv_path) {
  if (samples.samples.empty()) throw input_error("save_samples: empty sample set");
  const Eigen::Index dims = samples.samples.front().size();
  const bool labeled = !samples.family_coordinates.empty();
  Eigen::Index family_dims = 0;
  if (labeled) {
    for (const auto& c : samples.family_coordinates)
      family_dims = std::max(family_dims, c.size());
  }

  std::ostringstream out;
  for (Eigen::Index a = 0; a < dims; ++a) out << "q" << a << ",";
  out << "residual_norm";
  for (Eigen::Index a = 0; a < family_dims; ++a) out << ",family_" << a;
  out << "\n";
  for (size_t i = 0; i < samples.samples.size(); ++i) {
    for (Eigen::Index a = 0; a < dims; ++a)
      out << format_double(samples.samples[i][a]) << ",";
    out << format_double(samples.residual_norms[i]);
    for (Eigen::Index a = 0; a < family_dims; ++a) {
      const auto& coord = samples.family_coordinates[i];
      out << "," << format_double(a < coord.size() ? coord[a] : 0.0);
    }
    out << "\n";
  }
  write_text(csv_path, out.str());

  json meta;
  meta["method"] = samples.method;
  meta["beta"] = samples.beta;
  meta["count"] = samples.samples.size();
  meta["sampling_seconds"] = samples.sampling_seconds;
  meta["warning"] = samples.warning;
  meta["initial_tangent"] = vector_to(samples.initial_tangent);
  write_text(sidecar_path(csv_path), meta.dump(2) + "\n");
}

SampleSet load_samples(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw input_error("cannot open file: " + csv_path);
  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw input_error(csv_path + ": empty sample file");
  const auto header = split_csv_line(line);
  Eigen::Index dims = 0, family_dims = 0;
  Eigen::Index residual_col = -1;
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c].rfind("q", 0) == 0 && residual_col < 0) ++dims;
    else if (header[c] == "residual_norm") residual_col = static_cast<Eigen::Index>(c);
    else if (header[c].rfind("family_", 0) == 0) ++family_dims;
  }
  if (dims == 0 || residual_col != dims)
    throw input_error(csv_path + ": malformed header");

  SampleSet set;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<Eigen::Index>(fields.size()) != dims + 1 + family_dims)
      throw input_error(csv_path + ": row has wrong field count");
    Configuration q(dims);
    for (Eigen::Index a = 0; a < dims; ++a)
      q[a] = parse_double(fields[static_cast<size_t>(a)], csv_path);
    set.samples.push_back(q);
    set.residual_norms.push_back(
        parse_double(fields[static_cast<size_t>(residual_col)], csv_path));
    if (family_dims > 0) {
      Eigen::VectorXd coord(family_dims);
      for (Eigen::Index a = 0; a < family_dims; ++a)
        coord[a] = parse_double(fields[static_cast<size_t>(dims + 1 + a)], csv_path);
      set.family_coordinates.push_back(coord);
    }
  }
  if (set.samples.empty()) throw input_error(csv_path + ": no sample rows");

  const std::string meta_path = sidecar_path(csv_path);
  if (std::filesystem::exists(meta_path)) {
    const json meta = parse_file(meta_path);
    set.method = meta.value("method", "");
    set.beta = meta.value("beta", 0.0);
    set.sampling_seconds = meta.value("sampling_seconds", 0.0);
    set.warning = meta.value("warning", "");
    if (meta.contains("initial_tangent"))
      set.initial_tangent = vector_from(meta.at("initial_tangent"), "initial_tangent");
  }
  return set;
}

void save_model(const GpisModel& model, const std::string& path) {
  json j;
  j["lengthscale"] = model.lengthscale;
  j["noise"] = model.noise;
  j["threshold"] = model.membership_threshold;
  json points = json::array();
  for (Eigen::Index i = 0; i < model.train_points.rows(); ++i)
    points.push_back(vector_to(model.train_points.row(i).transpose()));
  j["points"] = std::move(points);
  j["alpha"] = vector_to(model.alpha);
  write_text(path, j.dump(2) + "\n");
}

GpisModel load_model(const std::string& path) {
  const json j = parse_file(path);
  GpisModel model;
  model.lengthscale = j.at("lengthscale").get<double>();
  model.noise = j.at("noise").get<double>();
  model.membership_threshold = j.at("threshold").get<double>();
  if (model.lengthscale <= 0.0) throw input_error(path + ": lengthscale must be positive");
  const auto& points = j.at("points");
  if (!points.is_array() || points.empty())
    throw input_error(path + ": model has no training points");
  const Eigen::Index count = static_cast<Eigen::Index>(points.size());
  const Eigen::Index dims = static_cast<Eigen::Index>(points[0].size());
  model.train_points.resize(count, dims);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Eigen::VectorXd row = vector_from(points[static_cast<size_t>(i)], "model point");
    if (row.size() != dims) throw input_error(path + ": ragged model points");
    model.train_points.row(i) = row.transpose();
  }
  model.alpha = vector_from(j.at("alpha"), "alpha");
  if (model.alpha.size() != count)
    throw input_error(path + ": alpha length does not match point count");
  return model;
}

BenchConfig load_bench_config(const std::string& path) {
  const json j = parse_file(path);
  BenchConfig config;
  config.seed = j.value("seed", 0ull);
  if (j.contains("coverage")) {
    const auto& cov = j.at("coverage");
    config.coverage.spacing = cov.value("spacing", config.coverage.spacing);
    config.coverage.radius = cov.value("radius", config.coverage.radius);
    config.coverage.mc_points = cov.value("mc_points", config.coverage.mc_points);
  }
  config.traversal.eps_proj = j.value("eps_proj", config.traversal.eps_proj);
  config.traversal.gamma = j.value("gamma", config.traversal.gamma);
  config.traversal.max_steps = j.value("max_steps", config.traversal.max_steps);
  config.traversal.max_proj_iters =
      j.value("max_proj_iters", config.traversal.max_proj_iters);

  const std::string default_robot =
      j.contains("robot") ? resolve_relative(path, j.at("robot").get<std::string>()) : "";
  const std::string default_task =
      j.contains("task") ? resolve_relative(path, j.at("task").get<std::string>()) : "";

  if (!j.contains("cases")) return config;
  for (const auto& case_json : j.at("cases")) {
    BenchCell base;
    base.label = case_json.value("label", "");
    base.robot_file = case_json.contains("robot")
                          ? resolve_relative(path, case_json.at("robot").get<std::string>())
                          : default_robot;
    base.task_file = case_json.contains("task")
                         ? resolve_relative(path, case_json.at("task").get<std::string>())
                         : default_task;
    base.method = case_json.value("method", "newton");
    base.coverage = case_json.value("coverage", true);
    base.build_gp = case_json.value("gp", false);
    base.restarts = case_json.value("restarts", 0);
    base.lengthscale = case_json.value("lengthscale", kDefaultLengthscale);
    base.noise = case_json.value("noise", kDefaultNoise);
    base.threshold = case_json.value("threshold", kDefaultMembershipThreshold);
    if (base.robot_file.empty() || base.task_file.empty())
      throw input_error(path + ": bench case needs robot and task files");

    if (base.method == "random-ik") {
      if (!case_json.contains("n"))
        throw input_error(path + ": random-ik case needs an 'n' list");
      for (const auto& n : case_json.at("n")) {
        BenchCell cell = base;
        cell.count = n.get<int>();
        config.cells.push_back(cell);
      }
    } else {
      std::vector<double> betas;
      if (case_json.contains("beta")) {
        if (case_json.at("beta").is_array())
          for (const auto& b : case_json.at("beta")) betas.push_back(b.get<double>());
        else
          betas.push_back(case_json.at("beta").get<double>());
      } else {
        betas.push_back(0.5);
      }
      for (double beta : betas) {
        BenchCell cell = base;
        cell.beta = beta;
        config.cells.push_back(cell);
      }
    }
  }
  return config;
}

namespace {

std::string cell_or_empty(double value, bool as_ms = false) {
  if (value < 0.0) return "";
  return as_ms ? format_ms(value) : format_double(value);
}

}  // namespace

void write_bench_csv(const BenchReport& report, const std::string& path) {
  std::ostringstream out;
  out << "label,method,param,param_value,samples,sampling_ms,gp_build_ms,"
         "coverage_volume,coverage_stderr,mean_residual,residual_rmse,error\n";
  for (const BenchRow& row : report.rows) {
    out << row.label << "," << row.method << "," << row.param_name << ","
        << format_double(row.param_value) << "," << row.samples << ","
        << format_ms(row.sampling_ms) << "," << cell_or_empty(row.gp_build_ms, true)
        << "," << cell_or_empty(row.coverage_volume) << ","
        << (row.coverage_volume < 0.0 ? "" : format_double(row.coverage_stderr)) << ","
        << cell_or_empty(row.mean_residual) << "," << cell_or_empty(row.residual_rmse)
        << "," << row.error << "\n";
  }
  write_text(path, out.str());
}

void write_bench_markdown(const BenchReport& report, const std::string& path) {
  std::ostringstream out;
  out << "| Label | Method | Param | Samples | Sampling [ms] | GP build [ms] | "
         "Coverage [rad^n] | Mean residual | Error |\n";
  out << "|---|---|---|---|---|---|---|---|---|\n";
  for (const BenchRow& row : report.rows) {
    char param[64];
    std::snprintf(param, sizeof(param), "%s=%g", row.param_name.c_str(), row.param_value);
    char cov[64] = "";
    if (row.coverage_volume >= 0.0)
      std::snprintf(cov, sizeof(cov), "%.4g", row.coverage_volume);
    char mean[64] = "";
    if (row.mean_residual >= 0.0)
      std::snprintf(mean, sizeof(mean), "%.2e", row.mean_residual);
    out << "| " << row.label << " | " << row.method << " | " << param << " | "
        << row.samples << " | " << format_ms(row.sampling_ms) << " | "
        << (row.gp_build_ms < 0.0 ? "" : format_ms(row.gp_build_ms)) << " | " << cov
        << " | " << mean << " | " << row.error << " |\n";
  }
  write_text(path, out.str());
}

}  // namespace nullmanifold
