#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nullmanifold/errors.hpp"
#include "nullmanifold/io.hpp"
#include "test_helpers.hpp"

using namespace nullmanifold;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "nullmanifold_io_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string data_file(const std::string& name) {
  // unit tests run from anywhere; data/ sits next to the sources
  for (const char* base : {"data", "../data", "../../data"}) {
    const fs::path p = fs::path(base) / name;
    if (fs::exists(p)) return p.string();
  }
  return (fs::path(NULLMANIFOLD_DATA_DIR) / name).string();
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.1, -3.14159265358979312, 1e-300, 12345.6789, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("load_robot planar and chain") {
  const Robot planar = load_robot(data_file("planar3.json"));
  REQUIRE(planar.planar);
  CHECK(planar.dof() == 3);
  CHECK(planar.planar->link_lengths.sum() == doctest::Approx(3.0));

  const Robot panda = load_robot(data_file("panda7.json"));
  REQUIRE(panda.chain);
  CHECK(panda.dof() == 7);
  for (const auto& joint : panda.chain->joints)
    CHECK(std::abs(joint.axis.norm() - 1.0) <= 1e-12);

  CHECK_THROWS_AS(load_robot("/nonexistent.json"), input_error);
}

TEST_CASE("load_task_spec single instances and families") {
  const Robot planar = load_robot(data_file("planar3.json"));
  const TaskSpec target = load_task_spec(data_file("target_planar.json"), planar);
  REQUIRE(target.single);
  CHECK(target.single->kind == TaskKind::planar_position);
  CHECK((target.single->target_position - Eigen::Vector2d(1.5, 0.5)).norm() == 0.0);

  const Robot panda = load_robot(data_file("panda7.json"));
  const TaskSpec pose = load_task_spec(data_file("pose7_ready.json"), panda);
  REQUIRE(pose.single);
  CHECK(pose.single->kind == TaskKind::pose6);
  // the shipped target is the chain's ready pose
  Configuration ready(7);
  ready << 0, -0.785398163397448279, 0, -2.356194490192344837, 0,
      1.570796326794896558, 0.785398163397448279;
  CHECK(residual(*pose.single, ready).norm() < 1e-12);

  const TaskSpec line = load_task_spec(data_file("line_family.json"), panda);
  REQUIRE(line.family);
  CHECK(line.family->kind == TaskFamily::Kind::line);
  CHECK(line.family->count == 30);
  CHECK(line.family->z == doctest::Approx(0.3));

  const TaskSpec rect = load_task_spec(data_file("rect_family.json"), panda);
  REQUIRE(rect.family);
  CHECK(rect.family->counts[0] == 10);
  CHECK(rect.family->counts[1] == 20);

  // planar robots cannot serve chain tasks
  CHECK_THROWS_AS(load_task_spec(data_file("pose7_ready.json"), planar), input_error);
}

TEST_CASE("sample CSV round trip is byte identical") {
  SampleSet set;
  set.method = "newton";
  set.beta = 0.5;
  set.sampling_seconds = 0.012;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 7; ++i) {
    set.samples.push_back(test_helpers::random_config(rng, 3));
    set.residual_norms.push_back(1e-7 * static_cast<double>(i));
    set.family_coordinates.push_back(Eigen::Vector2d(0.1 * i, -0.2 * i));
  }
  set.initial_tangent = Eigen::Vector3d(0.1, 0.2, 0.3).normalized();

  const fs::path dir = temp_dir();
  const std::string first = (dir / "set.csv").string();
  save_samples(set, first);
  const SampleSet loaded = load_samples(first);
  REQUIRE(loaded.size() == set.size());
  CHECK(loaded.method == "newton");
  CHECK(loaded.beta == 0.5);
  for (size_t i = 0; i < set.size(); ++i) {
    CHECK((loaded.samples[i] - set.samples[i]).norm() == 0.0);
    CHECK(loaded.residual_norms[i] == set.residual_norms[i]);
    CHECK((loaded.family_coordinates[i] - set.family_coordinates[i]).norm() == 0.0);
  }

  const std::string second = (dir / "set2.csv").string();
  save_samples(loaded, second);
  CHECK(slurp(first) == slurp(second));

  CHECK_THROWS_AS(load_samples((dir / "missing.csv").string()), input_error);
  const std::string empty = (dir / "empty.csv").string();
  std::ofstream(empty) << "";
  CHECK_THROWS_AS(load_samples(empty), input_error);
}

TEST_CASE("model JSON round trip is byte identical") {
  std::vector<Configuration> pts;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 11; ++i) pts.push_back(test_helpers::random_config(rng, 4));
  const GpisModel model = build_model(pts, 0.37, 1e-6, 0.995);

  const fs::path dir = temp_dir();
  const std::string first = (dir / "model.json").string();
  save_model(model, first);
  const GpisModel loaded = load_model(first);
  CHECK(loaded.lengthscale == model.lengthscale);
  CHECK(loaded.noise == model.noise);
  CHECK(loaded.membership_threshold == model.membership_threshold);
  CHECK((loaded.train_points - model.train_points).norm() == 0.0);
  CHECK((loaded.alpha - model.alpha).norm() == 0.0);

  const std::string second = (dir / "model2.json").string();
  save_model(loaded, second);
  CHECK(slurp(first) == slurp(second));

  // loaded model answers queries identically
  const Eigen::VectorXd q = test_helpers::random_config(rng, 4);
  CHECK(infer(loaded, q) == infer(model, q));
  CHECK(distance(loaded, q) == distance(model, q));
}

TEST_CASE("bench config parsing flattens parameter lists") {
  const BenchConfig config = load_bench_config(data_file("table1.json"));
  CHECK(config.seed == 42);
  CHECK(config.coverage.spacing == doctest::Approx(0.05));
  REQUIRE(config.cells.size() == 12);
  int newton = 0, zigzag = 0, random_ik = 0;
  for (const auto& cell : config.cells) {
    if (cell.method == "newton") ++newton;
    if (cell.method == "zigzag") ++zigzag;
    if (cell.method == "random-ik") ++random_ik;
    CHECK(fs::exists(cell.robot_file));
    CHECK(fs::exists(cell.task_file));
  }
  CHECK(newton == 4);
  CHECK(zigzag == 4);
  CHECK(random_ik == 4);

  const BenchConfig table3 = load_bench_config(data_file("table3.json"));
  REQUIRE(table3.cells.size() == 2);
  CHECK(table3.cells[0].method == "family");
  CHECK(table3.cells[0].build_gp);
}

TEST_CASE("bench report writers") {
  BenchReport report;
  BenchRow row;
  row.label = "newton";
  row.method = "newton";
  row.param_name = "beta";
  row.param_value = 0.5;
  row.samples = 29;
  row.sampling_ms = 2.345;
  row.coverage_volume = 0.0148;
  row.mean_residual = 1.7e-5;
  report.rows.push_back(row);

  const fs::path dir = temp_dir();
  const std::string csv = (dir / "report.csv").string();
  const std::string md = (dir / "report.md").string();
  write_bench_csv(report, csv);
  write_bench_markdown(report, md);

  const std::string csv_text = slurp(csv);
  CHECK(csv_text.find("label,method,param") != std::string::npos);
  CHECK(csv_text.find("newton,newton,beta") != std::string::npos);
  const std::string md_text = slurp(md);
  CHECK(md_text.find("| newton |") != std::string::npos);
}
