#include <doctest.h>

#include <algorithm>

#include "nullmanifold/errors.hpp"
#include "nullmanifold/gpis.hpp"
#include "test_helpers.hpp"

using namespace nullmanifold;

namespace {

GpisModel single_point_model(const Eigen::Vector3d& point, double noise = 0.0,
                             double lengthscale = 0.4) {
  return build_model({Configuration(point)}, lengthscale, noise, 0.995);
}

std::vector<Configuration> ring_points(int count, double radius = 1.0) {
  std::vector<Configuration> pts;
  for (int i = 0; i < count; ++i) {
    const double a = 2.0 * 3.14159265358979 * i / count;
    pts.push_back(Eigen::Vector3d(radius * std::cos(a), radius * std::sin(a), 0.3));
  }
  return pts;
}

}  // namespace

TEST_CASE("se_kernel values and symmetry") {
  const Eigen::Vector3d q(0.1, -0.2, 0.3);
  CHECK(se_kernel(q, q, 0.4) == doctest::Approx(1.0));

  const double l = 0.7;
  Eigen::Vector3d offset = q + Eigen::Vector3d(l * std::sqrt(2.0), 0, 0);
  CHECK(se_kernel(q, offset, l) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const Configuration a = test_helpers::random_config(rng, 5);
    const Configuration b = test_helpers::random_config(rng, 5);
    CHECK(se_kernel(a, b, 0.4) == se_kernel(b, a, 0.4));
    CHECK(se_kernel(a, b, 0.4) > 0.0);
    CHECK(se_kernel(a, b, 0.4) <= 1.0);
  }

  CHECK_THROWS_AS(se_kernel(q, q, 0.0), input_error);
  CHECK_THROWS_AS(se_kernel(q, q, -1.0), input_error);
}

TEST_CASE("build_model coefficients on tiny cases") {
  const GpisModel clean = single_point_model(Eigen::Vector3d(0.1, 0.2, 0.3), 0.0);
  REQUIRE(clean.alpha.size() == 1);
  CHECK(clean.alpha[0] == doctest::Approx(1.0).epsilon(1e-14));

  const GpisModel noisy = single_point_model(Eigen::Vector3d(0.1, 0.2, 0.3), 1.0);
  CHECK(noisy.alpha[0] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(build_model(std::vector<Configuration>{}, 0.4, 0.0, 0.995),
                  input_error);
  CHECK_THROWS_AS(single_point_model(Eigen::Vector3d(0, 0, 0), -1.0), input_error);
  CHECK_THROWS_AS(build_model({Configuration(Eigen::Vector3d(0, 0, 0))}, 0.0, 0.0, 0.995),
                  input_error);
  CHECK_THROWS_AS(build_model({Configuration(Eigen::Vector3d(0, 0, 0))}, 0.4, 0.0, 1.5),
                  input_error);
}

TEST_CASE("build_model survives duplicate points through jitter") {
  std::vector<Configuration> pts(3, Configuration(Eigen::Vector3d(0.5, -0.1, 0.2)));
  const GpisModel model = build_model(pts, 0.4, 0.0, 0.995);
  Eigen::MatrixXd gram(3, 3);
  gram.setOnes();
  CHECK(((gram * model.alpha).array() - 1.0).abs().maxCoeff() <= 2e-8);
}

TEST_CASE("infer interpolates training points at zero noise") {
  const auto pts = ring_points(29);
  const GpisModel model = build_model(pts, 0.4, 0.0, 0.995);
  for (const auto& p : pts) CHECK(infer(model, p) == doctest::Approx(1.0).epsilon(1e-8));

  // closed form for a single point
  const GpisModel single = single_point_model(Eigen::Vector3d(0, 0, 0));
  const Eigen::Vector3d q(0.3, 0.0, 0.0);
  CHECK(infer(single, q) ==
        doctest::Approx(std::exp(-0.09 / (2.0 * 0.16))).epsilon(1e-12));

  CHECK(infer(model, Eigen::Vector3d(3.0, 3.0, -3.0)) < 1e-6);
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937_64 rng(7);
  for (int count : {1, 29, 200}) {
    const auto pts = ring_points(count);
    const GpisModel model = build_model(pts, 0.4, count == 1 ? 0.0 : 1e-6, 0.995);
    for (int i = 0; i < 25; ++i) {
      // queries at a healthy offset from the ring, where the gradient is well
      // scaled for a relative comparison
      Configuration q = pts[static_cast<size_t>(i) % pts.size()];
      q += 0.3 * test_helpers::random_config(rng, 3).normalized();
      const Eigen::VectorXd analytic = gradient(model, q);
      const Eigen::MatrixXd fd = test_helpers::finite_difference(
          [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            return Eigen::VectorXd::Constant(1, infer(model, x));
          },
          q);
      CHECK((analytic.transpose() - fd.row(0)).norm() / analytic.norm() < 1e-6);
    }
  }

  const GpisModel single = single_point_model(Eigen::Vector3d(0.1, 0.2, 0.3));
  CHECK(gradient(single, Eigen::Vector3d(0.1, 0.2, 0.3)).norm() == 0.0);
  const Eigen::VectorXd g = gradient(single, Eigen::Vector3d(0.6, 0.2, 0.3));
  CHECK(g[0] < 0.0);  // points back toward the training point
  CHECK(std::abs(g[1]) < 1e-15);
}

TEST_CASE("single-point exactness of distance and project") {
  const Eigen::Vector3d center(0.4, -0.8, 1.2);
  // lengthscale 1 keeps the kernel well above the vanishing-gradient guard
  // over the whole query box
  const GpisModel model = single_point_model(center, 0.0, 1.0);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Configuration q = test_helpers::random_config(rng, 3, -2.0, 2.0);
    const double expected = (q - Eigen::VectorXd(center)).norm();
    CHECK(std::abs(distance(model, q) - expected) <= 1e-10);
    if (expected > 1e-6) {
      const Configuration projected = project(model, q);
      CHECK((projected - Eigen::VectorXd(center)).norm() <= 1e-10);
    }
  }
  CHECK(distance(model, center) == 0.0);

  // exactness is lengthscale independent where the field stays alive
  const GpisModel narrow = single_point_model(center, 0.0, 0.4);
  for (int i = 0; i < 20; ++i) {
    Configuration q = Eigen::VectorXd(center) +
                      0.9 * test_helpers::random_config(rng, 3).normalized();
    CHECK(std::abs(distance(narrow, q) - 0.9) <= 1e-10);
    CHECK((project(narrow, q) - Eigen::VectorXd(center)).norm() <= 1e-10);
  }
}

TEST_CASE("distance clamps phi above one to zero") {
  GpisModel model = single_point_model(Eigen::Vector3d(0, 0, 0));
  CHECK(distance_from_phi(model, 1.2) == 0.0);
  CHECK(distance_from_phi(model, 1.0) == 0.0);
  CHECK(distance_from_phi(model, 0.0) > 0.0);  // floor keeps log finite
  CHECK(std::isfinite(distance_from_phi(model, 0.0)));
}

TEST_CASE("monotone field decay along rays from a single point") {
  const Eigen::Vector3d center(0.0, 0.0, 0.0);
  const GpisModel model = single_point_model(center);
  std::mt19937_64 rng(13);
  for (int ray = 0; ray < 10; ++ray) {
    const Eigen::VectorXd dir = test_helpers::random_config(rng, 3).normalized();
    double prev_phi = 2.0, prev_d = -1.0;
    for (double t = 0.1; t < 2.0; t += 0.1) {
      const Eigen::VectorXd q = t * dir;
      const double phi = infer(model, q);
      const double d = distance(model, q);
      CHECK(phi < prev_phi);
      CHECK(d > prev_d);
      prev_phi = phi;
      prev_d = d;
    }
  }
}

TEST_CASE("is_on_manifold thresholding") {
  const auto pts = ring_points(40);
  const GpisModel model = build_model(pts, 0.4, 0.0, 0.995);
  CHECK(is_on_manifold(model, pts[5]));
  CHECK_FALSE(is_on_manifold(model, Eigen::Vector3d(2.5, 2.5, -2.0)));
}

TEST_CASE("permutation of training points leaves queries unchanged") {
  auto pts = ring_points(17);
  const GpisModel a = build_model(pts, 0.4, 1e-6, 0.995);
  std::reverse(pts.begin(), pts.end());
  std::swap(pts[2], pts[9]);
  const GpisModel b = build_model(pts, 0.4, 1e-6, 0.995);
  std::mt19937_64 rng(15);
  for (int i = 0; i < 30; ++i) {
    const Configuration q = test_helpers::random_config(rng, 3, -1.5, 1.5);
    CHECK(std::abs(infer(a, q) - infer(b, q)) <= 1e-10);
    CHECK((gradient(a, q) - gradient(b, q)).norm() <= 1e-10);
    CHECK(std::abs(distance(a, q) - distance(b, q)) <= 1e-10);
  }
}

TEST_CASE("repeated queries return identical values") {
  const auto pts = ring_points(29);
  const GpisModel model = build_model(pts, 0.4, 1e-6, 0.995);
  const Eigen::Vector3d q(0.7, -0.3, 0.5);
  const double phi = infer(model, q);
  const double d = distance(model, q);
  const Eigen::VectorXd g = gradient(model, q);
  for (int i = 0; i < 5; ++i) {
    CHECK(infer(model, q) == phi);
    CHECK(distance(model, q) == d);
    CHECK((gradient(model, q) - g).norm() == 0.0);
  }
}

TEST_CASE("project handles on-manifold and degenerate queries") {
  const GpisModel model = single_point_model(Eigen::Vector3d(0.1, 0.1, 0.1));
  // d = 0 at the training point: query returned unchanged
  const Configuration at_point(Eigen::Vector3d(0.1, 0.1, 0.1));
  CHECK((project(model, at_point) - at_point).norm() == 0.0);

  // far beyond the field support the gradient underflows to zero
  const Configuration far(Eigen::Vector3d(30.0, 30.0, 30.0));
  CHECK_THROWS_AS(project(model, far), degenerate_query_error);
}

TEST_CASE("path_to_manifold iterates to the field zero set") {
  const Eigen::Vector3d center(0.2, -0.4, 0.9);
  const GpisModel model = single_point_model(center);

  SUBCASE("start on the manifold gives a single-element path") {
    const auto path = path_to_manifold(model, center, 0.5, 1e-3);
    CHECK(path.size() == 1);
  }

  SUBCASE("capped steps still reach the target") {
    const Configuration start(Eigen::Vector3d(1.2, 0.4, 0.9));
    const auto path = path_to_manifold(model, start, 0.25, 1e-6);
    REQUIRE(path.size() >= 2);
    CHECK((path.front() - start).norm() == 0.0);
    CHECK(distance(model, path.back()) <= 1e-6);
    for (size_t i = 0; i + 1 < path.size(); ++i)
      CHECK((path[i + 1] - path[i]).norm() <= 0.25 + 1e-12);
  }

  SUBCASE("unreachable tolerance stalls") {
    // noise shrinks the field maximum below 1, flooring the distance above 0
    const GpisModel fuzzy = single_point_model(Eigen::Vector3d(0, 0, 0), 1.0);
    CHECK_THROWS_AS(
        path_to_manifold(fuzzy, Configuration(Eigen::Vector3d(0.45, 0, 0)), 0.5, 1e-9),
        stall_error);
  }
}
