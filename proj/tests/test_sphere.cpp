#include "singlab/sphere.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace singlab;
using namespace singlab::testing;

TEST_CASE("circle rule: equal weights, exact total measure") {
  SphereQuadrature quad = build_quadrature(2, 360);
  CHECK(quad.count() == 360);
  for (Eigen::Index i = 0; i < quad.count(); ++i) {
    CHECK(quad.weights[i] == doctest::Approx(kTwoPi / 360).epsilon(1e-15));
    CHECK(std::abs(quad.node(i).norm() - 1.0) < 1e-12);
  }
  CHECK(std::abs(quad.weights.sum() - kTwoPi) < 1e-10);

  SphereFunction cos_sq{2, [](const Point& t) { return t[0] * t[0]; }, "cos^2"};
  double integral = 0;
  for (Eigen::Index i = 0; i < quad.count(); ++i)
    integral += quad.weights[i] * cos_sq(quad.node(i));
  CHECK(integral == doctest::Approx(kPi).epsilon(1e-6));
}

TEST_CASE("spiral rule integrates low-degree polynomials") {
  SphereQuadrature quad = build_quadrature(3, 4096);
  CHECK(std::abs(quad.weights.sum() - 4.0 * kPi) < 1e-3);
  double z_sq = 0, cross = 0;
  for (Eigen::Index i = 0; i < quad.count(); ++i) {
    Point t = quad.node(i);
    CHECK(std::abs(t.norm() - 1.0) < 1e-12);
    z_sq += quad.weights[i] * t[2] * t[2];
    cross += quad.weights[i] * t[0] * t[1];
  }
  CHECK(z_sq == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-3));
  CHECK(std::abs(cross) < 1e-3 * 4.0 * kPi / 3.0);
}

TEST_CASE("quadrature preconditions") {
  CHECK_THROWS_AS(build_quadrature(4, 100), std::invalid_argument);
  CHECK_THROWS_AS(build_quadrature(2, 4), std::invalid_argument);
}

TEST_CASE("norms of the constant density") {
  SphereQuadrature quad = build_quadrature(2, 512);
  OmegaNorms norms = compute_norms(omega_sample("const1", 2), quad, {2.0});
  CHECK(norms.l1 == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(norms.llogl == doctest::Approx(kTwoPi * std::log(3.0)).epsilon(1e-12));
  CHECK(norms.c_omega == doctest::Approx(kTwoPi * (1.0 + std::log(3.0))).epsilon(1e-12));
  REQUIRE(norms.lq.size() == 1);
  CHECK(norms.lq[0].second == doctest::Approx(std::sqrt(kTwoPi)).epsilon(1e-12));
}

TEST_CASE("norms of the direction cosine") {
  OmegaNorms norms = compute_norms(omega_sample("theta1", 2), build_quadrature(2, 2048));
  CHECK(norms.l1 == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("log-singular sample: refinement agreement with frozen values") {
  SphereFunction omega = omega_sample("logspike", 2);
  OmegaNorms coarse = compute_norms(omega, build_quadrature(2, 512));
  OmegaNorms fine = compute_norms(omega, build_quadrature(2, 1024));
  // reference midpoint-rule values, converging towards l1 = 2*pi
  CHECK(coarse.l1 == doctest::Approx(6.274683106252).epsilon(1e-9));
  CHECK(coarse.llogl == doctest::Approx(8.341988112263).epsilon(1e-9));
  CHECK(coarse.c_omega == doctest::Approx(14.616671218515).epsilon(1e-9));
  CHECK(fine.l1 == doctest::Approx(6.278933208032).epsilon(1e-9));
  CHECK(fine.llogl == doctest::Approx(8.354671787684).epsilon(1e-9));
  CHECK(fine.c_omega == doctest::Approx(14.642015248103).epsilon(1e-9));
  CHECK(std::abs(fine.l1 - coarse.l1) <= 0.01 * coarse.l1);
  CHECK(std::abs(fine.llogl - coarse.llogl) <= 0.01 * coarse.llogl);
  CHECK(std::abs(fine.c_omega - coarse.c_omega) <= 0.01 * coarse.c_omega);
}

TEST_CASE("every shipped sample: ordering, stability, scale monotonicity") {
  for (const auto& key : omega_sample_keys()) {
    CAPTURE(key);
    SphereFunction omega = omega_sample(key, 2);
    OmegaNorms coarse = compute_norms(omega, build_quadrature(2, 512));
    OmegaNorms fine = compute_norms(omega, build_quadrature(2, 1024));
    CHECK(coarse.llogl >= coarse.l1 * std::log(2.0) - 1e-12);
    CHECK(coarse.c_omega >= coarse.llogl);
    CHECK(std::abs(fine.l1 - coarse.l1) <= 0.01 * coarse.l1);
    CHECK(std::abs(fine.llogl - coarse.llogl) <= 0.01 * coarse.llogl);
    CHECK(std::abs(fine.c_omega - coarse.c_omega) <= 0.01 * coarse.c_omega);

    SphereFunction doubled{2, [omega](const Point& t) { return 2.0 * omega.eval(t); },
                           key + "x2"};
    OmegaNorms scaled = compute_norms(doubled, build_quadrature(2, 512));
    CHECK(scaled.c_omega >= coarse.c_omega - 1e-12);
  }
}

TEST_CASE("degree-zero homogeneous evaluation") {
  for (const auto& key : omega_sample_keys()) {
    CAPTURE(key);
    SphereFunction omega = omega_sample(key, 2);
    Point dir = unit2(0.7123);
    double base = omega(dir);
    // dyadic scalings normalize away exactly; others up to floating error
    for (double r : {0.5, 2.0, 0.125}) CHECK(omega(r * dir) == base);
    for (double r : {10.0, 0.3}) CHECK(omega(r * dir) == doctest::Approx(base).epsilon(1e-13));
  }
}

TEST_CASE("zero density rejected for the constant") {
  SphereFunction zero{2, [](const Point&) { return 0.0; }, "zero"};
  CHECK_THROWS_AS(compute_norms(zero, build_quadrature(2, 64)), std::domain_error);
}

TEST_CASE("moments") {
  SphereQuadrature quad = build_quadrature(2, 2048);
  SphereFunction theta1 = omega_sample("theta1", 2);
  CHECK(std::abs(moment(theta1, quad, {0, 0})) < 1e-10);
  CHECK(moment(theta1, quad, {1, 0}) == doctest::Approx(kPi).epsilon(1e-6));

  SphereFunction cross = omega_sample("theta1theta2", 2);
  CHECK(std::abs(moment(cross, quad, {1, 0})) < 1e-10);
  CHECK(std::abs(moment(cross, quad, {0, 1})) < 1e-10);
}

TEST_CASE("admissibility reports") {
  SphereQuadrature quad = build_quadrature(2, 2048);
  AdmissibilityReport r0 = admissibility_report(omega_sample("const1", 2), quad, 0, 1e-8);
  CHECK_FALSE(r0.all_pass);
  CHECK(r0.moments.size() == 1);
  CHECK(r0.moments[0].value == doctest::Approx(kTwoPi));

  CHECK(admissibility_report(omega_sample("theta1", 2), quad, 0, 1e-8).all_pass);

  AdmissibilityReport r1 = admissibility_report(omega_sample("theta1theta2", 2), quad, 1, 1e-8);
  CHECK(r1.all_pass);
  CHECK(r1.moments.size() == 2);
}

TEST_CASE("logspike is a planar sample only") {
  CHECK_THROWS_AS(omega_sample("logspike", 3), std::invalid_argument);
  CHECK_THROWS_AS(omega_sample("nope", 2), std::invalid_argument);
}
