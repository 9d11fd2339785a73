#include "singlab/kernels.hpp"

#include "helpers.hpp"

#include <doctest.h>

using namespace singlab;
using namespace singlab::testing;

TEST_CASE("power kernel values") {
  KernelSpec k = make_power_kernel(2);
  CHECK(k(point2(1, 0), point2(0, 0)).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k(point2(2, 0), point2(0, 0)).real() == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("muckenhoupt kernel has power-kernel magnitude") {
  KernelSpec k = make_muckenhoupt_kernel(2, 3.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 64; ++i) {
    Point x = point2(u(rng), u(rng)), y = point2(u(rng), u(rng));
    if ((x - y).norm() < 1e-6) continue;
    double expected = std::pow((x - y).norm(), -2.0);
    CHECK(std::abs(k(x, y)) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_muckenhoupt_kernel(2, 0.0), std::invalid_argument);
}

TEST_CASE("quadratic Taylor remainder is exact") {
  LipschitzField A = field_sample("quadratic", 2);
  KernelSpec k = make_bajsanski_coifman_kernel(2, A, 2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 64; ++i) {
    Point x = point2(u(rng), u(rng)), y = point2(u(rng), u(rng));
    double r = (x - y).norm();
    if (r < 1e-3) continue;
    double expected = (x[0] - y[0]) * (x[0] - y[0]) / std::pow(r, 4.0);
    CHECK(k(x, y).real() == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("Taylor remainder matches the integral expansion") {
  // remainder(l) = l sum_{|a|=l} (x-y)^a/a! int_0^1 (1-s)^{l-1} A_a(y+s(x-y)) ds,
  // checked by fine Simpson quadrature on a curved field
  LipschitzField A = field_sample("sqrt1p", 2);
  const int l = 2;
  Point x = point2(0.9, -0.4), y = point2(-0.3, 0.5);
  double direct = taylor_remainder(A, l, x, y);

  double expansion = 0;
  const int steps = 2048;
  for (const auto& alpha : multi_indices_of_order(2, l)) {
    auto deriv = A.derivatives.at(alpha);
    double integral = 0;
    for (int i = 0; i <= steps; ++i) {
      double s = static_cast<double>(i) / steps;
      double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      integral += w * std::pow(1.0 - s, l - 1) * deriv(y + s * (x - y));
    }
    integral /= 3.0 * steps;
    expansion += monomial(x - y, alpha) / multi_index_factorial(alpha) * integral;
  }
  expansion *= l;
  CHECK(direct == doctest::Approx(expansion).epsilon(1e-8));
}

TEST_CASE("size constants") {
  SamplerConfig sampler;
  sampler.seed = 21;

  SUBCASE("power kernel is exactly one at every sample") {
    CHECK(check_size(make_power_kernel(2), sampler, 5000) == 1.0);
  }
  SUBCASE("linear commutator approaches the slope bound") {
    LipschitzField A = field_sample("linear:0.6,-0.8", 2);
    double c = check_size(make_commutator_kernel(2, A), sampler, 20000);
    CHECK(c <= 1.0 + 1e-12);
    CHECK(c > 0.9);
  }
  SUBCASE("third power of the slope bound") {
    LipschitzField A = field_sample("linear:0.6,-0.8", 2);
    double c = check_size(make_higher_kernel(2, A, 3), sampler, 20000);
    CHECK(c <= 1.0 + 1e-12);
    CHECK(c > 0.7);
  }
}

TEST_CASE("regularity constants") {
  SamplerConfig sampler;
  sampler.seed = 77;

  SUBCASE("power kernel estimate is sample-stable") {
    KernelSpec k = make_power_kernel(2);
    RegularityEstimate a = check_regularity(k, sampler, 10000);
    RegularityEstimate b = check_regularity(k, sampler, 20000);
    CHECK(std::isfinite(a.max()));
    CHECK(b.first_slot <= 1.1 * a.first_slot);
    CHECK(b.second_slot <= 1.1 * a.second_slot);
    CHECK(a.first_slot <= b.first_slot + 1e-12);  // sample streams nest
  }
  SUBCASE("zero field gives the zero kernel") {
    LipschitzField A = field_sample("linear:0,0", 2);
    RegularityEstimate r = check_regularity(make_commutator_kernel(2, A), sampler, 2000);
    CHECK(r.first_slot == 0.0);
    CHECK(r.second_slot == 0.0);
  }
  SUBCASE("oscillation grows with the modulation rate") {
    double last = 0;
    for (double r : {1.0, 3.0, 9.0}) {
      RegularityEstimate est = check_regularity(make_muckenhoupt_kernel(2, r), sampler, 10000);
      CHECK(std::isfinite(est.max()));
      CHECK(est.max() > last);
      last = est.max();
    }
  }
}

TEST_CASE("mollifier level formula") {
  CHECK(mollifier_level(100, 1.0) == 15);
  CHECK(mollifier_level(2, 1.0) == 4);
  CHECK(mollifier_level(4, 0.5) == 10);
  CHECK_THROWS_AS(mollifier_level(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(mollifier_level(4, 0.0), std::invalid_argument);
}

TEST_CASE("dyadic pieces partition the kernel") {
  KernelSpec k = make_power_kernel(2);
  BumpProfile phi = make_phi_annulus();

  DyadicPiece p3 = dyadic_piece(k, 3, phi);
  CHECK(p3(point2(std::ldexp(1.0, 6), 0), point2(0, 0)) == Complex(0, 0));
  CHECK(p3(point2(std::ldexp(1.0, 3), 0), point2(0, 0)).real() ==
        doctest::Approx(phi(1.0) * std::ldexp(1.0, -6)).epsilon(1e-14));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logr(-19.0, 19.0);
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  for (int trial = 0; trial < 24; ++trial) {
    Point x = std::exp2(logr(rng)) * unit2(ang(rng));
    Point y = point2(0, 0);
    Complex sum(0, 0);
    for (int j = -20; j <= 20; ++j) sum += dyadic_piece(k, j, phi)(x, y);
    Complex direct = k(x, y);
    CHECK(std::abs(sum - direct) <= 1e-12 * std::abs(direct));
  }
}

TEST_CASE("mollified pieces") {
  KernelSpec k = make_power_kernel(2);
  BumpProfile phi = make_phi_annulus();
  BumpProfile eta = make_eta_mollifier();

  SUBCASE("support bound") {
    DyadicPiece piece = mollified_piece(dyadic_piece(k, 0, phi), 8, eta);
    CHECK(piece(point2(8.0, 0), point2(0, 0)) == Complex(0, 0));
    CHECK(piece.mollify_level == mollifier_level(8, 1.0));
  }

  SUBCASE("quadrature floor") {
    CHECK_THROWS_AS(mollified_piece(dyadic_piece(k, 0, phi), 8, eta, 8), std::invalid_argument);
  }

  SUBCASE("unit mass reproduces a flat fixture") {
    // sharp indicator of the annulus in place of phi_j K: inside its
    // plateau the smoothed kernel must return exactly the plateau value
    DyadicPiece fixture = dyadic_piece(k, 0, phi);
    fixture.eval = [](const Point& x, const Point& y) {
      double r = (x - y).norm();
      return (r >= 0.5 && r <= 2.0) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
    };
    fixture.translation_invariant = false;
    DyadicPiece smoothed = mollified_piece(fixture, 8, eta);
    double ball = std::ldexp(1.0, -smoothed.mollify_level);
    for (double r : {0.5 + 2.0 * ball, 1.0, 1.7, 2.0 - 2.0 * ball}) {
      Complex v = smoothed(point2(r, 0), point2(0, 0));
      CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-6));
    }
  }

  SUBCASE("derivative scale stable across j") {
    // centered differences of the smoothed kernel against the
    // level-shifted scale bound; exact dyadic covariance of the power
    // kernel keeps the constant flat in j
    const int n = 8;
    std::vector<double> constants;
    for (int j : {-2, 0, 2}) {
      DyadicPiece piece = mollified_piece(dyadic_piece(k, j, phi), n, eta);
      double scale = std::ldexp(1.0, j);
      double bound = std::ldexp(1.0, -(j - piece.mollify_level)) * std::pow(scale, -2.0);
      double step = scale * 1e-5;
      double worst = 0;
      for (double r : {0.6, 1.0, 1.4, 1.9}) {
        for (double phi_ang : {0.3, 1.9}) {
          Point x = (r * scale) * unit2(phi_ang);
          Point y = point2(0, 0);
          for (int axis = 0; axis < 2; ++axis) {
            Point dx = Point::Zero(2);
            dx[axis] = step;
            double grad = std::abs(piece(x + dx, y) - piece(x - dx, y)) / (2.0 * step);
            worst = std::max(worst, grad);
          }
        }
      }
      constants.push_back(worst / bound);
    }
    double lo = *std::min_element(constants.begin(), constants.end());
    double hi = *std::max_element(constants.begin(), constants.end());
    CHECK(hi / lo <= 1.2);
  }

  SUBCASE("size bound holds with one constant across scales") {
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (int j : {-4, -2, 0, 2, 4}) {
      for (int n : {4, 8, 16}) {
        DyadicPiece piece = mollified_piece(dyadic_piece(k, j, phi), n, eta);
        double scale = std::ldexp(1.0, j);
        double worst = 0;
        for (double r : {0.3, 0.6, 1.0, 1.5, 2.2, 3.5}) {
          for (double a : {0.1, 2.7}) {
            Complex v = piece((r * scale) * unit2(a), point2(0, 0));
            worst = std::max(worst, std::abs(v) * std::pow(scale, 2.0));
          }
        }
        lo = std::min(lo, worst);
        hi = std::max(hi, worst);
      }
    }
    CHECK(hi <= 16.0 + 1e-9);  // sup of |K_j| 2^{jd} on the wide annulus
    CHECK(hi / lo <= 1.5);
  }
}

TEST_CASE("field and kernel construction errors") {
  LipschitzField bare;
  bare.dim = 2;
  bare.value = [](const Point& x) { return x[0]; };
  bare.grad_bound = 1.0;
  bare.label = "bare";
  CHECK_THROWS_AS(make_bajsanski_coifman_kernel(2, bare, 2), std::invalid_argument);

  AnalyticProfile narrow;
  narrow.value = [](double t) { return 1.0 + t * t; };
  narrow.deriv = [](double t) { return 2.0 * t; };
  narrow.radius = 0.5;
  narrow.label = "narrow";
  LipschitzField steep = field_sample("linear:2,0", 2);
  CHECK_THROWS_AS(make_general_kernel(2, steep, narrow), std::invalid_argument);

  AnalyticProfile odd;
  odd.value = [](double t) { return t; };
  odd.deriv = [](double) { return 1.0; };
  odd.radius = 10.0;
  odd.label = "odd";
  CHECK_THROWS_AS(make_general_kernel(2, field_sample("sqrt1p", 2), odd), std::invalid_argument);

  CHECK_THROWS_AS(make_kernel("warp", 2), std::invalid_argument);
  CHECK_THROWS_AS(make_kernel("commutator", 2), std::invalid_argument);
  CHECK_THROWS_AS(field_sample("linear:1", 2), std::invalid_argument);
}

TEST_CASE("lipschitz spot check on shipped fields") {
  SamplerConfig sampler;
  sampler.seed = 13;
  for (const char* key : {"linear:0.6,-0.8", "sqrt1p"}) {
    LipschitzField A = field_sample(key, 2);
    CHECK(lipschitz_ratio(A, sampler, 2000) <= 1.0 + 1e-12);
  }
}
