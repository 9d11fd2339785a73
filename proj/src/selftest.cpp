#include "singlab/selftest.hpp"

#include "singlab/czd.hpp"
#include "singlab/experiment.hpp"
#include "singlab/operator.hpp"
#include "singlab/probe.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace singlab {

namespace {

struct Checker {
  std::ostream& os;
  int failures = 0;

  void check(const std::string& name, bool ok) {
    os << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!ok) ++failures;
  }
};

Point unit2(double phi) {
  Point u(2);
  u[0] = std::cos(phi);
  u[1] = std::sin(phi);
  return u;
}

void sphere_checks(Checker& c) {
  SphereQuadrature quad = build_quadrature(2, 1024);
  bool nodes_ok = true;
  for (Eigen::Index i = 0; i < quad.count(); ++i)
    nodes_ok = nodes_ok && std::abs(quad.node(i).norm() - 1.0) < 1e-12;
  c.check("sphere: unit nodes, positive weights summing to surface measure",
          nodes_ok && quad.weights.minCoeff() > 0 &&
              std::abs(quad.weights.sum() - kTwoPi) < 1e-10);

  for (const auto& key : omega_sample_keys()) {
    SphereFunction omega = omega_sample(key, 2);
    OmegaNorms n512 = compute_norms(omega, build_quadrature(2, 512));
    OmegaNorms n1024 = compute_norms(omega, build_quadrature(2, 1024));
    bool stable = std::abs(n1024.l1 - n512.l1) <= 0.01 * n512.l1 &&
                  std::abs(n1024.llogl - n512.llogl) <= 0.01 * n512.llogl &&
                  std::abs(n1024.c_omega - n512.c_omega) <= 0.01 * n512.c_omega;
    bool ordered = n512.llogl >= n512.l1 * std::log(2.0) - 1e-12 && n512.c_omega >= n512.llogl;
    // doubling the density must not shrink the constant
    SphereFunction doubled{2, [omega](const Point& t) { return 2.0 * omega.eval(t); },
                           omega.label + "x2"};
    bool monotone =
        compute_norms(doubled, build_quadrature(2, 512)).c_omega >= n512.c_omega - 1e-12;
    c.check("sphere: norms of '" + key + "' stable, ordered, scale-monotone",
            stable && ordered && monotone);
  }

  SphereFunction theta1 = omega_sample("theta1", 2);
  Point dir = unit2(0.35);
  double base = theta1(dir);
  bool homog = true;
  for (double r : {0.5, 2.0})  // dyadic scalings normalize away exactly
    homog = homog && theta1(r * dir) == base;
  for (double r : {10.0, 0.3})
    homog = homog && std::abs(theta1(r * dir) - base) <= 1e-14 * std::abs(base);
  c.check("sphere: degree-0 homogeneous evaluation", homog);
}

void kernel_checks(Checker& c) {
  BumpProfile phi = make_phi_annulus();
  bool partition = true;
  for (double t : {0.013, 0.7, 1.0, 5.3, 900.0}) {
    double sum = 0;
    for (int j = -14; j <= 14; ++j) sum += phi(t / std::ldexp(1.0, j));
    partition = partition && std::abs(sum - 1.0) < 1e-12;
  }
  c.check("kernels: dyadic annulus profiles sum to 1", partition);

  LipschitzField quad_field = field_sample("quadratic", 2);
  KernelSpec bc = make_bajsanski_coifman_kernel(2, quad_field, 2);
  Point x = unit2(0.3) * 1.7, y = unit2(2.1) * 0.4;
  double exact = (x[0] - y[0]) * (x[0] - y[0]) / std::pow((x - y).norm(), 4.0);
  c.check("kernels: quadratic Taylor remainder is exact",
          std::abs(bc(x, y).real() - exact) <= 1e-12 * std::abs(exact));

  SamplerConfig sampler;
  sampler.seed = 11;
  double c1 = check_size(make_power_kernel(2), sampler, 2000);
  c.check("kernels: power kernel has unit size constant", std::abs(c1 - 1.0) < 1e-12);
}

void grid_checks(Checker& c) {
  GridSpec spec = make_grid_spec(2, 64, 4.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  GridFunction u{spec, Eigen::ArrayXcd(spec.cell_count())};
  for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values[i] = Complex(gauss(rng), gauss(rng));

  GridFunction round = transform(transform(u, TransformDirection::forward),
                                 TransformDirection::inverse);
  double rel = std::sqrt((round.values - u.values).abs2().sum() / u.values.abs2().sum());
  c.check("grid: transform round trip", rel < 1e-12);

  GridFunction hat = transform(u, TransformDirection::forward);
  double space = u.values.abs2().sum();
  double freq = hat.values.abs2().sum() / static_cast<double>(spec.cell_count());
  c.check("grid: Parseval", std::abs(space - freq) <= 1e-10 * space);

  bool monotone = true;
  double last = std::numeric_limits<double>::infinity();
  for (double lambda : {0.1, 0.3, 0.9, 2.7}) {
    double m = distribution_measure(u, lambda);
    monotone = monotone && m <= last && lambda * m <= lebesgue_norm(u, 1.0) + 1e-12;
    last = m;
  }
  c.check("grid: distribution function monotone and Chebyshev-consistent", monotone);
}

void czd_checks(Checker& c) {
  GridSpec spec = make_grid_spec(2, 64, 4.0);
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss;
  GridFunction f{spec, Eigen::ArrayXcd(spec.cell_count())};
  for (Eigen::Index i = 0; i < f.values.size(); ++i) f.values[i] = std::exp(gauss(rng));
  double t = 4.0 * f.values.abs().mean();
  CZDecomposition dec = cz_decompose(f, t);
  CZReport rep = verify_cz(dec, f, t);
  c.check("czd: invariants on a random field", rep.all_pass && !rep.degenerate_root);

  GridFunction b = bad_part(dec);
  double b1 = lebesgue_norm(b, 1.0);
  c.check("czd: bad part controlled by the input mass", b1 <= 2.0 * lebesgue_norm(f, 1.0) + 1e-9);
}

void microlocal_checks(Checker& c) {
  SphereQuadrature quad = build_quadrature(2, 1 << 15);
  DirectionNet net = direction_net(8, 0.25, 2, quad);
  auto family = partition_of_unity(net, make_zeta_cap());
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  bool sums_to_one = true;
  for (int trial = 0; trial < 32; ++trial) {
    Point xi = unit2(angle(rng)) * std::exp(angle(rng) - kPi);
    double sum = 0;
    for (const auto& part : family) sum += part(xi).real();
    sums_to_one = sums_to_one && std::abs(sum - 1.0) <= 1e-10;
  }
  c.check("microlocal: cap partition sums to one", sums_to_one);

  GridSpec spec = make_grid_spec(2, 32, 4.0);
  std::normal_distribution<double> gauss;
  GridFunction u{spec, Eigen::ArrayXcd(spec.cell_count())};
  for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values[i] = Complex(gauss(rng), gauss(rng));
  BumpProfile psi = make_psi_lowpass();
  int k0 = -6, m = 2;
  GridFunction recon = apply_multiplier(lp_symbols(m, psi).lowpass, u);
  for (int k = k0; k < m; ++k) {
    GridFunction band = apply_multiplier(lp_symbols(k, psi).band, u);
    recon.values += band.values;
  }
  double rel = std::sqrt((recon.values - u.values).abs2().sum() / u.values.abs2().sum());
  c.check("microlocal: telescoping reconstruction is the identity", rel <= 1e-10);

  AdmissibilityParams p;
  p.dim = 2;
  p.delta = 1.0;
  p.eps0 = 0.5;
  p.N1 = 1;
  AdmissibilityResult r = admissible_parameters(p);
  c.check("microlocal: reference parameter tuple admissible",
          r.admissible && r.s1 == -0.5 && r.s2 == -1.0 && r.s3 == -1.0 && r.s4 == -0.5);
}

void operator_checks(Checker& c) {
  GridSpec spec = make_grid_spec(2, 32, 4.0);
  SphereFunction omega = omega_sample("theta1", 2);
  OperatorConfig cfg = make_operator_config(omega, make_power_kernel(2), spec);

  GridFunction f = make_grid_function(spec, [](const Point& x) {
    return Complex(std::exp(-x.squaredNorm()), 0.0);
  });
  GridFunction g = make_grid_function(spec, [](const Point& x) {
    return Complex(std::exp(-2.0 * (x - Point::Constant(2, 0.5)).squaredNorm()), 0.0);
  });
  GridFunction combo{spec, 2.0 * f.values + 3.0 * g.values};
  GridFunction lhs = apply_truncated(cfg, combo);
  GridFunction rhs{spec, 2.0 * apply_truncated(cfg, f).values + 3.0 * apply_truncated(cfg, g).values};
  double rel = (lhs.values - rhs.values).abs().maxCoeff() /
               std::max(1e-300, lhs.values.abs().maxCoeff());
  c.check("operator: linearity", rel <= 1e-12);

  GridFunction zero = apply_truncated(cfg, zero_grid_function(spec));
  c.check("operator: zero input gives zero output", zero.values.abs().maxCoeff() == 0.0);
}

void probe_checks(Checker& c) {
  GridSpec spec = make_grid_spec(2, 128, 2.0);
  SphereFunction omega = omega_sample("theta1", 2);
  OperatorConfig cfg = make_operator_config(omega, make_power_kernel(2), spec);
  SpikeFamilyOptions opts;
  opts.measure_radius = 1.0;
  auto family = spike_family(cfg, {0.25, 0.125}, spec, opts);
  bool chebyshev = true, monotone = true;
  for (const auto& res : family) {
    chebyshev = chebyshev && res.weak_ratio <= res.l1_ratio + 1e-12;
    for (size_t i = 0; i + 1 < res.measures.size(); ++i)
      monotone = monotone && res.measures[i + 1] <= res.measures[i] + 1e-15;
  }
  c.check("probe: weak ratio below L1 ratio, measures monotone", chebyshev && monotone);
}

}  // namespace

int run_selftest(std::ostream& os) {
  Checker c{os};
  sphere_checks(c);
  kernel_checks(c);
  grid_checks(c);
  czd_checks(c);
  microlocal_checks(c);
  operator_checks(c);
  probe_checks(c);
  os << (c.failures == 0 ? "selftest: all checks passed\n"
                         : "selftest: " + std::to_string(c.failures) + " check(s) failed\n");
  return c.failures;
}

}  // namespace singlab
