#include "singlab/sphere.hpp"

#include <cmath>

namespace singlab {

double SphereQuadrature::node_spacing() const {
  if (dim == 2) return kTwoPi / static_cast<double>(count());
  return std::sqrt(4.0 * kPi / static_cast<double>(count()));
}

SphereQuadrature build_quadrature(int dim, Eigen::Index resolution) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("build_quadrature: dim must be 2 or 3");
  if (resolution < 8) throw std::invalid_argument("build_quadrature: resolution must be >= 8");

  SphereQuadrature quad;
  quad.dim = dim;
  quad.nodes.resize(resolution, dim);
  quad.weights = Eigen::VectorXd::Constant(resolution, sphere_area(dim) / resolution);

  if (dim == 2) {
    double h = kTwoPi / resolution;
    for (Eigen::Index i = 0; i < resolution; ++i) {
      double phi = -kPi + (i + 0.5) * h;
      quad.nodes(i, 0) = std::cos(phi);
      quad.nodes(i, 1) = std::sin(phi);
    }
  } else {
    // golden-spiral nodes: z stratified, azimuth advanced by the golden angle
    const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
    for (Eigen::Index i = 0; i < resolution; ++i) {
      double z = 1.0 - (2.0 * i + 1.0) / resolution;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = golden_angle * i;
      quad.nodes(i, 0) = rho * std::cos(phi);
      quad.nodes(i, 1) = rho * std::sin(phi);
      quad.nodes(i, 2) = z;
    }
  }
  return quad;
}

OmegaNorms compute_norms(const SphereFunction& omega, const SphereQuadrature& quad,
                         const std::vector<double>& q_list) {
  if (omega.dim != quad.dim)
    throw std::invalid_argument("compute_norms: omega/quadrature dimension mismatch");
  for (double q : q_list)
    if (!(q > 1.0)) throw std::invalid_argument("compute_norms: q must be > 1");

  OmegaNorms out;
  Eigen::VectorXd a(quad.count());
  for (Eigen::Index i = 0; i < quad.count(); ++i) a[i] = std::abs(omega(quad.node(i)));

  out.l1 = quad.weights.dot(a);
  for (double q : q_list) {
    double s = 0;
    for (Eigen::Index i = 0; i < quad.count(); ++i) s += quad.weights[i] * std::pow(a[i], q);
    out.lq.emplace_back(q, std::pow(s, 1.0 / q));
  }
  for (Eigen::Index i = 0; i < quad.count(); ++i)
    out.llogl += quad.weights[i] * a[i] * std::log(2.0 + a[i]);

  if (out.l1 == 0.0)
    throw std::domain_error("compute_norms: c_omega undefined for the zero density");
  double tail = 0;
  for (Eigen::Index i = 0; i < quad.count(); ++i) {
    double ratio = a[i] / out.l1;
    double logplus = ratio >= 1.0 ? std::log(ratio) : 0.0;
    tail += quad.weights[i] * a[i] * (1.0 + logplus);
  }
  out.c_omega = out.llogl + tail;
  return out;
}

double moment(const SphereFunction& omega, const SphereQuadrature& quad,
              const MultiIndex& alpha) {
  if (static_cast<int>(alpha.size()) != quad.dim)
    throw std::invalid_argument("moment: multi-index dimension mismatch");
  for (int a : alpha)
    if (a < 0) throw std::invalid_argument("moment: multi-index must be nonnegative");
  double s = 0;
  for (Eigen::Index i = 0; i < quad.count(); ++i) {
    Point theta = quad.node(i);
    s += quad.weights[i] * omega(theta) * monomial(theta, alpha);
  }
  return s;
}

AdmissibilityReport admissibility_report(const SphereFunction& omega,
                                         const SphereQuadrature& quad,
                                         int cancellation_order, double tol) {
  if (cancellation_order < 0)
    throw std::invalid_argument("admissibility_report: order must be >= 0");
  AdmissibilityReport rep;
  rep.cancellation_order = cancellation_order;
  rep.tol = tol;
  rep.all_pass = true;
  for (const auto& alpha : multi_indices_of_order(quad.dim, cancellation_order)) {
    MomentEntry e;
    e.alpha = alpha;
    e.value = moment(omega, quad, alpha);
    e.within_tol = std::abs(e.value) <= tol;
    rep.all_pass = rep.all_pass && e.within_tol;
    rep.moments.push_back(std::move(e));
  }
  rep.norms = compute_norms(omega, quad);
  return rep;
}

SphereFunction omega_sample(const std::string& key, int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("omega_sample: dim must be 2 or 3");
  SphereFunction f;
  f.dim = dim;
  f.label = key;
  if (key == "const1") {
    f.eval = [](const Point&) { return 1.0; };
  } else if (key == "theta1") {
    f.eval = [](const Point& t) { return t[0]; };
  } else if (key == "theta1theta2") {
    f.eval = [](const Point& t) { return t[0] * t[1]; };
  } else if (key == "logspike") {
    if (dim != 2) throw std::invalid_argument("omega_sample: logspike is a d=2 sample");
    f.eval = [](const Point& t) {
      double phi = std::atan2(t[1], t[0]);
      // odd extension at the singular angle: lattice directions land on
      // phi = 0 exactly, and 0 is the value every symmetric truncation sees
      if (phi == 0.0) return 0.0;
      double sgn = phi > 0 ? 1.0 : -1.0;
      return sgn * std::log(kPi / std::abs(phi));
    };
  } else {
    throw std::invalid_argument("omega_sample: unknown key '" + key + "'");
  }
  return f;
}

const std::vector<std::string>& omega_sample_keys() {
  static const std::vector<std::string> keys = {"const1", "theta1", "theta1theta2", "logspike"};
  return keys;
}

}  // namespace singlab
