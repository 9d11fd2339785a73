#pragma once

#include "singlab/common.hpp"

namespace singlab {

// Quadrature for the surface measure of S^{d-1}: weights sum to 2*pi (d=2)
// or 4*pi (d=3) and every node has unit norm.
struct SphereQuadrature {
  int dim = 2;
  Eigen::MatrixXd nodes;    // one row per node
  Eigen::VectorXd weights;  // strictly positive

  Eigen::Index count() const { return nodes.rows(); }
  Point node(Eigen::Index i) const { return nodes.row(i).transpose(); }
  // Typical nearest-neighbour chord distance of the node set.
  double node_spacing() const;
};

// d=2: midpoint circle rule, angles offset by half a step so nodes avoid
// angle 0 and +-pi (the shipped rough sample is singular there).
// d=3: golden-spiral node set with equal weights 4*pi/N.
SphereQuadrature build_quadrature(int dim, Eigen::Index resolution);

// Density on the sphere. Evaluation normalizes its argument, so the
// degree-0 homogeneous extension holds by construction.
struct SphereFunction {
  int dim = 2;
  std::function<double(const Point&)> eval;
  std::string label;

  double operator()(const Point& direction) const {
    double r = direction.norm();
    if (!(r > 0)) throw std::domain_error("SphereFunction: zero direction");
    Point unit = direction / r;
    double v = eval(unit);
    if (!std::isfinite(v))
      throw std::domain_error("SphereFunction '" + label + "': non-finite value");
    return v;
  }
};

struct OmegaNorms {
  double l1 = 0;
  std::vector<std::pair<double, double>> lq;  // (q, ||.||_q)
  double llogl = 0;    // integral of |O| log(2 + |O|)
  double c_omega = 0;  // llogl + integral of |O| (1 + log+(|O|/||O||_1))
};

// Quadrature norms of |omega|. The zero density has no c_omega (the log+
// rescaling divides by ||.||_1); it is rejected with std::domain_error while
// the plain norms for it are all zero.
OmegaNorms compute_norms(const SphereFunction& omega, const SphereQuadrature& quad,
                         const std::vector<double>& q_list = {});

// integral of omega(theta) theta^alpha.
double moment(const SphereFunction& omega, const SphereQuadrature& quad,
              const MultiIndex& alpha);

struct MomentEntry {
  MultiIndex alpha;
  double value = 0;
  bool within_tol = false;
};

struct AdmissibilityReport {
  int cancellation_order = 0;
  double tol = 0;
  std::vector<MomentEntry> moments;
  bool all_pass = false;
  OmegaNorms norms;
};

// Flags every moment of the given total order against |moment| <= tol and
// reports the norms alongside.
AdmissibilityReport admissibility_report(const SphereFunction& omega,
                                         const SphereQuadrature& quad,
                                         int cancellation_order, double tol);

// Shipped sample densities, addressable by CLI key:
//   "const1"       : 1
//   "theta1"       : first coordinate
//   "theta1theta2" : product of first two coordinates
//   "logspike"     : d=2 only, sgn(angle) * log(pi/|angle|)
SphereFunction omega_sample(const std::string& key, int dim);
const std::vector<std::string>& omega_sample_keys();

}  // namespace singlab
