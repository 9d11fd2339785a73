#pragma once

#include "singlab/grid.hpp"
#include "singlab/profiles.hpp"
#include "singlab/sphere.hpp"

#include <memory>

namespace singlab {

// Maximal 2^{-n*gamma-4}-separated set of unit vectors, selected by a
// deterministic first-fit sweep over the quadrature nodes: a node joins the
// net when it is at least `separation` away from everything selected so
// far. The result is maximal on the node set, so every node is also within
// `separation` of the net (the covering condition).
struct DirectionNet {
  int n = 0;
  double gamma = 0;
  int dim = 0;
  double separation = 0;  // 2^{-n*gamma-4}
  Eigen::MatrixXd vectors;  // one unit vector per row

  Eigen::Index count() const { return vectors.rows(); }
  Point vector(Eigen::Index v) const { return vectors.row(v).transpose(); }

  // Indices of net vectors within `radius` of the unit vector `u`.
  std::vector<Eigen::Index> near(const Point& u, double radius) const;

 private:
  friend DirectionNet direction_net(int, double, int, const SphereQuadrature&, double);
  friend DirectionNet make_direction_net(int, double, int, const Eigen::MatrixXd&);
  struct SpatialHash;
  std::shared_ptr<const SpatialHash> hash_;
};

// Net from explicit unit vectors (deserialization and fixtures); validates
// unit norms and the pairwise separation.
DirectionNet make_direction_net(int n, double gamma, int dim, const Eigen::MatrixXd& vectors);

// `max_spacing_fraction` caps the quadrature node spacing relative to the
// separation; the default 1/4 keeps the node set fine enough that the net is
// a genuine packing. Coarser quadratures are rejected.
DirectionNet direction_net(int n, double gamma, int dim, const SphereQuadrature& quad,
                           double max_spacing_fraction = 0.25);

struct MultiplierSymbol {
  std::function<Complex(const Point&)> eval;
  bool homogeneous = false;
  std::string label;

  Complex operator()(const Point& xi) const { return eval(xi); }
};

// Degree-0 homogeneous partition subordinate to the net caps:
//   G_v(xi) = zeta(2^{n*gamma} |xi/|xi| - e_v|) / sum over the net.
// The covering condition makes every denominator at least 1; evaluation
// throws if it ever drops below 1e-12. At xi = 0 each member returns
// 1/card(net), keeping the family summing to one everywhere.
std::vector<MultiplierSymbol> partition_of_unity(const DirectionNet& net,
                                                 const BumpProfile& zeta);

// xi -> Phi(2^{n*gamma} <e, xi/|xi|>): 1 near the hyperplane orthogonal to
// e, 0 once the direction cosine exceeds 2^{2-n*gamma}. Value 1 at xi = 0.
MultiplierSymbol directional_symbol(const Point& e, int n, double gamma,
                                    const BumpProfile& Phi);

struct LittlewoodPaleyPair {
  MultiplierSymbol lowpass;  // psi(2^k |xi|)
  MultiplierSymbol band;     // psi(2^k |xi|) - psi(2^{k+1} |xi|)
};

LittlewoodPaleyPair lp_symbols(int k, const BumpProfile& psi);

// inverse transform of m(xi) * forward transform of u, with m evaluated on
// the physical frequency lattice.
GridFunction apply_multiplier(const MultiplierSymbol& m, const GridFunction& u);

struct MihlinEstimate {
  double deriv_bound = 0;  // max over samples, 1 <= |alpha| <= floor(d/2)+1,
                           // of |d^alpha m(xi)| |xi|^{|alpha|}
  double sup_norm = 0;     // max |m| over the samples
};

// Central finite differences at relative step `fd_step * |xi|`, self-checked
// by step halving (disagreement beyond 50% raises an error). Supports
// derivative orders up to 2, i.e. d in {2, 3}.
MihlinEstimate mihlin_estimate(const MultiplierSymbol& m, int dim,
                               const std::vector<Point>& sample_frequencies, double fd_step);

struct OverlapStats {
  int max_count = 0;         // most caps meeting a single direction
  double max_square_sum = 0;  // sup over samples of sum_v Phi^2
};

OverlapStats overlap_count(const DirectionNet& net, const BumpProfile& Phi,
                           const std::vector<Point>& xi_samples);

struct AdmissibilityParams {
  int dim = 2;
  double delta = 1;
  double gamma = 0;
  double iota = 0;
  double eps0 = 0;
  double mu = 0;
  int N1 = 1;
};

struct AdmissibilityResult {
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  bool admissible = false;
  double max_exponent() const { return std::max(std::max(s1, s2), std::max(s3, s4)); }
};

// The four interaction exponents of the decay bookkeeping; the parameter
// tuple is admissible when all of them are negative.
AdmissibilityResult admissible_parameters(const AdmissibilityParams& p);

}  // namespace singlab
