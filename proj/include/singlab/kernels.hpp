#pragma once

#include "singlab/common.hpp"
#include "singlab/profiles.hpp"

#include <map>
#include <memory>
#include <optional>

namespace singlab {

// Singular kernel K(x, y), defined for x != y, with Holder exponent delta
// for the off-diagonal regularity quotients. Translation-invariant kernels
// also expose the offset form K(x - y), which downstream code may tabulate.
struct KernelSpec {
  int dim = 2;
  std::function<Complex(const Point&, const Point&)> eval;
  double holder_delta = 1.0;
  std::string label;
  bool translation_invariant = false;
  std::function<Complex(const Point&)> offset_eval;  // set iff translation_invariant
  bool real_valued = true;

  Complex operator()(const Point& x, const Point& y) const { return eval(x, y); }
};

// Lipschitz coefficient field A with optional partial derivatives
// (evaluators for |alpha| below the order of use, sup bounds at the top
// order) as the higher-order commutators require.
struct LipschitzField {
  int dim = 2;
  std::function<double(const Point&)> value;
  double grad_bound = 0;
  std::map<MultiIndex, std::function<double(const Point&)>> derivatives;
  std::map<MultiIndex, double> sup_bounds;
  std::string label;
};

// Even profile F, real analytic on |t| <= radius.
struct AnalyticProfile {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  double radius = 0;
  std::string label;
};

KernelSpec make_power_kernel(int dim);
KernelSpec make_commutator_kernel(int dim, const LipschitzField& A);
KernelSpec make_higher_kernel(int dim, const LipschitzField& A, int k);
KernelSpec make_general_kernel(int dim, const LipschitzField& A, const AnalyticProfile& F);
KernelSpec make_bajsanski_coifman_kernel(int dim, const LipschitzField& A, int l);
KernelSpec make_muckenhoupt_kernel(int dim, double r);

// Taylor remainder A(x) - sum_{|alpha| < l} A_alpha(y) (x-y)^alpha / alpha!.
double taylor_remainder(const LipschitzField& A, int l, const Point& x, const Point& y);

// CLI keys: "power", "commutator", "higher:k", "general", "bc:l",
// "muckenhoupt:r". Families with a coefficient field take `A`; "general"
// also takes `F`.
KernelSpec make_kernel(const std::string& key, int dim,
                       const std::optional<LipschitzField>& A = {},
                       const std::optional<AnalyticProfile>& F = {});

// Shipped fields: "linear:a1,a2[,a3]", "sqrt1p", "quadratic".
LipschitzField field_sample(const std::string& key, int dim);
// Shipped profiles: "cosh".
AnalyticProfile analytic_profile_sample(const std::string& key);

// Seeded sampling domain for the empirical kernel-condition constants.
struct SamplerConfig {
  double box_halfwidth = 4.0;
  double r_min = 1.0 / 64.0;  // separation scale range, log-uniform
  double r_max = 4.0;
  std::uint64_t seed = 1;
};

// max over sampled pairs of |K(x,y)| |x-y|^d. Deterministic per seed;
// drawing 2n samples extends the n-sample stream.
double check_size(const KernelSpec& kernel, const SamplerConfig& sampler, int count);

struct RegularityEstimate {
  double first_slot = 0;   // sup |K(x1,y)-K(x2,y)| |x1-y|^{d+delta} / |x1-x2|^delta
  double second_slot = 0;  // mirrored quotient in the second argument
  double max() const { return std::max(first_slot, second_slot); }
};

RegularityEstimate check_regularity(const KernelSpec& kernel, const SamplerConfig& sampler,
                                    int count);

// floor(2 log2(n) / delta) + 2, the mollification level for smoothing index n.
int mollifier_level(int n, double delta);

// Spot check |A(x)-A(y)| <= grad_bound |x-y| on seeded pairs; returns the
// worst ratio observed.
double lipschitz_ratio(const LipschitzField& A, const SamplerConfig& sampler, int count);

// One dyadic piece K_j(x,y) = phi(|x-y|/2^j) K(x,y), optionally mollified in
// the first argument at scale 2^{j - mollifier_level(n, delta)}.
struct DyadicPiece {
  KernelSpec base;
  int scale_j = 0;
  BumpProfile phi;
  std::optional<int> mollify_n;
  int mollify_level = 0;
  BumpProfile eta;

  std::function<Complex(const Point&, const Point&)> eval;
  bool translation_invariant = false;
  std::function<Complex(const Point&)> offset_eval;
  double support_lo = 0;  // evaluator vanishes for |x-y| outside [lo, hi]
  double support_hi = 0;

  Complex operator()(const Point& x, const Point& y) const { return eval(x, y); }
};

DyadicPiece dyadic_piece(const KernelSpec& kernel, int j, const BumpProfile& phi);

// Mollification by tensor-grid quadrature over the support of the scaled
// mollifier; `quad_resolution` is the point count per axis (floor 16). The
// discrete mollifier weights are normalized to unit mass, so smoothing a
// kernel that is constant near (x, y) reproduces the constant.
DyadicPiece mollified_piece(const DyadicPiece& piece, int n, const BumpProfile& eta,
                            int quad_resolution = 32);

}  // namespace singlab
