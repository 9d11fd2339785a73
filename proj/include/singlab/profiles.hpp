#pragma once

#include "singlab/common.hpp"

namespace singlab {

enum class ProfileKind { phi_annulus, zeta_cap, Phi_plateau, psi_lowpass, eta_mollifier };

// Radial profile built from the C^inf transition exp(-1/t). Evaluation uses
// |t|, so every profile is an even function of its scalar argument.
struct BumpProfile {
  ProfileKind kind;
  std::function<double(double)> eval;
  double support_lo = 0.0;  // eval vanishes for |t| < support_lo (phi only)
  double support_hi = 0.0;  // eval vanishes for |t| > support_hi
  std::string label;

  double operator()(double t) const { return eval(t); }
};

// Smooth monotone step: 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u);

// Annulus bump: support [1/2, 2], with sum_j phi(2^-j t) = 1 for t > 0.
BumpProfile make_phi_annulus();
// Cap cutoff: 1 on [0, 1/2], 0 on (1, inf).
BumpProfile make_zeta_cap();
// Plateau cutoff: 1 on [0, 2], 0 on (4, inf), values in [0, 1].
BumpProfile make_Phi_plateau();
// Low-pass cutoff: 1 on [0, 1], 0 on [2, inf).
BumpProfile make_psi_lowpass();
// Mollifier shape: positive on [0, 1), 0 outside; radial mass is normalized
// at the point of use (it depends on the ambient dimension).
BumpProfile make_eta_mollifier();

}  // namespace singlab
