#include "singlab/profiles.hpp"

#include <cmath>

namespace singlab {

namespace {

double expm_blend(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// 1 on [0,1], 0 on [2,inf), smooth in between.
double lowpass_cut(double t) {
  t = std::abs(t);
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  return smooth_step(2.0 - t);
}

}  // namespace

double smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double a = expm_blend(u);
  double b = expm_blend(1.0 - u);
  return a / (a + b);
}

BumpProfile make_phi_annulus() {
  BumpProfile p;
  p.kind = ProfileKind::phi_annulus;
  // Telescoping difference of low-pass cuts: the dyadic dilates
  // phi(2^-j t) sum to 1 for every t > 0.
  p.eval = [](double t) { return lowpass_cut(t) - lowpass_cut(2.0 * t); };
  p.support_lo = 0.5;
  p.support_hi = 2.0;
  p.label = "phi_annulus";
  return p;
}

BumpProfile make_zeta_cap() {
  BumpProfile p;
  p.kind = ProfileKind::zeta_cap;
  p.eval = [](double t) {
    t = std::abs(t);
    if (t <= 0.5) return 1.0;
    if (t >= 1.0) return 0.0;
    return smooth_step(2.0 * (1.0 - t));
  };
  p.support_lo = 0.0;
  p.support_hi = 1.0;
  p.label = "zeta_cap";
  return p;
}

BumpProfile make_Phi_plateau() {
  BumpProfile p;
  p.kind = ProfileKind::Phi_plateau;
  p.eval = [](double t) {
    t = std::abs(t);
    if (t <= 2.0) return 1.0;
    if (t >= 4.0) return 0.0;
    return smooth_step((4.0 - t) / 2.0);
  };
  p.support_lo = 0.0;
  p.support_hi = 4.0;
  p.label = "Phi_plateau";
  return p;
}

BumpProfile make_psi_lowpass() {
  BumpProfile p;
  p.kind = ProfileKind::psi_lowpass;
  p.eval = [](double t) { return lowpass_cut(t); };
  p.support_lo = 0.0;
  p.support_hi = 2.0;
  p.label = "psi_lowpass";
  return p;
}

BumpProfile make_eta_mollifier() {
  BumpProfile p;
  p.kind = ProfileKind::eta_mollifier;
  p.eval = [](double t) {
    t = std::abs(t);
    if (t >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
  };
  p.support_lo = 0.0;
  p.support_hi = 1.0;
  p.label = "eta_mollifier";
  return p;
}

}  // namespace singlab
