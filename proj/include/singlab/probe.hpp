#pragma once

#include "singlab/operator.hpp"

namespace singlab {

// Distribution-function sweep of one operator output u against the input
// mass. weak_ratio is the empirical weak-(1,1) statistic
// sup_lambda lambda m({|u| > lambda}) / ||f||_1; the L1 ratio sits above it
// by Chebyshev, and diverges for spike families where the weak ratio stays
// flat.
struct ProbeResult {
  std::vector<double> lambdas;
  std::vector<double> measures;    // m({|u| > lambda}) over non-excluded cells
  std::vector<double> weak_terms;  // lambda * measure / ||f||_1
  double weak_ratio = 0;           // max of weak_terms
  double l1_ratio = 0;             // ||u||_1 / ||f||_1 over non-excluded cells
  double u_sup = 0;
  double epsilon = 0;  // spike radius when part of a family sweep
};

// 32 log-spaced levels spanning [0.01 sup|u|, sup|u|].
std::vector<double> default_lambda_grid(const GridFunction& u, int points = 32);

ProbeResult weak_ratio(const GridFunction& u, double f_l1, const std::vector<double>& lambdas,
                       const std::vector<std::uint8_t>* exclusion = nullptr);

// Spike of radius eps: indicator of |x| < eps at height eps^{-d}, rescaled
// so the grid L1 mass is exactly |B_1|.
GridFunction make_spike(const GridSpec& spec, double eps);

struct SpikeFamilyOptions {
  int lambda_points = 32;
  std::vector<double> lambdas;     // fixed grid; empty = per-run default
  double measure_radius = 0;       // > 0: statistics restricted to |x| <= radius
  // CZ-linked exclusion: per lambda, exclude the enlarged exceptional set of
  // the decomposition of f at level lambda / C_Omega. Off by default.
  bool cz_exclusion = false;
  double cz_enlargement = 4.0;
};

std::vector<ProbeResult> spike_family(const OperatorConfig& cfg,
                                      const std::vector<double>& epsilons, const GridSpec& spec,
                                      const SpikeFamilyOptions& opts = {});

// Cells with |center| > radius, as an exclusion mask.
std::vector<std::uint8_t> outside_radius_mask(const GridSpec& spec, double radius);

}  // namespace singlab
