#include "singlab/probe.hpp"

#include "singlab/czd.hpp"

#include <cmath>

namespace singlab {

std::vector<double> default_lambda_grid(const GridFunction& u, int points) {
  double sup = u.values.abs().maxCoeff();
  if (!(sup > 0)) return {1.0};
  std::vector<double> grid(static_cast<size_t>(points));
  double lo = 0.01 * sup;
  for (int i = 0; i < points; ++i)
    grid[static_cast<size_t>(i)] = lo * std::pow(sup / lo, static_cast<double>(i) / (points - 1));
  return grid;
}

ProbeResult weak_ratio(const GridFunction& u, double f_l1, const std::vector<double>& lambdas,
                       const std::vector<std::uint8_t>* exclusion) {
  if (!(f_l1 > 0)) throw std::invalid_argument("weak_ratio: input mass must be positive");
  if (lambdas.empty()) throw std::invalid_argument("weak_ratio: empty lambda grid");
  for (size_t i = 0; i + 1 < lambdas.size(); ++i)
    if (!(lambdas[i] > 0) || lambdas[i] > lambdas[i + 1])
      throw std::invalid_argument("weak_ratio: lambda grid must be positive ascending");

  static const std::vector<std::uint8_t> kNone;
  const auto& mask = exclusion ? *exclusion : kNone;

  ProbeResult res;
  res.lambdas = lambdas;
  res.u_sup = u.values.abs().maxCoeff();
  for (double lambda : lambdas) {
    double m = distribution_measure(u, lambda, mask);
    res.measures.push_back(m);
    res.weak_terms.push_back(lambda * m / f_l1);
    res.weak_ratio = std::max(res.weak_ratio, res.weak_terms.back());
  }
  double hd = u.spec.cell_volume();
  double l1 = 0;
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    if (!mask.empty() && mask[static_cast<size_t>(i)]) continue;
    l1 += std::abs(u.values[i]) * hd;
  }
  res.l1_ratio = l1 / f_l1;
  return res;
}

GridFunction make_spike(const GridSpec& spec, double eps) {
  if (!(eps >= 4.0 * spec.spacing()))
    throw std::invalid_argument("make_spike: radius below the resolution floor of 4 cells");
  GridFunction f = zero_grid_function(spec);
  Eigen::Index inside = 0;
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    if (spec.cell_center(i).norm() < eps) {
      f.values[i] = 1.0;
      ++inside;
    }
  }
  // exact unit-ball mass, whatever the pixelated disk area came to
  double mass = static_cast<double>(inside) * spec.cell_volume();
  f.values *= unit_ball_volume(spec.dim) / mass;
  return f;
}

std::vector<std::uint8_t> outside_radius_mask(const GridSpec& spec, double radius) {
  std::vector<std::uint8_t> mask(static_cast<size_t>(spec.cell_count()), 0);
  for (Eigen::Index i = 0; i < spec.cell_count(); ++i)
    if (spec.cell_center(i).norm() > radius) mask[static_cast<size_t>(i)] = 1;
  return mask;
}

std::vector<ProbeResult> spike_family(const OperatorConfig& cfg,
                                      const std::vector<double>& epsilons, const GridSpec& spec,
                                      const SpikeFamilyOptions& opts) {
  std::vector<ProbeResult> table;
  std::vector<std::uint8_t> region_mask;
  const std::vector<std::uint8_t>* output_mask = nullptr;
  if (opts.measure_radius > 0) {
    region_mask = outside_radius_mask(spec, opts.measure_radius);
    output_mask = &region_mask;
  }

  double c_omega = 0;
  if (opts.cz_exclusion) {
    SphereQuadrature quad = build_quadrature(spec.dim, spec.dim == 2 ? 4096 : 16384);
    c_omega = compute_norms(cfg.omega, quad).c_omega;
  }

  for (double eps : epsilons) {
    GridFunction f = make_spike(spec, eps);
    double f_l1 = lebesgue_norm(f, 1.0);
    ApplyOptions apply_opts;
    std::vector<std::uint8_t> compute_mask;
    if (output_mask) {
      // compute only where we measure
      compute_mask.resize(static_cast<size_t>(spec.cell_count()));
      for (size_t i = 0; i < compute_mask.size(); ++i) compute_mask[i] = !region_mask[i];
      apply_opts.output_mask = &compute_mask;
    }
    GridFunction u = apply_truncated(cfg, f, apply_opts);

    std::vector<double> lambdas =
        opts.lambdas.empty() ? default_lambda_grid(u, opts.lambda_points) : opts.lambdas;

    ProbeResult res;
    if (!opts.cz_exclusion) {
      res = weak_ratio(u, f_l1, lambdas, output_mask);
    } else {
      // per-lambda exclusion of the enlarged exceptional set at level
      // lambda / C_Omega, on top of the measurement region
      res.lambdas = lambdas;
      res.u_sup = u.values.abs().maxCoeff();
      for (double lambda : lambdas) {
        CZDecomposition dec = cz_decompose(f, lambda / c_omega, opts.cz_enlargement);
        std::vector<std::uint8_t> mask = dec.exceptional_enlarged;
        if (output_mask)
          for (size_t i = 0; i < mask.size(); ++i) mask[i] |= region_mask[i];
        double m = distribution_measure(u, lambda, mask);
        res.measures.push_back(m);
        res.weak_terms.push_back(lambda * m / f_l1);
        res.weak_ratio = std::max(res.weak_ratio, res.weak_terms.back());
      }
      ProbeResult plain = weak_ratio(u, f_l1, lambdas, output_mask);
      res.l1_ratio = plain.l1_ratio;
    }
    res.epsilon = eps;
    table.push_back(std::move(res));
  }
  return table;
}

}  // namespace singlab
