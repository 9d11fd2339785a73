#include "singlab/operator.hpp"

#include <cmath>

namespace singlab {

namespace {

struct SupportBox {
  std::vector<int> lo, hi;
  bool empty = true;
};

SupportBox input_support(const GridFunction& f) {
  const GridSpec& spec = f.spec;
  SupportBox box;
  box.lo.assign(static_cast<size_t>(spec.dim), spec.cells);
  box.hi.assign(static_cast<size_t>(spec.dim), -1);
  for (Eigen::Index i = 0; i < f.values.size(); ++i) {
    if (f.values[i] == Complex(0.0, 0.0)) continue;
    box.empty = false;
    auto c = spec.coords(i);
    for (int a = 0; a < spec.dim; ++a) {
      auto ai = static_cast<size_t>(a);
      box.lo[ai] = std::min(box.lo[ai], c[ai]);
      box.hi[ai] = std::max(box.hi[ai], c[ai]);
    }
  }
  return box;
}

// Dense table over cell offsets in [-reach, reach]^d holding the full pair
// weight W = Omega((x-y)') K(x-y) h^d, zero outside |x-y| in (lo, hi].
Eigen::ArrayXcd build_weight_table(const SphereFunction& omega,
                                   const std::function<Complex(const Point&)>& offset_kernel,
                                   const GridSpec& spec, int reach, double lo, double hi) {
  Eigen::Index side = 2 * reach + 1;
  Eigen::Index total = 1;
  for (int a = 0; a < spec.dim; ++a) total *= side;
  Eigen::ArrayXcd table = Eigen::ArrayXcd::Zero(total);
  double h = spec.spacing();
  double hd = spec.cell_volume();
  parallel_for(total, [&](Eigen::Index begin, Eigen::Index end) {
    Point z(spec.dim);
    for (Eigen::Index flat = begin; flat < end; ++flat) {
      Eigen::Index rem = flat;
      bool diagonal = true;
      for (int a = spec.dim - 1; a >= 0; --a) {
        int c = static_cast<int>(rem % side) - reach;
        rem /= side;
        z[a] = c * h;
        diagonal = diagonal && c == 0;
      }
      if (diagonal) continue;
      double r = z.norm();
      if (r <= lo || r > hi) continue;
      table[flat] = omega(z) * offset_kernel(z) * hd;
    }
  });
  return table;
}

// Omega((x-y)') per offset; the direction depends only on the cell offset.
Eigen::ArrayXd build_omega_table(const SphereFunction& omega, const GridSpec& spec, int reach) {
  Eigen::Index side = 2 * reach + 1;
  Eigen::Index total = 1;
  for (int a = 0; a < spec.dim; ++a) total *= side;
  Eigen::ArrayXd table = Eigen::ArrayXd::Zero(total);
  double h = spec.spacing();
  Point z(spec.dim);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    bool diagonal = true;
    for (int a = spec.dim - 1; a >= 0; --a) {
      int c = static_cast<int>(rem % side) - reach;
      rem /= side;
      z[a] = c * h;
      diagonal = diagonal && c == 0;
    }
    if (!diagonal) table[flat] = omega(z);
  }
  return table;
}

struct ApplyPlan {
  const GridFunction* f;
  const SphereFunction* omega;
  std::function<Complex(const Point&, const Point&)> pair_eval;  // kernel without Omega
  std::function<Complex(const Point&)> offset_eval;              // set if translation invariant
  double lo = 0, hi = 0;
  QuadratureRule rule = QuadratureRule::plain;
  bool real_kernel = true;
  const std::vector<std::uint8_t>* output_mask = nullptr;
};

// Tabulated, plain-rule, d = 2 reduction over contiguous rows.
void run_tabulated_2d(const ApplyPlan& plan, const Eigen::ArrayXcd& table, int reach,
                      const SupportBox& support, GridFunction& out) {
  const GridSpec& spec = plan.f->spec;
  const int n = spec.cells;
  const Eigen::Index side = 2 * reach + 1;

  const bool f_real = (plan.f->values.imag() == 0.0).all();
  const bool table_real = (table.imag() == 0.0).all();
  Eigen::ArrayXd table_re, f_re;
  if (f_real && table_real) {
    table_re = table.real();
    f_re = plan.f->values.real();
  }

  parallel_for(spec.cell_count(), [&](Eigen::Index begin, Eigen::Index end) {
    for (Eigen::Index cell = begin; cell < end; ++cell) {
      if (plan.output_mask && !(*plan.output_mask)[static_cast<size_t>(cell)]) continue;
      int x0 = static_cast<int>(cell / n);
      int x1 = static_cast<int>(cell % n);
      int lo0 = std::max(support.lo[0], x0 - reach);
      int hi0 = std::min(support.hi[0], x0 + reach);
      int lo1 = std::max(support.lo[1], x1 - reach);
      int hi1 = std::min(support.hi[1], x1 + reach);
      if (lo0 > hi0 || lo1 > hi1) continue;
      if (f_real && table_real) {
        double acc = 0;
        for (int y0 = lo0; y0 <= hi0; ++y0) {
          const double* trow = table_re.data() + (x0 - y0 + reach) * side + (x1 + reach);
          const double* frow = f_re.data() + static_cast<Eigen::Index>(y0) * n;
          for (int y1 = lo1; y1 <= hi1; ++y1) acc += trow[-y1] * frow[y1];
        }
        out.values[cell] = Complex(acc, 0.0);
      } else {
        Complex acc(0.0, 0.0);
        for (int y0 = lo0; y0 <= hi0; ++y0) {
          const Complex* trow = table.data() + (x0 - y0 + reach) * side + (x1 + reach);
          const Complex* frow = plan.f->values.data() + static_cast<Eigen::Index>(y0) * n;
          for (int y1 = lo1; y1 <= hi1; ++y1) acc += trow[-y1] * frow[y1];
        }
        out.values[cell] = acc;
      }
    }
  });
}

// Generic reduction: any dimension, either rule, tabulated or direct kernel.
void run_generic(const ApplyPlan& plan, const Eigen::ArrayXcd* table,
                 const Eigen::ArrayXd* omega_table, int reach, const SupportBox& support,
                 GridFunction& out) {
  const GridSpec& spec = plan.f->spec;
  const Eigen::Index side = 2 * reach + 1;
  const double h = spec.spacing();
  const double hd = spec.cell_volume();

  auto offset_flat = [&](const int* dc) {
    Eigen::Index flat = 0;
    for (int a = 0; a < spec.dim; ++a) flat = flat * side + (dc[a] + reach);
    return flat;
  };

  auto weight = [&](const Point& x, const int* dc) -> Complex {
    Eigen::Index flat = offset_flat(dc);
    if (table) return (*table)[flat];
    Point y(spec.dim);
    Point z(spec.dim);
    for (int a = 0; a < spec.dim; ++a) {
      z[a] = dc[a] * h;
      y[a] = x[a] - z[a];
    }
    double r = z.norm();
    if (r <= plan.lo || r > plan.hi) return Complex(0.0, 0.0);
    return (*omega_table)[flat] * plan.pair_eval(x, y) * hd;
  };

  parallel_for(spec.cell_count(), [&](Eigen::Index begin, Eigen::Index end) {
    std::vector<int> yc(static_cast<size_t>(spec.dim));
    std::vector<int> dc(static_cast<size_t>(spec.dim));
    std::vector<int> md(static_cast<size_t>(spec.dim));
    std::vector<int> lo_c(static_cast<size_t>(spec.dim)), hi_c(static_cast<size_t>(spec.dim));
    for (Eigen::Index cell = begin; cell < end; ++cell) {
      if (plan.output_mask && !(*plan.output_mask)[static_cast<size_t>(cell)]) continue;
      auto xc = spec.coords(cell);
      Point x = spec.cell_center(cell);
      Complex acc(0.0, 0.0);

      if (plan.rule == QuadratureRule::plain) {
        bool nonempty = true;
        for (int a = 0; a < spec.dim; ++a) {
          auto ai = static_cast<size_t>(a);
          lo_c[ai] = std::max(support.lo[ai], xc[ai] - reach);
          hi_c[ai] = std::min(support.hi[ai], xc[ai] + reach);
          nonempty = nonempty && lo_c[ai] <= hi_c[ai];
        }
        if (!nonempty) continue;
        yc = lo_c;
        while (true) {
          bool diagonal = true;
          for (int a = 0; a < spec.dim; ++a) {
            auto ai = static_cast<size_t>(a);
            dc[ai] = xc[ai] - yc[ai];
            diagonal = diagonal && dc[ai] == 0;
          }
          if (!diagonal) {
            Complex fv = plan.f->values[spec.flat_index(yc)];
            if (fv != Complex(0.0, 0.0)) acc += weight(x, dc.data()) * fv;
          }
          int axis = spec.dim - 1;
          while (axis >= 0) {
            auto ai = static_cast<size_t>(axis);
            if (++yc[ai] <= hi_c[ai]) break;
            yc[ai] = lo_c[ai];
            --axis;
          }
          if (axis < 0) break;
        }
      } else {
        // antisymmetrized: pair y = x - delta with its reflection x + delta
        // across the lexicographically positive half lattice
        std::vector<int> delta(static_cast<size_t>(spec.dim), -reach);
        while (true) {
          bool positive = false;
          for (int a = 0; a < spec.dim; ++a) {
            auto ai = static_cast<size_t>(a);
            if (delta[ai] != 0) {
              positive = delta[ai] > 0;
              break;
            }
          }
          if (positive) {
            bool in1 = true, in2 = true;
            for (int a = 0; a < spec.dim; ++a) {
              auto ai = static_cast<size_t>(a);
              int y1 = xc[ai] - delta[ai];
              int y2 = xc[ai] + delta[ai];
              md[ai] = -delta[ai];
              in1 = in1 && y1 >= 0 && y1 < spec.cells;
              in2 = in2 && y2 >= 0 && y2 < spec.cells;
            }
            if (in1 || in2) {
              Complex f1(0.0, 0.0), f2(0.0, 0.0);
              if (in1) {
                for (int a = 0; a < spec.dim; ++a)
                  yc[static_cast<size_t>(a)] = xc[static_cast<size_t>(a)] - delta[static_cast<size_t>(a)];
                f1 = plan.f->values[spec.flat_index(yc)];
              }
              if (in2) {
                for (int a = 0; a < spec.dim; ++a)
                  yc[static_cast<size_t>(a)] = xc[static_cast<size_t>(a)] + delta[static_cast<size_t>(a)];
                f2 = plan.f->values[spec.flat_index(yc)];
              }
              if (f1 != Complex(0.0, 0.0) || f2 != Complex(0.0, 0.0)) {
                Complex wp = weight(x, delta.data());
                Complex wm = weight(x, md.data());
                acc += 0.5 * (wp - wm) * (f1 - f2) + 0.5 * (wp + wm) * (f1 + f2);
              }
            }
          }
          int axis = spec.dim - 1;
          while (axis >= 0) {
            auto ai = static_cast<size_t>(axis);
            if (++delta[ai] <= reach) break;
            delta[ai] = -reach;
            --axis;
          }
          if (axis < 0) break;
        }
      }
      out.values[cell] = acc;
    }
  });
}

GridFunction apply_pairwise(const ApplyPlan& plan) {
  const GridSpec& spec = plan.f->spec;
  if (plan.output_mask &&
      static_cast<Eigen::Index>(plan.output_mask->size()) != spec.cell_count())
    throw std::invalid_argument("apply: output mask size mismatch");

  GridFunction out = zero_grid_function(spec);
  SupportBox support = input_support(*plan.f);
  if (support.empty) return out;

  int reach = spec.cells - 1;
  if (std::isfinite(plan.hi))
    reach = std::min(reach, static_cast<int>(std::ceil(plan.hi / spec.spacing())));

  if (plan.offset_eval) {
    Eigen::ArrayXcd table =
        build_weight_table(*plan.omega, plan.offset_eval, spec, reach, plan.lo, plan.hi);
    if (spec.dim == 2 && plan.rule == QuadratureRule::plain)
      run_tabulated_2d(plan, table, reach, support, out);
    else
      run_generic(plan, &table, nullptr, reach, support, out);
  } else {
    Eigen::ArrayXd omega_table = build_omega_table(*plan.omega, spec, reach);
    run_generic(plan, nullptr, &omega_table, reach, support, out);
  }

  if (plan.real_kernel && (plan.f->values.imag() == 0.0).all()) {
    double worst = out.values.imag().abs().maxCoeff();
    double scale = std::max(1.0, out.values.abs().maxCoeff());
    if (worst > 1e-12 * scale)
      throw std::logic_error("apply: imaginary part leaked on a real-kernel path");
  }
  return out;
}

}  // namespace

std::pair<int, int> exhaustive_j_range(const GridSpec& spec) {
  double h = spec.spacing();
  double diameter = 2.0 * spec.half_width * std::sqrt(static_cast<double>(spec.dim));
  int lo = static_cast<int>(std::floor(std::log2(h))) - 1;
  int hi = static_cast<int>(std::ceil(std::log2(2.0 * diameter)));
  return {lo, hi};
}

OperatorConfig make_operator_config(const SphereFunction& omega, const KernelSpec& kernel,
                                    const GridSpec& spec) {
  OperatorConfig cfg;
  cfg.omega = omega;
  cfg.kernel = kernel;
  auto [lo, hi] = exhaustive_j_range(spec);
  cfg.j_min = lo;
  cfg.j_max = hi;
  return cfg;
}

GridFunction apply_truncated(const OperatorConfig& cfg, const GridFunction& f,
                             const ApplyOptions& opts) {
  if (cfg.omega.dim != f.spec.dim || cfg.kernel.dim != f.spec.dim)
    throw std::invalid_argument("apply_truncated: dimension mismatch");
  if (cfg.epsilon_cells < 0.5)
    throw std::invalid_argument("apply_truncated: truncation below half a cell");
  ApplyPlan plan;
  plan.f = &f;
  plan.omega = &cfg.omega;
  plan.pair_eval = cfg.kernel.eval;
  if (cfg.kernel.translation_invariant) plan.offset_eval = cfg.kernel.offset_eval;
  plan.lo = cfg.epsilon_cells * f.spec.spacing();
  plan.hi = std::numeric_limits<double>::infinity();
  plan.rule = cfg.rule;
  plan.real_kernel = cfg.kernel.real_valued;
  plan.output_mask = opts.output_mask;
  return apply_pairwise(plan);
}

GridFunction apply_dyadic(const OperatorConfig& cfg, const GridFunction& f, int j,
                          std::optional<int> mollify, const ApplyOptions& opts) {
  if (cfg.omega.dim != f.spec.dim || cfg.kernel.dim != f.spec.dim)
    throw std::invalid_argument("apply_dyadic: dimension mismatch");
  DyadicPiece piece = dyadic_piece(cfg.kernel, j, make_phi_annulus());
  if (mollify)
    piece = mollified_piece(piece, *mollify, make_eta_mollifier(), cfg.mollify_resolution);
  ApplyPlan plan;
  plan.f = &f;
  plan.omega = &cfg.omega;
  plan.pair_eval = piece.eval;
  if (piece.translation_invariant) plan.offset_eval = piece.offset_eval;
  plan.lo = 0.0;
  plan.hi = piece.support_hi;
  plan.rule = cfg.rule;
  plan.real_kernel = cfg.kernel.real_valued;
  plan.output_mask = opts.output_mask;
  return apply_pairwise(plan);
}

GridFunction apply_dyadic_sum(const OperatorConfig& cfg, const GridFunction& f,
                              const ApplyOptions& opts) {
  if (cfg.j_max < cfg.j_min)
    throw std::invalid_argument("apply_dyadic_sum: empty j-range; use make_operator_config");
  GridFunction out = zero_grid_function(f.spec);
  for (int j = cfg.j_min; j <= cfg.j_max; ++j) {
    GridFunction piece = apply_dyadic(cfg, f, j, {}, opts);
    out.values += piece.values;
  }
  return out;
}

double mollification_error(const OperatorConfig& cfg, const GridFunction& f, int j, int n) {
  double f_l1 = lebesgue_norm(f, 1.0);
  if (f_l1 == 0.0) throw std::invalid_argument("mollification_error: f vanishes");
  SphereQuadrature quad = build_quadrature(cfg.omega.dim, cfg.omega.dim == 2 ? 4096 : 16384);
  double omega_l1 = compute_norms(cfg.omega, quad).l1;
  GridFunction sharp = apply_dyadic(cfg, f, j);
  GridFunction smooth = apply_dyadic(cfg, f, j, n);
  GridFunction diff{f.spec, sharp.values - smooth.values};
  return lebesgue_norm(diff, 1.0) / (omega_l1 * f_l1);
}

double riesz_constant() { return kTwoPi; }

GridFunction spectral_riesz_oracle(const GridFunction& f, int axis) {
  if (f.spec.dim != 2)
    throw std::invalid_argument("spectral_riesz_oracle: implemented for d = 2 grids");
  if (axis != 1 && axis != 2)
    throw std::invalid_argument("spectral_riesz_oracle: axis must be 1 or 2");
  int a = axis - 1;
  double c = riesz_constant();
  MultiplierSymbol m;
  m.homogeneous = true;
  m.label = "riesz[" + std::to_string(axis) + "]";
  m.eval = [a, c](const Point& xi) -> Complex {
    double r = xi.norm();
    if (r == 0.0) return Complex(0.0, 0.0);
    return Complex(0.0, -c * xi[a] / r);
  };
  return apply_multiplier(m, f);
}

}  // namespace singlab
