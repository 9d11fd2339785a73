#include "singlab/czd.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace singlab {

namespace {

// Per-level tables of cube sums, level 0 = single cells, level m has
// (N/2^m)^d cubes of side 2^m cells.
struct CubeSums {
  int levels = 0;  // log2(N) + 1
  std::vector<Eigen::ArrayXd> abs;     // sums of |f| per cube
  std::vector<Eigen::ArrayXcd> value;  // sums of f per cube
};

Eigen::Index cube_flat(const GridSpec& spec, int level, const std::vector<int>& cube_coords) {
  Eigen::Index per_axis = spec.cells >> level;
  Eigen::Index flat = 0;
  for (int a = 0; a < spec.dim; ++a) flat = flat * per_axis + cube_coords[static_cast<size_t>(a)];
  return flat;
}

CubeSums build_cube_sums(const GridFunction& f) {
  const GridSpec& spec = f.spec;
  CubeSums s;
  s.levels = static_cast<int>(std::round(std::log2(spec.cells))) + 1;
  s.abs.resize(static_cast<size_t>(s.levels));
  s.value.resize(static_cast<size_t>(s.levels));
  s.abs[0] = f.values.abs();
  s.value[0] = f.values;
  for (int level = 1; level < s.levels; ++level) {
    Eigen::Index per_axis = spec.cells >> level;
    Eigen::Index count = 1;
    for (int a = 0; a < spec.dim; ++a) count *= per_axis;
    s.abs[static_cast<size_t>(level)] = Eigen::ArrayXd::Zero(count);
    s.value[static_cast<size_t>(level)] = Eigen::ArrayXcd::Zero(count);
    Eigen::Index child_axis = per_axis * 2;
    std::vector<int> child(static_cast<size_t>(spec.dim));
    Eigen::Index child_count = 1;
    for (int a = 0; a < spec.dim; ++a) child_count *= child_axis;
    for (Eigen::Index cf = 0; cf < child_count; ++cf) {
      Eigen::Index rem = cf;
      Eigen::Index parent = 0;
      for (int a = 0; a < spec.dim; ++a) {
        // recover child coordinate on axis a (row-major)
        Eigen::Index stride = 1;
        for (int b = a + 1; b < spec.dim; ++b) stride *= child_axis;
        Eigen::Index idx = rem / stride;
        rem %= stride;
        parent = parent * per_axis + idx / 2;
      }
      s.abs[static_cast<size_t>(level)][parent] += s.abs[static_cast<size_t>(level - 1)][cf];
      s.value[static_cast<size_t>(level)][parent] += s.value[static_cast<size_t>(level - 1)][cf];
    }
  }
  return s;
}

void for_each_cell(const GridSpec& spec, const DyadicCube& cube,
                   const std::function<void(Eigen::Index)>& body) {
  std::vector<int> c(static_cast<size_t>(spec.dim));
  Eigen::Index count = 1;
  for (int a = 0; a < spec.dim; ++a) count *= cube.side_cells;
  for (Eigen::Index i = 0; i < count; ++i) {
    Eigen::Index rem = i;
    for (int a = spec.dim - 1; a >= 0; --a) {
      c[static_cast<size_t>(a)] =
          cube.corner[static_cast<size_t>(a)] + static_cast<int>(rem % cube.side_cells);
      rem /= cube.side_cells;
    }
    body(spec.flat_index(c));
  }
}

int physical_scale(const GridSpec& spec, int side_cells) {
  return static_cast<int>(std::lround(std::log2(side_cells * spec.spacing())));
}

DyadicCube make_cube(const GridSpec& spec, int level, const std::vector<int>& cube_coords) {
  DyadicCube cube;
  cube.side_cells = 1 << level;
  cube.corner.resize(static_cast<size_t>(spec.dim));
  for (int a = 0; a < spec.dim; ++a)
    cube.corner[static_cast<size_t>(a)] = cube_coords[static_cast<size_t>(a)] * cube.side_cells;
  cube.side_length = cube.side_cells * spec.spacing();
  cube.scale_k = physical_scale(spec, cube.side_cells);
  return cube;
}

}  // namespace

CZDecomposition cz_decompose(const GridFunction& f, double t, double enlargement) {
  if (!(t > 0)) throw std::invalid_argument("cz_decompose: level t must be positive");
  if (!(enlargement >= 1)) throw std::invalid_argument("cz_decompose: enlargement must be >= 1");
  const GridSpec& spec = f.spec;

  CubeSums sums = build_cube_sums(f);
  CZDecomposition dec;
  dec.spec = spec;
  dec.level = t;
  dec.enlargement = enlargement;
  dec.input = GridFunction{spec, f.values};
  dec.good = GridFunction{spec, f.values};
  dec.exceptional.assign(static_cast<size_t>(spec.cell_count()), 0);
  dec.exceptional_enlarged.assign(static_cast<size_t>(spec.cell_count()), 0);

  auto cells_of = [&](int level) {
    Eigen::Index c = 1;
    for (int a = 0; a < spec.dim; ++a) c *= (1 << level);
    return static_cast<double>(c);
  };

  auto select = [&](int level, const std::vector<int>& cube_coords) {
    DyadicCube cube = make_cube(spec, level, cube_coords);
    Eigen::Index flat = cube_flat(spec, level, cube_coords);
    Complex mean = sums.value[static_cast<size_t>(level)][flat] / cells_of(level);
    CZAtom atom;
    atom.cube = cube;
    atom.mean = mean;
    double l1 = 0;
    for_each_cell(spec, cube, [&](Eigen::Index cell) {
      l1 += std::abs(f.values[cell] - mean);
      dec.good.values[cell] = mean;
      dec.exceptional[static_cast<size_t>(cell)] = 1;
    });
    atom.l1 = l1 * spec.cell_volume();
    // enlarged cube rho Q, clipped to the box
    double half_extra = (enlargement - 1.0) * 0.5 * cube.side_cells;
    std::vector<int> lo(static_cast<size_t>(spec.dim)), hi(static_cast<size_t>(spec.dim));
    for (int a = 0; a < spec.dim; ++a) {
      int corner = cube.corner[static_cast<size_t>(a)];
      lo[static_cast<size_t>(a)] =
          std::max(0, corner - static_cast<int>(std::floor(half_extra)));
      hi[static_cast<size_t>(a)] = std::min(spec.cells - 1, corner + cube.side_cells - 1 +
                                                                static_cast<int>(std::floor(half_extra)));
    }
    std::vector<int> c = lo;
    while (true) {
      dec.exceptional_enlarged[static_cast<size_t>(spec.flat_index(c))] = 1;
      int axis = spec.dim - 1;
      while (axis >= 0) {
        if (++c[static_cast<size_t>(axis)] <= hi[static_cast<size_t>(axis)]) break;
        c[static_cast<size_t>(axis)] = lo[static_cast<size_t>(axis)];
        --axis;
      }
      if (axis < 0) break;
    }
    dec.atoms.push_back(std::move(atom));
  };

  // top-down walk: select when the cube average first exceeds t
  std::function<void(int, std::vector<int>&)> descend = [&](int level,
                                                            std::vector<int>& cube_coords) {
    Eigen::Index flat = cube_flat(spec, level, cube_coords);
    double avg = sums.abs[static_cast<size_t>(level)][flat] / cells_of(level);
    if (avg > t) {
      select(level, cube_coords);
      return;
    }
    if (level == 0) return;
    std::vector<int> child(static_cast<size_t>(spec.dim));
    for (int corner = 0; corner < (1 << spec.dim); ++corner) {
      for (int a = 0; a < spec.dim; ++a)
        child[static_cast<size_t>(a)] =
            cube_coords[static_cast<size_t>(a)] * 2 + ((corner >> a) & 1);
      descend(level - 1, child);
    }
  };

  int root_level = sums.levels - 1;
  std::vector<int> root(static_cast<size_t>(spec.dim), 0);
  double root_avg = sums.abs[static_cast<size_t>(root_level)][0] / cells_of(root_level);
  dec.degenerate_root = root_avg > t;
  descend(root_level, root);
  return dec;
}

GridFunction atom_function(const CZDecomposition& dec, const CZAtom& atom) {
  GridFunction b = zero_grid_function(dec.spec);
  for_each_cell(dec.spec, atom.cube,
                [&](Eigen::Index cell) { b.values[cell] = dec.input.values[cell] - atom.mean; });
  return b;
}

GridFunction bad_by_scale(const CZDecomposition& dec, int k) {
  GridFunction b = zero_grid_function(dec.spec);
  for (const auto& atom : dec.atoms) {
    if (atom.cube.scale_k != k) continue;
    for_each_cell(dec.spec, atom.cube,
                  [&](Eigen::Index cell) { b.values[cell] = dec.input.values[cell] - atom.mean; });
  }
  return b;
}

GridFunction bad_part(const CZDecomposition& dec) {
  GridFunction b = zero_grid_function(dec.spec);
  for (const auto& atom : dec.atoms)
    for_each_cell(dec.spec, atom.cube,
                  [&](Eigen::Index cell) { b.values[cell] = dec.input.values[cell] - atom.mean; });
  return b;
}

std::vector<int> atom_scales(const CZDecomposition& dec) {
  std::vector<int> scales;
  for (const auto& atom : dec.atoms)
    if (std::find(scales.begin(), scales.end(), atom.cube.scale_k) == scales.end())
      scales.push_back(atom.cube.scale_k);
  std::sort(scales.begin(), scales.end());
  return scales;
}

CZReport verify_cz(const CZDecomposition& dec, const GridFunction& f, double t) {
  const GridSpec& spec = dec.spec;
  const double hd = spec.cell_volume();
  const double slack = 1.0 + 1e-9;  // inequalities proven in exact arithmetic
  CZReport rep;
  rep.degenerate_root = dec.degenerate_root;
  rep.cube_count = dec.atoms.size();

  // exact reconstruction f = g + b
  GridFunction b = bad_part(dec);
  double fmax = f.values.abs().maxCoeff();
  double recon = 0;
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    recon = std::max(recon, std::abs(f.values[i] - dec.good.values[i] - b.values[i]));
  rep.max_reconstruction_error = fmax > 0 ? recon / fmax : recon;
  rep.decomposition_exact = rep.max_reconstruction_error <= 1e-12;

  // disjointness via cell cover multiplicity
  std::vector<std::uint8_t> covered(static_cast<size_t>(spec.cell_count()), 0);
  bool disjoint = true;
  for (const auto& atom : dec.atoms)
    for_each_cell(spec, atom.cube, [&](Eigen::Index cell) {
      if (covered[static_cast<size_t>(cell)]) disjoint = false;
      covered[static_cast<size_t>(cell)] = 1;
    });
  rep.cubes_disjoint = disjoint;

  // per-cube cancellation and L1 control
  rep.atoms_mean_zero = true;
  for (const auto& atom : dec.atoms) {
    Complex total(0, 0);
    for_each_cell(spec, atom.cube,
                  [&](Eigen::Index cell) { total += f.values[cell] - atom.mean; });
    double mean_abs = std::abs(total) * hd;
    rep.max_atom_mean = std::max(rep.max_atom_mean, mean_abs);
    double cube_scale = fmax * atom.cube.volume(spec.dim);
    if (mean_abs > 1e-12 * std::max(1.0, cube_scale)) rep.atoms_mean_zero = false;
    rep.max_atom_l1_ratio =
        std::max(rep.max_atom_l1_ratio, atom.l1 / (t * atom.cube.volume(spec.dim)));
  }
  rep.atom_l1_bounded = rep.max_atom_l1_ratio <= slack * std::ldexp(1.0, spec.dim + 1);

  // measure of the exceptional set
  double measure = 0;
  for (auto flag : dec.exceptional) measure += flag ? hd : 0.0;
  rep.exceptional_measure = measure;
  rep.exceptional_bound = lebesgue_norm(f, 1.0) / t;
  rep.exceptional_bounded = measure <= slack * rep.exceptional_bound;

  // good part bounds
  rep.good_sup = dec.good.values.abs().maxCoeff();
  rep.good_l2_sq = dec.good.values.abs2().sum() * hd;
  rep.good_l2_bound = std::ldexp(1.0, spec.dim) * t * lebesgue_norm(f, 1.0);
  rep.good_bounded = rep.good_sup <= slack * std::ldexp(1.0, spec.dim) * t &&
                     rep.good_l2_sq <= slack * rep.good_l2_bound;

  rep.all_pass = rep.decomposition_exact && rep.cubes_disjoint && rep.atoms_mean_zero &&
                 rep.atom_l1_bounded && rep.exceptional_bounded && rep.good_bounded;
  return rep;
}

nlohmann::json cz_report_json(const CZReport& rep, const CZDecomposition& dec) {
  nlohmann::json j;
  j["properties"] = {{"decomposition_exact", rep.decomposition_exact},
                     {"cubes_disjoint", rep.cubes_disjoint},
                     {"atoms_mean_zero", rep.atoms_mean_zero},
                     {"atom_l1_bounded", rep.atom_l1_bounded},
                     {"exceptional_bounded", rep.exceptional_bounded},
                     {"good_bounded", rep.good_bounded}};
  j["all_pass"] = rep.all_pass;
  j["degenerate_root"] = rep.degenerate_root;
  j["constants"] = {{"max_reconstruction_error", rep.max_reconstruction_error},
                    {"max_atom_mean", rep.max_atom_mean},
                    {"max_atom_l1_ratio", rep.max_atom_l1_ratio},
                    {"exceptional_measure", rep.exceptional_measure},
                    {"exceptional_bound", rep.exceptional_bound},
                    {"good_sup", rep.good_sup},
                    {"good_l2_sq", rep.good_l2_sq},
                    {"good_l2_bound", rep.good_l2_bound}};
  nlohmann::json cubes = nlohmann::json::array();
  for (const auto& atom : dec.atoms) {
    nlohmann::json c;
    c["k"] = atom.cube.scale_k;
    c["corner"] = atom.cube.corner;
    c["avg"] = {atom.mean.real(), atom.mean.imag()};
    cubes.push_back(std::move(c));
  }
  j["cubes"] = std::move(cubes);
  return j;
}

}  // namespace singlab
