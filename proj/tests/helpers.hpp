#pragma once

#include "singlab/czd.hpp"
#include "singlab/grid.hpp"

#include <random>

namespace singlab::testing {

inline Point unit2(double phi) {
  Point u(2);
  u[0] = std::cos(phi);
  u[1] = std::sin(phi);
  return u;
}

inline Point point2(double x, double y) {
  Point p(2);
  p[0] = x;
  p[1] = y;
  return p;
}

inline GridFunction random_complex_field(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  GridFunction u{spec, Eigen::ArrayXcd(spec.cell_count())};
  for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values[i] = Complex(gauss(rng), gauss(rng));
  return u;
}

inline GridFunction random_lognormal(const GridSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  GridFunction u{spec, Eigen::ArrayXcd(spec.cell_count())};
  for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values[i] = std::exp(gauss(rng));
  return u;
}

// Gaussian with tiny values floored to exactly zero, so operator loops see a
// compact support box.
inline GridFunction gaussian(const GridSpec& spec, double sigma, double floor = 0.0) {
  return make_grid_function(spec, [sigma, floor](const Point& x) {
    double v = std::exp(-x.squaredNorm() / (2.0 * sigma * sigma));
    return Complex(v < floor ? 0.0 : v, 0.0);
  });
}

// Smooth compactly supported bump of the given radius.
inline GridFunction smooth_bump(const GridSpec& spec, double radius) {
  return make_grid_function(spec, [radius](const Point& x) {
    double t = x.norm() / radius;
    if (t >= 1.0) return Complex(0.0, 0.0);
    return Complex(std::exp(-1.0 / (1.0 - t * t)), 0.0);
  });
}

inline double rel_l2(const GridFunction& a, const GridFunction& b) {
  double denom = std::sqrt(b.values.abs2().sum());
  return std::sqrt((a.values - b.values).abs2().sum()) / denom;
}

inline double rel_l1(const GridFunction& a, const GridFunction& b) {
  return (a.values - b.values).abs().sum() / b.values.abs().sum();
}

// Exhaustive stopping-time oracle: every dyadic cube is tested top-down, a
// cube is reported when its average of |f| exceeds t while every strict
// ancestor stays at or below t. Independent of the tree-walk implementation.
struct OracleCube {
  int level;  // side = 2^level cells
  std::vector<int> corner_cells;
  bool operator==(const OracleCube&) const = default;
};

inline std::vector<OracleCube> brute_force_cz_cubes(const GridFunction& f, double t) {
  const GridSpec& spec = f.spec;
  int levels = static_cast<int>(std::round(std::log2(spec.cells)));
  std::vector<OracleCube> out;

  auto average = [&](int level, const std::vector<int>& corner) {
    int side = 1 << level;
    double sum = 0;
    std::vector<int> c(static_cast<size_t>(spec.dim));
    Eigen::Index count = 1;
    for (int a = 0; a < spec.dim; ++a) count *= side;
    for (Eigen::Index i = 0; i < count; ++i) {
      Eigen::Index rem = i;
      for (int a = spec.dim - 1; a >= 0; --a) {
        c[static_cast<size_t>(a)] = corner[static_cast<size_t>(a)] + static_cast<int>(rem % side);
        rem /= side;
      }
      sum += std::abs(f.values[spec.flat_index(c)]);
    }
    return sum / static_cast<double>(count);
  };

  for (int level = levels; level >= 0; --level) {
    int per_axis = spec.cells >> level;
    Eigen::Index cubes = 1;
    for (int a = 0; a < spec.dim; ++a) cubes *= per_axis;
    for (Eigen::Index q = 0; q < cubes; ++q) {
      Eigen::Index rem = q;
      std::vector<int> corner(static_cast<size_t>(spec.dim));
      for (int a = spec.dim - 1; a >= 0; --a) {
        corner[static_cast<size_t>(a)] = static_cast<int>(rem % per_axis) * (1 << level);
        rem /= per_axis;
      }
      if (!(average(level, corner) > t)) continue;
      // all strict ancestors must fail the threshold
      bool ancestors_ok = true;
      for (int up = level + 1; up <= levels && ancestors_ok; ++up) {
        std::vector<int> anc(static_cast<size_t>(spec.dim));
        for (int a = 0; a < spec.dim; ++a)
          anc[static_cast<size_t>(a)] = (corner[static_cast<size_t>(a)] >> up) << up;
        ancestors_ok = !(average(up, anc) > t);
      }
      if (ancestors_ok) out.push_back(OracleCube{level, corner});
    }
  }
  return out;
}

inline std::vector<OracleCube> cubes_of(const CZDecomposition& dec) {
  std::vector<OracleCube> out;
  for (const auto& atom : dec.atoms) {
    int level = static_cast<int>(std::round(std::log2(atom.cube.side_cells)));
    out.push_back(OracleCube{level, atom.cube.corner});
  }
  return out;
}

inline bool same_cube_set(std::vector<OracleCube> a, std::vector<OracleCube> b) {
  auto key = [](const OracleCube& c) {
    std::string k = std::to_string(c.level);
    for (int v : c.corner_cells) k += ":" + std::to_string(v);
    return k;
  };
  auto cmp = [&](const OracleCube& x, const OracleCube& y) { return key(x) < key(y); };
  std::sort(a.begin(), a.end(), cmp);
  std::sort(b.begin(), b.end(), cmp);
  return a == b;
}

}  // namespace singlab::testing
