#pragma once

#include "singlab/common.hpp"

#include <filesystem>

namespace singlab {

// Uniform cell-centered grid over the box [-L, L)^d with N cells per axis.
// Cell centers are -L + (i + 1/2) h, h = 2L/N, so no center sits at the
// origin or on the box faces.
struct GridSpec {
  int dim = 2;
  int cells = 0;        // N, a power of two
  double half_width = 0;  // L

  double spacing() const { return 2.0 * half_width / cells; }
  double cell_volume() const;
  Eigen::Index cell_count() const;

  Point cell_center(Eigen::Index flat) const;
  Eigen::Index flat_index(const std::vector<int>& coords) const;
  std::vector<int> coords(Eigen::Index flat) const;

  // Physical frequency of DFT bin `flat`: components (pi/L) k with
  // k in {-N/2, ..., N/2 - 1} (standard wrap of the bin index).
  Point frequency(Eigen::Index flat) const;

  bool operator==(const GridSpec& o) const {
    return dim == o.dim && cells == o.cells && half_width == o.half_width;
  }
};

GridSpec make_grid_spec(int dim, int cells, double half_width);

struct GridFunction {
  GridSpec spec;
  Eigen::ArrayXcd values;  // row-major over cell coordinates
};

GridFunction make_grid_function(const GridSpec& spec,
                                const std::function<Complex(const Point&)>& f);
GridFunction zero_grid_function(const GridSpec& spec);

// Riemann-sum norm with cell weight h^d; p must be 1, 2 or infinity.
double lebesgue_norm(const GridFunction& u, double p);

// h^d * #{cells : |u| > lambda}.
double distribution_measure(const GridFunction& u, double lambda);
// Same, counting only cells where exclude[i] == 0. `exclude` may be empty.
double distribution_measure(const GridFunction& u, double lambda,
                            const std::vector<std::uint8_t>& exclude);

enum class TransformDirection { forward, inverse };

// Discrete Fourier pair on the periodic index grid: unnormalized forward,
// 1/N^d inverse. Symbols are evaluated on the physical frequencies exposed
// by GridSpec::frequency.
GridFunction transform(const GridFunction& u, TransformDirection dir);

// Binary grid file: "SGRD", u32 version=1, u32 d, u32 N, f64 L, then N^d
// complex values as interleaved f64 pairs, row-major, little-endian.
void write_sgrd(const std::filesystem::path& path, const GridFunction& u);
GridFunction read_sgrd(const std::filesystem::path& path);

}  // namespace singlab
