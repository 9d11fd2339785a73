#pragma once

#include "singlab/grid.hpp"

#include <nlohmann/json_fwd.hpp>

namespace singlab {

// Cube of the dyadic tree anchored at the grid box corner. `scale_k` is the
// base-2 log of the physical side length; it is an exact integer whenever
// the box width 2L is a power of two (the shipped configurations are).
struct DyadicCube {
  int scale_k = 0;
  std::vector<int> corner;  // cell coordinates of the low corner
  int side_cells = 0;
  double side_length = 0;

  double volume(int dim) const { return std::pow(side_length, dim); }
};

struct CZAtom {
  DyadicCube cube;
  Complex mean;   // cube average of f; the atom is (f - mean) on the cube
  double l1 = 0;  // integral of |f - mean| over the cube
};

struct CZDecomposition {
  GridSpec spec;
  double level = 0;        // t
  double enlargement = 1;  // rho, the factor defining the enlarged cubes
  GridFunction input;      // the decomposed function; atoms are (input - mean) per cube
  GridFunction good;
  std::vector<CZAtom> atoms;
  std::vector<std::uint8_t> exceptional;           // E, union of selected cubes
  std::vector<std::uint8_t> exceptional_enlarged;  // E*, union of rho Q clipped to the box
  bool degenerate_root = false;                    // root average already above t
};

// Stopping-time selection on the dyadic tree: descending from the root, a
// cube is selected when its average of |f| first exceeds t; recursion
// bottoms out at single cells. g equals f off the selected cubes and the
// cube average on each; atoms are (f - average) restricted to their cubes.
CZDecomposition cz_decompose(const GridFunction& f, double t, double enlargement = 4.0);

// Atom as a full grid function (zero off its cube).
GridFunction atom_function(const CZDecomposition& dec, const CZAtom& atom);
// Sum of atoms with side length 2^k; the zero grid when no cube has that scale.
GridFunction bad_by_scale(const CZDecomposition& dec, int k);
// Sum of all atoms, b = f - g.
GridFunction bad_part(const CZDecomposition& dec);
std::vector<int> atom_scales(const CZDecomposition& dec);

struct CZReport {
  bool decomposition_exact = false;  // f = g + b on every cell
  bool cubes_disjoint = false;
  bool atoms_mean_zero = false;
  bool atom_l1_bounded = false;  // ||b_Q||_1 <= 2^{d+1} t |Q|
  bool exceptional_bounded = false;  // m(E) <= ||f||_1 / t
  bool good_bounded = false;     // ||g||_inf <= 2^d t and ||g||_2^2 <= 2^d t ||f||_1
  bool degenerate_root = false;
  bool all_pass = false;

  double max_reconstruction_error = 0;  // max |f - g - b| relative to max |f|
  double max_atom_mean = 0;             // max |integral of b_Q| over cubes
  double max_atom_l1_ratio = 0;         // max ||b_Q||_1 / (t |Q|)
  double exceptional_measure = 0;
  double exceptional_bound = 0;  // ||f||_1 / t
  double good_sup = 0;
  double good_l2_sq = 0;
  double good_l2_bound = 0;  // 2^d t ||f||_1
  std::size_t cube_count = 0;
};

// Property checks with measured constants; failures are report entries.
CZReport verify_cz(const CZDecomposition& dec, const GridFunction& f, double t);

nlohmann::json cz_report_json(const CZReport& report, const CZDecomposition& dec);

}  // namespace singlab
