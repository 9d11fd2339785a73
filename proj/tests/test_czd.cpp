#include "singlab/czd.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

using namespace singlab;
using namespace singlab::testing;

TEST_CASE("constant input below the level stays good") {
  GridSpec spec = make_grid_spec(2, 16, 2.0);
  GridFunction f = make_grid_function(spec, [](const Point&) { return Complex(0.7, 0); });
  CZDecomposition dec = cz_decompose(f, 1.0);
  CHECK(dec.atoms.empty());
  CHECK_FALSE(dec.degenerate_root);
  CHECK((dec.good.values == f.values).all());
  for (auto flag : dec.exceptional) CHECK(flag == 0);
}

TEST_CASE("single hot cell selects exactly one single-cell cube") {
  GridSpec spec = make_grid_spec(2, 16, 2.0);
  GridFunction f = zero_grid_function(spec);
  Eigen::Index hot = spec.flat_index({5, 9});
  f.values[hot] = 10.0;
  // cell average 10 > t; every enclosing cube has average <= 10/4
  double t = 5.0;
  CZDecomposition dec = cz_decompose(f, t);
  REQUIRE(dec.atoms.size() == 1);
  CHECK(dec.atoms[0].cube.side_cells == 1);
  CHECK(dec.atoms[0].cube.corner == std::vector<int>{5, 9});
  CHECK(dec.atoms[0].l1 == 0.0);  // constant on its cube
  CHECK((dec.good.values == f.values).all());
  CHECK(same_cube_set(cubes_of(dec), brute_force_cz_cubes(f, t)));
}

TEST_CASE("selected cubes match the exhaustive oracle") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    GridSpec spec = make_grid_spec(2, 64, 2.0);
    GridFunction f = random_lognormal(spec, seed);
    Eigen::ArrayXd mags = f.values.abs();
    std::vector<double> sorted(mags.data(), mags.data() + mags.size());
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    double t = sorted[sorted.size() / 2];  // median level
    CZDecomposition dec = cz_decompose(f, t);
    CHECK(same_cube_set(cubes_of(dec), brute_force_cz_cubes(f, t)));
  }
}

TEST_CASE("verification passes on valid decompositions and flags corruption") {
  GridSpec spec = make_grid_spec(2, 128, 4.0);
  GridFunction f = random_lognormal(spec, 11);
  double t = 4.0 * f.values.abs().mean();
  CZDecomposition dec = cz_decompose(f, t);
  CZReport rep = verify_cz(dec, f, t);
  CHECK(rep.all_pass);
  CHECK(rep.max_atom_l1_ratio <= 8.0 + 1e-9);  // 2^{d+1}
  CHECK(rep.good_sup <= 4.0 * t * (1 + 1e-9));

  REQUIRE(!dec.atoms.empty());
  CZDecomposition corrupted = dec;
  corrupted.atoms[0].mean += Complex(0.25 * t, 0.0);
  CZReport bad = verify_cz(corrupted, f, t);
  CHECK_FALSE(bad.atoms_mean_zero);
  CHECK_FALSE(bad.all_pass);

  nlohmann::json j = cz_report_json(rep, dec);
  CHECK(j["all_pass"].get<bool>());
  CHECK(j["cubes"].size() == dec.atoms.size());
}

TEST_CASE("atoms by scale") {
  GridSpec spec = make_grid_spec(2, 64, 2.0);
  GridFunction f = random_lognormal(spec, 23);
  double t = 3.0 * f.values.abs().mean();
  CZDecomposition dec = cz_decompose(f, t);
  REQUIRE(!dec.atoms.empty());

  GridFunction b = bad_part(dec);
  GridFunction accum = zero_grid_function(spec);
  double scale_mass = 0;
  for (int k : atom_scales(dec)) {
    GridFunction bk = bad_by_scale(dec, k);
    accum.values += bk.values;
    scale_mass += lebesgue_norm(bk, 1.0);
  }
  CHECK((accum.values == b.values).all());
  CHECK(scale_mass == doctest::Approx(lebesgue_norm(b, 1.0)).epsilon(1e-12));

  int unused_scale = atom_scales(dec).back() + 7;
  CHECK(lebesgue_norm(bad_by_scale(dec, unused_scale), 1.0) == 0.0);

  CHECK(lebesgue_norm(b, 1.0) <= 2.0 * lebesgue_norm(f, 1.0) + 1e-9);
}

TEST_CASE("determinism and scaling covariance") {
  GridSpec spec = make_grid_spec(2, 64, 2.0);
  GridFunction f = random_lognormal(spec, 37);
  double t = 2.5 * f.values.abs().mean();

  CZDecomposition a = cz_decompose(f, t);
  CZDecomposition b = cz_decompose(f, t);
  CHECK(same_cube_set(cubes_of(a), cubes_of(b)));

  // rescaling f and t together leaves the selection invariant and scales
  // the parts (dyadic factors keep the comparisons bit-identical)
  for (double c0 : {2.0, 0.5}) {
    GridFunction scaled{spec, c0 * f.values};
    CZDecomposition c = cz_decompose(scaled, c0 * t);
    CHECK(same_cube_set(cubes_of(a), cubes_of(c)));
    CHECK(((c0 * a.good.values) == c.good.values).all());
    CHECK(((c0 * bad_part(a).values) == bad_part(c).values).all());
  }
}

TEST_CASE("degenerate root is allowed and flagged") {
  GridSpec spec = make_grid_spec(2, 16, 2.0);
  GridFunction f = make_grid_function(spec, [](const Point&) { return Complex(3.0, 0); });
  CZDecomposition dec = cz_decompose(f, 1.0);
  CHECK(dec.degenerate_root);
  REQUIRE(dec.atoms.size() == 1);
  CHECK(dec.atoms[0].cube.side_cells == spec.cells);
}

TEST_CASE("complex inputs decompose through the magnitude") {
  GridSpec spec = make_grid_spec(2, 32, 2.0);
  GridFunction base = random_lognormal(spec, 41);
  GridFunction rotated{spec, base.values * std::polar(1.0, 0.83)};
  double t = 3.0 * base.values.abs().mean();
  CHECK(same_cube_set(cubes_of(cz_decompose(base, t)), cubes_of(cz_decompose(rotated, t))));
  CZDecomposition dec = cz_decompose(rotated, t);
  CHECK(verify_cz(dec, rotated, t).all_pass);
}

TEST_CASE("level must be positive") {
  GridSpec spec = make_grid_spec(2, 16, 2.0);
  GridFunction f = random_lognormal(spec, 1);
  CHECK_THROWS_AS(cz_decompose(f, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cz_decompose(f, 1.0, 0.5), std::invalid_argument);
}

TEST_CASE("enlarged exceptional set contains the exceptional set") {
  GridSpec spec = make_grid_spec(2, 64, 2.0);
  GridFunction f = random_lognormal(spec, 53);
  double t = 3.0 * f.values.abs().mean();
  CZDecomposition dec = cz_decompose(f, t, 4.0);
  double m_e = 0, m_star = 0;
  for (size_t i = 0; i < dec.exceptional.size(); ++i) {
    CHECK(dec.exceptional[i] <= dec.exceptional_enlarged[i]);
    m_e += dec.exceptional[i];
    m_star += dec.exceptional_enlarged[i];
  }
  CHECK(m_star >= m_e);
}
