#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace singlab {

using Complex = std::complex<double>;

// Spatial points live in R^2 or R^3; a bounded-dynamic vector keeps them on
// the stack while leaving the dimension a runtime value.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline double sphere_area(int dim) {
  if (dim == 2) return kTwoPi;
  if (dim == 3) return 4.0 * kPi;
  throw std::invalid_argument("sphere_area: dimension must be 2 or 3");
}

inline double unit_ball_volume(int dim) {
  if (dim == 2) return kPi;
  if (dim == 3) return 4.0 * kPi / 3.0;
  throw std::invalid_argument("unit_ball_volume: dimension must be 2 or 3");
}

// Multi-index alpha in Z_+^d, |alpha| = sum of entries.
using MultiIndex = std::vector<int>;

inline int multi_index_order(const MultiIndex& alpha) {
  int s = 0;
  for (int a : alpha) s += a;
  return s;
}

std::vector<MultiIndex> multi_indices_of_order(int dim, int order);
std::vector<MultiIndex> multi_indices_below_order(int dim, int order);

double multi_index_factorial(const MultiIndex& alpha);
double monomial(const Point& x, const MultiIndex& alpha);
std::string multi_index_label(const MultiIndex& alpha);

// Worker cap shared by the data-parallel loops; 0 means hardware concurrency.
void set_max_threads(int threads);
int max_threads();

// Splits [0, count) into contiguous chunks, one worker per chunk. Each chunk
// runs body(begin, end); bodies must be independent per index.
void parallel_for(Eigen::Index count,
                  const std::function<void(Eigen::Index, Eigen::Index)>& body);

}  // namespace singlab
