#include "singlab/grid.hpp"

#include <unsupported/Eigen/FFT>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace singlab {

static_assert(std::endian::native == std::endian::little,
              "sgrd I/O assumes a little-endian host");

double GridSpec::cell_volume() const { return std::pow(spacing(), dim); }

Eigen::Index GridSpec::cell_count() const {
  Eigen::Index c = 1;
  for (int i = 0; i < dim; ++i) c *= cells;
  return c;
}

Point GridSpec::cell_center(Eigen::Index flat) const {
  Point x(dim);
  double h = spacing();
  for (int axis = dim - 1; axis >= 0; --axis) {
    int idx = static_cast<int>(flat % cells);
    flat /= cells;
    x[axis] = -half_width + (idx + 0.5) * h;
  }
  return x;
}

Eigen::Index GridSpec::flat_index(const std::vector<int>& c) const {
  Eigen::Index flat = 0;
  for (int axis = 0; axis < dim; ++axis) flat = flat * cells + c[static_cast<size_t>(axis)];
  return flat;
}

std::vector<int> GridSpec::coords(Eigen::Index flat) const {
  std::vector<int> c(static_cast<size_t>(dim));
  for (int axis = dim - 1; axis >= 0; --axis) {
    c[static_cast<size_t>(axis)] = static_cast<int>(flat % cells);
    flat /= cells;
  }
  return c;
}

Point GridSpec::frequency(Eigen::Index flat) const {
  Point xi(dim);
  double base = kPi / half_width;
  for (int axis = dim - 1; axis >= 0; --axis) {
    int k = static_cast<int>(flat % cells);
    flat /= cells;
    if (k >= cells / 2) k -= cells;
    xi[axis] = base * k;
  }
  return xi;
}

GridSpec make_grid_spec(int dim, int cells, double half_width) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid: dim must be 2 or 3");
  if (cells < 2 || (cells & (cells - 1)) != 0)
    throw std::invalid_argument("grid: cells per axis must be a power of two >= 2");
  if (!(half_width > 0)) throw std::invalid_argument("grid: half_width must be positive");
  return GridSpec{dim, cells, half_width};
}

GridFunction make_grid_function(const GridSpec& spec,
                                const std::function<Complex(const Point&)>& f) {
  GridFunction u{spec, Eigen::ArrayXcd(spec.cell_count())};
  for (Eigen::Index i = 0; i < u.values.size(); ++i) u.values[i] = f(spec.cell_center(i));
  return u;
}

GridFunction zero_grid_function(const GridSpec& spec) {
  return GridFunction{spec, Eigen::ArrayXcd::Zero(spec.cell_count())};
}

double lebesgue_norm(const GridFunction& u, double p) {
  if (std::isinf(p)) return u.values.abs().maxCoeff();
  double hd = u.spec.cell_volume();
  if (p == 1.0) return u.values.abs().sum() * hd;
  if (p == 2.0) return std::sqrt(u.values.abs2().sum() * hd);
  throw std::invalid_argument("lebesgue_norm: p must be 1, 2 or infinity");
}

double distribution_measure(const GridFunction& u, double lambda) {
  static const std::vector<std::uint8_t> kNoExclusion;
  return distribution_measure(u, lambda, kNoExclusion);
}

double distribution_measure(const GridFunction& u, double lambda,
                            const std::vector<std::uint8_t>& exclude) {
  if (!(lambda > 0)) throw std::invalid_argument("distribution_measure: lambda must be > 0");
  if (!exclude.empty() && static_cast<Eigen::Index>(exclude.size()) != u.values.size())
    throw std::invalid_argument("distribution_measure: exclusion mask size mismatch");
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    if (!exclude.empty() && exclude[static_cast<size_t>(i)]) continue;
    if (std::abs(u.values[i]) > lambda) ++count;
  }
  return static_cast<double>(count) * u.spec.cell_volume();
}

namespace {

// Apply a 1-d FFT along `axis` of the row-major d-cube in place.
void fft_axis(Eigen::ArrayXcd& v, const GridSpec& spec, int axis, bool forward) {
  const int n = spec.cells;
  Eigen::Index total = spec.cell_count();
  Eigen::Index lines = total / n;

  // stride between consecutive entries along `axis`
  Eigen::Index stride = 1;
  for (int a = spec.dim - 1; a > axis; --a) stride *= n;

  Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<size_t>(n)), out(static_cast<size_t>(n));
  for (Eigen::Index line = 0; line < lines; ++line) {
    // base index of this line: expand `line` over all axes except `axis`
    Eigen::Index rem = line;
    Eigen::Index base = 0;
    Eigen::Index mult = 1;
    for (int a = spec.dim - 1; a >= 0; --a) {
      if (a == axis) {
        mult *= n;
        continue;
      }
      Eigen::Index idx = rem % n;
      rem /= n;
      base += idx * mult;
      mult *= n;
    }
    for (int i = 0; i < n; ++i) in[static_cast<size_t>(i)] = v[base + i * stride];
    if (forward)
      fft.fwd(out, in);
    else
      fft.inv(out, in);
    for (int i = 0; i < n; ++i) v[base + i * stride] = out[static_cast<size_t>(i)];
  }
}

}  // namespace

GridFunction transform(const GridFunction& u, TransformDirection dir) {
  GridFunction out{u.spec, u.values};
  bool forward = dir == TransformDirection::forward;
  for (int axis = 0; axis < u.spec.dim; ++axis) fft_axis(out.values, u.spec, axis, forward);
  return out;
}

namespace {

template <typename T>
void write_raw(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T value;
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void write_sgrd(const std::filesystem::path& path, const GridFunction& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_sgrd: cannot open " + path.string());
  os.write("SGRD", 4);
  write_raw<std::uint32_t>(os, 1);
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(u.spec.dim));
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(u.spec.cells));
  write_raw<double>(os, u.spec.half_width);
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    write_raw<double>(os, u.values[i].real());
    write_raw<double>(os, u.values[i].imag());
  }
  if (!os) throw std::runtime_error("write_sgrd: write failed for " + path.string());
}

GridFunction read_sgrd(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("read_sgrd: cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "SGRD", 4) != 0)
    throw std::runtime_error("read_sgrd: bad magic in " + path.string());
  auto version = read_raw<std::uint32_t>(is);
  if (version != 1) throw std::runtime_error("read_sgrd: unsupported version");
  int dim = static_cast<int>(read_raw<std::uint32_t>(is));
  int cells = static_cast<int>(read_raw<std::uint32_t>(is));
  double half_width = read_raw<double>(is);
  GridSpec spec = make_grid_spec(dim, cells, half_width);
  GridFunction u{spec, Eigen::ArrayXcd(spec.cell_count())};
  for (Eigen::Index i = 0; i < u.values.size(); ++i) {
    double re = read_raw<double>(is);
    double im = read_raw<double>(is);
    if (!std::isfinite(re) || !std::isfinite(im))
      throw std::runtime_error("read_sgrd: non-finite value in " + path.string());
    u.values[i] = Complex(re, im);
  }
  if (!is) throw std::runtime_error("read_sgrd: truncated file " + path.string());
  return u;
}

}  // namespace singlab
