#include "singlab/microlocal.hpp"

#include <cmath>
#include <unordered_map>

namespace singlab {

// Unit vectors bucketed by integer cell; cell size >= query radius makes a
// 3^d cell neighbourhood sufficient for exact radius queries.
struct DirectionNet::SpatialHash {
  double cell = 0;
  int dim = 0;
  std::unordered_map<std::uint64_t, std::vector<Eigen::Index>> buckets;

  std::uint64_t key(const Point& u) const {
    std::uint64_t k = 0;
    for (int a = 0; a < dim; ++a) {
      auto c = static_cast<std::int64_t>(std::floor((u[a] + 2.0) / cell));
      k = k * 0x10001ull + static_cast<std::uint64_t>(c + 1);
    }
    return k;
  }

  void insert(const Point& u, Eigen::Index idx) { buckets[key(u)].push_back(idx); }

  void neighbours(const Point& u, const Eigen::MatrixXd& vectors, double radius,
                  std::vector<Eigen::Index>& out) const {
    out.clear();
    int span = static_cast<int>(std::ceil(radius / cell));
    std::vector<int> offset(static_cast<size_t>(dim), -span);
    while (true) {
      Point shifted(dim);
      for (int a = 0; a < dim; ++a) shifted[a] = u[a] + offset[static_cast<size_t>(a)] * cell;
      auto it = buckets.find(key(shifted));
      if (it != buckets.end()) {
        for (Eigen::Index idx : it->second) {
          if ((vectors.row(idx).transpose() - u).norm() <= radius) out.push_back(idx);
        }
      }
      int axis = dim - 1;
      while (axis >= 0) {
        if (++offset[static_cast<size_t>(axis)] <= span) break;
        offset[static_cast<size_t>(axis)] = -span;
        --axis;
      }
      if (axis < 0) break;
    }
  }
};

std::vector<Eigen::Index> DirectionNet::near(const Point& u, double radius) const {
  std::vector<Eigen::Index> out;
  if (hash_ && radius <= hash_->cell) {
    hash_->neighbours(u, vectors, radius, out);
    return out;
  }
  for (Eigen::Index v = 0; v < count(); ++v)
    if ((vectors.row(v).transpose() - u).norm() <= radius) out.push_back(v);
  return out;
}

DirectionNet direction_net(int n, double gamma, int dim, const SphereQuadrature& quad,
                           double max_spacing_fraction) {
  if (n < 2) throw std::invalid_argument("direction_net: n must be >= 2");
  if (!(gamma > 0 && gamma < 1))
    throw std::invalid_argument("direction_net: gamma must lie in (0, 1)");
  if (quad.dim != dim) throw std::invalid_argument("direction_net: quadrature dimension mismatch");
  double separation = std::exp2(-n * gamma - 4.0);
  if (!(separation < 1)) throw std::invalid_argument("direction_net: separation must be < 1");
  if (quad.node_spacing() > separation * max_spacing_fraction)
    throw std::invalid_argument(
        "direction_net: quadrature too coarse for separation " + std::to_string(separation) +
        " (node spacing " + std::to_string(quad.node_spacing()) + ")");

  // sweep hash at cell size s: rejection only ever needs the adjacent cells
  DirectionNet::SpatialHash sweep;
  sweep.cell = separation;
  sweep.dim = dim;

  std::vector<Point> kept;
  std::vector<int> offset(static_cast<size_t>(dim));
  for (Eigen::Index i = 0; i < quad.count(); ++i) {
    Point u = quad.node(i);
    bool free = true;
    // first-fit: accept unless some selected vector is strictly closer than s
    std::fill(offset.begin(), offset.end(), -1);
    while (free) {
      Point shifted(dim);
      for (int a = 0; a < dim; ++a) shifted[a] = u[a] + offset[static_cast<size_t>(a)] * sweep.cell;
      auto it = sweep.buckets.find(sweep.key(shifted));
      if (it != sweep.buckets.end()) {
        for (Eigen::Index idx : it->second) {
          if ((kept[static_cast<size_t>(idx)] - u).norm() < separation) {
            free = false;
            break;
          }
        }
      }
      int axis = dim - 1;
      while (axis >= 0) {
        if (++offset[static_cast<size_t>(axis)] <= 1) break;
        offset[static_cast<size_t>(axis)] = -1;
        --axis;
      }
      if (axis < 0) break;
    }
    if (free) {
      sweep.insert(u, static_cast<Eigen::Index>(kept.size()));
      kept.push_back(u);
    }
  }

  DirectionNet net;
  net.n = n;
  net.gamma = gamma;
  net.dim = dim;
  net.separation = separation;
  net.vectors.resize(static_cast<Eigen::Index>(kept.size()), dim);
  for (size_t v = 0; v < kept.size(); ++v)
    net.vectors.row(static_cast<Eigen::Index>(v)) = kept[v].transpose();
  // query hash at the cap radius used by the partition symbols
  auto hash = std::make_shared<DirectionNet::SpatialHash>();
  hash->cell = std::exp2(-n * gamma);
  hash->dim = dim;
  for (Eigen::Index v = 0; v < net.count(); ++v) hash->insert(net.vector(v), v);
  net.hash_ = hash;
  return net;
}

DirectionNet make_direction_net(int n, double gamma, int dim, const Eigen::MatrixXd& vectors) {
  if (vectors.cols() != dim) throw std::invalid_argument("make_direction_net: column count != dim");
  DirectionNet net;
  net.n = n;
  net.gamma = gamma;
  net.dim = dim;
  net.separation = std::exp2(-n * gamma - 4.0);
  net.vectors = vectors;
  auto hash = std::make_shared<DirectionNet::SpatialHash>();
  hash->cell = std::exp2(-n * gamma);
  hash->dim = dim;
  std::vector<Eigen::Index> close;
  for (Eigen::Index v = 0; v < vectors.rows(); ++v) {
    Point u = vectors.row(v).transpose();
    if (std::abs(u.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("make_direction_net: vectors must be unit length");
    hash->neighbours(u, net.vectors, net.separation, close);
    for (Eigen::Index w : close)
      if ((vectors.row(w).transpose() - u).norm() < net.separation)
        throw std::invalid_argument("make_direction_net: separation violated");
    hash->insert(u, v);
  }
  net.hash_ = hash;
  return net;
}

std::vector<MultiplierSymbol> partition_of_unity(const DirectionNet& net,
                                                 const BumpProfile& zeta) {
  if (zeta.kind != ProfileKind::zeta_cap)
    throw std::invalid_argument("partition_of_unity: profile must be the cap cutoff");
  double cap = std::exp2(-net.n * net.gamma);  // zeta support radius on the sphere
  auto shared_net = std::make_shared<DirectionNet>(net);
  auto zeta_eval = zeta.eval;
  std::vector<MultiplierSymbol> family;
  family.reserve(static_cast<size_t>(net.count()));
  for (Eigen::Index v = 0; v < net.count(); ++v) {
    MultiplierSymbol m;
    m.homogeneous = true;
    m.label = "cap_partition[" + std::to_string(v) + "]";
    m.eval = [shared_net, zeta_eval, cap, v](const Point& xi) -> Complex {
      double r = xi.norm();
      if (r == 0.0) return Complex(1.0 / static_cast<double>(shared_net->count()), 0.0);
      Point u = xi / r;
      double denom = 0;
      for (Eigen::Index w : shared_net->near(u, cap))
        denom += zeta_eval((u - shared_net->vector(w)).norm() / cap);
      if (denom < 1e-12)
        throw std::runtime_error("partition_of_unity: covering violated at a direction");
      double numer = zeta_eval((u - shared_net->vector(v)).norm() / cap);
      return Complex(numer / denom, 0.0);
    };
    family.push_back(std::move(m));
  }
  return family;
}

MultiplierSymbol directional_symbol(const Point& e, int n, double gamma,
                                    const BumpProfile& Phi) {
  if (Phi.kind != ProfileKind::Phi_plateau)
    throw std::invalid_argument("directional_symbol: profile must be the plateau cutoff");
  Point unit = e / e.norm();
  double scale = std::exp2(n * gamma);
  auto plateau = Phi.eval;
  MultiplierSymbol m;
  m.homogeneous = true;
  m.label = "directional_plateau";
  m.eval = [unit, scale, plateau](const Point& xi) -> Complex {
    double r = xi.norm();
    if (r == 0.0) return Complex(1.0, 0.0);  // plateau value carries the mean
    return Complex(plateau(scale * unit.dot(xi) / r), 0.0);
  };
  return m;
}

LittlewoodPaleyPair lp_symbols(int k, const BumpProfile& psi) {
  if (psi.kind != ProfileKind::psi_lowpass)
    throw std::invalid_argument("lp_symbols: profile must be the low-pass cutoff");
  auto cut = psi.eval;
  double scale = std::exp2(k);
  LittlewoodPaleyPair pair;
  pair.lowpass.homogeneous = false;
  pair.lowpass.label = "lowpass[" + std::to_string(k) + "]";
  pair.lowpass.eval = [cut, scale](const Point& xi) {
    return Complex(cut(scale * xi.norm()), 0.0);
  };
  pair.band.homogeneous = false;
  pair.band.label = "band[" + std::to_string(k) + "]";
  pair.band.eval = [cut, scale](const Point& xi) {
    double r = xi.norm();
    return Complex(cut(scale * r) - cut(2.0 * scale * r), 0.0);
  };
  return pair;
}

GridFunction apply_multiplier(const MultiplierSymbol& m, const GridFunction& u) {
  GridFunction hat = transform(u, TransformDirection::forward);
  for (Eigen::Index i = 0; i < hat.values.size(); ++i) {
    Complex mv = m(u.spec.frequency(i));
    if (!std::isfinite(std::abs(mv)))
      throw std::runtime_error("apply_multiplier: symbol '" + m.label +
                               "' non-finite at a lattice frequency");
    hat.values[i] *= mv;
  }
  return transform(hat, TransformDirection::inverse);
}

namespace {

Complex central_derivative(const MultiplierSymbol& m, const Point& xi, int i, int j,
                           double step) {
  Point ei = Point::Zero(xi.size());
  ei[i] = step;
  if (j < 0) return (m(xi + ei) - m(xi - ei)) / (2.0 * step);
  if (i == j) return (m(xi + ei) - 2.0 * m(xi) + m(xi - ei)) / (step * step);
  Point ej = Point::Zero(xi.size());
  ej[j] = step;
  return (m(xi + ei + ej) - m(xi + ei - ej) - m(xi - ei + ej) + m(xi - ei - ej)) /
         (4.0 * step * step);
}

double deriv_bound_at(const MultiplierSymbol& m, const Point& xi, int dim, int max_order,
                      double step) {
  double r = xi.norm();
  double worst = 0;
  for (int i = 0; i < dim; ++i) {
    worst = std::max(worst, std::abs(central_derivative(m, xi, i, -1, step)) * r);
    if (max_order >= 2)
      for (int j = i; j < dim; ++j)
        worst = std::max(worst, std::abs(central_derivative(m, xi, i, j, step)) * r * r);
  }
  return worst;
}

}  // namespace

MihlinEstimate mihlin_estimate(const MultiplierSymbol& m, int dim,
                               const std::vector<Point>& sample_frequencies, double fd_step) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("mihlin_estimate: derivative orders implemented for d in {2,3}");
  if (!(fd_step > 0)) throw std::invalid_argument("mihlin_estimate: fd_step must be positive");
  if (sample_frequencies.empty())
    throw std::invalid_argument("mihlin_estimate: no sample frequencies");
  int max_order = dim / 2 + 1;  // floor(d/2) + 1, here always 2

  MihlinEstimate est;
  double est_half = 0;
  for (const Point& xi : sample_frequencies) {
    double r = xi.norm();
    if (!(r > 0)) throw std::invalid_argument("mihlin_estimate: samples must avoid xi = 0");
    est.sup_norm = std::max(est.sup_norm, std::abs(m(xi)));
    est.deriv_bound = std::max(est.deriv_bound, deriv_bound_at(m, xi, dim, max_order, fd_step * r));
    est_half = std::max(est_half, deriv_bound_at(m, xi, dim, max_order, 0.5 * fd_step * r));
  }
  double scale = std::max(est.deriv_bound, est_half);
  if (scale > 0 && std::abs(est.deriv_bound - est_half) > 0.5 * scale)
    throw std::runtime_error(
        "mihlin_estimate: step-halving disagreement above 50%; fd_step too large for the "
        "symbol oscillation");
  est.deriv_bound = est_half;  // the finer step is the better estimate
  return est;
}

OverlapStats overlap_count(const DirectionNet& net, const BumpProfile& Phi,
                           const std::vector<Point>& xi_samples) {
  if (Phi.kind != ProfileKind::Phi_plateau)
    throw std::invalid_argument("overlap_count: profile must be the plateau cutoff");
  double scale = std::exp2(net.n * net.gamma);
  OverlapStats stats;
  for (const Point& xi : xi_samples) {
    Point u = xi / xi.norm();
    int count = 0;
    double square_sum = 0;
    // Phi(scale * <e_v, u>) vanishes once |<e_v, u>| > 4/scale; for unit
    // vectors that forces |e_v -/+ u_perp...| to lie in a slab around the
    // great circle orthogonal to u, but scanning the whole net stays exact.
    for (Eigen::Index v = 0; v < net.count(); ++v) {
      double value = Phi(scale * net.vectors.row(v).dot(u));
      if (value != 0.0) {
        ++count;
        square_sum += value * value;
      }
    }
    stats.max_count = std::max(stats.max_count, count);
    stats.max_square_sum = std::max(stats.max_square_sum, square_sum);
  }
  return stats;
}

AdmissibilityResult admissible_parameters(const AdmissibilityParams& p) {
  if (p.dim < 2) throw std::invalid_argument("admissible_parameters: dimension must be >= 2");
  if (!(p.delta > 0.0) || p.delta > 1.0)
    throw std::invalid_argument("admissible_parameters: delta must lie in (0, 1]");
  if (p.N1 < 1) throw std::invalid_argument("admissible_parameters: N1 must be a positive integer");
  if (p.gamma < 0 || p.iota < 0 || p.eps0 < 0 || p.mu < 0)
    throw std::invalid_argument("admissible_parameters: parameters must be nonnegative");
  double half = std::floor(p.dim / 2.0) + 1.0;
  AdmissibilityResult r;
  r.s1 = p.mu + p.gamma * (p.dim - 1) + p.gamma * half - 1.0 + p.eps0 + p.iota;
  r.s2 = p.mu + p.gamma * (p.dim - 1) + p.gamma * half - 1.0 + p.iota;
  r.s3 = p.mu + p.gamma * (p.dim - 1) + p.gamma * half - p.delta + p.iota;
  r.s4 = -p.eps0 * p.N1 + p.gamma * p.N1 + 2.0 * half * p.gamma + p.iota;
  r.admissible = r.max_exponent() < 0.0;
  return r;
}

}  // namespace singlab
