#include "singlab/kernels.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace singlab {

namespace {

double dist(const Point& x, const Point& y) { return (x - y).norm(); }

void require_dim(int dim, const char* who) {
  if (dim != 2 && dim != 3) throw std::invalid_argument(std::string(who) + ": dim must be 2 or 3");
}

}  // namespace

KernelSpec make_power_kernel(int dim) {
  require_dim(dim, "make_power_kernel");
  KernelSpec k;
  k.dim = dim;
  k.holder_delta = 1.0;
  k.label = "power";
  k.translation_invariant = true;
  k.offset_eval = [dim](const Point& z) { return Complex(std::pow(z.norm(), -dim), 0.0); };
  k.eval = [dim](const Point& x, const Point& y) {
    return Complex(std::pow(dist(x, y), -dim), 0.0);
  };
  return k;
}

KernelSpec make_commutator_kernel(int dim, const LipschitzField& A) {
  require_dim(dim, "make_commutator_kernel");
  KernelSpec k;
  k.dim = dim;
  k.holder_delta = 1.0;
  k.label = "commutator[" + A.label + "]";
  auto a = A.value;
  k.eval = [dim, a](const Point& x, const Point& y) {
    double r = dist(x, y);
    return Complex((a(x) - a(y)) * std::pow(r, -dim - 1), 0.0);
  };
  return k;
}

KernelSpec make_higher_kernel(int dim, const LipschitzField& A, int order) {
  require_dim(dim, "make_higher_kernel");
  if (order < 1) throw std::invalid_argument("make_higher_kernel: order k must be >= 1");
  KernelSpec k;
  k.dim = dim;
  k.holder_delta = 1.0;
  std::ostringstream label;
  label << "higher:" << order << "[" << A.label << "]";
  k.label = label.str();
  auto a = A.value;
  k.eval = [dim, order, a](const Point& x, const Point& y) {
    double r = dist(x, y);
    double slope = (a(x) - a(y)) / r;
    return Complex(std::pow(slope, order) * std::pow(r, -dim), 0.0);
  };
  return k;
}

KernelSpec make_general_kernel(int dim, const LipschitzField& A, const AnalyticProfile& F) {
  require_dim(dim, "make_general_kernel");
  if (F.radius < A.grad_bound)
    throw std::invalid_argument("make_general_kernel: profile validity radius " +
                                std::to_string(F.radius) + " below the field gradient bound " +
                                std::to_string(A.grad_bound));
  // evenness spot check, per the analytic-profile contract
  for (double t : {0.1, 0.37, 0.81}) {
    double s = std::min(t, 0.9) * std::min(F.radius, 1.0);
    if (std::abs(F.value(s) - F.value(-s)) > 1e-12 * (1.0 + std::abs(F.value(s))))
      throw std::invalid_argument("make_general_kernel: profile '" + F.label + "' is not even");
  }
  KernelSpec k;
  k.dim = dim;
  k.holder_delta = 1.0;
  k.label = "general[" + F.label + "," + A.label + "]";
  auto a = A.value;
  auto f = F.value;
  k.eval = [dim, a, f](const Point& x, const Point& y) {
    double r = dist(x, y);
    return Complex(f((a(x) - a(y)) / r) * std::pow(r, -dim), 0.0);
  };
  return k;
}

double taylor_remainder(const LipschitzField& A, int l, const Point& x, const Point& y) {
  double s = A.value(x) - A.value(y);
  for (int m = 1; m < l; ++m) {
    for (const auto& alpha : multi_indices_of_order(A.dim, m)) {
      auto it = A.derivatives.find(alpha);
      if (it == A.derivatives.end())
        throw std::invalid_argument("taylor_remainder: field '" + A.label +
                                    "' lacks derivative " + multi_index_label(alpha));
      s -= it->second(y) * monomial(x - y, alpha) / multi_index_factorial(alpha);
    }
  }
  return s;
}

KernelSpec make_bajsanski_coifman_kernel(int dim, const LipschitzField& A, int l) {
  require_dim(dim, "make_bajsanski_coifman_kernel");
  if (l < 1) throw std::invalid_argument("make_bajsanski_coifman_kernel: l must be >= 1");
  for (int m = 1; m < l; ++m)
    for (const auto& alpha : multi_indices_of_order(dim, m))
      if (!A.derivatives.count(alpha))
        throw std::invalid_argument("make_bajsanski_coifman_kernel: field '" + A.label +
                                    "' lacks derivative " + multi_index_label(alpha));
  for (const auto& alpha : multi_indices_of_order(dim, l))
    if (!A.sup_bounds.count(alpha))
      throw std::invalid_argument("make_bajsanski_coifman_kernel: field '" + A.label +
                                  "' lacks a sup bound at order " + std::to_string(l));
  KernelSpec k;
  k.dim = dim;
  k.holder_delta = 1.0;
  std::ostringstream label;
  label << "bc:" << l << "[" << A.label << "]";
  k.label = label.str();
  LipschitzField field = A;
  k.eval = [dim, l, field](const Point& x, const Point& y) {
    double r = dist(x, y);
    return Complex(taylor_remainder(field, l, x, y) * std::pow(r, -dim - l), 0.0);
  };
  return k;
}

KernelSpec make_muckenhoupt_kernel(int dim, double r) {
  require_dim(dim, "make_muckenhoupt_kernel");
  if (r == 0.0)
    throw std::invalid_argument(
        "make_muckenhoupt_kernel: r = 0 degenerates to the power kernel; use 'power'");
  KernelSpec k;
  k.dim = dim;
  k.holder_delta = 1.0;
  k.label = "muckenhoupt:" + std::to_string(r);
  k.translation_invariant = true;
  k.real_valued = false;
  k.offset_eval = [dim, r](const Point& z) {
    double rho = z.norm();
    // |z|^{-d-ir} = |z|^{-d} e^{-i r ln|z|}
    return std::polar(std::pow(rho, -dim), -r * std::log(rho));
  };
  auto off = k.offset_eval;
  k.eval = [off](const Point& x, const Point& y) { return off(x - y); };
  return k;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

const LipschitzField& require_field(const std::optional<LipschitzField>& A,
                                    const std::string& key) {
  if (!A) throw std::invalid_argument("make_kernel: family '" + key + "' needs a field A");
  return *A;
}

}  // namespace

KernelSpec make_kernel(const std::string& key, int dim, const std::optional<LipschitzField>& A,
                       const std::optional<AnalyticProfile>& F) {
  auto head_arg = split(key, ':');
  const std::string& family = head_arg[0];
  if (family == "power") return make_power_kernel(dim);
  if (family == "commutator") return make_commutator_kernel(dim, require_field(A, key));
  if (family == "higher") {
    if (head_arg.size() != 2) throw std::invalid_argument("make_kernel: expected 'higher:k'");
    return make_higher_kernel(dim, require_field(A, key), std::stoi(head_arg[1]));
  }
  if (family == "general") {
    if (!F) throw std::invalid_argument("make_kernel: 'general' needs a profile F");
    return make_general_kernel(dim, require_field(A, key), *F);
  }
  if (family == "bc") {
    if (head_arg.size() != 2) throw std::invalid_argument("make_kernel: expected 'bc:l'");
    return make_bajsanski_coifman_kernel(dim, require_field(A, key), std::stoi(head_arg[1]));
  }
  if (family == "muckenhoupt") {
    if (head_arg.size() != 2) throw std::invalid_argument("make_kernel: expected 'muckenhoupt:r'");
    return make_muckenhoupt_kernel(dim, std::stod(head_arg[1]));
  }
  throw std::invalid_argument("make_kernel: unknown family '" + family + "'");
}

LipschitzField field_sample(const std::string& key, int dim) {
  require_dim(dim, "field_sample");
  LipschitzField A;
  A.dim = dim;
  A.label = key;
  auto parts = split(key, ':');
  if (parts[0] == "linear") {
    if (parts.size() != 2)
      throw std::invalid_argument("field_sample: expected 'linear:a1,a2[,a3]'");
    auto comps = split(parts[1], ',');
    if (static_cast<int>(comps.size()) != dim)
      throw std::invalid_argument("field_sample: linear field needs one slope per axis");
    Point a(dim);
    for (int i = 0; i < dim; ++i) a[i] = std::stod(comps[static_cast<size_t>(i)]);
    A.value = [a](const Point& x) { return a.dot(x); };
    A.grad_bound = a.norm();
    for (int i = 0; i < dim; ++i) {
      MultiIndex alpha(static_cast<size_t>(dim), 0);
      alpha[static_cast<size_t>(i)] = 1;
      double ai = a[i];
      A.derivatives[alpha] = [ai](const Point&) { return ai; };
    }
    for (int order = 2; order <= 3; ++order)
      for (const auto& alpha : multi_indices_of_order(dim, order)) {
        A.derivatives[alpha] = [](const Point&) { return 0.0; };
        A.sup_bounds[alpha] = 0.0;
      }
    return A;
  }
  if (key == "sqrt1p") {
    // A(x) = sqrt(1 + |x|^2): |grad A| < 1, all second derivatives bounded by 1
    A.value = [](const Point& x) { return std::sqrt(1.0 + x.squaredNorm()); };
    A.grad_bound = 1.0;
    for (int i = 0; i < dim; ++i) {
      MultiIndex alpha(static_cast<size_t>(dim), 0);
      alpha[static_cast<size_t>(i)] = 1;
      A.derivatives[alpha] = [i](const Point& x) {
        return x[i] / std::sqrt(1.0 + x.squaredNorm());
      };
    }
    for (const auto& alpha : multi_indices_of_order(dim, 2)) {
      int i = -1, j = -1;
      for (int t = 0; t < dim; ++t) {
        if (alpha[static_cast<size_t>(t)] >= 1 && i < 0)
          i = t;
        else if (alpha[static_cast<size_t>(t)] >= 1)
          j = t;
      }
      if (j < 0) j = i;
      A.derivatives[alpha] = [i, j](const Point& x) {
        double w2 = 1.0 + x.squaredNorm();
        double w = std::sqrt(w2);
        double kron = i == j ? 1.0 : 0.0;
        return kron / w - x[i] * x[j] / (w2 * w);
      };
      A.sup_bounds[alpha] = 1.0;
    }
    return A;
  }
  if (key == "quadratic") {
    // A(x) = x1^2; the gradient bound is the sup over the default sampling
    // boxes (|x1| <= 8), not a global one
    A.value = [](const Point& x) { return x[0] * x[0]; };
    A.grad_bound = 16.0;
    for (int i = 0; i < dim; ++i) {
      MultiIndex alpha(static_cast<size_t>(dim), 0);
      alpha[static_cast<size_t>(i)] = 1;
      A.derivatives[alpha] = [i](const Point& x) { return i == 0 ? 2.0 * x[0] : 0.0; };
    }
    for (const auto& alpha : multi_indices_of_order(dim, 2)) {
      bool is_11 = alpha[0] == 2;
      A.derivatives[alpha] = [is_11](const Point&) { return is_11 ? 2.0 : 0.0; };
      A.sup_bounds[alpha] = is_11 ? 2.0 : 0.0;
    }
    return A;
  }
  throw std::invalid_argument("field_sample: unknown key '" + key + "'");
}

AnalyticProfile analytic_profile_sample(const std::string& key) {
  if (key == "cosh") {
    AnalyticProfile F;
    F.value = [](double t) { return std::cosh(t); };
    F.deriv = [](double t) { return std::sinh(t); };
    F.radius = std::numeric_limits<double>::infinity();
    F.label = "cosh";
    return F;
  }
  throw std::invalid_argument("analytic_profile_sample: unknown key '" + key + "'");
}

namespace {

class PairSampler {
 public:
  PairSampler(int dim, const SamplerConfig& cfg)
      : dim_(dim), cfg_(cfg), rng_(cfg.seed), unit_(0.0, 1.0) {
    if (!(cfg.r_min > 0 && cfg.r_max > cfg.r_min))
      throw std::invalid_argument("SamplerConfig: need 0 < r_min < r_max");
  }

  // anchor with log-uniform radius: the sup of the regularity quotients for
  // curved fields sits at unit scale, which a uniform box draw undersamples
  Point anchor_point() {
    double radius = log_uniform(std::max(cfg_.r_min, 1e-3), cfg_.box_halfwidth);
    return radius * direction();
  }

  Point direction() {
    Point u(dim_);
    if (dim_ == 2) {
      double phi = kTwoPi * unit_(rng_);
      u[0] = std::cos(phi);
      u[1] = std::sin(phi);
    } else {
      double z = 2.0 * unit_(rng_) - 1.0;
      double phi = kTwoPi * unit_(rng_);
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      u[0] = rho * std::cos(phi);
      u[1] = rho * std::sin(phi);
      u[2] = z;
    }
    return u;
  }

  double log_uniform(double lo, double hi) {
    return lo * std::exp(unit_(rng_) * std::log(hi / lo));
  }

  // x != y with |x - y| log-uniform over the configured scale range
  std::pair<Point, Point> pair() {
    Point x = anchor_point();
    double r = log_uniform(cfg_.r_min, cfg_.r_max);
    Point y = x - r * direction();
    return {x, y};
  }

 private:
  int dim_;
  SamplerConfig cfg_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_;
};

Point cross_product(const Point& a, const Point& b) {
  Point c(3);
  c[0] = a[1] * b[2] - a[2] * b[1];
  c[1] = a[2] * b[0] - a[0] * b[2];
  c[2] = a[0] * b[1] - a[1] * b[0];
  return c;
}

// Direction stencil spanned by a unit vector: both radial signs, a
// tangential direction, and a diagonal between them (two tangentials for
// d = 3).
std::vector<Point> frame_directions(const Point& u) {
  int dim = static_cast<int>(u.size());
  std::vector<Point> dirs;
  Point t(dim);
  if (dim == 2) {
    t[0] = -u[1];
    t[1] = u[0];
  } else {
    Point axis = Point::Zero(dim);
    axis[std::abs(u[0]) < 0.9 ? 0 : 1] = 1.0;
    t = cross_product(u, axis);
    t /= t.norm();
  }
  dirs.push_back(u);
  dirs.push_back(-u);
  dirs.push_back(t);
  Point diag = u + t;
  dirs.push_back(diag / diag.norm());
  if (dim == 3) dirs.push_back(cross_product(u, t));
  return dirs;
}

}  // namespace

double check_size(const KernelSpec& kernel, const SamplerConfig& sampler, int count) {
  if (count < 1) throw std::invalid_argument("check_size: count must be >= 1");
  PairSampler gen(kernel.dim, sampler);
  double worst = 0;
  for (int i = 0; i < count; ++i) {
    auto [x, y] = gen.pair();
    Complex v = kernel(x, y);
    if (!std::isfinite(std::abs(v))) {
      std::ostringstream os;
      os << "check_size: kernel '" << kernel.label << "' non-finite at |x-y|=" << dist(x, y);
      throw std::runtime_error(os.str());
    }
    // |K| / r^{-d} rather than |K| * r^d: dividing by the same power the
    // kernels evaluate keeps the power-kernel quotient exactly 1
    worst = std::max(worst, std::abs(v) / std::pow(dist(x, y), -kernel.dim));
  }
  return worst;
}

RegularityEstimate check_regularity(const KernelSpec& kernel, const SamplerConfig& sampler,
                                    int count) {
  if (count < 1) throw std::invalid_argument("check_regularity: count must be >= 1");
  const double delta = kernel.holder_delta;
  // split fractions |x1 - x2| / |x1 - y|; all below the 1/2 separation line
  const double rhos[] = {0.4, 0.1, 0.025, 0.00625};
  RegularityEstimate est;

  // Random anchor and scale per sample; a deterministic direction stencil
  // inside each sample sweeps the alignment corners that a fully random
  // draw visits too rarely for a stable sup.
  PairSampler gen(kernel.dim, sampler);
  for (int i = 0; i < count; ++i) {
    auto [far_point, near_point] = gen.pair();
    double r = dist(far_point, near_point);
    auto dirs = frame_directions(((near_point - far_point) / r).eval());
    for (const Point& e : dirs) {
      for (double rho : rhos) {
        Point shifted = near_point + (rho * r) * e;
        if (!(r > 2.0 * (near_point - shifted).norm()))
          throw std::logic_error("check_regularity: separation precondition violated");
        // first slot: (x1, x2, y) = (near, shifted, far)
        double q1 = std::abs(kernel(near_point, far_point) - kernel(shifted, far_point)) *
                    std::pow(r, kernel.dim + delta) / std::pow(rho * r, delta);
        est.first_slot = std::max(est.first_slot, q1);
        // second slot: (x, y1, y2) = (far, near, shifted)
        double q2 = std::abs(kernel(far_point, near_point) - kernel(far_point, shifted)) *
                    std::pow(r, kernel.dim + delta) / std::pow(rho * r, delta);
        est.second_slot = std::max(est.second_slot, q2);
      }
    }
  }
  return est;
}

int mollifier_level(int n, double delta) {
  if (n < 2) throw std::invalid_argument("mollifier_level: n must be >= 2");
  if (!(delta > 0.0) || delta > 1.0)
    throw std::invalid_argument("mollifier_level: delta must lie in (0, 1]");
  return static_cast<int>(std::floor(2.0 * std::log2(static_cast<double>(n)) / delta + 1e-12)) +
         2;
}

double lipschitz_ratio(const LipschitzField& A, const SamplerConfig& sampler, int count) {
  PairSampler gen(A.dim, sampler);
  double worst = 0;
  for (int i = 0; i < count; ++i) {
    auto [x, y] = gen.pair();
    worst = std::max(worst, std::abs(A.value(x) - A.value(y)) / ((x - y).norm() * A.grad_bound));
  }
  return worst;
}

DyadicPiece dyadic_piece(const KernelSpec& kernel, int j, const BumpProfile& phi) {
  if (phi.kind != ProfileKind::phi_annulus)
    throw std::invalid_argument("dyadic_piece: profile must be the annulus bump");
  DyadicPiece piece;
  piece.base = kernel;
  piece.scale_j = j;
  piece.phi = phi;
  double scale = std::ldexp(1.0, j);
  piece.support_lo = 0.5 * scale;
  piece.support_hi = 2.0 * scale;
  auto base_eval = kernel.eval;
  auto bump = phi.eval;
  double lo = piece.support_lo, hi = piece.support_hi;
  piece.eval = [base_eval, bump, scale, lo, hi](const Point& x, const Point& y) {
    double r = (x - y).norm();
    if (r < lo || r > hi) return Complex(0.0, 0.0);
    return bump(r / scale) * base_eval(x, y);
  };
  piece.translation_invariant = kernel.translation_invariant;
  if (kernel.translation_invariant) {
    auto base_off = kernel.offset_eval;
    piece.offset_eval = [base_off, bump, scale, lo, hi](const Point& z) {
      double r = z.norm();
      if (r < lo || r > hi) return Complex(0.0, 0.0);
      return bump(r / scale) * base_off(z);
    };
  }
  return piece;
}

namespace {

// Normalized tensor-grid mollifier rule on the unit ball.
struct MollifierRule {
  Eigen::MatrixXd offsets;  // one row per node
  Eigen::VectorXd weights;  // sums to 1
};

std::shared_ptr<const MollifierRule> build_mollifier_rule(const BumpProfile& eta, int dim,
                                                          int resolution) {
  auto rule = std::make_shared<MollifierRule>();
  double hu = 2.0 / resolution;
  std::vector<Point> nodes;
  std::vector<double> weights;
  std::vector<int> idx(static_cast<size_t>(dim), 0);
  Eigen::Index total = 1;
  for (int a = 0; a < dim; ++a) total *= resolution;
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::Index rem = flat;
    Point u(dim);
    for (int a = dim - 1; a >= 0; --a) {
      u[a] = -1.0 + (static_cast<double>(rem % resolution) + 0.5) * hu;
      rem /= resolution;
    }
    double w = eta(u.norm());
    if (w > 0.0) {
      nodes.push_back(u);
      weights.push_back(w);
    }
  }
  rule->offsets.resize(static_cast<Eigen::Index>(nodes.size()), dim);
  rule->weights.resize(static_cast<Eigen::Index>(nodes.size()));
  double mass = 0;
  for (double w : weights) mass += w;
  for (size_t i = 0; i < nodes.size(); ++i) {
    rule->offsets.row(static_cast<Eigen::Index>(i)) = nodes[i].transpose();
    rule->weights[static_cast<Eigen::Index>(i)] = weights[i] / mass;
  }
  return rule;
}

}  // namespace

DyadicPiece mollified_piece(const DyadicPiece& piece, int n, const BumpProfile& eta,
                            int quad_resolution) {
  if (quad_resolution < 16)
    throw std::invalid_argument("mollified_piece: quadrature resolution below the floor of 16");
  if (eta.kind != ProfileKind::eta_mollifier || eta.support_hi > 1.0)
    throw std::invalid_argument("mollified_piece: profile must be a unit-ball mollifier");
  if (piece.mollify_n)
    throw std::invalid_argument("mollified_piece: piece is already mollified");
  int level = mollifier_level(n, piece.base.holder_delta);

  DyadicPiece out = piece;
  out.mollify_n = n;
  out.mollify_level = level;
  out.eta = eta;
  double scale = std::ldexp(1.0, piece.scale_j);
  out.support_lo = 0.25 * scale;
  out.support_hi = 4.0 * scale;

  auto rule = build_mollifier_rule(eta, piece.base.dim, quad_resolution);
  double ball = std::ldexp(1.0, piece.scale_j - level);
  auto inner = piece.eval;
  double lo = out.support_lo, hi = out.support_hi;
  out.eval = [rule, inner, ball, lo, hi](const Point& x, const Point& y) {
    double r = (x - y).norm();
    if (r < lo || r > hi) return Complex(0.0, 0.0);
    Complex acc(0.0, 0.0);
    for (Eigen::Index q = 0; q < rule->weights.size(); ++q) {
      Point shifted = x - ball * rule->offsets.row(q).transpose();
      acc += rule->weights[q] * inner(shifted, y);
    }
    return acc;
  };
  out.translation_invariant = piece.translation_invariant;
  if (piece.translation_invariant) {
    auto inner_off = piece.offset_eval;
    out.offset_eval = [rule, inner_off, ball, lo, hi](const Point& z) {
      double r = z.norm();
      if (r < lo || r > hi) return Complex(0.0, 0.0);
      Complex acc(0.0, 0.0);
      for (Eigen::Index q = 0; q < rule->weights.size(); ++q)
        acc += rule->weights[q] * inner_off(z - ball * rule->offsets.row(q).transpose());
      return acc;
    };
  }
  return out;
}

}  // namespace singlab
