#include "singlab/common.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

namespace singlab {

std::vector<MultiIndex> multi_indices_of_order(int dim, int order) {
  if (dim < 1) throw std::invalid_argument("multi_indices_of_order: dim < 1");
  if (order < 0) throw std::invalid_argument("multi_indices_of_order: order < 0");
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<size_t>(dim), 0);
  // lexicographic enumeration of compositions of `order` into `dim` parts
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == dim - 1) {
      cur[static_cast<size_t>(pos)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int a = remaining; a >= 0; --a) {
      cur[static_cast<size_t>(pos)] = a;
      rec(pos + 1, remaining - a);
    }
  };
  rec(0, order);
  return out;
}

std::vector<MultiIndex> multi_indices_below_order(int dim, int order) {
  std::vector<MultiIndex> out;
  for (int m = 0; m < order; ++m) {
    auto layer = multi_indices_of_order(dim, m);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

double multi_index_factorial(const MultiIndex& alpha) {
  double f = 1.0;
  for (int a : alpha)
    for (int i = 2; i <= a; ++i) f *= i;
  return f;
}

double monomial(const Point& x, const MultiIndex& alpha) {
  if (static_cast<size_t>(x.size()) != alpha.size())
    throw std::invalid_argument("monomial: dimension mismatch");
  double p = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    p *= std::pow(x[i], alpha[static_cast<size_t>(i)]);
  return p;
}

std::string multi_index_label(const MultiIndex& alpha) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < alpha.size(); ++i) {
    if (i) os << ",";
    os << alpha[i];
  }
  os << ")";
  return os.str();
}

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int threads) { g_max_threads.store(threads < 0 ? 0 : threads); }

int max_threads() {
  int cap = g_max_threads.load();
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (cap == 0) return hw;
  return std::min(cap, hw);
}

void parallel_for(Eigen::Index count,
                  const std::function<void(Eigen::Index, Eigen::Index)>& body) {
  if (count <= 0) return;
  int workers = max_threads();
  if (workers <= 1 || count < 256) {
    body(0, count);
    return;
  }
  workers = static_cast<int>(std::min<Eigen::Index>(workers, count));
  Eigen::Index chunk = (count + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    Eigen::Index lo = w * chunk;
    Eigen::Index hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace singlab
