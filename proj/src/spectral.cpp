#include "fpt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace fpt {

namespace {

constexpr int kMaxIterations = 100000;

// Tarjan's algorithm; k is small so recursion depth is not a concern.
struct Tarjan {
  const Matrix& a;
  std::size_t k;
  std::size_t counter = 0;
  std::vector<long> index, low;
  std::vector<bool> on_stack;
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> components;

  explicit Tarjan(const Matrix& m)
      : a(m), k(static_cast<std::size_t>(m.rows())), index(k, -1), low(k, 0), on_stack(k, false) {}

  void visit(std::size_t v) {
    index[v] = low[v] = static_cast<long>(counter++);
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w = 0; w < k; ++w) {
      if (a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(w)) <= 0.0) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      components.push_back(std::move(comp));
    }
  }
};

long class_period(const Matrix& a) {
  const auto k = static_cast<std::size_t>(a.rows());
  std::vector<long> level(k, -1);
  std::vector<std::size_t> queue{0};
  level[0] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const auto u = queue[h];
    for (std::size_t v = 0; v < k; ++v)
      if (a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0 && level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      }
  }
  long g = 0;
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      if (a(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0)
        g = std::gcd(g, std::labs(level[u] + 1 - level[v]));
  return g;
}

double irreducible_radius(const Matrix& a, double rel_tol) {
  const auto k = a.rows();
  if (k == 1) return a(0, 0);
  const double shift = class_period(a) == 1 ? 0.0 : inf_norm(a);
  Vector x = Vector::Ones(k);
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxIterations; ++it) {
    Vector y = a * x + shift * x;
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    bool positive = true;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (!(x(i) > 0.0) || !(y(i) > 0.0)) {
        positive = false;
        break;
      }
      const double r = y(i) / x(i);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    const double scale = y.maxCoeff();
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw Error(ErrorCode::NoConvergence, "power iteration degenerated");
    x = y / scale;
    if (!positive) continue;
    lo -= shift;
    hi -= shift;
    if (hi - lo <= rel_tol * std::abs(hi)) return 0.5 * (lo + hi);
  }
  throw Error(ErrorCode::NoConvergence, "spectral radius iteration cap reached");
}

}  // namespace

std::vector<std::vector<std::size_t>> strong_components(const Matrix& a) {
  Tarjan t(a);
  for (std::size_t v = 0; v < t.k; ++v)
    if (t.index[v] < 0) t.visit(v);
  return std::move(t.components);
}

bool is_irreducible(const Matrix& a) { return strong_components(a).size() == 1; }

double spectral_radius(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols() || a.rows() == 0)
    throw Error(ErrorCode::BadDimensions, "spectral radius needs a nonempty square matrix");
  if ((a.array() < 0.0).any() || !a.allFinite())
    throw Error(ErrorCode::BadArgs, "spectral radius needs a finite nonnegative matrix");
  double rho = 0.0;
  for (const auto& comp : strong_components(a)) {
    const auto n = static_cast<Eigen::Index>(comp.size());
    Matrix sub(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        sub(i, j) = a(static_cast<Eigen::Index>(comp[static_cast<std::size_t>(i)]),
                      static_cast<Eigen::Index>(comp[static_cast<std::size_t>(j)]));
    if (n == 1 || (sub.array() > 0.0).any()) rho = std::max(rho, irreducible_radius(sub, rel_tol));
  }
  return rho;
}

}  // namespace fpt
