#pragma once

// Slow, independent reference computations used only by the tests.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// probs[(i*k + j)*(n+1) + e] by enumerating every state path of length n.
inline std::vector<double> enumerate_tensor(const Matrix& b, const Vector& eps, std::size_t n) {
  const std::size_t k = static_cast<std::size_t>(b.rows());
  std::vector<double> out(k * k * (n + 1), 0.0);
  std::vector<std::size_t> path(n + 1);
  std::size_t total = 1;
  for (std::size_t s = 0; s < n; ++s) total *= k;
  for (std::size_t start = 0; start < k; ++start) {
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      path[0] = start;
      for (std::size_t s = 1; s <= n; ++s) {
        path[s] = c % k;
        c /= k;
      }
      double p = 1.0;
      for (std::size_t s = 0; s < n; ++s) p *= b(path[s], path[s + 1]);
      if (p == 0.0) continue;
      // Erasure count along a fixed path: Poisson-binomial by direct DP.
      std::vector<double> poly(n + 1, 0.0);
      poly[0] = 1.0;
      for (std::size_t s = 0; s < n; ++s) {
        const double e = eps(path[s]);
        for (std::size_t j = s + 1; j-- > 0;) {
          poly[j + 1] += e * poly[j];
          poly[j] *= 1.0 - e;
        }
      }
      for (std::size_t e = 0; e <= n; ++e) out[(start * k + path[n]) * (n + 1) + e] += p * poly[e];
    }
  }
  return out;
}

// Failure rate of a uniformly random p x e binary matrix having rank < e,
// by exhaustive enumeration (p*e <= 20).
inline double rank_deficient_fraction(std::size_t p, std::size_t e) {
  if (e == 0) return 0.0;
  const std::size_t bits = p * e;
  std::size_t deficient = 0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << bits); ++m) {
    std::vector<std::uint64_t> cols(e);
    for (std::size_t c = 0; c < e; ++c) cols[c] = (m >> (c * p)) & ((std::uint64_t{1} << p) - 1);
    std::size_t rank = 0;
    for (std::size_t bit = 0; bit < p && rank < e; ++bit) {
      std::size_t piv = rank;
      while (piv < e && !((cols[piv] >> bit) & 1U)) ++piv;
      if (piv == e) continue;
      std::swap(cols[rank], cols[piv]);
      for (std::size_t c = 0; c < e; ++c)
        if (c != rank && ((cols[c] >> bit) & 1U)) cols[c] ^= cols[rank];
      ++rank;
    }
    if (rank < e) ++deficient;
  }
  return static_cast<double>(deficient) / std::ldexp(1.0, static_cast<int>(bits));
}

// Pr(H0 = t), t = 0..horizon, by walking every fail/success sequence of the
// augmented chain round by round.
inline std::vector<double> enumerate_h0(const Matrix& fail, const Matrix& succ, const RowVector& pi0,
                                        std::size_t m, std::size_t horizon) {
  std::vector<double> pmf(horizon + 1, 0.0);
  const std::size_t k = static_cast<std::size_t>(fail.rows());
  struct Walker {
    const Matrix& f;
    const Matrix& s;
    std::size_t k, m, horizon;
    std::vector<double>& pmf;
    void go(std::size_t state, std::size_t round, std::size_t done, double p) {
      if (done == m) {
        pmf[round] += p;
        return;
      }
      if (round == horizon || p == 0.0) return;
      for (std::size_t j = 0; j < k; ++j) {
        go(j, round + 1, done, p * f(state, j));
        go(j, round + 1, done + 1, p * s(state, j));
      }
    }
  } w{fail, succ, k, m, horizon, pmf};
  for (std::size_t i = 0; i < k; ++i) w.go(i, 0, 0, pi0(i));
  return pmf;
}

// Pr(H0 > tau) as the probability of fewer than m successes within tau
// rounds; every term is a sum of nonnegative products, so deep tails keep
// full relative accuracy.
inline double tail_by_counting(const Matrix& fail, const Matrix& succ, const RowVector& pi0,
                               std::size_t m, std::size_t tau) {
  std::vector<RowVector> v(m, RowVector::Zero(pi0.size()));
  if (m == 0) return 0.0;
  v[0] = pi0;
  for (std::size_t t = 0; t < tau; ++t) {
    std::vector<RowVector> next(m, RowVector::Zero(pi0.size()));
    for (std::size_t j = 0; j < m; ++j) {
      next[j] += v[j] * fail;
      if (j + 1 < m) next[j + 1] += v[j] * succ;
    }
    v = std::move(next);
  }
  double tail = 0.0;
  for (const auto& x : v) tail += x.sum();
  return tail;
}

// Gamma(shape, scale) CDF by composite Simpson quadrature of the density
// over [max(0, mean - 40 sd), x].
inline double gamma_cdf_quadrature(double shape, double scale, double x, std::size_t panels = 200000) {
  const double mean = shape * scale;
  const double sd = std::sqrt(shape) * scale;
  const double lo = std::max(0.0, mean - 40.0 * sd);
  if (x <= lo) return 0.0;
  const double log_norm = -std::lgamma(shape) - shape * std::log(scale);
  auto dens = [&](double t) {
    if (t <= 0.0) return shape == 1.0 ? std::exp(log_norm) : 0.0;
    return std::exp(log_norm + (shape - 1.0) * std::log(t) - t / scale);
  };
  const double h = (x - lo) / static_cast<double>(panels);
  double acc = dens(lo) + dens(x);
  for (std::size_t i = 1; i < panels; ++i) acc += dens(lo + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Gamma mass on (a, b] by Simpson's rule over that interval alone, so deep
// tails keep their relative accuracy.
inline double gamma_mass_quadrature(double shape, double scale, double a, double b,
                                    std::size_t panels = 20000) {
  a = std::max(a, 0.0);
  if (b <= a) return 0.0;
  const double log_norm = -std::lgamma(shape) - shape * std::log(scale);
  auto dens = [&](double t) {
    if (t <= 0.0) return shape == 1.0 ? std::exp(log_norm) : 0.0;
    return std::exp(log_norm + (shape - 1.0) * std::log(t) - t / scale);
  };
  const double h = (b - a) / static_cast<double>(panels);
  double acc = dens(a) + dens(b);
  for (std::size_t i = 1; i < panels; ++i) acc += dens(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace oracle
