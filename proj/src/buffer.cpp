#include "fpt/buffer.hpp"

#include "fpt/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fpt {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Stirling remainder lgamma(a) - [(a - 1/2) log a - a + log(2 pi)/2].
double stirling_correction(double a) {
  if (a < 10.0) return std::lgamma(a) - ((a - 0.5) * std::log(a) - a + 0.5 * std::log(2.0 * M_PI));
  const double r = 1.0 / a;
  const double r2 = r * r;
  return r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)));
}

// log of x^a e^{-x} / Gamma(a), arranged so the large terms cancel
// analytically rather than in floating point.
double log_prefactor(double a, double x) {
  const double t = (x - a) / a;
  return 0.5 * std::log(a / (2.0 * M_PI)) - stirling_correction(a) - a * (t - std::log1p(t));
}

std::size_t iteration_cap(double a) {
  return 200 + static_cast<std::size_t>(50.0 * std::sqrt(a));
}

}  // namespace

GammaCdf regularized_gamma(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a))
    throw Error(ErrorCode::BadParams, "incomplete gamma needs shape > 0 and x >= 0");
  if (x == 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  const double lp = log_prefactor(a, x);
  if (lp < -745.0) return x < a ? GammaCdf{0.0, 1.0} : GammaCdf{1.0, 0.0};
  const double pre = std::exp(lp);
  const std::size_t cap = iteration_cap(a);

  if (x < a + 1.0) {
    // P = pre/a * sum_n x^n / ((a+1)...(a+n))
    double term = 1.0;
    double sum = 1.0;
    for (std::size_t n = 1;; ++n) {
      term *= x / (a + static_cast<double>(n));
      sum += term;
      if (term < sum * kEps) break;
      if (n > cap) throw Error(ErrorCode::NoConvergence, "incomplete gamma series");
    }
    const double p = std::min(1.0, pre * sum / a);
    return {p, 1.0 - p};
  }

  // Q = pre * 1/(x+1-a- 1*(1-a)/(x+3-a- 2*(2-a)/(x+5-a- ...))), modified Lentz.
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (std::size_t n = 1;; ++n) {
    const double an = -static_cast<double>(n) * (static_cast<double>(n) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
    if (n > cap) throw Error(ErrorCode::NoConvergence, "incomplete gamma continued fraction");
  }
  const double q = std::min(1.0, pre * h);
  return {1.0 - q, q};
}

double BufferDistribution::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) acc += static_cast<double>(m_min + i) * pmf[i];
  return acc;
}

std::vector<double> BufferDistribution::weights() const {
  std::vector<double> w(m_max() + 1, 0.0);
  for (std::size_t i = 0; i < pmf.size(); ++i) w[m_min + i] = pmf[i];
  return w;
}

BufferDistribution buffer_segment_distribution(double mean, double std_dev, std::size_t info_bits,
                                               double tol) {
  if (!(mean > 0.0) || !(std_dev > 0.0) || info_bits == 0 || !(tol > 0.0 && tol < 1.0) ||
      !std::isfinite(mean) || !std::isfinite(std_dev))
    throw Error(ErrorCode::BadParams, "buffer needs mean > 0, std > 0, K >= 1 and tol in (0,1)");
  const double shape = (mean / std_dev) * (mean / std_dev);
  const double scale = std_dev * std_dev / mean;
  const double k = static_cast<double>(info_bits);
  auto cdf_at = [&](double m) { return regularized_gamma(shape, m * k / scale); };

  // Lower cut: largest m with Pr(M <= m) = P(mK) <= tol/2.
  std::size_t lo = static_cast<std::size_t>(std::max(1.0, std::floor(mean / k)));
  while (lo > 1 && cdf_at(static_cast<double>(lo - 1)).lower > tol / 2.0) --lo;
  // Step up while even Pr(M <= lo) is negligible.
  while (cdf_at(static_cast<double>(lo)).lower <= tol / 2.0) ++lo;

  BufferDistribution dist;
  dist.m_min = lo;
  GammaCdf prev = cdf_at(static_cast<double>(lo - 1));
  dist.truncated_mass = prev.lower;
  for (std::size_t m = lo;; ++m) {
    const GammaCdf cur = cdf_at(static_cast<double>(m));
    // Differences of whichever tail is smaller keep relative accuracy.
    const double p = prev.lower < 0.5 ? cur.lower - prev.lower : prev.upper - cur.upper;
    dist.pmf.push_back(std::max(p, 0.0));
    prev = cur;
    if (cur.upper <= tol / 2.0) {
      dist.truncated_mass += cur.upper;
      break;
    }
  }
  return dist;
}

BufferDistribution fixed_segments(std::size_t m) {
  BufferDistribution dist;
  dist.m_min = m;
  dist.pmf = {1.0};
  return dist;
}

BufferDistribution fixed_bits(double bits, std::size_t info_bits) {
  if (!(bits > 0.0) || info_bits == 0)
    throw Error(ErrorCode::BadParams, "fixed buffer needs bits > 0 and K >= 1");
  return fixed_segments(static_cast<std::size_t>(std::ceil(bits / static_cast<double>(info_bits))));
}

}  // namespace fpt
