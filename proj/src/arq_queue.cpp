#include "fpt/arq_queue.hpp"

#include "fpt/optimize.hpp"
#include "fpt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fpt {

namespace {

constexpr double kDomainGuard = 1e-9;
constexpr std::size_t kMaxSeriesLength = 1U << 22;
constexpr std::size_t kMaxHorizon = 1U << 24;

Matrix gt_unchecked(const Matrix& fail, const Matrix& succ, double z) {
  const auto k = fail.rows();
  Matrix x = (Matrix::Identity(k, k) - z * fail).partialPivLu().solve(z * succ);
  return x.cwiseMax(0.0);
}

// log(pi0 G^m 1) with per-step renormalization so large m cannot overflow.
double log_power_mass(const Matrix& g, std::size_t m, const RowVector& pi0) {
  RowVector v = pi0;
  double log_scale = 0.0;
  for (std::size_t q = 0; q < m; ++q) {
    v = v * g;
    const double s = v.sum();
    if (!(s > 0.0)) return -std::numeric_limits<double>::infinity();
    if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
    log_scale += std::log(s);
    v /= s;
  }
  return log_scale + std::log(v.sum());
}

double log_sum_exp(const std::vector<double>& terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double t : terms) hi = std::max(hi, t);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - hi);
  return hi + std::log(acc);
}

void check_initial(const RowVector& pi0, std::size_t k) {
  if (static_cast<std::size_t>(pi0.size()) != k)
    throw Error(ErrorCode::BadDimensions, "initial law has wrong length");
  if ((pi0.array() < 0.0).any() || std::abs(pi0.sum() - 1.0) > 1e-12)
    throw Error(ErrorCode::NotStochastic, "initial law is not a probability vector");
}

double upper_lambda(const Matrix& fail) {
  const double rho = spectral_radius(fail);
  // Keep clear of the pole of (I - K e^lambda)^{-1}.
  return rho > 0.0 ? -std::log(rho) + std::log1p(-1e-8) : 700.0;
}

template <typename LogMgf>
double optimize_chernoff(LogMgf&& log_mgf, double lambda_hi, double tau) {
  auto objective = [&](double lambda) {
    const double v = lambda * tau - log_mgf(lambda);
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
  };
  const auto best = golden_section_max(objective, 0.0, lambda_hi, 1e-10);
  return -std::max(best.value, 0.0);
}

}  // namespace

const char* to_string(SeriesKind kind) {
  switch (kind) {
    case SeriesKind::Arq: return "arq";
    case SeriesKind::HarqOptimistic: return "harq-optimistic";
    case SeriesKind::HarqPessimistic: return "harq-pessimistic";
  }
  return "unknown";
}

ServiceMatrices service_matrices(const ChannelModel& model, const CodeConfig& code,
                                 const ErasureTensor& tensor) {
  code.validate();
  if (tensor.block_len() != code.block_len || tensor.states() != model.states())
    throw Error(ErrorCode::BadDimensions, "erasure tensor does not match model/code");
  const std::size_t n = code.block_len;
  const std::size_t parity = code.parity();
  std::vector<double> fail_prob(n + 1);
  for (std::size_t e = 0; e <= n; ++e) fail_prob[e] = pf(parity, e, n);

  ServiceMatrices sm{tensor.contract([&](std::size_t e) { return fail_prob[e]; }),
                     tensor.contract([&](std::size_t e) { return 1.0 - fail_prob[e]; }),
                     model, code};
  return sm;
}

ServiceMatrices service_matrices(const ChannelModel& model, const CodeConfig& code) {
  code.validate();
  return service_matrices(model, code, erasure_tensor(model, code.block_len));
}

Matrix gt_eval(const ServiceMatrices& sm, double z) {
  if (!(z >= 0.0)) throw Error(ErrorCode::DomainError, "z must be nonnegative");
  const double rho = spectral_radius(sm.fail);
  if (rho > 0.0 && z >= (1.0 - kDomainGuard) / rho)
    throw Error(ErrorCode::DomainError,
                "z = " + std::to_string(z) + " outside radius of convergence 1/rho(K)");
  return gt_unchecked(sm.fail, sm.succ, z);
}

double SegmentDelaySeries::mean_sojourn(const RowVector& pi) const {
  double mean = 0.0;
  for (std::size_t t = 0; t < coeffs.size(); ++t)
    mean += static_cast<double>(t + 1) * (pi * coeffs[t]).sum();
  return mean;
}

SegmentDelaySeries arq_segment_series(const ServiceMatrices& sm, double tol) {
  if (!(sm.succ.array() > 0.0).any())
    throw Error(ErrorCode::NonConvergent, "success matrix is zero; buffer never drains");
  if (spectral_radius(sm.fail) >= 1.0)
    throw Error(ErrorCode::NonConvergent, "rho(K) >= 1; sojourn time is not finite");

  const auto k = sm.fail.rows();
  // Mass still to come after t rounds from state i is [K^t w]_i with
  // w = (I-K)^{-1} M 1.
  const Vector w = (Matrix::Identity(k, k) - sm.fail)
                       .partialPivLu()
                       .solve(sm.succ * Vector::Ones(k))
                       .cwiseMax(0.0);
  SegmentDelaySeries series;
  series.kind = SeriesKind::Arq;
  Matrix power = Matrix::Identity(k, k);
  double remaining = w.maxCoeff();
  while (remaining > tol) {
    if (series.coeffs.size() >= kMaxSeriesLength)
      throw Error(ErrorCode::NonConvergent, "sojourn series did not reach tolerance");
    series.coeffs.push_back(power * sm.succ);
    power = power * sm.fail;
    remaining = (power * w).maxCoeff();
  }
  series.tail_mass = std::max(remaining, 0.0);
  return series;
}

double HittingDistribution::cdf(std::size_t t) const {
  double acc = 0.0;
  for (std::size_t s = 0; s <= t && s < pmf.size(); ++s) acc += pmf[s];
  return acc;
}

std::vector<HittingDistribution> h0_distributions(const SegmentDelaySeries& series,
                                                  std::size_t m_max, const RowVector& pi0,
                                                  double tol) {
  const std::size_t k = static_cast<std::size_t>(pi0.size());
  if (m_max > 0) {
    if (series.coeffs.empty()) throw Error(ErrorCode::BadArgs, "empty sojourn series");
    check_initial(pi0, series.states());
  }
  const double fp_bound = 4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(m_max + 1);
  if (tol < fp_bound + static_cast<double>(m_max) * series.tail_mass)
    throw Error(ErrorCode::TolUnreachable,
                "tolerance below accumulated series truncation and rounding error");

  const std::size_t len = series.length();
  // Flattened coefficients: a[(s*k + i)*k + j] = A_{s+1}(i,j).
  std::vector<double> a(len * k * k);
  for (std::size_t s = 0; s < len; ++s)
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        a[(s * k + i) * k + j] =
            series.coeffs[s](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));

  const double mean_guess = m_max > 0 ? series.mean_sojourn(pi0) : 0.0;
  std::size_t horizon = std::max<std::size_t>(
      64, static_cast<std::size_t>(2.0 * static_cast<double>(m_max) * std::max(mean_guess, 1.0)));

  for (;;) {
    const std::size_t h = horizon;
    std::vector<HittingDistribution> out(m_max + 1);
    // cur[t*k + i]: Pr(level q reached at round t, channel state i).
    std::vector<double> cur((h + 1) * k, 0.0), next((h + 1) * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) cur[i] = pi0(static_cast<Eigen::Index>(i));

    bool ok = true;
    for (std::size_t q = 0; q <= m_max; ++q) {
      if (q > 0) {
        std::fill(next.begin(), next.end(), 0.0);
        // Level q needs at least q rounds; level q-1 mass starts at q-1.
        for (std::size_t t = q - 1; t < h; ++t) {
          const double* v = &cur[t * k];
          bool any = false;
          for (std::size_t i = 0; i < k; ++i) any = any || v[i] != 0.0;
          if (!any) continue;
          const std::size_t smax = std::min(len, h - t);
          for (std::size_t s = 0; s < smax; ++s) {
            double* dst = &next[(t + s + 1) * k];
            const double* as = &a[s * k * k];
            for (std::size_t i = 0; i < k; ++i) {
              const double vi = v[i];
              if (vi == 0.0) continue;
              for (std::size_t j = 0; j < k; ++j) dst[j] += vi * as[i * k + j];
            }
          }
        }
        std::swap(cur, next);
      }
      HittingDistribution& d = out[q];
      d.segments = q;
      d.pmf.assign(h + 1, 0.0);
      d.end_state_pmf.assign(h + 1, RowVector::Zero(static_cast<Eigen::Index>(k)));
      double total = 0.0;
      for (std::size_t t = 0; t <= h; ++t) {
        double p = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
          d.end_state_pmf[t](static_cast<Eigen::Index>(i)) = cur[t * k + i];
          p += cur[t * k + i];
        }
        d.pmf[t] = p;
        total += p;
      }
      d.tail_mass = std::max(0.0, 1.0 - total);
      if (d.tail_mass > tol) ok = false;
    }
    if (ok) return out;
    if (horizon >= kMaxHorizon)
      throw Error(ErrorCode::NonConvergent, "hitting-time horizon limit reached");
    horizon *= 2;
  }
}

HittingDistribution h0_distribution(const SegmentDelaySeries& series, std::size_t m,
                                    const RowVector& pi0, double tol) {
  auto all = h0_distributions(series, m, pi0, tol);
  return std::move(all.back());
}

Moments moments(const HittingDistribution& dist) {
  Moments mo;
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t t = 0; t < dist.pmf.size(); ++t) {
    const double tt = static_cast<double>(t);
    m1 += tt * dist.pmf[t];
    m2 += tt * tt * dist.pmf[t];
  }
  mo.mean = m1;
  mo.variance = m2 - m1 * m1;
  mo.tail_mass = dist.tail_mass;

  if (dist.tail_mass > 0.0) {
    // Geometric extrapolation past the horizon using the largest observed
    // successive ratio over the last quarter of the pmf.
    const std::size_t h = dist.horizon();
    double ratio = 0.0;
    for (std::size_t t = h - h / 4; t < h; ++t)
      if (dist.pmf[t] > 0.0) ratio = std::max(ratio, dist.pmf[t + 1] / dist.pmf[t]);
    if (ratio >= 1.0 || ratio == 0.0) {
      mo.variance_slack = std::numeric_limits<double>::infinity();
    } else {
      const double hh = static_cast<double>(h);
      const double g1 = 1.0 / (1.0 - ratio);
      const double g2 = (1.0 + ratio) / ((1.0 - ratio) * (1.0 - ratio));
      const double c1 = dist.tail_mass * (hh + g1);
      const double c2 = dist.tail_mass * (hh * hh + 2.0 * hh * g1 + g2);
      mo.variance_slack = c2 + 2.0 * std::abs(m1) * c1 + c1 * c1;
    }
  }
  return mo;
}

std::vector<Vector> h0_mean_levels(const ServiceMatrices& sm, std::size_t m_max) {
  const auto k = sm.fail.rows();
  if (spectral_radius(sm.fail) >= 1.0)
    throw Error(ErrorCode::SingularSystem, "I - K is singular (rho(K) >= 1)");
  const auto lu = (Matrix::Identity(k, k) - sm.fail).partialPivLu();
  std::vector<Vector> levels;
  levels.reserve(m_max + 1);
  levels.push_back(Vector::Zero(k));
  for (std::size_t q = 1; q <= m_max; ++q)
    levels.push_back(lu.solve(Vector::Ones(k) + sm.succ * levels.back()));
  return levels;
}

double h0_mean_exact(const ServiceMatrices& sm, std::size_t m, const RowVector& pi0) {
  check_initial(pi0, sm.states());
  return pi0.dot(h0_mean_levels(sm, m).back());
}

std::size_t cdf_crossing(const HittingDistribution& dist, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::BadArgs, "crossing level must lie in (0,1)");
  if (p > 1.0 - dist.tail_mass)
    throw Error(ErrorCode::TailTooHeavy, "crossing level exceeds certified mass");
  double acc = 0.0;
  for (std::size_t t = 0; t < dist.pmf.size(); ++t) {
    acc += dist.pmf[t];
    if (acc >= p) return t;
  }
  throw Error(ErrorCode::TailTooHeavy, "crossing level not reached within horizon");
}

double chernoff_bound(const ServiceMatrices& sm, std::size_t m, const RowVector& pi0,
                      double tau) {
  const double mean = h0_mean_exact(sm, m, pi0);
  if (!(tau > mean))
    throw Error(ErrorCode::DomainError, "deadline must exceed the mean (bound is vacuous)");
  return optimize_chernoff(
      [&](double lambda) {
        return log_power_mass(gt_unchecked(sm.fail, sm.succ, std::exp(lambda)), m, pi0);
      },
      upper_lambda(sm.fail), tau);
}

double chernoff_bound(const ServiceMatrices& sm, const std::vector<double>& weights,
                      const RowVector& pi0, double tau) {
  check_initial(pi0, sm.states());
  if (weights.empty()) throw Error(ErrorCode::BadArgs, "empty segment-count weights");
  const auto levels = h0_mean_levels(sm, weights.size() - 1);
  double mean = 0.0;
  for (std::size_t m = 0; m < weights.size(); ++m) mean += weights[m] * pi0.dot(levels[m]);
  if (!(tau > mean))
    throw Error(ErrorCode::DomainError, "deadline must exceed the mean (bound is vacuous)");
  return optimize_chernoff(
      [&](double lambda) {
        const Matrix g = gt_unchecked(sm.fail, sm.succ, std::exp(lambda));
        std::vector<double> terms;
        RowVector v = pi0;
        double log_scale = 0.0;
        for (std::size_t m = 0; m < weights.size(); ++m) {
          if (m > 0) {
            v = v * g;
            const double s = v.sum();
            if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
            log_scale += std::log(s);
            v /= s;
          }
          if (weights[m] > 0.0) terms.push_back(std::log(weights[m]) + log_scale);
        }
        return log_sum_exp(terms);
      },
      upper_lambda(sm.fail), tau);
}

double log_tail(const HittingDistribution& dist, double tau) {
  double tail = dist.tail_mass;
  const double start = std::floor(tau) + 1.0;
  for (std::size_t t = 0; t < dist.pmf.size(); ++t)
    if (static_cast<double>(t) >= start) tail += dist.pmf[t];
  return std::log(tail);
}

}  // namespace fpt
