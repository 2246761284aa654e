#pragma once

#include "fpt/channel.hpp"
#include "fpt/randcode.hpp"
#include "fpt/types.hpp"

#include <cstddef>
#include <vector>

namespace fpt {

/// Per-round transition blocks of the ARQ queue: fail(i,j) is the
/// probability that a codeword started in state i fails and the next one
/// starts in state j; succ(i,j) the same for a success.
struct ServiceMatrices {
  Matrix fail;
  Matrix succ;
  ChannelModel source;
  CodeConfig code;

  std::size_t states() const { return static_cast<std::size_t>(fail.rows()); }
};

ServiceMatrices service_matrices(const ChannelModel& model, const CodeConfig& code);

/// Same, reusing a precomputed block-length-N erasure tensor (sweeps over K
/// share one tensor).
ServiceMatrices service_matrices(const ChannelModel& model, const CodeConfig& code,
                                 const ErasureTensor& tensor);

/// Matrix generating function of the per-segment sojourn time,
/// (I - K z)^{-1} M z, for 0 <= z below the radius of convergence.
Matrix gt_eval(const ServiceMatrices& sm, double z);

enum class SeriesKind { Arq, HarqOptimistic, HarqPessimistic };

const char* to_string(SeriesKind kind);

/// coeffs[t-1](i,j) = Pr(sojourn = t, next start state j | start state i).
struct SegmentDelaySeries {
  std::vector<Matrix> coeffs;
  /// Upper bound on the probability mass beyond coeffs.size(), uniform in i.
  double tail_mass = 0.0;
  SeriesKind kind = SeriesKind::Arq;

  std::size_t length() const { return coeffs.size(); }
  std::size_t states() const {
    return coeffs.empty() ? 0 : static_cast<std::size_t>(coeffs.front().rows());
  }
  /// sum_t t * (pi A_t 1): mean of one sojourn from initial law pi.
  double mean_sojourn(const RowVector& pi) const;
};

/// A_t = K^{t-1} M, truncated at the smallest T whose remaining mass
/// max_i [K^T (I-K)^{-1} M 1]_i is at most tol.
SegmentDelaySeries arq_segment_series(const ServiceMatrices& sm, double tol = 1e-14);

/// Distribution of the first-passage time H0 to an empty buffer.
struct HittingDistribution {
  std::vector<double> pmf;
  /// Certified bound on Pr(H0 > pmf.size() - 1).
  double tail_mass = 0.0;
  std::size_t segments = 0;
  /// end_state_pmf[t](j) = Pr(H0 = t, channel state j when the buffer empties).
  std::vector<RowVector> end_state_pmf;

  std::size_t horizon() const { return pmf.empty() ? 0 : pmf.size() - 1; }
  double cdf(std::size_t t) const;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  /// Half-width of the interval [variance - slack, variance + slack] that
  /// accounts for the truncated tail.
  double variance_slack = 0.0;
  double tail_mass = 0.0;
};

/// Mean and variance of a truncated pmf; the tail beyond the horizon is
/// bounded by geometric extrapolation of the last computed terms.
Moments moments(const HittingDistribution& dist);

/// Exact pmf of H0 for m segments from initial law pi0, computed by m-fold
/// convolution of the series with the horizon doubled until the certified
/// tail is below tol.
HittingDistribution h0_distribution(const SegmentDelaySeries& series, std::size_t m,
                                    const RowVector& pi0, double tol = 1e-12);

/// Distributions for every segment count 0..m_max in one convolution pass,
/// sharing a common horizon.
std::vector<HittingDistribution> h0_distributions(const SegmentDelaySeries& series,
                                                  std::size_t m_max, const RowVector& pi0,
                                                  double tol = 1e-12);

/// E[H0] by the backward hitting-time recursion
/// h_q = (I-K)^{-1}(1 + M h_{q-1}), h_0 = 0.
double h0_mean_exact(const ServiceMatrices& sm, std::size_t m, const RowVector& pi0);

/// Per-start-state expected hitting times h_0..h_{m_max}.
std::vector<Vector> h0_mean_levels(const ServiceMatrices& sm, std::size_t m_max);

/// Smallest t with Pr(H0 <= t) >= p.
std::size_t cdf_crossing(const HittingDistribution& dist, double p);

/// Optimized Chernoff bound on log Pr(H0 > tau) for m segments:
/// -sup_{0 < lambda < -log rho(K)} { lambda tau - log(pi0 G_T(e^lambda)^m 1) }.
double chernoff_bound(const ServiceMatrices& sm, std::size_t m, const RowVector& pi0,
                      double tau);

/// Chernoff bound for a random segment count: weights[m] = Pr(M = m).
double chernoff_bound(const ServiceMatrices& sm, const std::vector<double>& weights,
                      const RowVector& pi0, double tau);

/// log Pr(H0 > tau) read off a computed distribution (tail mass included).
double log_tail(const HittingDistribution& dist, double tau);

}  // namespace fpt
