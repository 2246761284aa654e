#pragma once

#include <cstddef>
#include <vector>

namespace fpt {

/// Regularized lower incomplete gamma P(a, x) and its complement Q = 1 - P,
/// each computed directly so that neither tail loses relative accuracy.
struct GammaCdf {
  double lower;
  double upper;
};

GammaCdf regularized_gamma(double shape, double x);

/// Law of the segment count M = ceil(L / K) for a Gamma-distributed buffer
/// of L bits, truncated to the support carrying all but `tol` of the mass.
struct BufferDistribution {
  std::size_t m_min = 1;
  /// pmf[i] = Pr(M = m_min + i).
  std::vector<double> pmf;
  double truncated_mass = 0.0;

  std::size_t m_max() const { return m_min + pmf.size() - 1; }
  double prob(std::size_t m) const {
    return m < m_min || m > m_max() ? 0.0 : pmf[m - m_min];
  }
  double mean() const;
  /// Dense weights indexed by m = 0..m_max, as used for mixtures.
  std::vector<double> weights() const;
};

/// Gamma buffer with the given mean and standard deviation (bits), split
/// into segments of K bits.
BufferDistribution buffer_segment_distribution(double mean, double std_dev, std::size_t info_bits,
                                               double tol = 1e-13);

/// Degenerate law: M = m with probability one.
BufferDistribution fixed_segments(std::size_t m);

/// Fixed buffer of `bits` bits: M = ceil(bits / K).
BufferDistribution fixed_bits(double bits, std::size_t info_bits);

}  // namespace fpt
