#pragma once

#include "fpt/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace fpt {

/// Finite-state Markov erasure channel.
///
/// A symbol sent while the chain sits in state i is erased with probability
/// erasure(i); the chain then moves according to row i of transition().
/// States are stored in canonical order (non-increasing erasure
/// probability); original_label(s) maps a canonical index back to the
/// position it had in the user's input.
class ChannelModel {
 public:
  std::size_t states() const { return static_cast<std::size_t>(transition_.rows()); }
  const Matrix& transition() const { return transition_; }
  const Vector& erasure() const { return erasure_; }
  const RowVector& initial() const { return initial_; }
  std::size_t original_label(std::size_t canonical) const { return labels_[canonical]; }
  const std::vector<std::size_t>& labels() const { return labels_; }

  /// Reorders a canonical-index vector back into the user's state order.
  Vector to_original_order(const Vector& canonical) const;

 private:
  friend ChannelModel validate_channel(const Matrix&, const Vector&, const std::optional<Vector>&);

  Matrix transition_;
  Vector erasure_;
  RowVector initial_;
  std::vector<std::size_t> labels_;
};

/// Checks Assumption-style structure (stochastic, irreducible, aperiodic,
/// not all-erasing) and returns the canonical model. An empty `init` selects
/// the stationary law.
ChannelModel validate_channel(const Matrix& transition, const Vector& erasure,
                              const std::optional<Vector>& init = std::nullopt);

/// Convenience constructor for the two-state Gilbert-Elliott family
/// parameterized by average erasure rate and decay factor 1 - b12 - b21.
/// State 0 is the bad state (erasure prob `eps_bad`).
ChannelModel gilbert_elliott(double erasure_rate, double decay, double eps_bad = 1.0,
                             double eps_good = 0.0,
                             const std::optional<Vector>& init = std::nullopt);

Matrix chain_power(const ChannelModel& model, std::size_t n);

RowVector stationary_distribution(const ChannelModel& model);

/// Stationary law of an arbitrary row-stochastic matrix with a single
/// recurrent class.
RowVector stationary_of(const Matrix& stochastic);

/// Joint law of (erasure count, end state) over one block of N symbols.
class ErasureTensor {
 public:
  ErasureTensor(std::size_t states, std::size_t block_len);

  std::size_t states() const { return k_; }
  std::size_t block_len() const { return n_; }

  double operator()(std::size_t i, std::size_t j, std::size_t e) const {
    return probs_[(i * k_ + j) * (n_ + 1) + e];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t e) {
    return probs_[(i * k_ + j) * (n_ + 1) + e];
  }

  /// Sum over erasure counts: approximates B^N.
  Matrix marginal() const;

  /// Collapses e against a weight w(e): out(i,j) = sum_e w(e) P(i,j,e).
  template <typename Weight>
  Matrix contract(Weight&& w) const {
    Matrix out = Matrix::Zero(k_, k_);
    for (std::size_t e = 0; e <= n_; ++e) {
      const double we = w(e);
      if (we == 0.0) continue;
      for (std::size_t i = 0; i < k_; ++i)
        for (std::size_t j = 0; j < k_; ++j) out(i, j) += we * (*this)(i, j, e);
    }
    return out;
  }

 private:
  std::size_t k_;
  std::size_t n_;
  std::vector<double> probs_;
};

ErasureTensor erasure_tensor(const ChannelModel& model, std::size_t block_len);

/// Tensors for block lengths N, 2N, ..., count*N, produced by one pass of
/// polynomial-matrix multiplication.
std::vector<ErasureTensor> erasure_tensors(const ChannelModel& model, std::size_t block_len,
                                           std::size_t count);

}  // namespace fpt
