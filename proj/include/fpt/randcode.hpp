#pragma once

#include <cstddef>

namespace fpt {

/// Random binary parity-check code parameters. `harq_depth` chunks of
/// `block_len` symbols share one (depth*N - K) x depth*N parity matrix;
/// depth 1 is plain ARQ.
struct CodeConfig {
  std::size_t block_len = 0;
  std::size_t info_bits = 0;
  std::size_t harq_depth = 1;

  std::size_t parity() const { return block_len - info_bits; }
  void validate() const;
};

/// Ensemble-average ML erasure-decoding failure probability of a random
/// p x n parity-check code after `erasures` erasures:
/// 1 - prod_{l<e} (1 - 2^{l-p}) for e <= p, and 1 beyond.
double pf(std::size_t parity, std::size_t erasures, std::size_t n_cap);

/// Failure probability after `attempt` of `harq_depth` chunks have arrived
/// with `erasures` erasures among them; untransmitted symbols count as
/// erased.
double harq_failure_prob(const CodeConfig& code, std::size_t attempt, std::size_t erasures);

}  // namespace fpt
