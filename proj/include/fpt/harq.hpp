#pragma once

#include "fpt/arq_queue.hpp"
#include "fpt/channel.hpp"
#include "fpt/randcode.hpp"
#include "fpt/types.hpp"

#include <vector>

namespace fpt {

/// Round-level outcome blocks for incremental redundancy of depth a.
/// succ_at[r-1](i,j): first successful decoding after round r, next
/// codeword starting in state j. fail_final: still undecodable after all a
/// rounds. succ_at_optimistic_last: round-a block when decoding is assumed
/// to always succeed by then.
struct HarqRoundMatrices {
  std::vector<Matrix> succ_at;
  Matrix fail_final;
  Matrix succ_at_optimistic_last;

  std::size_t depth() const { return succ_at.size(); }
};

HarqRoundMatrices harq_round_matrices(const ChannelModel& model, const CodeConfig& code);

/// Same, given erasure tensors for block lengths N, 2N, ..., aN.
HarqRoundMatrices harq_round_matrices(const ChannelModel& model, const CodeConfig& code,
                                      const std::vector<ErasureTensor>& tensors);

enum class HarqMode { Optimistic, Pessimistic };

/// Optimistic: A_r = S_r (r < a), A_a = optimistic last block.
/// Pessimistic: a failed codeword is restarted from scratch, so
/// A_{ua+r} = F^u S_r.
SegmentDelaySeries harq_segment_series(const HarqRoundMatrices& rm, HarqMode mode,
                                       double tol = 1e-14);

}  // namespace fpt
