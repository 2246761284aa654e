#include "fpt/randcode.hpp"

#include "fpt/types.hpp"

#include <cmath>
#include <string>

namespace fpt {

void CodeConfig::validate() const {
  if (info_bits < 1 || info_bits > block_len)
    throw Error(ErrorCode::BadArgs, "need 1 <= K <= N (K=" + std::to_string(info_bits) +
                                        ", N=" + std::to_string(block_len) + ")");
  if (harq_depth < 1) throw Error(ErrorCode::BadArgs, "HARQ depth must be >= 1");
}

double pf(std::size_t parity, std::size_t erasures, std::size_t n_cap) {
  if (erasures > n_cap) throw Error(ErrorCode::BadArgs, "erasure count exceeds block length");
  if (erasures > parity) return 1.0;
  // Smallest factors first: l = e-1 carries the largest 2^{l-p}.
  double keep = 1.0;
  const int p = static_cast<int>(parity);
  for (std::size_t l = erasures; l-- > 0;)
    keep *= 1.0 - std::ldexp(1.0, static_cast<int>(l) - p);
  return 1.0 - keep;
}

double harq_failure_prob(const CodeConfig& code, std::size_t attempt, std::size_t erasures) {
  const std::size_t a = code.harq_depth;
  const std::size_t n = code.block_len;
  if (attempt < 1 || attempt > a) throw Error(ErrorCode::BadArgs, "attempt index out of range");
  if (erasures > attempt * n) throw Error(ErrorCode::BadArgs, "erasure count exceeds received symbols");
  return pf(a * n - code.info_bits, erasures + (a - attempt) * n, a * n);
}

}  // namespace fpt
