#include "fpt/harq.hpp"

#include "fpt/spectral.hpp"

#include <string>

namespace fpt {

namespace {

constexpr double kClip = 1e-9;
constexpr std::size_t kMaxCycles = 1U << 20;

void clip_negative(Matrix& m, const char* what) {
  const double lo = m.minCoeff();
  if (lo < -kClip)
    throw Error(ErrorCode::NegativeProbability,
                std::string(what) + " has entry " + std::to_string(lo));
  m = m.cwiseMax(0.0);
}

}  // namespace

HarqRoundMatrices harq_round_matrices(const ChannelModel& model, const CodeConfig& code,
                                      const std::vector<ErasureTensor>& tensors) {
  code.validate();
  const std::size_t a = code.harq_depth;
  const std::size_t n = code.block_len;
  if (tensors.size() < a)
    throw Error(ErrorCode::BadDimensions, "need one erasure tensor per HARQ round");
  for (std::size_t s = 1; s <= a; ++s)
    if (tensors[s - 1].block_len() != s * n || tensors[s - 1].states() != model.states())
      throw Error(ErrorCode::BadDimensions, "erasure tensor does not match round length");

  std::vector<Matrix> prop(a + 1);
  for (std::size_t s = 0; s <= a; ++s) prop[s] = chain_power(model, s * n);

  HarqRoundMatrices rm;
  for (std::size_t s = 1; s <= a; ++s) {
    const Matrix fail = tensors[s - 1].contract(
        [&](std::size_t e) { return harq_failure_prob(code, s, e); });
    Matrix succ = prop[s] - fail;
    for (std::size_t r = 1; r < s; ++r) succ -= rm.succ_at[r - 1] * prop[s - r];
    clip_negative(succ, "HARQ success block");
    rm.succ_at.push_back(std::move(succ));
    if (s == a) {
      rm.fail_final = fail;
      clip_negative(rm.fail_final, "HARQ failure block");
    }
  }

  Matrix last = prop[a];
  for (std::size_t r = 1; r < a; ++r) last -= rm.succ_at[r - 1] * prop[a - r];
  clip_negative(last, "optimistic last-round block");
  rm.succ_at_optimistic_last = std::move(last);
  return rm;
}

HarqRoundMatrices harq_round_matrices(const ChannelModel& model, const CodeConfig& code) {
  code.validate();
  return harq_round_matrices(model, code,
                             erasure_tensors(model, code.block_len, code.harq_depth));
}

SegmentDelaySeries harq_segment_series(const HarqRoundMatrices& rm, HarqMode mode, double tol) {
  const std::size_t a = rm.depth();
  if (a == 0) throw Error(ErrorCode::BadArgs, "empty HARQ round matrices");
  SegmentDelaySeries series;

  if (mode == HarqMode::Optimistic) {
    series.kind = SeriesKind::HarqOptimistic;
    series.coeffs.assign(rm.succ_at.begin(), rm.succ_at.end() - 1);
    series.coeffs.push_back(rm.succ_at_optimistic_last);
    return series;
  }

  series.kind = SeriesKind::HarqPessimistic;
  const Matrix& f = rm.fail_final;
  const auto k = f.rows();
  if (spectral_radius(f) >= 1.0)
    throw Error(ErrorCode::NonConvergent, "rho(F) >= 1; pessimistic sojourn is not finite");
  Matrix cycle_succ = Matrix::Zero(k, k);
  for (const auto& s : rm.succ_at) cycle_succ += s;
  // Mass of cycles u >= U from state i is [F^U w]_i, w = (I-F)^{-1} (sum_r S_r) 1.
  const Vector w = (Matrix::Identity(k, k) - f)
                       .partialPivLu()
                       .solve(cycle_succ * Vector::Ones(k))
                       .cwiseMax(0.0);
  Matrix power = Matrix::Identity(k, k);
  double remaining = w.maxCoeff();
  std::size_t cycles = 0;
  while (remaining > tol) {
    if (++cycles > kMaxCycles)
      throw Error(ErrorCode::NonConvergent, "pessimistic series did not reach tolerance");
    for (const auto& s : rm.succ_at) series.coeffs.push_back(power * s);
    power = power * f;
    remaining = (power * w).maxCoeff();
  }
  series.tail_mass = remaining;
  return series;
}

}  // namespace fpt
