#include "doctest.h"
#include "fixtures.hpp"

#include "fpt/harq.hpp"

using namespace fpt;

namespace {

double mean_h0(const SegmentDelaySeries& s, std::size_t m, const RowVector& pi0) {
  return moments(h0_distribution(s, m, pi0, 1e-12)).mean;
}

}  // namespace

TEST_CASE("depth one collapses to plain ARQ") {
  const auto ch = fixtures::bursty();
  const CodeConfig code{114, 73, 1};
  const auto rm = harq_round_matrices(ch, code);
  const auto sm = service_matrices(ch, code);
  CHECK((rm.succ_at[0] - sm.succ).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((rm.fail_final - sm.fail).cwiseAbs().maxCoeff() < 1e-12);
  const auto arq = arq_segment_series(sm);
  const auto pess = harq_segment_series(rm, HarqMode::Pessimistic);
  const auto opt = harq_segment_series(rm, HarqMode::Optimistic);
  CHECK(opt.length() == 1);
  CHECK(mean_h0(pess, 27, ch.initial()) == doctest::Approx(mean_h0(arq, 27, ch.initial())).epsilon(1e-10));
}

TEST_CASE("erasure-free channel only fails through the untransmitted rounds") {
  const auto clean = validate_channel(Matrix::Constant(2, 2, 0.5), Vector::Zero(2));
  const CodeConfig code{30, 20, 3};
  const auto rm = harq_round_matrices(clean, code);
  // Nothing is erased, so round s fails exactly when the rows of the s*30
  // received symbols do not span the 20 information bits.
  const double f1 = harq_failure_prob(code, 1, 0);
  const double f2 = harq_failure_prob(code, 2, 0);
  CHECK(f1 > 0.0);
  CHECK(f2 < f1);
  CHECK((rm.succ_at[0] - (1.0 - f1) * chain_power(clean, 30)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((rm.succ_at[1] - (f1 - f2) * chain_power(clean, 60)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((rm.succ_at[2] - f2 * chain_power(clean, 90)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(rm.fail_final.cwiseAbs().maxCoeff() < 1e-14);
  const auto opt = harq_segment_series(rm, HarqMode::Optimistic);
  const auto pess = harq_segment_series(rm, HarqMode::Pessimistic);
  CHECK(opt.length() == 3);
  const double per_segment = 1.0 + f1 + f2;  // Pr(T > s) summed
  CHECK(mean_h0(opt, 4, clean.initial()) == doctest::Approx(4.0 * per_segment).epsilon(1e-10));
  CHECK(mean_h0(pess, 4, clean.initial()) == doctest::Approx(4.0 * per_segment).epsilon(1e-10));
}

TEST_CASE("round decomposition is a probability split") {
  const auto ch = fixtures::bursty();
  for (std::size_t k : {50, 73, 81, 90}) {
    const auto rm = harq_round_matrices(ch, CodeConfig{114, k, 3});
    Vector full = rm.fail_final.rowwise().sum();
    Vector opt = rm.succ_at_optimistic_last.rowwise().sum();
    for (std::size_t r = 0; r < 3; ++r) {
      CHECK(rm.succ_at[r].minCoeff() >= 0.0);
      full += rm.succ_at[r].rowwise().sum();
      if (r < 2) opt += rm.succ_at[r].rowwise().sum();
    }
    CHECK((full.array() - 1.0).abs().maxCoeff() < 1e-9);
    CHECK((opt.array() - 1.0).abs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("optimistic and pessimistic bounds") {
  const auto ch = fixtures::bursty();
  const RowVector& pi0 = ch.initial();
  for (std::size_t k = 50; k <= 90; k += 5) {
    const auto rm = harq_round_matrices(ch, CodeConfig{114, k, 3});
    const auto opt = harq_segment_series(rm, HarqMode::Optimistic);
    const auto pess = harq_segment_series(rm, HarqMode::Pessimistic);
    double c_opt = 0.0;
    double c_pess = 0.0;
    for (std::size_t t = 0; t < pess.length(); ++t) {
      if (t < opt.length()) c_opt += (pi0 * opt.coeffs[t]).sum();
      c_pess += (pi0 * pess.coeffs[t]).sum();
      CHECK(c_opt >= c_pess - 1e-12);
    }
    CHECK(opt.mean_sojourn(pi0) <= pess.mean_sojourn(pi0) + 1e-12);
    const double arq = h0_mean_exact(service_matrices(ch, CodeConfig{114, k, 1}), 27, pi0);
    CHECK(mean_h0(opt, 27, pi0) <= mean_h0(pess, 27, pi0) + 1e-9);
    CHECK(mean_h0(pess, 27, pi0) <= arq + 1e-6);
  }
  const auto rm = harq_round_matrices(ch, CodeConfig{114, 81, 3});
  CHECK(std::abs(mean_h0(harq_segment_series(rm, HarqMode::Optimistic), 25, pi0) -
                 mean_h0(harq_segment_series(rm, HarqMode::Pessimistic), 25, pi0)) < 1e-3);
}
