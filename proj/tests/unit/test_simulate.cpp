#include "doctest.h"
#include "fixtures.hpp"

#include "fpt/harq.hpp"
#include "fpt/ldp.hpp"
#include "fpt/simulate.hpp"

#include <algorithm>

#include <cmath>
#include <sstream>

using namespace fpt;

namespace {

double ks_against(const std::vector<double>& ecdf, const std::vector<double>& pmf) {
  double acc = 0.0;
  double worst = 0.0;
  for (std::size_t t = 0; t < std::max(ecdf.size(), pmf.size()); ++t) {
    acc += t < pmf.size() ? pmf[t] : 0.0;
    const double e = t < ecdf.size() ? ecdf[t] : 1.0;
    worst = std::max(worst, std::abs(acc - e));
  }
  return worst;
}

}  // namespace

TEST_CASE("splitmix64 reference outputs") {
  // First outputs of the reference generator seeded with 0.
  std::uint64_t state = 0;
  auto next = [&] {
    const auto out = splitmix64(state);
    state += 0x9e3779b97f4a7c15ULL;
    return out;
  };
  CHECK(next() == 0xe220a8397b1dcdafULL);
  CHECK(next() == 0x6e789e6aa1b965f4ULL);
  CHECK(next() == 0x06c45d188009454fULL);
}

TEST_CASE("codeword walks on trivial channels") {
  const auto clean = validate_channel(Matrix::Constant(2, 2, 0.5), Vector::Zero(2));
  RunRng rng(1, 0);
  for (int i = 0; i < 100; ++i) CHECK(simulate_codeword(clean, 0, 50, rng).erasures == 0);
  Matrix b(2, 2);
  b << 1.0 - 1e-9, 1e-9, 0.5, 0.5;
  Vector e(2);
  e << 1.0, 0.0;
  const auto sticky = validate_channel(b, e);
  std::size_t full = 0;
  for (int i = 0; i < 100; ++i) full += simulate_codeword(sticky, 0, 50, rng).erasures == 50;
  CHECK(full == 100);
}

TEST_CASE("erasure counts follow the erasure tensor") {
  const auto ch = fixtures::bursty();
  const std::size_t n = 114;
  const auto t = erasure_tensor(ch, n);
  const std::size_t samples = 1000000;
  RunRng rng(5, 0);
  std::vector<std::size_t> counts(n + 1, 0);
  std::size_t ends_bad = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const auto cw = simulate_codeword(ch, 1, n, rng);
    ++counts[cw.erasures];
    ends_bad += cw.end_state == 0;
  }
  std::vector<double> ecdf(n + 1);
  std::vector<double> pmf(n + 1);
  double acc = 0.0;
  for (std::size_t e = 0; e <= n; ++e) {
    acc += static_cast<double>(counts[e]) / samples;
    ecdf[e] = acc;
    pmf[e] = t(1, 0, e) + t(1, 1, e);
  }
  const double dkw = std::sqrt(std::log(200.0) / (2.0 * samples));
  CHECK(ks_against(ecdf, pmf) <= dkw);
  const double p_bad = chain_power(ch, n)(1, 0);
  CHECK(std::abs(static_cast<double>(ends_bad) / samples - p_bad) < 4.0 * std::sqrt(p_bad * (1 - p_bad) / samples));
}

TEST_CASE("scalar channel gives geometric hitting times") {
  SimConfig cfg{fixtures::scalar(0.3), CodeConfig{1, 1, 1}, SeriesKind::Arq, fixed_segments(1), 100000, 9, false};
  const auto res = simulate_h0(cfg);
  std::vector<double> pmf(60, 0.0);
  for (std::size_t t = 1; t < 60; ++t) pmf[t] = std::pow(0.3, t - 1) * 0.7;
  CHECK(ks_against(res.summary.ecdf, pmf) <= res.summary.dkw_epsilon);
  CHECK(res.h0_samples.size() == 100000);
}

TEST_CASE("clean channel delivers one segment per successful round") {
  const auto clean = validate_channel(Matrix::Constant(2, 2, 0.5), Vector::Zero(2));
  for (auto scheme : {SeriesKind::Arq, SeriesKind::HarqOptimistic, SeriesKind::HarqPessimistic}) {
    SimConfig cfg{clean, CodeConfig{20, 10, 3}, scheme, fixed_segments(7), 200, 2, true};
    const auto res = simulate_h0(cfg);
    for (std::size_t r = 0; r < res.h0_samples.size(); ++r) {
      const auto& d = res.service_indicators[r];
      CHECK(d.size() == res.h0_samples[r]);
      CHECK(std::count(d.begin(), d.end(), 1) == 7);
      // ARQ over a clean channel never fails; HARQ rounds before the last
      // still miss the symbols that were not sent yet.
      if (scheme == SeriesKind::Arq) CHECK(res.h0_samples[r] == 7);
    }
  }
}

TEST_CASE("runs are reproducible and seed dependent") {
  const auto ch = fixtures::bursty();
  SimConfig cfg{ch, CodeConfig{114, 81, 3}, SeriesKind::HarqPessimistic, fixed_segments(25), 500, 42, false};
  const auto a = simulate_h0(cfg);
  const auto b = simulate_h0(cfg);
  CHECK(a.h0_samples == b.h0_samples);
  std::ostringstream sa, sb;
  write_samples_csv(a, sa);
  write_samples_csv(b, sb);
  CHECK(sa.str() == sb.str());
  cfg.seed = 43;
  CHECK(simulate_h0(cfg).h0_samples != a.h0_samples);
}

TEST_CASE("simulated mean hitting time at K=73") {
  const auto ch = fixtures::bursty();
  SimConfig cfg{ch, CodeConfig{114, 73, 1}, SeriesKind::Arq,
                buffer_segment_distribution(2000.0, 100.0, 73), 100000, 17, false};
  const auto res = simulate_h0(cfg);
  const double se = std::sqrt(res.summary.variance / 100000.0);
  CHECK(std::abs(res.summary.mean - 33.649) < 3.0 * se);
}

TEST_CASE("HARQ policies against their analytic series") {
  const auto ch = fixtures::bursty();
  const CodeConfig code{114, 81, 3};
  const auto rm = harq_round_matrices(ch, code);
  for (auto [scheme, mode] : {std::pair{SeriesKind::HarqPessimistic, HarqMode::Pessimistic},
                              std::pair{SeriesKind::HarqOptimistic, HarqMode::Optimistic}}) {
    const auto dist = h0_distribution(harq_segment_series(rm, mode), 25, ch.initial(), 1e-12);
    SimConfig cfg{ch, code, scheme, fixed_segments(25), 30000, 23, false};
    const auto res = simulate_h0(cfg);
    CHECK(ks_against(res.summary.ecdf, dist.pmf) <= res.summary.dkw_epsilon);
  }
}

TEST_CASE("long-run service rate") {
  const auto ch = fixtures::bursty();
  const CodeConfig code{114, 73, 1};
  SimConfig cfg{ch, code, SeriesKind::Arq, fixed_segments(1), 1, 3, false};
  const auto d = simulate_service(cfg, 400000);
  double mean = 0.0;
  for (auto x : d) mean += x;
  mean /= static_cast<double>(d.size());
  CHECK(mean == doctest::Approx(asymptotic_means(service_matrices(ch, code)).service).epsilon(0.01));
}
