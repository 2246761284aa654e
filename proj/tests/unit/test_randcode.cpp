#include "doctest.h"
#include "oracles/oracles.hpp"

#include "fpt/randcode.hpp"
#include "fpt/simulate.hpp"
#include "fpt/types.hpp"

#include <cmath>

using namespace fpt;

TEST_CASE("closed-form values") {
  CHECK(pf(7, 0, 10) == 0.0);
  CHECK(pf(1, 1, 10) == 0.5);
  CHECK(pf(3, 4, 10) == 1.0);
  CHECK(pf(0, 0, 10) == 0.0);
  CHECK(pf(0, 1, 10) == 1.0);
  const double direct = 1.0 - (1.0 - std::ldexp(1.0, -10)) * (1.0 - std::ldexp(1.0, -9)) *
                                  (1.0 - std::ldexp(1.0, -8));
  CHECK(pf(10, 3, 20) == doctest::Approx(direct).epsilon(1e-14));
  CHECK(pf(10, 3, 20) == doctest::Approx(0.0068225935101509).epsilon(1e-12));
  CHECK_THROWS_AS(pf(3, 11, 10), Error);
}

TEST_CASE("matches exhaustive rank counting of random binary matrices") {
  for (std::size_t p = 1; p <= 5; ++p)
    for (std::size_t e = 0; e <= 4 && p * e <= 20; ++e)
      CHECK(pf(p, e, 10) == doctest::Approx(oracle::rank_deficient_fraction(p, e)).epsilon(1e-12));
}

TEST_CASE("Monte-Carlo rank deficiency at p=10, e=3") {
  // Random 10x3 binary matrices, rank by elimination on bit columns.
  RunRng rng(7, 0);
  const std::size_t trials = 1000000;
  std::size_t bad = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    unsigned c[3];
    for (auto& x : c) x = static_cast<unsigned>(rng.uniform() * 1024.0);
    const bool dependent = c[0] == 0 || c[1] == 0 || c[2] == 0 || c[0] == c[1] ||
                           c[0] == c[2] || c[1] == c[2] || (c[0] ^ c[1]) == c[2];
    if (dependent) ++bad;
  }
  const double p = pf(10, 3, 20);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  CHECK(std::abs(static_cast<double>(bad) / trials - p) < 4.0 * se);
}

TEST_CASE("monotonicity and shift penalty bound") {
  for (std::size_t p = 0; p <= 64; ++p)
    for (std::size_t e = 0; e <= p; ++e) {
      CHECK(pf(p, e, 200) <= pf(p, e + 1, 200));
      for (std::size_t n = 1; n <= 32; ++n) {
        const double d = pf(p + n, e + n, 200) - pf(p, e, 200);
        CHECK(d >= 0.0);
        CHECK(d <= std::ldexp(1.0, -static_cast<int>(p)));
      }
    }
}

TEST_CASE("large parity counts stay in range") {
  for (std::size_t p : {1100, 1500, 4000})
    for (std::size_t e : {0, 1, 500, 1099, 1100}) {
      const double v = pf(p, e, 5000);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
}

TEST_CASE("incremental redundancy failure probability") {
  const CodeConfig one{114, 81, 1};
  for (std::size_t e = 0; e <= 114; ++e) CHECK(harq_failure_prob(one, 1, e) == pf(33, e, 114));
  const CodeConfig three{114, 81, 3};
  for (std::size_t e = 0; e <= 342; e += 7) CHECK(harq_failure_prob(three, 3, e) == pf(261, e, 342));
  const double penalty = harq_failure_prob(three, 1, 20) - pf(33, 20, 114);
  CHECK(penalty >= 0.0);
  CHECK(penalty <= std::ldexp(1.0, -33));
  CHECK_THROWS_AS(harq_failure_prob(three, 4, 0), Error);
  CHECK_THROWS_AS(harq_failure_prob(three, 1, 115), Error);
  CHECK_THROWS_AS((CodeConfig{10, 11, 1}.validate()), Error);
}
