#include "fpt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fpt {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RunRng::RunRng(std::uint64_t seed, std::uint64_t run)
    : engine_(splitmix64(splitmix64(seed) ^ run)) {}

namespace {

template <typename Weights>
std::size_t draw_index(const Weights& w, std::size_t size, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < size; ++i) {
    acc += w(i);
    if (u < acc) return i;
  }
  return size - 1;
}

// Decoder state machine shared by the ARQ and both HARQ policies.
class Transmitter {
 public:
  Transmitter(const SimConfig& cfg, RunRng& rng, std::size_t state)
      : cfg_(cfg), rng_(rng), state_(state) {
    code_ = cfg.code;
    if (cfg.scheme == SeriesKind::Arq) code_.harq_depth = 1;
  }

  // One round of N symbols; true when a segment is delivered.
  bool round() {
    if (attempt_ == 0) {
      draw_ = rng_.uniform();
      erasures_ = 0;
    }
    ++attempt_;
    const auto cw = simulate_codeword(cfg_.model, state_, code_.block_len, rng_);
    state_ = cw.end_state;
    erasures_ += cw.erasures;
    // One uniform per codeword against the non-increasing sequence
    // Pf_1 >= Pf_2 >= ... keeps the round-wise failures nested.
    const double fail = harq_failure_prob(code_, attempt_, erasures_);
    bool ok = draw_ >= fail;
    if (!ok && attempt_ == code_.harq_depth && cfg_.scheme == SeriesKind::HarqOptimistic) ok = true;
    if (ok || attempt_ == code_.harq_depth) attempt_ = 0;
    return ok;
  }

 private:
  const SimConfig& cfg_;
  RunRng& rng_;
  CodeConfig code_;
  std::size_t state_;
  std::size_t attempt_ = 0;
  std::size_t erasures_ = 0;
  double draw_ = 0.0;
};

std::size_t initial_state(const ChannelModel& model, RunRng& rng) {
  const RowVector& pi = model.initial();
  return draw_index([&](std::size_t i) { return pi(static_cast<Eigen::Index>(i)); },
                    model.states(), rng.uniform());
}

}  // namespace

CodewordOutcome simulate_codeword(const ChannelModel& model, std::size_t state, std::size_t n,
                                  RunRng& rng) {
  const Matrix& b = model.transition();
  const Vector& eps = model.erasure();
  const std::size_t k = model.states();
  std::size_t erasures = 0;
  std::size_t left = n;
  while (left > 0) {
    const auto s = static_cast<Eigen::Index>(state);
    const double stay = b(s, s);
    // Geometric number of consecutive symbols sent in this state;
    // Pr(run > l) = stay^l.
    bool leaves = false;
    std::size_t run = left;
    if (stay <= 0.0) {
      run = 1;
      leaves = true;
    } else if (stay < 1.0) {
      const double u = 1.0 - rng.uniform();
      const double extra = std::floor(std::log(u) / std::log(stay));
      if (extra < static_cast<double>(left)) {
        run = 1 + static_cast<std::size_t>(extra);
        leaves = true;
      }
    }
    const double e = eps(s);
    if (e >= 1.0) {
      erasures += run;
    } else if (e > 0.0) {
      for (std::size_t i = 0; i < run; ++i)
        if (rng.uniform() < e) ++erasures;
    }
    left -= run;
    if (leaves) {
      const double u = rng.uniform() * (1.0 - stay);
      double acc = 0.0;
      std::size_t next = state;
      for (std::size_t j = 0; j < k; ++j) {
        if (j == state) continue;
        const double p = b(s, static_cast<Eigen::Index>(j));
        if (p <= 0.0) continue;
        next = j;
        acc += p;
        if (u < acc) break;
      }
      state = next;
    }
  }
  return {erasures, state};
}

SimResult simulate_h0(const SimConfig& cfg) {
  if (cfg.runs < 1) throw Error(ErrorCode::BadArgs, "need at least one run");
  cfg.code.validate();
  SimResult result;
  result.h0_samples.resize(cfg.runs);
  if (cfg.record_service) result.service_indicators.resize(cfg.runs);
  for (std::size_t r = 0; r < cfg.runs; ++r) {
    RunRng rng(cfg.seed, r);
    const auto& seg = cfg.segments;
    const std::size_t m =
        seg.m_min + draw_index([&](std::size_t i) { return seg.pmf[i]; }, seg.pmf.size(),
                               rng.uniform());
    Transmitter tx(cfg, rng, initial_state(cfg.model, rng));
    std::size_t delivered = 0;
    std::size_t rounds = 0;
    while (delivered < m) {
      const bool ok = tx.round();
      ++rounds;
      if (ok) ++delivered;
      if (cfg.record_service) result.service_indicators[r].push_back(ok ? 1 : 0);
    }
    result.h0_samples[r] = rounds;
  }
  result.summary = summarize(result.h0_samples);
  return result;
}

std::vector<std::uint8_t> simulate_service(const SimConfig& cfg, std::size_t rounds,
                                           std::uint64_t run) {
  cfg.code.validate();
  RunRng rng(cfg.seed, run);
  Transmitter tx(cfg, rng, initial_state(cfg.model, rng));
  std::vector<std::uint8_t> d(rounds);
  for (auto& x : d) x = tx.round() ? 1 : 0;
  return d;
}

SimSummary summarize(const std::vector<std::size_t>& samples, double alpha) {
  SimSummary s;
  const std::size_t n = samples.size();
  if (n == 0) return s;
  double mean = 0.0;
  for (auto x : samples) mean += static_cast<double>(x);
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (auto x : samples) ss += (static_cast<double>(x) - mean) * (static_cast<double>(x) - mean);
  s.mean = mean;
  s.variance = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
  const std::size_t top = *std::max_element(samples.begin(), samples.end());
  std::vector<std::size_t> counts(top + 1, 0);
  for (auto x : samples) ++counts[x];
  s.ecdf.resize(top + 1);
  std::size_t acc = 0;
  for (std::size_t t = 0; t <= top; ++t) {
    acc += counts[t];
    s.ecdf[t] = static_cast<double>(acc) / static_cast<double>(n);
  }
  s.dkw_epsilon = std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
  return s;
}

void write_samples_csv(const SimResult& result, std::ostream& out) {
  out << "run,h0\n";
  for (std::size_t r = 0; r < result.h0_samples.size(); ++r)
    out << r << ',' << result.h0_samples[r] << '\n';
}

}  // namespace fpt
