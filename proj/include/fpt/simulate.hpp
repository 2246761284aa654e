#pragma once

#include "fpt/arq_queue.hpp"
#include "fpt/buffer.hpp"
#include "fpt/channel.hpp"
#include "fpt/randcode.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace fpt {

/// Per-run generator: mt19937_64 seeded with splitmix64 of (seed, run), so
/// every run is reproducible on its own and independent of run order.
class RunRng {
 public:
  RunRng(std::uint64_t seed, std::uint64_t run);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

struct CodewordOutcome {
  std::size_t erasures;
  std::size_t end_state;
};

/// Sends n symbols starting in channel state `state`; returns the erasure
/// count and the state in which the next symbol will be sent.
CodewordOutcome simulate_codeword(const ChannelModel& model, std::size_t state, std::size_t n,
                                  RunRng& rng);

struct SimConfig {
  ChannelModel model;
  CodeConfig code;
  SeriesKind scheme = SeriesKind::Arq;
  BufferDistribution segments = fixed_segments(1);
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  bool record_service = false;
};

struct SimSummary {
  double mean = 0.0;
  double variance = 0.0;
  /// ecdf[t] = fraction of runs with H0 <= t.
  std::vector<double> ecdf;
  /// Half-width of the 99% Dvoretzky-Kiefer-Wolfowitz band.
  double dkw_epsilon = 0.0;
};

struct SimResult {
  std::vector<std::size_t> h0_samples;
  /// Per run, D_s for every round s until the buffer emptied (only when
  /// requested).
  std::vector<std::vector<std::uint8_t>> service_indicators;
  SimSummary summary;
};

SimResult simulate_h0(const SimConfig& cfg);

/// D_1..D_rounds for a saturated queue (one run, always backlogged).
std::vector<std::uint8_t> simulate_service(const SimConfig& cfg, std::size_t rounds,
                                           std::uint64_t run = 0);

SimSummary summarize(const std::vector<std::size_t>& samples, double alpha = 0.01);

void write_samples_csv(const SimResult& result, std::ostream& out);

}  // namespace fpt
