#pragma once

#include "fpt/arq_queue.hpp"
#include "fpt/buffer.hpp"
#include "fpt/channel.hpp"
#include "fpt/harq.hpp"
#include "fpt/ldp.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fpt {

struct BufferSpec {
  enum class Kind { Gamma, Bits, Segments };
  Kind kind = Kind::Gamma;
  double mean = 2000.0;
  double std_dev = 100.0;
  double bits = 0.0;
  std::size_t segments = 0;

  BufferDistribution for_info_bits(std::size_t info_bits, double tol) const;
  /// Segment count used for the point (non-mixed) evaluation.
  std::size_t point_segments(std::size_t info_bits) const;
};

struct Grid {
  double from = 0.0;
  double to = 0.0;
  std::size_t points = 0;

  std::vector<double> values() const;
};

struct Queries {
  std::vector<double> crossings{0.45, 0.95};
  std::vector<double> chernoff_tau;
  std::vector<double> ldp_tau;
  std::vector<double> ldp_eta;
  std::optional<Grid> tau_grid;
  std::optional<Grid> eta_grid;
};

struct ScenarioConfig {
  ChannelModel channel;
  std::size_t block_len = 0;
  std::vector<std::size_t> info_bits;
  std::size_t harq_depth = 1;
  BufferSpec buffer;
  std::vector<SeriesKind> schemes{SeriesKind::Arq, SeriesKind::HarqPessimistic,
                                  SeriesKind::HarqOptimistic};
  Queries queries;
  double tol = 1e-12;
  std::string out_dir = ".";
  std::string prefix = "fpt";
  std::uint64_t seed = 1;
  std::size_t sim_runs = 10000;
};

/// Parses the JSON scenario format; errors are ConfigError with the
/// offending field path (or the parser's line and column).
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

SeriesKind parse_scheme(const std::string& name);

/// Erasure tensors and service blocks shared across points of one scenario.
class ScenarioCache {
 public:
  explicit ScenarioCache(const ScenarioConfig& cfg);

  const ServiceMatrices& arq(std::size_t info_bits);
  const HarqRoundMatrices& harq(std::size_t info_bits);
  SegmentDelaySeries series(std::size_t info_bits, SeriesKind kind);

 private:
  const ScenarioConfig& cfg_;
  std::vector<ErasureTensor> tensors_;
  std::map<std::size_t, ServiceMatrices> arq_;
  std::map<std::size_t, HarqRoundMatrices> harq_;
};

struct PointResult {
  std::size_t info_bits = 0;
  SeriesKind scheme = SeriesKind::Arq;
  double mean = 0.0;
  double variance = 0.0;
  /// E[Var(H0 | M)], the part of the variance not due to the buffer size.
  double variance_within = 0.0;
  /// E[H0] with M fixed at ceil(E[L]/K).
  double mean_point = 0.0;
  double tail_mass = 0.0;
  std::vector<double> crossings;
  std::vector<double> chernoff;
  std::vector<double> ldp_tau;
  std::vector<double> ldp_eta;
  /// Buffer-mixed pmf of H0.
  std::vector<double> pmf;
  std::string error;

  bool ok() const { return error.empty(); }
};

PointResult evaluate_point(const ScenarioConfig& cfg, ScenarioCache& cache,
                           std::size_t info_bits, SeriesKind scheme);

struct SweepResult {
  std::vector<PointResult> rows;
  bool partial = false;
};

/// Every (K, scheme) pair, ordered by K then by scheme order in the config.
SweepResult run_sweep(const ScenarioConfig& cfg);

std::vector<std::string> sweep_columns(const ScenarioConfig& cfg);
void write_sweep_csv(const ScenarioConfig& cfg, const SweepResult& sweep, std::ostream& out);
void write_sweep_json(const ScenarioConfig& cfg, const SweepResult& sweep, std::ostream& out);
void write_sweep_summary(const ScenarioConfig& cfg, const SweepResult& sweep, std::ostream& out);

/// Parsed CSV: header plus rows of raw cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(std::istream& in);

/// Decimal with 17 significant digits ("nan", "inf" for non-finite values).
std::string format_real(double v);

struct LdpCurvePoint {
  std::size_t info_bits;
  /// "tau": (1/K) Lambda*(K tau / N); "eta": (1/N) I(N eta / K).
  std::string kind;
  double x;
  /// One-sided exponent plotted against K (zero on the non-deviating side).
  double exponent;
  RateCurvePoint scaled;
};

std::vector<LdpCurvePoint> ldp_curves(const ScenarioConfig& cfg);
void write_ldp_csv(const std::vector<LdpCurvePoint>& pts, std::ostream& out);

struct SimPointSummary {
  std::size_t info_bits;
  SeriesKind scheme;
  std::size_t runs;
  double mean;
  double variance;
  double analytic_mean;
  /// sup_t |ECDF(t) - CDF(t)| against the analytic mixed pmf.
  double ks_distance;
  double dkw_epsilon;
};

std::vector<SimPointSummary> simulate_scenario(const ScenarioConfig& cfg,
                                               const std::string& samples_dir);
void write_sim_csv(const std::vector<SimPointSummary>& rows, std::ostream& out);

struct CheckOutcome {
  std::string name;
  bool pass;
  std::string detail;
};

/// Structural invariants of the analytic model for the scenario channel.
std::vector<CheckOutcome> run_checks(const ScenarioConfig& cfg);

}  // namespace fpt
