#include "fpt/scenario.hpp"

#include "fpt/ldp.hpp"
#include "fpt/simulate.hpp"
#include "fpt/spectral.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace fpt {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, path + ": " + msg);
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) config_error(path, "expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) config_error(path + "." + item.key(), "unknown field");
  }
}

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  return j.get<double>();
}

std::size_t count_at(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    config_error(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::vector<double> numbers_at(const json& j, const std::string& path) {
  if (!j.is_array()) config_error(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number_at(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

Grid grid_at(const json& j, const std::string& path) {
  reject_unknown(j, path, {"from", "to", "points"});
  if (!j.contains("from") || !j.contains("to") || !j.contains("points"))
    config_error(path, "grid needs from, to and points");
  Grid g{number_at(j["from"], path + ".from"), number_at(j["to"], path + ".to"),
         count_at(j["points"], path + ".points")};
  if (g.points == 0) config_error(path + ".points", "must be positive");
  return g;
}

std::optional<Vector> initial_at(const json& c) {
  if (!c.contains("initial")) return std::nullopt;
  const json& init = c["initial"];
  if (init.is_string()) {
    if (init.get<std::string>() != "stationary")
      config_error("channel.initial", "expected \"stationary\" or a probability vector");
    return std::nullopt;
  }
  const auto v = numbers_at(init, "channel.initial");
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ChannelModel channel_at(const json& c) {
  reject_unknown(c, "channel", {"transition", "erasure", "initial", "gilbert_elliott"});
  const auto init = initial_at(c);
  try {
    if (c.contains("gilbert_elliott")) {
      const json& g = c["gilbert_elliott"];
      const std::string p = "channel.gilbert_elliott";
      reject_unknown(g, p, {"erasure_rate", "decay", "eps_bad", "eps_good"});
      if (!g.contains("erasure_rate") || !g.contains("decay"))
        config_error(p, "needs erasure_rate and decay");
      return gilbert_elliott(number_at(g["erasure_rate"], p + ".erasure_rate"),
                             number_at(g["decay"], p + ".decay"),
                             g.contains("eps_bad") ? number_at(g["eps_bad"], p + ".eps_bad") : 1.0,
                             g.contains("eps_good") ? number_at(g["eps_good"], p + ".eps_good") : 0.0,
                             init);
    }
    if (!c.contains("transition") || !c.contains("erasure"))
      config_error("channel", "needs transition and erasure (or gilbert_elliott)");
    const json& t = c["transition"];
    if (!t.is_array() || t.empty()) config_error("channel.transition", "expected a square matrix");
    const auto k = t.size();
    Matrix b(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      const std::string rp = "channel.transition[" + std::to_string(i) + "]";
      const auto row = numbers_at(t[i], rp);
      if (row.size() != k) config_error(rp, "row length differs from row count");
      for (std::size_t j = 0; j < k; ++j)
        b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    }
    const auto e = numbers_at(c["erasure"], "channel.erasure");
    return validate_channel(b, Eigen::Map<const Vector>(e.data(), static_cast<Eigen::Index>(e.size())),
                            init);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::ConfigError) throw;
    config_error("channel", err.what());
  }
}

std::vector<std::size_t> info_bits_at(const json& j, std::size_t n) {
  const std::string p = "code.info_bits";
  std::vector<std::size_t> ks;
  if (j.is_number()) {
    ks.push_back(count_at(j, p));
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      ks.push_back(count_at(j[i], p + "[" + std::to_string(i) + "]"));
  } else if (j.is_object()) {
    reject_unknown(j, p, {"from", "to", "step"});
    if (!j.contains("from") || !j.contains("to")) config_error(p, "range needs from and to");
    const auto from = count_at(j["from"], p + ".from");
    const auto to = count_at(j["to"], p + ".to");
    const auto step = j.contains("step") ? count_at(j["step"], p + ".step") : 1;
    if (step == 0) config_error(p + ".step", "must be positive");
    if (to < from) config_error(p, "empty range");
    for (std::size_t k = from; k <= to; k += step) ks.push_back(k);
  } else {
    config_error(p, "expected an integer, an array or a {from, to, step} range");
  }
  if (ks.empty()) config_error(p, "no values");
  for (auto k : ks)
    if (k < 1 || k > n) config_error(p, "value " + std::to_string(k) + " outside [1, block_len]");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

BufferSpec buffer_at(const json& j) {
  reject_unknown(j, "buffer", {"gamma", "bits", "segments"});
  if (j.size() != 1) config_error("buffer", "exactly one of gamma, bits or segments");
  BufferSpec b;
  if (j.contains("gamma")) {
    const json& g = j["gamma"];
    reject_unknown(g, "buffer.gamma", {"mean", "std"});
    if (!g.contains("mean") || !g.contains("std")) config_error("buffer.gamma", "needs mean and std");
    b.kind = BufferSpec::Kind::Gamma;
    b.mean = number_at(g["mean"], "buffer.gamma.mean");
    b.std_dev = number_at(g["std"], "buffer.gamma.std");
    if (!(b.mean > 0.0)) config_error("buffer.gamma.mean", "must be positive");
    if (!(b.std_dev > 0.0)) config_error("buffer.gamma.std", "must be positive");
  } else if (j.contains("bits")) {
    b.kind = BufferSpec::Kind::Bits;
    b.bits = number_at(j["bits"], "buffer.bits");
    if (!(b.bits > 0.0)) config_error("buffer.bits", "must be positive");
  } else {
    b.kind = BufferSpec::Kind::Segments;
    b.segments = count_at(j["segments"], "buffer.segments");
  }
  return b;
}

Queries queries_at(const json& j) {
  reject_unknown(j, "queries",
                 {"crossings", "chernoff_tau", "ldp_tau", "ldp_eta", "tau_grid", "eta_grid"});
  Queries q;
  if (j.contains("crossings")) {
    q.crossings = numbers_at(j["crossings"], "queries.crossings");
    for (double p : q.crossings)
      if (!(p > 0.0 && p < 1.0)) config_error("queries.crossings", "levels must lie in (0,1)");
  }
  if (j.contains("chernoff_tau")) q.chernoff_tau = numbers_at(j["chernoff_tau"], "queries.chernoff_tau");
  if (j.contains("ldp_tau")) q.ldp_tau = numbers_at(j["ldp_tau"], "queries.ldp_tau");
  if (j.contains("ldp_eta")) q.ldp_eta = numbers_at(j["ldp_eta"], "queries.ldp_eta");
  if (j.contains("tau_grid")) q.tau_grid = grid_at(j["tau_grid"], "queries.tau_grid");
  if (j.contains("eta_grid")) q.eta_grid = grid_at(j["eta_grid"], "queries.eta_grid");
  return q;
}

std::string level_name(double p) {
  std::ostringstream os;
  os << std::setprecision(6) << p;
  std::string s = os.str();
  s.erase(std::remove(s.begin(), s.end(), '.'), s.end());
  return s;
}

std::string value_name(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::vector<double> mixed_cdf(const std::vector<double>& pmf) {
  std::vector<double> cdf(pmf.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < pmf.size(); ++t) cdf[t] = acc += pmf[t];
  return cdf;
}

}  // namespace

SeriesKind parse_scheme(const std::string& name) {
  if (name == "arq") return SeriesKind::Arq;
  if (name == "harq-pessimistic") return SeriesKind::HarqPessimistic;
  if (name == "harq-optimistic") return SeriesKind::HarqOptimistic;
  throw Error(ErrorCode::ConfigError, "unknown scheme '" + name + "'");
}

std::vector<double> Grid::values() const {
  std::vector<double> v;
  for (std::size_t i = 0; i < points; ++i)
    v.push_back(points == 1 ? from
                            : from + (to - from) * static_cast<double>(i) /
                                         static_cast<double>(points - 1));
  return v;
}

BufferDistribution BufferSpec::for_info_bits(std::size_t info_bits, double tol) const {
  switch (kind) {
    case Kind::Gamma: return buffer_segment_distribution(mean, std_dev, info_bits, tol);
    case Kind::Bits: return fixed_bits(bits, info_bits);
    case Kind::Segments: return fixed_segments(segments);
  }
  return fixed_segments(segments);
}

std::size_t BufferSpec::point_segments(std::size_t info_bits) const {
  const double k = static_cast<double>(info_bits);
  switch (kind) {
    case Kind::Gamma: return static_cast<std::size_t>(std::ceil(mean / k));
    case Kind::Bits: return static_cast<std::size_t>(std::ceil(bits / k));
    case Kind::Segments: return segments;
  }
  return segments;
}

ScenarioConfig parse_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(root, "config",
                 {"channel", "code", "buffer", "schemes", "queries", "tolerance", "output", "seed",
                  "simulation"});
  if (!root.contains("channel")) config_error("channel", "missing");
  if (!root.contains("code")) config_error("code", "missing");

  ScenarioConfig cfg;
  cfg.channel = channel_at(root["channel"]);

  const json& code = root["code"];
  reject_unknown(code, "code", {"block_len", "info_bits", "harq_depth"});
  if (!code.contains("block_len") || !code.contains("info_bits"))
    config_error("code", "needs block_len and info_bits");
  cfg.block_len = count_at(code["block_len"], "code.block_len");
  if (cfg.block_len < 1) config_error("code.block_len", "must be at least 1");
  cfg.info_bits = info_bits_at(code["info_bits"], cfg.block_len);
  if (code.contains("harq_depth")) {
    cfg.harq_depth = count_at(code["harq_depth"], "code.harq_depth");
    if (cfg.harq_depth < 1) config_error("code.harq_depth", "must be at least 1");
  }

  if (root.contains("buffer")) cfg.buffer = buffer_at(root["buffer"]);
  if (root.contains("schemes")) {
    const json& s = root["schemes"];
    if (!s.is_array() || s.empty()) config_error("schemes", "expected a nonempty array");
    cfg.schemes.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const std::string p = "schemes[" + std::to_string(i) + "]";
      if (!s[i].is_string()) config_error(p, "expected a string");
      try {
        cfg.schemes.push_back(parse_scheme(s[i].get<std::string>()));
      } catch (const Error&) {
        config_error(p, "unknown scheme '" + s[i].get<std::string>() + "'");
      }
    }
  }
  if (root.contains("queries")) cfg.queries = queries_at(root["queries"]);
  if (root.contains("tolerance")) {
    cfg.tol = number_at(root["tolerance"], "tolerance");
    if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) config_error("tolerance", "must lie in (0,1)");
  }
  if (root.contains("output")) {
    const json& o = root["output"];
    reject_unknown(o, "output", {"dir", "prefix"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string()) config_error("output.dir", "expected a string");
      cfg.out_dir = o["dir"].get<std::string>();
    }
    if (o.contains("prefix")) {
      if (!o["prefix"].is_string()) config_error("output.prefix", "expected a string");
      cfg.prefix = o["prefix"].get<std::string>();
    }
  }
  if (root.contains("seed")) cfg.seed = count_at(root["seed"], "seed");
  if (root.contains("simulation")) {
    const json& s = root["simulation"];
    reject_unknown(s, "simulation", {"runs"});
    if (s.contains("runs")) cfg.sim_runs = count_at(s["runs"], "simulation.runs");
    if (cfg.sim_runs < 1) config_error("simulation.runs", "must be at least 1");
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

ScenarioCache::ScenarioCache(const ScenarioConfig& cfg)
    : cfg_(cfg), tensors_(erasure_tensors(cfg.channel, cfg.block_len, cfg.harq_depth)) {}

const ServiceMatrices& ScenarioCache::arq(std::size_t info_bits) {
  auto it = arq_.find(info_bits);
  if (it == arq_.end()) {
    const CodeConfig code{cfg_.block_len, info_bits, 1};
    it = arq_.emplace(info_bits, service_matrices(cfg_.channel, code, tensors_.front())).first;
  }
  return it->second;
}

const HarqRoundMatrices& ScenarioCache::harq(std::size_t info_bits) {
  auto it = harq_.find(info_bits);
  if (it == harq_.end()) {
    const CodeConfig code{cfg_.block_len, info_bits, cfg_.harq_depth};
    it = harq_.emplace(info_bits, harq_round_matrices(cfg_.channel, code, tensors_)).first;
  }
  return it->second;
}

SegmentDelaySeries ScenarioCache::series(std::size_t info_bits, SeriesKind kind) {
  switch (kind) {
    case SeriesKind::Arq: return arq_segment_series(arq(info_bits));
    case SeriesKind::HarqOptimistic:
      return harq_segment_series(harq(info_bits), HarqMode::Optimistic);
    case SeriesKind::HarqPessimistic:
      return harq_segment_series(harq(info_bits), HarqMode::Pessimistic);
  }
  throw Error(ErrorCode::BadArgs, "unknown scheme");
}

PointResult evaluate_point(const ScenarioConfig& cfg, ScenarioCache& cache, std::size_t info_bits,
                           SeriesKind scheme) {
  PointResult r;
  r.info_bits = info_bits;
  r.scheme = scheme;
  const auto& q = cfg.queries;
  const auto fill_nan = [&] {
    r.mean = r.variance = r.variance_within = r.mean_point = r.tail_mass = kNaN;
    r.crossings.assign(q.crossings.size(), kNaN);
    r.chernoff.assign(q.chernoff_tau.size(), kNaN);
    r.ldp_tau.assign(q.ldp_tau.size(), kNaN);
    r.ldp_eta.assign(q.ldp_eta.size(), kNaN);
  };
  fill_nan();
  try {
    const RowVector& pi0 = cfg.channel.initial();
    const auto series = cache.series(info_bits, scheme);
    const auto buffer = cfg.buffer.for_info_bits(info_bits, std::min(cfg.tol / 10.0, 1e-13));
    const std::size_t m_point = cfg.buffer.point_segments(info_bits);
    const std::size_t m_top = std::max(buffer.m_max(), m_point);
    const auto dists = h0_distributions(series, m_top, pi0, cfg.tol);

    const std::size_t len = dists.front().pmf.size();
    r.pmf.assign(len, 0.0);
    double tail = buffer.truncated_mass;
    double within = 0.0;
    double weight = 0.0;
    for (std::size_t m = buffer.m_min; m <= buffer.m_max(); ++m) {
      const double w = buffer.prob(m);
      if (w == 0.0) continue;
      const auto& d = dists[m];
      for (std::size_t t = 0; t < len; ++t) r.pmf[t] += w * d.pmf[t];
      tail += w * d.tail_mass;
      within += w * moments(d).variance;
      weight += w;
    }
    HittingDistribution mixed;
    mixed.pmf = r.pmf;
    mixed.tail_mass = tail;
    const auto mo = moments(mixed);
    r.mean = mo.mean;
    r.variance = mo.variance;
    r.variance_within = within / weight;
    r.tail_mass = tail;
    r.mean_point = moments(dists[m_point]).mean;

    for (std::size_t i = 0; i < q.crossings.size(); ++i) {
      try {
        r.crossings[i] = static_cast<double>(cdf_crossing(mixed, q.crossings[i]));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TailTooHeavy) throw;
      }
    }
    if (scheme == SeriesKind::Arq) {
      const auto& sm = cache.arq(info_bits);
      const auto weights = buffer.weights();
      for (std::size_t i = 0; i < q.chernoff_tau.size(); ++i)
        if (q.chernoff_tau[i] > r.mean) r.chernoff[i] = chernoff_bound(sm, weights, pi0, q.chernoff_tau[i]);
      for (std::size_t i = 0; i < q.ldp_tau.size(); ++i) {
        const auto pt = delay_exponent(sm, q.ldp_tau[i]);
        r.ldp_tau[i] = pt.saturated ? std::numeric_limits<double>::infinity() : pt.value;
      }
      for (std::size_t i = 0; i < q.ldp_eta.size(); ++i) {
        const auto pt = throughput_exponent(sm, q.ldp_eta[i]);
        r.ldp_eta[i] = pt.saturated ? std::numeric_limits<double>::infinity() : pt.value;
      }
    }
  } catch (const Error& e) {
    fill_nan();
    r.pmf.clear();
    r.error = e.what();
  }
  return r;
}

SweepResult run_sweep(const ScenarioConfig& cfg) {
  ScenarioCache cache(cfg);
  SweepResult sweep;
  for (auto k : cfg.info_bits)
    for (auto scheme : cfg.schemes) {
      sweep.rows.push_back(evaluate_point(cfg, cache, k, scheme));
      if (!sweep.rows.back().ok()) sweep.partial = true;
    }
  return sweep;
}

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::vector<std::string> sweep_columns(const ScenarioConfig& cfg) {
  std::vector<std::string> cols{"K", "scheme", "mean_H0", "var_H0"};
  for (double p : cfg.queries.crossings) cols.push_back("h" + level_name(p));
  for (double t : cfg.queries.chernoff_tau) cols.push_back("chernoff_tau_" + value_name(t));
  for (double t : cfg.queries.ldp_tau) cols.push_back("ldp_tau_" + value_name(t));
  for (double e : cfg.queries.ldp_eta) cols.push_back("ldp_eta_" + value_name(e));
  for (const char* c : {"var_within", "mean_H0_point", "tail_mass", "status"}) cols.push_back(c);
  return cols;
}

namespace {

std::vector<std::string> row_cells(const PointResult& r) {
  std::vector<std::string> cells{std::to_string(r.info_bits), to_string(r.scheme),
                                 format_real(r.mean), format_real(r.variance)};
  for (double v : r.crossings) cells.push_back(format_real(v));
  for (double v : r.chernoff) cells.push_back(format_real(v));
  for (double v : r.ldp_tau) cells.push_back(format_real(v));
  for (double v : r.ldp_eta) cells.push_back(format_real(v));
  cells.push_back(format_real(r.variance_within));
  cells.push_back(format_real(r.mean_point));
  cells.push_back(format_real(r.tail_mass));
  cells.push_back(r.ok() ? "ok" : "error");
  return cells;
}

json json_real(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

}  // namespace

void write_sweep_csv(const ScenarioConfig& cfg, const SweepResult& sweep, std::ostream& out) {
  const auto cols = sweep_columns(cfg);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : sweep.rows) {
    const auto cells = row_cells(r);
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }
}

void write_sweep_json(const ScenarioConfig& cfg, const SweepResult& sweep, std::ostream& out) {
  const auto cols = sweep_columns(cfg);
  json rows = json::array();
  for (const auto& r : sweep.rows) {
    const auto cells = row_cells(r);
    json row;
    row["K"] = r.info_bits;
    row["scheme"] = to_string(r.scheme);
    for (std::size_t i = 2; i + 1 < cols.size(); ++i) row[cols[i]] = json_real(std::stod(cells[i]));
    row["status"] = cells.back();
    if (!r.ok()) row["error"] = r.error;
    rows.push_back(row);
  }
  out << json{{"schema", 1}, {"columns", cols}, {"rows", rows}}.dump(2) << '\n';
}

void write_sweep_summary(const ScenarioConfig& cfg, const SweepResult& sweep, std::ostream& out) {
  const auto cols = sweep_columns(cfg);
  json schemes = json::object();
  for (auto scheme : cfg.schemes) {
    json metrics = json::object();
    for (std::size_t c = 2; c + 1 < cols.size(); ++c) {
      if (cols[c] == "tail_mass") continue;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      std::size_t arg_lo = 0;
      std::size_t arg_hi = 0;
      // Rows are in increasing K, so strict comparisons keep the smaller K on ties.
      for (const auto& r : sweep.rows) {
        if (r.scheme != scheme || !r.ok()) continue;
        const double v = std::stod(row_cells(r)[c]);
        if (std::isnan(v)) continue;
        if (v < lo) lo = v, arg_lo = r.info_bits;
        if (v > hi) hi = v, arg_hi = r.info_bits;
      }
      if (arg_lo == 0) continue;
      metrics[cols[c]] = {{"argmin", arg_lo}, {"min", json_real(lo)}, {"argmax", arg_hi},
                          {"max", json_real(hi)}};
    }
    schemes[to_string(scheme)] = metrics;
  }
  json failures = json::array();
  for (const auto& r : sweep.rows)
    if (!r.ok()) failures.push_back({{"K", r.info_bits}, {"scheme", to_string(r.scheme)}, {"error", r.error}});
  json summary{{"schema", 1},
               {"block_len", cfg.block_len},
               {"harq_depth", cfg.harq_depth},
               {"info_bits", cfg.info_bits},
               {"points", sweep.rows.size()},
               {"partial", sweep.partial},
               {"failures", failures},
               {"schemes", schemes}};
  out << summary.dump(2) << '\n';
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

std::vector<LdpCurvePoint> ldp_curves(const ScenarioConfig& cfg) {
  std::vector<double> taus = cfg.queries.ldp_tau;
  std::vector<double> etas = cfg.queries.ldp_eta;
  if (cfg.queries.tau_grid)
    for (double v : cfg.queries.tau_grid->values()) taus.push_back(v);
  if (cfg.queries.eta_grid)
    for (double v : cfg.queries.eta_grid->values()) etas.push_back(v);
  ScenarioCache cache(cfg);
  std::vector<LdpCurvePoint> out;
  for (auto k : cfg.info_bits) {
    const auto& sm = cache.arq(k);
    for (double t : taus)
      out.push_back({k, "tau", t, delay_exponent(sm, t).value, scaled_lambda_star(sm, t)});
    for (double e : etas)
      out.push_back({k, "eta", e, throughput_exponent(sm, e).value, scaled_rate_I(sm, e)});
  }
  return out;
}

void write_ldp_csv(const std::vector<LdpCurvePoint>& pts, std::ostream& out) {
  out << "K,kind,x,exponent,rate,maximizer,saturated,converged\n";
  for (const auto& p : pts)
    out << p.info_bits << ',' << p.kind << ',' << format_real(p.x) << ','
        << format_real(p.exponent) << ',' << format_real(p.scaled.value) << ','
        << format_real(p.scaled.maximizer) << ',' << (p.scaled.saturated ? 1 : 0) << ','
        << (p.scaled.converged ? 1 : 0) << '\n';
}

std::vector<SimPointSummary> simulate_scenario(const ScenarioConfig& cfg,
                                               const std::string& samples_dir) {
  ScenarioCache cache(cfg);
  std::vector<SimPointSummary> out;
  for (auto k : cfg.info_bits) {
    for (auto scheme : cfg.schemes) {
      SimConfig sc{cfg.channel,
                   CodeConfig{cfg.block_len, k, cfg.harq_depth},
                   scheme,
                   cfg.buffer.for_info_bits(k, 1e-13),
                   cfg.sim_runs,
                   cfg.seed,
                   false};
      const auto sim = simulate_h0(sc);
      const auto analytic = evaluate_point(cfg, cache, k, scheme);
      double ks = kNaN;
      if (analytic.ok()) {
        const auto cdf = mixed_cdf(analytic.pmf);
        const auto& ecdf = sim.summary.ecdf;
        ks = 0.0;
        for (std::size_t t = 0; t < std::max(cdf.size(), ecdf.size()); ++t) {
          const double a = t < cdf.size() ? cdf[t] : 1.0;
          const double e = t < ecdf.size() ? ecdf[t] : 1.0;
          ks = std::max(ks, std::abs(a - e));
        }
      }
      out.push_back({k, scheme, cfg.sim_runs, sim.summary.mean, sim.summary.variance,
                     analytic.mean, ks, sim.summary.dkw_epsilon});
      if (!samples_dir.empty()) {
        std::ofstream f(samples_dir + "/" + cfg.prefix + "_samples_K" + std::to_string(k) + "_" +
                        to_string(scheme) + ".csv");
        write_samples_csv(sim, f);
      }
    }
  }
  return out;
}

void write_sim_csv(const std::vector<SimPointSummary>& rows, std::ostream& out) {
  out << "K,scheme,runs,sim_mean,sim_var,analytic_mean,ks_distance,dkw_epsilon,within_band\n";
  for (const auto& r : rows)
    out << r.info_bits << ',' << to_string(r.scheme) << ',' << r.runs << ','
        << format_real(r.mean) << ',' << format_real(r.variance) << ','
        << format_real(r.analytic_mean) << ',' << format_real(r.ks_distance) << ','
        << format_real(r.dkw_epsilon) << ',' << (r.ks_distance <= r.dkw_epsilon ? 1 : 0) << '\n';
}

std::vector<CheckOutcome> run_checks(const ScenarioConfig& cfg) {
  std::vector<CheckOutcome> out;
  auto record = [&](std::string name, double err, double tol) {
    std::ostringstream d;
    d << "max error " << std::setprecision(3) << err << " (tol " << tol << ")";
    out.push_back({std::move(name), err <= tol, d.str()});
  };

  double pf_worst = 0.0;
  bool pf_monotone = true;
  for (std::size_t p = 0; p <= 64; p += 4)
    for (std::size_t e = 0; e <= p; ++e) {
      if (pf(p, e, 200) > pf(p, e + 1, 200)) pf_monotone = false;
      for (std::size_t n = 1; n <= 32; n += 5) {
        const double d = pf(p + n, e + n, 200) - pf(p, e, 200);
        if (d < 0.0) pf_monotone = false;
        pf_worst = std::max(pf_worst, d - std::ldexp(1.0, -static_cast<int>(p)));
      }
    }
  out.push_back({"pf monotone in erasures and shifts", pf_monotone, ""});
  record("pf shift penalty <= 2^-p", std::max(pf_worst, 0.0), 0.0);

  ScenarioCache cache(cfg);
  const Matrix bn = chain_power(cfg.channel, cfg.block_len);
  const auto k = bn.rows();
  const RowVector& pi0 = cfg.channel.initial();
  for (auto kbits : cfg.info_bits) {
    const std::string tag = " [K=" + std::to_string(kbits) + "]";
    try {
      const auto& sm = cache.arq(kbits);
      record("fail + succ = B^N" + tag, inf_norm(sm.fail + sm.succ - bn), 1e-10);
      const Matrix g1 = gt_eval(sm, 1.0);
      record("G_T(1) row-stochastic" + tag, (g1.rowwise().sum() - Vector::Ones(k)).cwiseAbs().maxCoeff(), 1e-10);

      const auto& rm = cache.harq(kbits);
      Vector rows_f = rm.fail_final.rowwise().sum();
      Vector rows_o = rm.succ_at_optimistic_last.rowwise().sum();
      for (std::size_t r = 0; r < rm.depth(); ++r) {
        rows_f += rm.succ_at[r].rowwise().sum();
        if (r + 1 < rm.depth()) rows_o += rm.succ_at[r].rowwise().sum();
      }
      record("HARQ decomposition rows sum to 1" + tag,
             std::max((rows_f.array() - 1.0).abs().maxCoeff(), (rows_o.array() - 1.0).abs().maxCoeff()),
             1e-9);

      double pi_err = 0.0;
      for (double l : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const double a = spectral_radius(pi_lambda(sm, l));
        const double b = spectral_radius(sm.fail + sm.succ * std::exp(l));
        pi_err = std::max(pi_err, std::abs(a - b) / b);
      }
      record("rho(Pi_lambda) = rho(K + M e^lambda)" + tag, pi_err, 1e-10);

      const auto means = asymptotic_means(sm);
      record("T * D = 1" + tag, std::abs(means.sojourn * means.service - 1.0), 1e-9);
      record("rate functions vanish at the means" + tag,
             std::max(lambda_star(sm, means.sojourn).value, rate_I(sm, means.service).value), 1e-8);

      const std::size_t m = cfg.buffer.point_segments(kbits);
      const auto dist = h0_distribution(cache.series(kbits, SeriesKind::Arq), m, pi0, cfg.tol);
      const double mean = h0_mean_exact(sm, m, pi0);
      // Every integer deadline above the mean whose tail is resolved well
      // beyond the truncation error.
      double slack = 0.0;
      std::size_t compared = 0;
      for (double tau = std::floor(mean) + 1.0;; tau += 1.0) {
        const double exact = log_tail(dist, tau);
        if (!std::isfinite(exact) || exact < std::log(1e6 * dist.tail_mass)) break;
        slack = std::max(slack, exact - chernoff_bound(sm, m, pi0, tau));
        ++compared;
      }
      std::ostringstream d;
      d << compared << " deadlines, worst excess " << slack;
      out.push_back({"Chernoff bound >= exact log tail" + tag, compared > 0 && slack <= 0.0, d.str()});
    } catch (const Error& e) {
      out.push_back({"evaluation" + tag, false, e.what()});
    }
  }
  return out;
}

}  // namespace fpt
