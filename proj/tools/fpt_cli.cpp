#include "fpt/scenario.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string out_dir;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Monte-Carlo seed (overrides the config)");
  cmd->add_option("--tol", c.tol, "Tail tolerance for hitting-time distributions");
  cmd->add_option("--out-dir", c.out_dir, "Output directory (overrides the config)");
  cmd->add_option("--format", c.format, "Dataset format")->check(CLI::IsMember({"csv", "json"}));
}

fpt::ScenarioConfig load(const Common& c) {
  auto cfg = fpt::load_scenario(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.tol) cfg.tol = *c.tol;
  if (!c.out_dir.empty()) cfg.out_dir = c.out_dir;
  std::filesystem::create_directories(cfg.out_dir);
  return cfg;
}

std::string out_path(const fpt::ScenarioConfig& cfg, const std::string& stem) {
  return (std::filesystem::path(cfg.out_dir) / (cfg.prefix + stem)).string();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw fpt::Error(fpt::ErrorCode::ConfigError, "cannot write '" + path + "'");
  return f;
}

int cmd_analyze(const Common& c, std::optional<std::size_t> k) {
  auto cfg = load(c);
  if (k) {
    if (*k < 1 || *k > cfg.block_len)
      throw fpt::Error(fpt::ErrorCode::BadArgs, "--info-bits outside [1, block_len]");
    cfg.info_bits = {*k};
  } else {
    cfg.info_bits.resize(1);
  }
  const auto sweep = fpt::run_sweep(cfg);
  if (c.format == "json") {
    std::stringstream ss;
    fpt::write_sweep_json(cfg, sweep, ss);
    auto doc = nlohmann::json::parse(ss.str());
    for (std::size_t i = 0; i < sweep.rows.size(); ++i) doc["rows"][i]["pmf"] = sweep.rows[i].pmf;
    std::cout << doc.dump(2) << '\n';
  } else {
    fpt::write_sweep_csv(cfg, sweep, std::cout);
  }
  return sweep.partial ? 3 : 0;
}

int cmd_sweep(const Common& c) {
  const auto cfg = load(c);
  const auto sweep = fpt::run_sweep(cfg);
  const std::string data = out_path(cfg, c.format == "json" ? ".json" : ".csv");
  {
    auto f = open_out(data);
    if (c.format == "json")
      fpt::write_sweep_json(cfg, sweep, f);
    else
      fpt::write_sweep_csv(cfg, sweep, f);
  }
  const std::string summary = out_path(cfg, "_summary.json");
  {
    auto f = open_out(summary);
    fpt::write_sweep_summary(cfg, sweep, f);
  }
  std::cout << data << '\n' << summary << '\n';
  if (sweep.partial) std::cerr << "warning: some points failed; see " << summary << '\n';
  return 0;
}

int cmd_ldp(const Common& c) {
  const auto cfg = load(c);
  const auto pts = fpt::ldp_curves(cfg);
  const std::string path = out_path(cfg, c.format == "json" ? "_ldp.json" : "_ldp.csv");
  auto f = open_out(path);
  if (c.format == "json") {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : pts)
      rows.push_back({{"K", p.info_bits},
                      {"kind", p.kind},
                      {"x", p.x},
                      {"exponent", fpt::format_real(p.exponent)},
                      {"rate", fpt::format_real(p.scaled.value)},
                      {"maximizer", p.scaled.maximizer},
                      {"saturated", p.scaled.saturated},
                      {"converged", p.scaled.converged}});
    f << nlohmann::json{{"schema", 1}, {"points", rows}}.dump(2) << '\n';
  } else {
    fpt::write_ldp_csv(pts, f);
  }
  std::cout << path << '\n';
  return 0;
}

int cmd_simulate(const Common& c, bool keep_samples) {
  const auto cfg = load(c);
  const auto rows = fpt::simulate_scenario(cfg, keep_samples ? cfg.out_dir : std::string());
  const std::string path = out_path(cfg, "_sim.csv");
  auto f = open_out(path);
  fpt::write_sim_csv(rows, f);
  std::cout << path << '\n';
  return 0;
}

int cmd_check(const Common& c) {
  const auto cfg = load(c);
  int failed = 0;
  for (const auto& r : fpt::run_checks(cfg)) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) std::cout << ": " << r.detail;
    std::cout << '\n';
    if (!r.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"First-passage-time analysis of ARQ and hybrid ARQ over Markov erasure channels"};
  app.require_subcommand(1);

  Common analyze_opts, sweep_opts, ldp_opts, sim_opts, check_opts;
  std::optional<std::size_t> info_bits;
  bool keep_samples = false;

  auto* analyze = app.add_subcommand("analyze", "Evaluate a single information-bit setting");
  add_common(analyze, analyze_opts);
  analyze->add_option("--info-bits,-K", info_bits, "Information bits per codeword");

  auto* sweep = app.add_subcommand("sweep", "Sweep the configured K range and write datasets");
  add_common(sweep, sweep_opts);

  auto* ldp = app.add_subcommand("ldp-curves", "Scaled rate-function curves over K");
  add_common(ldp, ldp_opts);

  auto* sim = app.add_subcommand("simulate", "Monte-Carlo hitting times against the analysis");
  add_common(sim, sim_opts);
  sim->add_flag("--samples", keep_samples, "Also write the raw samples of each point");

  auto* check = app.add_subcommand("check", "Run the model invariant suite");
  add_common(check, check_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(analyze_opts, info_bits);
    if (sweep->parsed()) return cmd_sweep(sweep_opts);
    if (ldp->parsed()) return cmd_ldp(ldp_opts);
    if (sim->parsed()) return cmd_simulate(sim_opts, keep_samples);
    if (check->parsed()) return cmd_check(check_opts);
  } catch (const fpt::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
