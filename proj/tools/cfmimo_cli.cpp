// Command-line front end: AP-count sweep, AP-power sweep and single runs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cfmimo/config.hpp"
#include "cfmimo/errors.hpp"
#include "cfmimo/experiment.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> schemes;
  std::optional<std::size_t> topologies;
  std::optional<std::size_t> mc;
  bool timing = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key=value configuration file");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "per-run CSV path");
  cmd->add_option("--schemes", o.schemes, "comma-separated subset of pce,ipce,equal");
  cmd->add_option("--topologies", o.topologies, "topology draws per point");
  cmd->add_option("--mc", o.mc, "channel realizations for the ZF expectations");
  cmd->add_flag("--timing", o.timing, "record wall-clock time per run (output no longer reproducible)");
}

cfmimo::ExperimentConfig resolve(const Overrides& o, cfmimo::ExperimentConfig base) {
  cfmimo::ExperimentConfig cfg = o.config_path.empty() ? base : cfmimo::load_config(o.config_path, base);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  if (o.schemes) cfmimo::apply_setting(cfg, "schemes", *o.schemes);
  if (o.topologies) cfg.n_topologies = *o.topologies;
  if (o.mc) cfg.n_mc = *o.mc;
  if (o.timing) cfg.record_timing = true;
  cfg.validate();
  return cfg;
}

int write_sweep(const cfmimo::ExperimentConfig& cfg, const cfmimo::SweepResult& res) {
  std::ofstream rows(cfg.out);
  if (!rows) throw cfmimo::ConfigError("cannot write '" + cfg.out + "'");
  cfmimo::write_rows_csv(rows, res.rows);
  const std::string agg_path = cfmimo::aggregate_path(cfg.out);
  std::ofstream agg(agg_path);
  if (!agg) throw cfmimo::ConfigError("cannot write '" + agg_path + "'");
  cfmimo::write_aggregate_csv(agg, res.aggregates);
  cfmimo::write_aggregate_csv(std::cout, res.aggregates);
  return res.all_infeasible() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-efficient power control for cell-free massive MIMO with zero-forcing precoding"};
  app.require_subcommand(1);

  Overrides sweep_m_opts, sweep_rho_opts, single_opts;
  auto* sweep_m = app.add_subcommand("sweep-m", "average EE versus the number of APs");
  add_common(sweep_m, sweep_m_opts);
  auto* sweep_rho = app.add_subcommand("sweep-rhof", "average EE versus the per-AP transmit power");
  add_common(sweep_rho, sweep_rho_opts);
  auto* single = app.add_subcommand("single", "one topology at the first M and rho_f of the configuration");
  add_common(single, single_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sweep_m->parsed()) {
      const auto cfg = resolve(sweep_m_opts, cfmimo::ExperimentConfig::ap_sweep_defaults());
      return write_sweep(cfg, cfmimo::sweep_m(cfg));
    }
    if (sweep_rho->parsed()) {
      const auto cfg = resolve(sweep_rho_opts, cfmimo::ExperimentConfig::power_sweep_defaults());
      return write_sweep(cfg, cfmimo::sweep_rho_f(cfg));
    }
    const auto cfg = resolve(single_opts, cfmimo::ExperimentConfig{});
    const auto rows =
        cfmimo::run_point(cfg, cfg.m_list.front(), cfg.rho_f_w.front(), cfmimo::topology_seed(cfg, 0));
    if (single_opts.out) {
      std::ofstream os(cfg.out);
      if (!os) throw cfmimo::ConfigError("cannot write '" + cfg.out + "'");
      cfmimo::write_rows_csv(os, rows);
    }
    cfmimo::write_rows_csv(std::cout, rows);
    bool any_feasible = false, any_optimized = false;
    for (const auto& r : rows) {
      if (r.scheme == cfmimo::Scheme::equal) continue;
      any_optimized = true;
      any_feasible = any_feasible || r.status != "infeasible";
    }
    return (any_optimized && !any_feasible) ? 2 : 0;
  } catch (const cfmimo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const cfmimo::ParameterError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
