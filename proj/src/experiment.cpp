#include "cfmimo/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "cfmimo/dinkelbach.hpp"
#include "cfmimo/errors.hpp"
#include "cfmimo/rng.hpp"
#include "cfmimo/sca.hpp"

namespace cfmimo {

namespace {

enum Stream : std::uint64_t { kTopologyStream = 0, kShadowStream = 1, kChannelStream = 2 };

QosSpec resolve_qos(const ExperimentConfig& cfg, const Instance& inst, const PowerParams& params) {
  switch (cfg.qos.kind) {
    case QosRule::Kind::uniform: return QosSpec::uniform(cfg.k, cfg.qos.value);
    case QosRule::Kind::per_user: return {Eigen::Map<const Eigen::VectorXd>(cfg.qos.per_user.data(), cfg.k)};
    case QosRule::Kind::equal_power_rate: {
      // Common floor at the weakest user's equal-power rate; per-user floors
      // would pin the feasible set to the baseline itself.
      const PowerAllocation eq = equal_power_allocation(inst.imperfect.theta);
      return QosSpec::uniform(cfg.k, per_user_rate(eq, inst.imperfect.gamma, params).minCoeff());
    }
  }
  throw ConfigError("unknown QoS rule");
}

ResultRow make_row(const ExperimentConfig& cfg, Scheme scheme, const Instance& inst, double rho_f_w,
                   const std::string& qos_label) {
  ResultRow row;
  row.scheme = scheme;
  row.m = inst.m;
  row.k = cfg.k;
  row.rho_f_w = rho_f_w;
  row.qos_rule = qos_label;
  row.seed = inst.seed;
  return row;
}

void fill_from(ResultRow& row, const SolveResult& res, const ZfStatistics& zf, const PowerParams& params) {
  row.status = to_string(res.report.status);
  row.iterations = res.report.outer_iterations;
  row.wall_ms = res.report.wall_ms;
  if (res.report.status != RunStatus::infeasible) {
    row.ee_bits_per_joule = energy_efficiency(res.allocation, zf, params).bits_per_joule;
    row.sum_se = sum_rate(res.allocation, zf.gamma, params);
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

}  // namespace

std::uint64_t topology_seed(const ExperimentConfig& cfg, std::size_t index) { return derive_seed(cfg.seed, index); }

Instance make_instance(const ExperimentConfig& cfg, std::size_t m, std::uint64_t seed) {
  Instance inst;
  inst.m = m;
  inst.seed = seed;
  const Topology topo = generate_topology(m, cfg.k, cfg.area_side_km, derive_seed(seed, kTopologyStream));
  Rng shadow = make_stream(seed, kShadowStream);
  inst.beta = large_scale_fading(topo, cfg.sigma_shad_db, cfg.d_min_km, shadow);
  const PowerParams params = cfg.power_params(m, cfg.rho_f_w.front());
  const MmseStats imperfect = mmse_stats(inst.beta, params.rho_r, cfg.pilot_length());
  const MmseStats perfect = MmseStats::perfect(inst.beta);
  // Same stream for both: the perfect and imperfect estimates share the
  // small-scale draws up to their variances.
  const std::uint64_t channel_seed = derive_seed(seed, kChannelStream);
  inst.imperfect = estimate_zf_statistics(imperfect, cfg.n_mc, channel_seed);
  inst.perfect = estimate_zf_statistics(perfect, cfg.n_mc, channel_seed);
  return inst;
}

std::vector<ResultRow> evaluate_instance(const ExperimentConfig& cfg, const Instance& inst, double rho_f_w) {
  const PowerParams params = cfg.power_params(inst.m, rho_f_w);
  const QosSpec qos = resolve_qos(cfg, inst, params);
  const std::string label = cfg.qos.label();
  ZfStatistics perfect = inst.perfect;
  perfect.gamma.setZero();

  std::vector<ResultRow> rows;
  for (Scheme scheme : cfg.schemes) {
    ResultRow row = make_row(cfg, scheme, inst, rho_f_w, label);
    const auto t0 = std::chrono::steady_clock::now();
    switch (scheme) {
      case Scheme::equal: {
        const PowerAllocation eq = equal_power_allocation(inst.imperfect.theta);
        row.ee_bits_per_joule = energy_efficiency(eq, inst.imperfect, params).bits_per_joule;
        row.sum_se = sum_rate(eq, inst.imperfect.gamma, params);
        row.status = to_string(RunStatus::converged);
        break;
      }
      case Scheme::pce: {
        try {
          fill_from(row, solve_pce(perfect, params, qos), perfect, params);
        } catch (const std::runtime_error&) {
          row.status = to_string(RunStatus::inner_failure);
        } catch (const std::invalid_argument&) {
          row.status = to_string(RunStatus::inner_failure);
        }
        break;
      }
      case Scheme::ipce: {
        try {
          fill_from(row, solve_ipce(inst.imperfect, params, qos), inst.imperfect, params);
        } catch (const std::runtime_error&) {
          row.status = to_string(RunStatus::inner_failure);
        } catch (const std::invalid_argument&) {
          row.status = to_string(RunStatus::inner_failure);
        }
        break;
      }
    }
    row.wall_ms = cfg.record_timing
                      ? std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count()
                      : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_point(const ExperimentConfig& cfg, std::size_t m, double rho_f_w, std::uint64_t seed) {
  cfg.validate();
  return evaluate_instance(cfg, make_instance(cfg, m, seed), rho_f_w);
}

bool SweepResult::all_infeasible() const {
  std::size_t optimized = 0;
  std::size_t infeasible = 0;
  for (const auto& r : rows) {
    if (r.scheme == Scheme::equal) continue;
    ++optimized;
    if (r.status == to_string(RunStatus::infeasible)) ++infeasible;
  }
  return optimized > 0 && infeasible == optimized;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t tasks = cfg.m_list.size() * cfg.n_topologies;
  std::vector<std::vector<ResultRow>> per_task(tasks);
  std::vector<std::exception_ptr> errors(tasks);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(tasks); ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const std::size_t m = cfg.m_list[ut / cfg.n_topologies];
    const std::size_t topo = ut % cfg.n_topologies;
    try {
      const Instance inst = make_instance(cfg, m, topology_seed(cfg, topo));
      for (double rho : cfg.rho_f_w) {
        auto rows = evaluate_instance(cfg, inst, rho);
        per_task[ut].insert(per_task[ut].end(), rows.begin(), rows.end());
      }
    } catch (...) {
      errors[ut] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepResult out;
  for (auto& rows : per_task) out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.m, a.rho_f_w, a.scheme, a.seed) < std::tie(b.m, b.rho_f_w, b.scheme, b.seed);
  });
  out.aggregates = aggregate(out.rows);
  return out;
}

SweepResult sweep_m(const ExperimentConfig& cfg) {
  if (cfg.m_list.empty()) throw ConfigError("sweep-m: M list is empty");
  return run_sweep(cfg);
}

SweepResult sweep_rho_f(const ExperimentConfig& cfg) {
  if (cfg.rho_f_w.empty()) throw ConfigError("sweep-rhof: rho_f_w list is empty");
  for (double r : cfg.rho_f_w) {
    if (!(r > 0.0)) throw ConfigError("sweep-rhof: rho_f values must be positive");
  }
  return run_sweep(cfg);
}

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows) {
  using Key = std::tuple<std::size_t, double, Scheme>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows) groups[{r.m, r.rho_f_w, r.scheme}].push_back(&r);

  std::vector<AggregateRow> out;
  for (const auto& [key, members] : groups) {
    AggregateRow a;
    a.m = std::get<0>(key);
    a.rho_f_w = std::get<1>(key);
    a.scheme = std::get<2>(key);
    a.k = members.front()->k;
    a.qos_rule = members.front()->qos_rule;
    a.runs = members.size();
    double sum = 0.0, sq = 0.0, se_sum = 0.0, it_sum = 0.0;
    for (const ResultRow* r : members) {
      if (r->status != to_string(RunStatus::converged)) continue;
      ++a.converged;
      sum += r->ee_bits_per_joule;
      sq += r->ee_bits_per_joule * r->ee_bits_per_joule;
      se_sum += r->sum_se;
      it_sum += r->iterations;
    }
    if (a.converged > 0) {
      const double n = static_cast<double>(a.converged);
      a.mean_ee = sum / n;
      a.mean_sum_se = se_sum / n;
      a.mean_iterations = it_sum / n;
      if (a.converged > 1) a.se_ee = std::sqrt(std::max(0.0, (sq - n * a.mean_ee * a.mean_ee) / (n - 1.0)) / n);
    }
    out.push_back(std::move(a));
  }
  return out;
}

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kRowHeader << '\n';
  for (const auto& r : rows) {
    os << to_string(r.scheme) << ',' << r.m << ',' << r.k << ',' << fmt(r.rho_f_w) << ',' << r.qos_rule << ','
       << r.seed << ',' << fmt(r.ee_bits_per_joule) << ',' << fmt(r.sum_se) << ',' << r.iterations << ','
       << r.status << ',' << fmt(r.wall_ms) << '\n';
  }
}

void write_aggregate_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
  os << kAggregateHeader << '\n';
  for (const auto& a : rows) {
    os << to_string(a.scheme) << ',' << a.m << ',' << a.k << ',' << fmt(a.rho_f_w) << ',' << a.qos_rule << ','
       << a.runs << ',' << a.converged << ',' << a.failures() << ',' << fmt(a.mean_ee) << ',' << fmt(a.se_ee) << ','
       << fmt(a.mean_sum_se) << ',' << fmt(a.mean_iterations) << '\n';
  }
}

std::string aggregate_path(const std::string& out) {
  const std::string ext = ".csv";
  if (out.size() >= ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size()) + "_aggregate.csv";
  }
  return out + "_aggregate.csv";
}

}  // namespace cfmimo
