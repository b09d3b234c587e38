#include <doctest.h>

#include <set>
#include <sstream>
#include <tuple>

#include "cfmimo/errors.hpp"
#include "cfmimo/experiment.hpp"

using namespace cfmimo;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.m_list = {16, 24};
  c.k = 4;
  c.n_mc = 100;
  c.n_topologies = 3;
  c.qos.kind = QosRule::Kind::equal_power_rate;
  c.seed = 5;
  return c;
}

std::string csv_of(const SweepResult& r) {
  std::ostringstream os;
  write_rows_csv(os, r.rows);
  write_aggregate_csv(os, r.aggregates);
  return os.str();
}

}  // namespace

TEST_CASE("run_point emits one row per scheme and is deterministic") {
  const ExperimentConfig c = small_config();
  const auto a = run_point(c, 16, 0.2, 77);
  const auto b = run_point(c, 16, 0.2, 77);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].scheme == b[i].scheme);
    CHECK(a[i].ee_bits_per_joule == b[i].ee_bits_per_joule);
    CHECK(a[i].sum_se == b[i].sum_se);
    CHECK(a[i].status == b[i].status);
    CHECK(a[i].wall_ms == 0.0);
    CHECK(a[i].ee_bits_per_joule >= 0.0);
  }
}

TEST_CASE("the baseline always converges and the optimizers never lose to it") {
  ExperimentConfig c = small_config();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto rows = run_point(c, 24, 0.2, seed);
    double equal_ee = -1.0;
    for (const auto& r : rows) {
      if (r.scheme == Scheme::equal) {
        CHECK(r.status == "converged");
        equal_ee = r.ee_bits_per_joule;
      }
    }
    for (const auto& r : rows) {
      if (r.scheme == Scheme::ipce && r.status == "converged") {
        // same statistics and a feasible set containing the baseline
        CHECK(r.ee_bits_per_joule >= equal_ee * (1.0 - 1e-9));
      }
    }
  }
}

TEST_CASE("perfect and imperfect statistics share the channel draws") {
  const ExperimentConfig c = small_config();
  const Instance inst = make_instance(c, 16, 3);
  CHECK(inst.perfect.gamma.isZero(0.0));
  CHECK(inst.imperfect.gamma.maxCoeff() > 0.0);
  CHECK((inst.perfect.theta.array() > 0.0).all());
  // imperfect estimates are weaker, so ZF needs more power per unit eta
  CHECK(inst.imperfect.theta.sum() > inst.perfect.theta.sum());
}

TEST_CASE("infeasible floors are recorded, not dropped") {
  ExperimentConfig c = small_config();
  c.qos.kind = QosRule::Kind::uniform;
  c.qos.value = 200.0;
  const auto rows = run_point(c, 16, 0.2, 3);
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    if (r.scheme != Scheme::equal) CHECK(r.status == "infeasible");
  }
  c.m_list = {16};
  c.n_topologies = 2;
  CHECK(sweep_m(c).all_infeasible());
}

TEST_CASE("sweeps are byte-identical across reruns and ordered") {
  const ExperimentConfig c = small_config();
  const SweepResult a = sweep_m(c);
  const SweepResult b = sweep_m(c);
  CHECK(csv_of(a) == csv_of(b));
  REQUIRE(a.rows.size() == 2 * 3 * 3);
  for (std::size_t i = 1; i < a.rows.size(); ++i) {
    const auto& p = a.rows[i - 1];
    const auto& q = a.rows[i];
    CHECK(std::tie(p.m, p.rho_f_w, p.scheme, p.seed) <= std::tie(q.m, q.rho_f_w, q.scheme, q.seed));
  }
  CHECK(a.aggregates.size() == 2 * 3);
}

TEST_CASE("topology seeds do not depend on M or rho_f") {
  ExperimentConfig c = small_config();
  c.m_list = {16};
  c.rho_f_w = {0.2, 0.6};
  const SweepResult r = sweep_rho_f(c);
  std::set<std::uint64_t> seeds;
  for (const auto& row : r.rows) seeds.insert(row.seed);
  CHECK(seeds.size() == 3);
  CHECK(seeds.count(topology_seed(c, 0)) == 1);
  CHECK(r.aggregates.size() == 2 * 3);
}

TEST_CASE("a single topology aggregates to itself") {
  ExperimentConfig c = small_config();
  c.m_list = {16};
  c.n_topologies = 1;
  const SweepResult r = sweep_m(c);
  for (const auto& a : r.aggregates) {
    for (const auto& row : r.rows) {
      if (row.scheme != a.scheme || row.status != "converged") continue;
      CHECK(a.mean_ee == row.ee_bits_per_joule);
      CHECK(a.se_ee == 0.0);
      CHECK(a.runs == 1);
    }
  }
}

TEST_CASE("aggregates average converged rows and count the rest") {
  std::vector<ResultRow> rows(3);
  for (auto& r : rows) {
    r.scheme = Scheme::ipce;
    r.m = 10;
    r.rho_f_w = 0.2;
  }
  rows[0].ee_bits_per_joule = 2.0;
  rows[0].status = "converged";
  rows[1].ee_bits_per_joule = 4.0;
  rows[1].status = "converged";
  rows[2].ee_bits_per_joule = 100.0;
  rows[2].status = "max-iter";
  const auto agg = aggregate(rows);
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].runs == 3);
  CHECK(agg[0].converged == 2);
  CHECK(agg[0].failures() == 1);
  CHECK(agg[0].mean_ee == 3.0);
  CHECK(agg[0].se_ee == doctest::Approx(1.0));
}

TEST_CASE("CSV layout") {
  ResultRow r;
  r.scheme = Scheme::pce;
  r.m = 20;
  r.k = 4;
  r.rho_f_w = 0.2;
  r.qos_rule = "1";
  r.seed = 42;
  r.ee_bits_per_joule = 1.5e7;
  r.sum_se = 12.25;
  r.iterations = 3;
  r.status = "converged";
  std::ostringstream os;
  write_rows_csv(os, {r});
  CHECK(os.str() == std::string(kRowHeader) + "\npce,20,4,0.2,1,42,15000000,12.25,3,converged,0\n");
  CHECK(aggregate_path("out/results.csv") == "out/results_aggregate.csv");
  CHECK(aggregate_path("results") == "results_aggregate.csv");
}

TEST_CASE("empty lists are configuration errors") {
  ExperimentConfig c = small_config();
  c.m_list.clear();
  CHECK_THROWS_AS(sweep_m(c), ConfigError);
  c = small_config();
  c.rho_f_w = {-0.2};
  CHECK_THROWS_AS(sweep_rho_f(c), ConfigError);
}
