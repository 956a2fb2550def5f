// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "karma/config.hpp"
#include "karma/simulation.hpp"

using namespace karma;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

const auto kExp = SensitivityDistribution::exponential(1.0);
const ArcCostModel kBpr(BprParams{}, SocietalCost::SumOfDiscomforts);
const ArcCostModel kLinear(BprParams{}, SocietalCost::LinearFlow);

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> price(1, 20);
  std::uniform_int_distribution<int> horizon(1, 10);
  std::exponential_distribution<double> sens(1.0);
  long compared = 0;
  long mismatches = 0;
  long ties = 0;
  std::array<long, 3> per_order{};
  std::array<long, 2> per_branch{};  // k_poor = p1, k_poor = k_ref + p1 - T r2
  while (compared < 200'000) {
    const PriceVector p(price(rng), price(rng));
    const int T = horizon(rng);
    const double k_ref = 250.0 * unit(rng);
    const Thresholds th = thresholds(k_ref, p, T);
    const double k = th.floor + (th.wealthy + 2 * p.reward - th.floor) * unit(rng);
    const double s = sens(rng) * 2.0;
    const double s_bar = 0.5 + 1.5 * unit(rng);
    std::array<double, 2> d{1.0 + 3.0 * unit(rng), 1.0 + 3.0 * unit(rng)};
    if (unit(rng) < 0.2) d[1] = d[0];
    const PlanResult oracle = plan_oracle({k, k_ref, s}, d, p, T, s_bar);
    const DiscomfortOrder order = classify(d);
    const RouteChoice br = best_response({k, k_ref, s}, th, s_bar, p, order);
    if (oracle.options[0] && oracle.options[1]) {
      const double j1 = oracle.options[0]->objective;
      const double j2 = oracle.options[1]->objective;
      if (std::abs(j1 - j2) <= 1e-9 * std::max({1.0, std::abs(j1), std::abs(j2)})) {
        // Indifferent agents take arc 2.
        ++ties;
        if (br != RouteChoice::Arc2) ++mismatches;
        ++per_order[static_cast<int>(order)];
        continue;
      }
    }
    if (br != oracle.choice) ++mismatches;
    ++compared;
    ++per_order[static_cast<int>(order)];
    ++per_branch[k_ref + p.toll - T * p.reward <= p.toll ? 0 : 1];
  }
  const bool spans = *std::min_element(per_order.begin(), per_order.end()) > 10'000 &&
                     std::min(per_branch[0], per_branch[1]) > 10'000;
  return {mismatches == 0 && spans,
          fmt("%ld instances, %ld mismatches, %ld inside the tie band; orderings %ld/%ld/%ld; k_poor branches %ld/%ld",
              compared, mismatches, ties, per_order[0], per_order[1], per_order[2], per_branch[0],
              per_branch[1])};
}

Outcome optimum_reproduction() {
  const FlowVector a = system_optimum(kBpr, 0.95);
  const FlowVector b = system_optimum(kBpr, 1.0);
  const bool pass = std::abs(a.arc1 - 0.56) <= 0.01 && std::abs(a.arc2 - 0.39) <= 0.01 &&
                    std::abs(b.arc1 - 0.57) <= 0.01 && std::abs(b.arc2 - 0.43) <= 0.01;
  return {pass, fmt("P_go 0.95: (%.4f, %.4f); P_go 1.0: (%.4f, %.4f)", a.arc1, a.arc2, b.arc1, b.arc2)};
}

Outcome price_reproduction() {
  const auto design = [](double p_go, const ArcCostModel& m) {
    return rationalize_fixed_toll(conservation_prices(system_optimum(m, p_go)), 10, 6);
  };
  const PriceVector f3 = design(0.95, kBpr);
  const PriceVector f5 = design(1.0, kBpr);
  const PriceVector f6 = design(0.95, kLinear);
  const bool pass = f3 == PriceVector(10, 14) && f5 == PriceVector(10, 13) && f6.toll == f6.reward;
  return {pass, fmt("fig3 (%d, -%d), fig5 (%d, -%d), fig6 (%d, -%d)", f3.toll, f3.reward, f5.toll, f5.reward,
                    f6.toll, f6.reward)};
}

Outcome chain_sweep() {
  double worst_column = 0.0;
  double worst_residual = 0.0;
  int chains = 0;
  for (int sum = 2; sum <= 30; ++sum) {
    for (int p1 = 1; 2 * p1 <= sum; ++p1) {
      const int r2 = sum - p1;
      if (std::gcd(p1, r2) != 1) continue;
      for (int T = 1; T <= 8; ++T) {
        const KarmaChain chain({p1, r2}, T, 0.05, kExp);
        const Eigen::SparseMatrix<double> a = chain.transition_matrix();
        for (int c = 0; c < a.outerSize(); ++c) {
          double col = 0.0;
          for (Eigen::SparseMatrix<double>::InnerIterator it(a, c); it; ++it) col += it.value();
          worst_column = std::max(worst_column, std::abs(col - 1.0));
        }
        worst_residual = std::max(worst_residual, chain.residual(chain.stationary(1e-11)));
        ++chains;
      }
    }
  }
  return {worst_column <= 1e-12 && worst_residual <= 1e-10,
          fmt("%d chains; max |column sum - 1| = %.2e, max residual = %.2e", chains, worst_column,
              worst_residual)};
}

Outcome flow_optimality() {
  bool pass = true;
  std::string detail;
  for (const char* name : {"fig3", "fig5", "fig6"}) {
    const RunConfig c = preset_config(name);
    const PriceVector p = c.pricing.explicit_prices.reduced();
    const KarmaChain chain(p, c.scenario.horizon, c.scenario.p_home, c.scenario.sensitivity);
    // P_home = 0 makes A periodic, so use the direct null-space solve there.
    const QuantizedDistribution pe = c.scenario.p_home > 0.0 ? chain.stationary() : chain.stationary_dense();
    const FlowVector x = chain.equilibrium_flows(pe);
    const double err = std::abs(x.arc1 / x.arc2 - static_cast<double>(p.reward) / p.toll);
    pass = pass && err <= 1e-9;
    detail += fmt("%s p=(%d,-%d) x=(%.4f, %.4f) ratio error %.1e; ", name, p.toll, p.reward, x.arc1, x.arc2, err);
  }
  return {pass, detail};
}

Outcome balanced() {
  const auto a = balanced_flow(kBpr, 0.95);
  const auto b = balanced_flow(kBpr, 1.0);
  const bool pass = a && b && std::abs(a->arc1 - 0.80) <= 0.01 && std::abs(b->arc1 - 0.80) <= 0.01;
  return {pass, fmt("x1 = %.4f (P_go 0.95), %.4f (P_go 1.0)", a ? a->arc1 : NAN, b ? b->arc1 : NAN)};
}

struct PresetRuns {
  std::vector<RunResult> runs;
  bool floor_ok = true;
};

SimulationOptions acceptance_options() {
  SimulationOptions o;
  o.optimum_tol = 1e-10;
  return o;
}

PresetRuns run_preset(const char* name, int days, int seeds) {
  PresetRuns out;
  for (int i = 0; i < seeds; ++i) {
    RunConfig c = preset_config(name);
    c.scenario.seed = 42 + i;
    out.runs.push_back(
        run_scenario(c.scenario, c.model(), c.pricing.explicit_prices, days, acceptance_options()));
    for (const DayRecord& d : out.runs.back().days) out.floor_ok = out.floor_ok && d.floor_respected;
  }
  return out;
}

TailSummary tail_100(const RunResult& r) {
  return summarize_tail(r.days, 100.0 / static_cast<double>(r.days.size()));
}

struct SeedMeans {
  double cost_ratio = 0.0;
  double delta_d = 0.0;
  FlowVector flows;
  std::string per_seed;
};

SeedMeans seed_means(const PresetRuns& p) {
  SeedMeans m;
  for (const RunResult& r : p.runs) {
    const TailSummary t = tail_100(r);
    m.cost_ratio += t.mean_cost_ratio;
    m.delta_d += t.mean_delta_discomfort;
    m.flows.arc1 += t.mean_flows.arc1;
    m.flows.arc2 += t.mean_flows.arc2;
    m.per_seed += fmt(" [%.4f %.3f (%.3f,%.3f)]", t.mean_cost_ratio, t.mean_delta_discomfort, t.mean_flows.arc1,
                      t.mean_flows.arc2);
  }
  const double n = static_cast<double>(p.runs.size());
  m.cost_ratio /= n;
  m.delta_d /= n;
  m.flows.arc1 /= n;
  m.flows.arc2 /= n;
  return m;
}

bool g_floor_ok = true;

Outcome fig3_end_to_end() {
  const PresetRuns runs = run_preset("fig3", 500, 5);
  g_floor_ok = g_floor_ok && runs.floor_ok;
  const SeedMeans m = seed_means(runs);
  const bool pass = std::abs(m.cost_ratio - 1.0) <= 0.01 && m.delta_d >= -0.20 && m.delta_d <= -0.08;
  return {pass, fmt("5 seeds, last 100 of 500 days: cost/optimum %.5f, delta_d %.2f%%; per seed%s", m.cost_ratio,
                    100.0 * m.delta_d, m.per_seed.c_str())};
}

Outcome fig5_end_to_end() {
  const PresetRuns runs = run_preset("fig5", 500, 5);
  g_floor_ok = g_floor_ok && runs.floor_ok;
  const SeedMeans m = seed_means(runs);
  double worst = std::numeric_limits<double>::infinity();
  bool constant_travelers = true;
  for (const RunResult& r : runs.runs) {
    for (const DayRecord& d : r.days) {
      worst = std::min(worst, d.societal_cost / d.optimal_cost);
      constant_travelers = constant_travelers && d.travelers == r.days.front().travelers;
    }
  }
  const bool pass = std::abs(m.flows.arc1 - 0.57) <= 0.02 && std::abs(m.flows.arc2 - 0.43) <= 0.02 &&
                    worst >= 1.0 - 1e-12 && constant_travelers;
  return {pass, fmt("5 seeds, tail flows (%.4f, %.4f); lowest daily cost/optimum %.6f", m.flows.arc1,
                    m.flows.arc2, worst)};
}

Outcome fig6_end_to_end() {
  const PresetRuns runs = run_preset("fig6", 500, 5);
  g_floor_ok = g_floor_ok && runs.floor_ok;
  const SeedMeans m = seed_means(runs);
  const bool pass = std::abs(m.flows.arc1 - 0.475) <= 0.02 && std::abs(m.flows.arc2 - 0.475) <= 0.02 &&
                    m.delta_d >= -0.26 && m.delta_d <= -0.14;
  return {pass, fmt("5 seeds, tail flows (%.4f, %.4f), delta_d %.2f%%; per seed%s", m.flows.arc1, m.flows.arc2,
                    100.0 * m.delta_d, m.per_seed.c_str())};
}

// Arc 2 is ten times slower at every load, so every day is controlled and
// each agent follows the chain's transition law exactly.
Outcome chain_cross_validation() {
  const PriceVector p{5, 7};
  const int T = 6;
  const double k_ref = 60.0;
  Scenario s;
  s.p_home = 0.05;
  s.horizon = T;
  s.population = 10'000;
  s.sensitivity = kExp;
  s.karma.reference = {k_ref, k_ref};
  const Thresholds th = thresholds(k_ref, p, T);
  s.karma.initial = {k_ref - T * p.reward, th.wealthy + p.reward - 1};
  s.karma.integer_lattice = true;
  s.seed = 7;
  BprParams bpr;
  bpr.free_flow = {1.0, 10.0};
  bpr.alpha = 0.0;
  const RunResult r = run_scenario(s, ArcCostModel(bpr, SocietalCost::SumOfDiscomforts), p, 300);
  for (const DayRecord& d : r.days) g_floor_ok = g_floor_ok && d.floor_respected;
  const KarmaChain chain(p, T, s.p_home, kExp);
  const double tv = total_variation(r.final_histogram.distribution, chain.stationary());
  return {tv <= 0.05 && r.final_histogram.clamped == 0,
          fmt("10000 agents, 300 days, %d states: TV distance %.4f, %d agents outside the chain", chain.size(), tv,
              r.final_histogram.clamped)};
}

Outcome property_suites() {
  std::string detail;
  bool pass = true;

  // Positive invariance of [k_inf, k_wealthy + r2) and attraction from above.
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> sens(1.0);
  long escapes = 0;
  long not_attracted = 0;
  for (const PriceVector p : {PriceVector(10, 14), PriceVector(10, 13), PriceVector(10, 10), PriceVector(3, 8),
                              PriceVector(9, 4)}) {
    for (int T : {1, 3, 6, 8}) {
      if (!p.feasible_for(T)) continue;
      for (int agent = 0; agent < 50; ++agent) {
        const double k_ref = 100.0 * unit(rng);
        const Thresholds th = thresholds(k_ref, p, T);
        const double top = th.wealthy + p.reward;
        double inside = th.floor + (top - th.floor) * unit(rng);
        double above = top + 20.0 * (p.toll + p.reward) * unit(rng);
        for (int day = 0; day < 2000; ++day) {
          const double s = sens(rng);
          inside = apply_choice(inside, best_response({inside, k_ref, s}, th, 1.0, p, DiscomfortOrder::D1LessD2), p);
          above = apply_choice(above, best_response({above, k_ref, s}, th, 1.0, p, DiscomfortOrder::D1LessD2), p);
          if (inside < th.floor || inside >= top) ++escapes;
        }
        if (above < th.floor || above >= top) ++not_attracted;
      }
    }
  }
  pass = pass && escapes == 0 && not_attracted == 0;
  detail += fmt("invariance escapes %ld, unattracted agents %ld; ", escapes, not_attracted);

  // Determinism under a fixed seed, for both kernels.
  RunConfig c = preset_config("fig3");
  c.scenario.seed = 5;
  SimulationOptions serial;
  serial.wardrop.exec = Execution::Serial;
  const RunResult a = run_scenario(c.scenario, c.model(), c.pricing.explicit_prices, 150);
  const RunResult b = run_scenario(c.scenario, c.model(), c.pricing.explicit_prices, 150);
  const RunResult s = run_scenario(c.scenario, c.model(), c.pricing.explicit_prices, 150, serial);
  bool same = a.final_population.karma == b.final_population.karma &&
              a.final_population.karma == s.final_population.karma;
  for (std::size_t i = 0; i < a.days.size(); ++i) {
    same = same && a.days[i].flows == b.days[i].flows && a.days[i].flows == s.days[i].flows &&
           a.days[i].societal_cost == b.days[i].societal_cost;
  }
  pass = pass && same;
  detail += fmt("repeat runs identical: %s; ", same ? "yes" : "no");

  // Uncontrolled equilibria drain Karma.
  bool drains = true;
  for (double p_go : {0.95, 1.0}) {
    drains = drains && PriceVector(10, 14).karma_drain(*balanced_flow(kBpr, p_go)) > 0.0;
    drains = drains && PriceVector(10, 13).karma_drain(*balanced_flow(kBpr, p_go)) > 0.0;
  }
  int uncontrolled = 0;
  int drained = 0;
  double before = a.days.empty() ? 0.0 : a.days.front().total_karma;
  for (std::size_t i = 1; i < a.days.size(); ++i) {
    if (a.days[i].regime == Regime::Uncontrolled) {
      ++uncontrolled;
      if (a.days[i].total_karma < before) ++drained;
    }
    before = a.days[i].total_karma;
  }
  drains = drains && uncontrolled > 0 && drained == uncontrolled;
  pass = pass && drains;
  detail += fmt("drain at balanced flows positive, %d/%d uncontrolled days lost Karma; ", drained, uncontrolled);

  pass = pass && g_floor_ok;
  detail += fmt("Karma floor respected in every simulated day: %s", g_floor_ok ? "yes" : "no");
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"best response matches the planning oracle", oracle_equivalence},
      {"system optimum reproduction", optimum_reproduction},
      {"price design reproduction", price_reproduction},
      {"chain stochasticity and stationarity sweep", chain_sweep},
      {"stationary flows satisfy x1/x2 = r2/p1", flow_optimality},
      {"balanced flow", balanced},
      {"fig3 end-to-end", fig3_end_to_end},
      {"fig5 end-to-end", fig5_end_to_end},
      {"fig6 end-to-end", fig6_end_to_end},
      {"chain and simulation cross-validation", chain_cross_validation},
      {"property suites", property_suites},
  };
  int failed = 0;
  int id = 0;
  for (const auto& [name, check] : criteria) {
    ++id;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %2d %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %d criteria passed\n", id - failed, id);
  return failed;
}
