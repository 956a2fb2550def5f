#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "karma/config.hpp"
#include "karma/simulation.hpp"

namespace fs = std::filesystem;
using namespace karma;

namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

struct CommonArgs {
  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> days;
  std::optional<int> max_price;
  std::optional<double> p_home;
  std::optional<int> horizon;
  std::optional<int> population;
  std::optional<int> toll;
  std::optional<int> reward;
  std::optional<int> toll_scale;
  double tol = kDefaultFlowTol;
  std::string out = ".";
};

void add_common(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--preset", a.preset, "Built-in scenario")->check(CLI::IsMember({"fig3", "fig5", "fig6"}));
  cmd->add_option("--config", a.config, "INI config file");
  cmd->add_option("--seed", a.seed, "RNG seed");
  cmd->add_option("--days", a.days, "Days to simulate")->check(CLI::PositiveNumber);
  cmd->add_option("--max-price", a.max_price, "Use the best co-prime price pair up to this bound");
  cmd->add_option("--p-home", a.p_home, "Probability of staying home")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--horizon", a.horizon, "Planning horizon T")->check(CLI::PositiveNumber);
  cmd->add_option("--population", a.population, "Number of agents")->check(CLI::PositiveNumber);
  cmd->add_option("--p1", a.toll, "Explicit arc-1 toll")->check(CLI::PositiveNumber);
  cmd->add_option("--r2", a.reward, "Explicit arc-2 reward")->check(CLI::PositiveNumber);
  cmd->add_option("--toll-scale", a.toll_scale, "Fixed toll used when rounding the price ratio");
  cmd->add_option("--tol", a.tol, "Flow tolerance for the optimum and balanced-flow solvers")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", a.out, "Output directory");
}

// Config file first, then preset, then individual flags.
RunConfig build_config(const CommonArgs& a) {
  RunConfig c = a.config ? read_config_file(*a.config) : RunConfig{};
  if (a.preset) apply_preset(c, *a.preset);
  Scenario& s = c.scenario;
  if (a.seed) s.seed = *a.seed;
  if (a.days) c.days = *a.days;
  if (a.p_home) s.p_home = *a.p_home;
  if (a.horizon) s.horizon = *a.horizon;
  if (a.population) s.population = *a.population;
  if (a.toll_scale) {
    c.pricing.mode = PricingMode::FixedToll;
    c.pricing.toll_scale = *a.toll_scale;
  }
  if (a.max_price) {
    c.pricing.mode = PricingMode::BestApproximation;
    c.pricing.max_price = *a.max_price;
  }
  if (a.toll || a.reward) {
    if (!(a.toll && a.reward)) throw InvalidArgument("--p1 and --r2 must be given together");
    c.pricing.mode = PricingMode::Explicit;
    c.pricing.explicit_prices = PriceVector(*a.toll, *a.reward);
  }
  c.validate();
  return c;
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << std::setprecision(12);
  return f;
}

void print_design(std::ostream& out, const PriceDesign& d) {
  out << "optimum_x1 = " << d.optimum.arc1 << '\n' << "optimum_x2 = " << d.optimum.arc2 << '\n';
  if (d.ratio) out << "price_ratio_toll_per_reward = " << d.ratio->toll_per_reward() << '\n';
  out << "toll = " << d.prices.toll << '\n' << "reward = " << d.prices.reward << '\n';
}

int run_command(const CommonArgs& a) {
  const RunConfig c = build_config(a);
  const ArcCostModel model = c.model();
  PriceDesign design;
  if (c.scenario.p_go() > 0.0) {
    design = design_prices(c, a.tol);
  } else {
    if (c.pricing.mode != PricingMode::Explicit) throw InvalidArgument("P_home = 1 needs explicit prices");
    design.prices = c.pricing.explicit_prices;
  }
  spdlog::info("prices ({}, {}), {} agents, {} days", design.prices.toll, design.prices.reward,
               c.scenario.population, c.days);

  SimulationOptions opts;
  opts.optimum_tol = a.tol;
  Simulator sim(c.scenario, model, design.prices, opts);
  RunResult result;
  result.days.reserve(c.days);
  for (int d = 0; d < c.days; ++d) {
    result.days.push_back(sim.simulate_day());
    const DayRecord& r = result.days.back();
    spdlog::debug("day {} x=({:.4f}, {:.4f}) ratio {:.5f} iters {}", r.day, r.flows.arc1, r.flows.arc2,
                  r.cost_ratio, r.nash_iterations);
  }
  const Population& pop = sim.population();
  std::vector<std::pair<double, double>> agents(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) agents[i] = {pop.karma[i], pop.reference[i]};
  result.final_histogram = quantize_population(agents, design.prices, c.scenario.horizon);
  result.tail = summarize_tail(result.days);

  const fs::path out = prepare_out(a.out);
  {
    auto f = open_out(out / "run.csv");
    write_run_csv(f, result.days);
  }
  {
    auto f = open_out(out / "karma_hist.csv");
    write_histogram_csv(f, result.final_histogram, pop.size());
  }
  auto f = open_out(out / "summary.txt");
  const TailSummary& t = result.tail;
  f << "preset = " << c.preset.value_or("none") << '\n'
    << "days = " << c.days << '\n'
    << "seed = " << c.scenario.seed << '\n';
  print_design(f, design);
  f << "tail_first_day = " << t.first_day << '\n'
    << "tail_days = " << t.days << '\n'
    << "tail_cost_ratio = " << t.mean_cost_ratio << '\n'
    << "tail_delta_discomfort = " << t.mean_delta_discomfort << '\n'
    << "tail_delta_sensitivity = " << t.mean_delta_sensitivity << '\n'
    << "tail_x1 = " << t.mean_flows.arc1 << '\n'
    << "tail_x2 = " << t.mean_flows.arc2 << '\n'
    << "tail_mean_karma = " << t.mean_karma << '\n'
    << "tail_uncontrolled_days = " << t.uncontrolled_days << '\n'
    << "agents_clamped_at_init = " << pop.clamped_at_init << '\n'
    << "histogram_clamped = " << result.final_histogram.clamped << '\n';
  std::cout << "tail cost ratio " << t.mean_cost_ratio << ", delta_d " << t.mean_delta_discomfort
            << ", flows (" << t.mean_flows.arc1 << ", " << t.mean_flows.arc2 << ")\n"
            << "wrote " << (out / "run.csv").string() << ", karma_hist.csv, summary.txt\n";
  return 0;
}

int analyze_chain_command(const CommonArgs& a, bool trajectory_only, int steps) {
  const RunConfig c = build_config(a);
  PriceVector p;
  if (c.pricing.mode == PricingMode::Explicit) {
    p = c.pricing.explicit_prices;
  } else {
    p = design_prices(c, a.tol).prices;
  }
  const PriceVector reduced = p.reduced();
  if (!(reduced == p)) spdlog::info("prices ({}, {}) reduced to ({}, {})", p.toll, p.reward, reduced.toll, reduced.reward);
  if (!trajectory_only && c.scenario.p_home == 0.0) {
    std::cerr << "error: stationary analysis needs P_home > 0 (the chain is periodic at P_home = 0); "
                 "pass --trajectory-only to iterate the distribution instead\n";
    return kUsageError;
  }
  const KarmaChain chain(reduced, c.scenario.horizon, c.scenario.p_home, c.scenario.sensitivity);
  const fs::path out = prepare_out(a.out);
  {
    auto f = open_out(out / "A.coo");
    chain.write_coordinates(f);
  }

  if (trajectory_only) {
    auto f = open_out(out / "trajectory.csv");
    f << "step,x1,x2,residual\n";
    QuantizedDistribution dist = QuantizedDistribution::uniform(chain.size());
    for (int s = 0; s <= steps; ++s) {
      const FlowVector x = chain.equilibrium_flows(dist);
      f << s << ',' << x.arc1 << ',' << x.arc2 << ',' << chain.residual(dist) << '\n';
      dist = chain.step(dist);
    }
    std::cout << "states " << chain.size() << ", wrote A.coo and trajectory.csv (" << steps << " steps)\n";
    return 0;
  }

  const QuantizedDistribution pe = chain.stationary();
  {
    auto f = open_out(out / "stationary.csv");
    f << "index,mass\n";
    for (int i = 0; i < pe.size(); ++i) f << i + 1 << ',' << pe[i] << '\n';
  }
  const FlowVector x = chain.equilibrium_flows(pe);
  const double ratio = x.arc1 / x.arc2;
  const double expected = static_cast<double>(reduced.reward) / reduced.toll;
  std::cout << std::setprecision(12) << "states = " << chain.size() << '\n'
            << "equilibrium_x1 = " << x.arc1 << '\n'
            << "equilibrium_x2 = " << x.arc2 << '\n'
            << "residual_l1 = " << chain.residual(pe) << '\n'
            << "flow_ratio = " << ratio << '\n'
            << "reward_per_toll = " << expected << '\n'
            << "ratio_error = " << std::abs(ratio - expected) << '\n';
  return 0;
}

int design_prices_command(const CommonArgs& a) {
  const RunConfig c = build_config(a);
  const PriceDesign d = design_prices(c, a.tol);
  std::cout << std::setprecision(10) << "p_go = " << c.scenario.p_go() << '\n';
  if (!d.ratio) {
    RunConfig derived = c;
    derived.pricing.mode = PricingMode::FixedToll;
    const PriceDesign from_optimum = design_prices(derived, a.tol);
    std::cout << "price_ratio_toll_per_reward = " << from_optimum.ratio->toll_per_reward() << '\n';
  }
  print_design(std::cout, d);
  std::cout << "coprime = " << (d.prices.is_coprime() ? "yes" : "no") << '\n';
  return 0;
}

int system_optimum_command(const CommonArgs& a) {
  const RunConfig c = build_config(a);
  const ArcCostModel model = c.model();
  const double total = c.scenario.p_go();
  const FlowVector x = system_optimum(model, total, a.tol);
  const auto d = model.discomfort(x);
  std::cout << std::setprecision(10) << "p_go = " << total << '\n'
            << "x1 = " << x.arc1 << '\n'
            << "x2 = " << x.arc2 << '\n'
            << "cost = " << model.societal_cost(x) << '\n'
            << "d1 = " << d[0] << '\n'
            << "d2 = " << d[1] << '\n';
  if (const auto bal = balanced_flow(model, total, a.tol)) {
    std::cout << "balanced_x1 = " << bal->arc1 << '\n' << "balanced_x2 = " << bal->arc2 << '\n';
  } else {
    std::cout << "balanced_flow = none\n";
  }
  return 0;
}

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("KARMA_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Karma-priced routing on a two-arc network"};
  app.require_subcommand(1);

  CommonArgs args;
  bool trajectory_only = false;
  int steps = 1000;

  auto* run = app.add_subcommand("run", "Simulate the repeated routing game");
  add_common(run, args);
  auto* chain = app.add_subcommand("analyze-chain", "Build the Karma chain and its stationary distribution");
  add_common(chain, args);
  chain->add_flag("--trajectory-only", trajectory_only, "Iterate the distribution without stationary analysis");
  chain->add_option("--steps", steps, "Steps for --trajectory-only")->check(CLI::PositiveNumber);
  auto* design = app.add_subcommand("design-prices", "Conservation price ratio and integer prices");
  add_common(design, args);
  auto* optimum = app.add_subcommand("system-optimum", "Societal-cost minimizing flow split");
  add_common(optimum, args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(args);
    if (chain->parsed()) return analyze_chain_command(args, trajectory_only, steps);
    if (design->parsed()) return design_prices_command(args);
    if (optimum->parsed()) return system_optimum_command(args);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
