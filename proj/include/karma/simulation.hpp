#pragma once

// Repeated-game simulation over a finite population.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "karma/mesoscopic.hpp"
#include "karma/wardrop.hpp"

namespace karma {

struct Population {
  std::vector<double> karma;
  std::vector<double> reference;
  int clamped_at_init = 0;

  std::size_t size() const { return karma.size(); }
  double mean_karma() const;
  double total_karma() const;
};

/// Draws reference and initial Karma from the scenario's ranges. Initial
/// Karma below the agent's feasibility floor is raised to the floor.
Population init_population(const Scenario& scenario, const PriceVector& p, std::mt19937_64& rng);

struct DayMetrics {
  std::optional<double> delta_discomfort;  // absent when nobody travels
  double delta_sensitivity = 0.0;
  double mean_karma = 0.0;
  double societal_cost = 0.0;
};

/// Relative perceived-discomfort gain over a sensitivity-unaware assignment
/// to the same flows, relative sensitivity deviation, mean Karma and cost.
DayMetrics compute_metrics(std::span<const RouteChoice> choices, std::span<const double> sensitivities,
                           const FlowVector& flows, const ArcCostModel& model, double mean_sensitivity,
                           std::span<const double> karma);

struct DayRecord {
  int day = 0;
  FlowVector flows;
  double societal_cost = 0.0;
  double optimal_cost = 0.0;
  double cost_ratio = 1.0;  // societal_cost / optimal_cost; 1 when nobody travels
  std::optional<double> delta_discomfort;
  double delta_sensitivity = 0.0;
  double mean_karma = 0.0;
  double total_karma = 0.0;
  Regime regime = Regime::Controlled;
  int nash_iterations = 0;
  int travelers = 0;
  bool floor_respected = true;
};

struct TailSummary {
  int first_day = 0;
  int days = 0;
  double mean_cost_ratio = 1.0;
  double mean_delta_discomfort = 0.0;
  double mean_delta_sensitivity = 0.0;
  FlowVector mean_flows;
  double mean_karma = 0.0;
  int uncontrolled_days = 0;
};

struct RunResult {
  std::vector<DayRecord> days;
  QuantizedPopulation final_histogram;
  TailSummary tail;
  Population final_population;
};

/// Summary over the last `fraction` of the days (at least one day).
TailSummary summarize_tail(std::span<const DayRecord> days, double fraction = 0.2);

struct SimulationOptions {
  WardropOptions wardrop;
  double optimum_tol = kDefaultFlowTol;
};

class Simulator {
 public:
  Simulator(Scenario scenario, ArcCostModel model, PriceVector prices, SimulationOptions opts = {});

  /// Draws stay-home flags then sensitivities for all agents in index order,
  /// solves the day's equilibrium, applies Karma updates and records metrics.
  DayRecord simulate_day();

  const Population& population() const { return population_; }
  const Scenario& scenario() const { return scenario_; }
  const PriceVector& prices() const { return prices_; }
  const ArcCostModel& model() const { return model_; }
  const std::vector<RouteChoice>& last_choices() const { return last_choices_; }
  int day() const { return day_; }

 private:
  Scenario scenario_;
  ArcCostModel model_;
  PriceVector prices_;
  SimulationOptions opts_;
  std::mt19937_64 rng_;
  Population population_;
  std::vector<Thresholds> thresholds_;
  std::vector<AgentDay> today_;
  std::vector<double> sensitivities_;
  std::vector<RouteChoice> last_choices_;
  FlowVector previous_flows_;
  int day_ = 0;
};

RunResult run_scenario(const Scenario& scenario, const ArcCostModel& model, const PriceVector& p,
                       int days, const SimulationOptions& opts = {});

/// day,x1,x2,cost,cost_opt_ratio,delta_d,delta_s,mean_karma,regime,nash_iters
void write_run_csv(std::ostream& out, std::span<const DayRecord> days);
/// index,count (1-based chain index, agent counts).
void write_histogram_csv(std::ostream& out, const QuantizedPopulation& hist, std::size_t population);

}  // namespace karma
