#pragma once

// Daily Wardrop equilibrium for a finite population.

#include <span>
#include <vector>

#include "karma/agent.hpp"

namespace karma {

/// One agent's inputs for a single day: state (with today's sensitivity),
/// precomputed thresholds and the stay-home draw.
struct AgentDay {
  AgentState state;
  Thresholds thresholds;
  bool travels = true;
};

enum class Execution { Serial, Parallel };

struct PolicyContext {
  PriceVector prices;
  int horizon = 6;
  double mean_sensitivity = 1.0;
};

/// Best responses of every traveler against the flows implied by `order`,
/// written to `choices`; returns counts / population size.
/// Serial is the reference kernel; Parallel distributes agents with OpenMP
/// and must produce identical output.
FlowVector aggregate_best_response(std::span<const AgentDay> agents, DiscomfortOrder order,
                                   const PolicyContext& ctx, std::span<RouteChoice> choices,
                                   Execution exec = Execution::Parallel);

/// Convenience overload: classifies d(x_assumed) first.
FlowVector aggregate_best_response(std::span<const AgentDay> agents, const FlowVector& x_assumed,
                                   const ArcCostModel& model, const PolicyContext& ctx,
                                   std::span<RouteChoice> choices,
                                   Execution exec = Execution::Parallel);

enum class Regime { Controlled, Uncontrolled };

struct WardropOptions {
  double tol = 1e-12;
  int max_iter = 50;
  double damping = 1.0;  // in (0, 1]
  double balance_tol = kDefaultFlowTol;
  Execution exec = Execution::Parallel;
};

struct WardropResult {
  FlowVector flows;
  std::vector<RouteChoice> choices;
  Regime regime = Regime::Controlled;
  int iterations = 0;
};

/// Best-response iteration from `warm_start`. Whenever an iterate has
/// d1 >= d2 and enough non-poor travelers exist, returns the uncontrolled
/// equilibrium instead: poor travelers on arc 2, the rest filled onto arc 1
/// in agent-index order up to the balanced flow.
WardropResult wardrop_equilibrium(std::span<const AgentDay> agents, const ArcCostModel& model,
                                  const PolicyContext& ctx, const FlowVector& warm_start,
                                  const WardropOptions& opts = {});

}  // namespace karma
