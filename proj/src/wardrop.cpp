#include "karma/wardrop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#ifdef KARMA_USE_OPENMP
#include <omp.h>
#endif

namespace karma {

namespace {

struct Counts {
  long arc1 = 0;
  long arc2 = 0;
};

FlowVector to_flows(const Counts& c, std::size_t population) {
  const double m = static_cast<double>(population);
  return {static_cast<double>(c.arc1) / m, static_cast<double>(c.arc2) / m};
}

void report_infeasible(const AgentDay& a, long index) {
  std::ostringstream msg;
  msg << "agent " << index << " has Karma " << a.state.karma << " below its floor "
      << a.thresholds.floor;
  throw InfeasibleKarma(msg.str());
}

Counts best_response_serial(std::span<const AgentDay> agents, DiscomfortOrder order,
                            const PolicyContext& ctx, std::span<RouteChoice> choices) {
  Counts c;
  const long n = static_cast<long>(agents.size());
  for (long i = 0; i < n; ++i) {
    const AgentDay& a = agents[i];
    if (!a.travels) {
      choices[i] = RouteChoice::Stay;
      continue;
    }
    if (a.state.karma < a.thresholds.floor) report_infeasible(a, i);
    choices[i] = best_response(a.state, a.thresholds, ctx.mean_sensitivity, ctx.prices, order);
    if (choices[i] == RouteChoice::Arc1) ++c.arc1; else ++c.arc2;
  }
  return c;
}

Counts best_response_parallel(std::span<const AgentDay> agents, DiscomfortOrder order,
                              const PolicyContext& ctx, std::span<RouteChoice> choices) {
  const long n = static_cast<long>(agents.size());
  long arc1 = 0;
  long arc2 = 0;
  long first_bad = std::numeric_limits<long>::max();
  const AgentDay* data = agents.data();
  RouteChoice* out = choices.data();

#pragma omp parallel for schedule(static) reduction(+ : arc1, arc2) reduction(min : first_bad)
  for (long i = 0; i < n; ++i) {
    const AgentDay& a = data[i];
    if (!a.travels) {
      out[i] = RouteChoice::Stay;
      continue;
    }
    if (a.state.karma < a.thresholds.floor) {
      first_bad = std::min(first_bad, i);
      out[i] = RouteChoice::Arc2;
      continue;
    }
    const RouteChoice r = best_response(a.state, a.thresholds, ctx.mean_sensitivity, ctx.prices, order);
    out[i] = r;
    if (r == RouteChoice::Arc1) ++arc1; else ++arc2;
  }

  if (first_bad != std::numeric_limits<long>::max()) report_infeasible(agents[first_bad], first_bad);
  return {arc1, arc2};
}

}  // namespace

FlowVector aggregate_best_response(std::span<const AgentDay> agents, DiscomfortOrder order,
                                   const PolicyContext& ctx, std::span<RouteChoice> choices,
                                   Execution exec) {
  if (choices.size() != agents.size()) throw InvalidArgument("choices buffer has the wrong size");
  if (agents.empty()) return {};
  const Counts c = exec == Execution::Serial ? best_response_serial(agents, order, ctx, choices)
                                             : best_response_parallel(agents, order, ctx, choices);
  return to_flows(c, agents.size());
}

FlowVector aggregate_best_response(std::span<const AgentDay> agents, const FlowVector& x_assumed,
                                   const ArcCostModel& model, const PolicyContext& ctx,
                                   std::span<RouteChoice> choices, Execution exec) {
  return aggregate_best_response(agents, classify(model.discomfort(x_assumed)), ctx, choices, exec);
}

namespace {

// Returns false when the balanced split cannot be reached (too few non-poor
// travelers or no crossing point).
bool uncontrolled_split(std::span<const AgentDay> agents, const ArcCostModel& model,
                        double balance_tol, std::vector<RouteChoice>& choices, FlowVector& flows) {
  long travelers = 0;
  long non_poor = 0;
  for (const AgentDay& a : agents) {
    if (!a.travels) continue;
    ++travelers;
    if (a.state.karma >= a.thresholds.poor) ++non_poor;
  }
  if (travelers == 0) return false;
  const double m = static_cast<double>(agents.size());
  const auto balanced = balanced_flow(model, travelers / m, balance_tol);
  if (!balanced) return false;
  // Largest arc-1 count that keeps x1 <= balanced x1, so d1 <= d2 holds.
  const long target = static_cast<long>(std::floor(balanced->arc1 * m + 1e-9));
  if (non_poor < target) return false;

  long arc1 = 0;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const AgentDay& a = agents[i];
    if (!a.travels) {
      choices[i] = RouteChoice::Stay;
    } else if (a.state.karma >= a.thresholds.poor && arc1 < target) {
      choices[i] = RouteChoice::Arc1;
      ++arc1;
    } else {
      choices[i] = RouteChoice::Arc2;
    }
  }
  flows = {arc1 / m, (travelers - arc1) / m};
  return true;
}

}  // namespace

WardropResult wardrop_equilibrium(std::span<const AgentDay> agents, const ArcCostModel& model,
                                  const PolicyContext& ctx, const FlowVector& warm_start,
                                  const WardropOptions& opts) {
  if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
  WardropResult result;
  result.choices.assign(agents.size(), RouteChoice::Stay);

  FlowVector x = warm_start;
  FlowVector previous = x;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const DiscomfortOrder order = classify(model.discomfort(x));
    if (order != DiscomfortOrder::D1LessD2 &&
        uncontrolled_split(agents, model, opts.balance_tol, result.choices, result.flows)) {
      result.regime = Regime::Uncontrolled;
      result.iterations = it;
      return result;
    }
    const FlowVector response = aggregate_best_response(agents, order, ctx, result.choices, opts.exec);
    const double change = std::max(std::abs(response.arc1 - x.arc1), std::abs(response.arc2 - x.arc2));
    if (change <= opts.tol) {
      result.flows = response;
      result.regime = Regime::Controlled;
      result.iterations = it;
      return result;
    }
    previous = x;
    x = {x.arc1 + opts.damping * (response.arc1 - x.arc1),
         x.arc2 + opts.damping * (response.arc2 - x.arc2)};
  }
  std::ostringstream msg;
  msg << "Wardrop iteration did not converge in " << opts.max_iter << " iterations; last iterates ("
      << previous.arc1 << ", " << previous.arc2 << ") and (" << x.arc1 << ", " << x.arc2 << ")";
  throw NonConvergence(msg.str());
}

}  // namespace karma
