#include "karma/agent.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace karma {

DiscomfortOrder classify(const std::array<double, 2>& d) {
  if (d[0] < d[1]) return DiscomfortOrder::D1LessD2;
  if (d[0] > d[1]) return DiscomfortOrder::D1GreaterD2;
  return DiscomfortOrder::D1EqualD2;
}

Thresholds thresholds(double reference, const PriceVector& p, int horizon) {
  const double toll = p.toll;
  const double reward = p.reward;
  const double T = horizon;
  return {
      std::max(0.0, reference - (T + 1.0) * reward),
      std::max(toll, reference + toll - T * reward),
      reference + T * toll - reward,
      reference + (T + 1.0) * toll,
  };
}

double rush_threshold(double karma, const Thresholds& th, double mean_sensitivity,
                      const PriceVector& p) {
  if (karma < th.poor) return std::numeric_limits<double>::infinity();
  if (karma < th.rich) return mean_sensitivity;
  if (karma < th.wealthy) return mean_sensitivity * (th.wealthy - karma) / (p.toll + p.reward);
  return 0.0;
}

RouteChoice best_response(const AgentState& state, const Thresholds& th, double mean_sensitivity,
                          const PriceVector& p, DiscomfortOrder order) {
  if (state.karma < th.floor) {
    throw InfeasibleKarma("Karma " + std::to_string(state.karma) + " below feasibility floor " +
                          std::to_string(th.floor));
  }
  if (order != DiscomfortOrder::D1LessD2) return RouteChoice::Arc2;
  if (state.karma >= th.wealthy) return RouteChoice::Arc1;
  const double threshold = rush_threshold(state.karma, th, mean_sensitivity, p);
  return state.sensitivity > threshold ? RouteChoice::Arc1 : RouteChoice::Arc2;
}

PlanResult plan_oracle(const AgentState& state, const std::array<double, 2>& d,
                       const PriceVector& p, int horizon, double mean_sensitivity) {
  const double T = horizon;
  const std::array<double, 2> price{static_cast<double>(p.arc1_price()),
                                    static_cast<double>(p.arc2_price())};
  PlanResult result;
  if (state.karma < 0.0) throw InfeasibleKarma("negative Karma");

  for (int j = 0; j < 2; ++j) {
    if (price[j] > state.karma) continue;  // cannot pay today
    // Future plan: share f on arc 1 over T days must keep
    //   karma - price_j - T * (toll * f - reward * (1 - f)) >= reference.
    const double f_max = (state.karma - state.reference - price[j] + T * p.reward) /
                         (T * (p.toll + p.reward));
    if (f_max < 0.0) continue;
    std::optional<PlanOption> best;
    for (double f : {0.0, 1.0, std::min(1.0, f_max)}) {
      if (f > f_max) continue;
      const double obj = state.sensitivity * d[j] + mean_sensitivity * T * (d[0] * f + d[1] * (1.0 - f));
      if (!best || obj < best->objective) best = PlanOption{f, obj};
    }
    result.options[j] = best;
  }

  if (!result.options[0] && !result.options[1]) {
    throw InfeasibleKarma("no feasible plan for Karma " + std::to_string(state.karma));
  }
  if (!result.options[1]) {
    result.choice = RouteChoice::Arc1;
  } else if (result.options[0] && result.options[0]->objective < result.options[1]->objective) {
    result.choice = RouteChoice::Arc1;
  } else {
    result.choice = RouteChoice::Arc2;
  }
  return result;
}

double apply_choice(double karma, RouteChoice choice, const PriceVector& p) {
  switch (choice) {
    case RouteChoice::Arc1:
      if (karma < p.toll) {
        throw InsufficientKarma("cannot pay toll " + std::to_string(p.toll) + " with Karma " +
                                std::to_string(karma));
      }
      return karma - p.toll;
    case RouteChoice::Arc2:
      return karma + p.reward;
    case RouteChoice::Stay:
      break;
  }
  return karma;
}

}  // namespace karma
