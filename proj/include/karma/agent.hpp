#pragma once

// Individual traveler: closed-form best response over the Karma thresholds,
// plus a plan-enumeration oracle that solves the agent's planning problem
// directly.

#include <array>
#include <optional>

#include "karma/pricing.hpp"

namespace karma {

enum class RouteChoice : unsigned char { Arc1, Arc2, Stay };

enum class DiscomfortOrder { D1LessD2, D1EqualD2, D1GreaterD2 };

DiscomfortOrder classify(const std::array<double, 2>& discomfort);

class InfeasibleKarma : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InsufficientKarma : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct AgentState {
  double karma = 0.0;
  double reference = 0.0;
  double sensitivity = 0.0;
};

/// Karma breakpoints of the best-response rule.
struct Thresholds {
  double floor = 0.0;    // below: planning problem infeasible
  double poor = 0.0;     // [floor, poor): must take arc 2
  double rich = 0.0;     // [poor, rich): rush iff s > s_bar
  double wealthy = 0.0;  // [rich, wealthy): rush iff s > s_bar * (wealthy - k) / (toll + reward)
};

Thresholds thresholds(double reference, const PriceVector& p, int horizon);

/// Sensitivity above which the agent takes arc 1 when arc 1 is less
/// uncomfortable. Zero for wealthy agents; +inf for poor ones.
double rush_threshold(double karma, const Thresholds& th, double mean_sensitivity,
                      const PriceVector& p);

/// Ties (s exactly at the threshold) go to arc 2. Under D1EqualD2 the rule
/// returns arc 2; splitting indifferent agents is left to the equilibrium
/// solver.
RouteChoice best_response(const AgentState& state, const Thresholds& th, double mean_sensitivity,
                          const PriceVector& p, DiscomfortOrder order);

struct PlanOption {
  double future_arc1_share = 0.0;
  double objective = 0.0;
};

struct PlanResult {
  RouteChoice choice = RouteChoice::Arc2;
  // Indexed by arc (0 -> arc 1). Empty when that choice admits no plan.
  std::array<std::optional<PlanOption>, 2> options;

  const PlanOption& chosen() const { return *options[choice == RouteChoice::Arc1 ? 0 : 1]; }
};

/// Solves the planning problem by enumerating today's arc and the vertices
/// of the one-dimensional future-split LP. Ties go to arc 2.
PlanResult plan_oracle(const AgentState& state, const std::array<double, 2>& discomfort,
                       const PriceVector& p, int horizon, double mean_sensitivity);

/// Karma after travelling. Throws InsufficientKarma for arc 1 with karma < toll.
double apply_choice(double karma, RouteChoice choice, const PriceVector& p);

}  // namespace karma
