#pragma once

// Steady-state Karma prices from the Karma-conservation condition
// toll * x1 = reward * x2, and their integer rationalization.

#include "karma/network.hpp"

namespace karma {

/// Integer Karma prices: toll paid on arc 1 and reward earned on arc 2.
/// Both are positive. A common factor is allowed (e.g. 10/14) so price
/// vectors keep the scale at which they are used in simulation; reduced()
/// gives the co-prime representative needed by the Karma-lattice chain.
struct PriceVector {
  int toll = 1;
  int reward = 1;

  PriceVector() = default;
  PriceVector(int toll, int reward);

  /// Net Karma change of a single traveler choosing arc 1 or 2, as a signed
  /// price vector (toll, -reward).
  int arc1_price() const { return toll; }
  int arc2_price() const { return -reward; }

  bool is_coprime() const;
  PriceVector reduced() const;
  /// reward / toll lies within [1/T, T].
  bool feasible_for(int horizon) const;

  /// Net Karma drained from the population per unit time at flows x.
  double karma_drain(const FlowVector& x) const { return toll * x.arc1 - reward * x.arc2; }

  bool operator==(const PriceVector&) const = default;
};

class DegenerateOptimum : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class InfeasibleHorizon : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Real price pair normalized so the reward is 1.
struct PriceRatio {
  double toll = 1.0;
  double reward = 1.0;
  double toll_per_reward() const { return toll / reward; }
};

PriceRatio conservation_prices(const FlowVector& optimum);

/// Fix the toll at `toll_scale` and round the reward to the nearest integer.
PriceVector rationalize_fixed_toll(const PriceRatio& ratio, int toll_scale, int horizon);

/// Co-prime pair with max(toll, reward) <= max_price closest to the ratio.
/// Ties go to the smaller max(toll, reward).
PriceVector rationalize_best_approximation(const PriceRatio& ratio, int max_price, int horizon);

}  // namespace karma
