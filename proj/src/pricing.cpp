#include "karma/pricing.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace karma {

PriceVector::PriceVector(int toll_, int reward_) : toll(toll_), reward(reward_) {
  if (toll < 1 || reward < 1) throw InvalidArgument("prices must be positive integers");
}

bool PriceVector::is_coprime() const { return std::gcd(toll, reward) == 1; }

PriceVector PriceVector::reduced() const {
  const int g = std::gcd(toll, reward);
  return {toll / g, reward / g};
}

bool PriceVector::feasible_for(int horizon) const {
  // 1/T <= reward/toll <= T, in integers.
  return toll <= horizon * reward && reward <= horizon * toll;
}

PriceRatio conservation_prices(const FlowVector& optimum) {
  if (!(optimum.arc1 > 0.0) || !(optimum.arc2 > 0.0)) {
    throw DegenerateOptimum("system optimum leaves an arc empty; no conserving prices exist");
  }
  return {optimum.arc2 / optimum.arc1, 1.0};
}

namespace {

void check_band(const PriceVector& p, int horizon) {
  if (!p.feasible_for(horizon)) {
    throw InfeasibleHorizon("reward/toll = " + std::to_string(p.reward) + "/" +
                            std::to_string(p.toll) + " lies outside [1/T, T] for T = " +
                            std::to_string(horizon));
  }
}

}  // namespace

PriceVector rationalize_fixed_toll(const PriceRatio& ratio, int toll_scale, int horizon) {
  if (toll_scale < 1) throw InvalidArgument("toll scale must be at least 1");
  const double reward = std::round(toll_scale / ratio.toll_per_reward());
  if (reward < 1.0) throw InfeasibleHorizon("rounded reward is zero; increase the toll scale");
  PriceVector p(toll_scale, static_cast<int>(reward));
  check_band(p, horizon);
  return p;
}

PriceVector rationalize_best_approximation(const PriceRatio& ratio, int max_price, int horizon) {
  if (max_price < 2) throw InvalidArgument("max_price must be at least 2");
  const double target = ratio.toll_per_reward();
  double best_err = std::numeric_limits<double>::infinity();
  PriceVector best;
  bool found = false;
  // Enumerate by increasing max(toll, reward) so the first hit at a given
  // error is the smallest pair.
  for (int m = 1; m <= max_price; ++m) {
    for (int other = 1; other <= m; ++other) {
      for (const PriceVector cand : {PriceVector(m, other), PriceVector(other, m)}) {
        if (std::gcd(cand.toll, cand.reward) != 1 || !cand.feasible_for(horizon)) continue;
        const double err = std::abs(static_cast<double>(cand.toll) / cand.reward - target);
        if (err < best_err) {
          best_err = err;
          best = cand;
          found = true;
        }
      }
    }
  }
  if (!found) throw InfeasibleHorizon("no co-prime price pair within max_price meets [1/T, T]");
  return best;
}

}  // namespace karma
