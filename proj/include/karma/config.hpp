#pragma once

// Run configuration: built-in presets and an INI-style config file.
//
//   [scenario]    p_home, horizon, population, seed
//   [sensitivity] kind = exponential | uniform; mean; min; max
//   [karma]       initial_lo, initial_hi, reference_lo, reference_hi, integer_lattice
//   [network]     free_flow_1, free_flow_2, capacity_1, capacity_2, alpha, beta,
//                 societal_cost = sum_of_discomforts | linear_flow
//   [pricing]     mode = fixed_toll | best_approximation | explicit;
//                 toll_scale, max_price, toll, reward
//   [run]         days, preset (optional: fig3 | fig5 | fig6)
//
// A preset named in the file overrides every field it pins.

#include <iosfwd>
#include <optional>
#include <string>

#include "karma/pricing.hpp"

namespace karma {

enum class PricingMode { FixedToll, BestApproximation, Explicit };

struct PricingConfig {
  PricingMode mode = PricingMode::FixedToll;
  int toll_scale = 10;
  int max_price = 20;
  PriceVector explicit_prices{10, 14};
  bool operator==(const PricingConfig&) const = default;
};

struct RunConfig {
  std::optional<std::string> preset;
  Scenario scenario;
  BprParams bpr;
  SocietalCost societal_cost = SocietalCost::SumOfDiscomforts;
  PricingConfig pricing;
  int days = 500;

  ArcCostModel model() const { return ArcCostModel(bpr, societal_cost); }
  /// Throws InvalidArgument on any out-of-range field.
  void validate() const;
  bool operator==(const RunConfig& other) const;
};

/// Throws InvalidArgument for unknown names.
RunConfig preset_config(const std::string& name);
void apply_preset(RunConfig& config, const std::string& name);

RunConfig read_config(std::istream& in);
RunConfig read_config_file(const std::string& path);
void write_config(std::ostream& out, const RunConfig& config);

struct PriceDesign {
  FlowVector optimum;
  std::optional<PriceRatio> ratio;  // absent for explicit prices
  PriceVector prices;
};

/// System optimum for the scenario's P_go and the prices the pricing mode
/// yields for it.
PriceDesign design_prices(const RunConfig& config, double tol = kDefaultFlowTol);

}  // namespace karma
