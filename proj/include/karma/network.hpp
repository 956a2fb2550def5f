#pragma once

// Two-arc parallel network: BPR discomfort, societal cost and the central
// operator's flow problem.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

namespace karma {

/// Raised when a precondition on user-supplied parameters is violated.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an iterative numerical routine fails to converge.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultFlowTol = 1e-6;

/// Fraction of the population per unit time on each arc. Arc 1 is the fast,
/// tolled arc; arc 2 the slow, rewarded arc.
struct FlowVector {
  double arc1 = 0.0;
  double arc2 = 0.0;

  double total() const { return arc1 + arc2; }
  bool operator==(const FlowVector&) const = default;
};

/// Bureau of Public Roads volume-delay parameters shared by both arcs,
/// except the per-arc free-flow level and capacity.
struct BprParams {
  std::array<double, 2> free_flow{1.0, 2.0};
  std::array<double, 2> capacity{0.5, 2.0 / 3.0};
  double alpha = 0.15;
  double beta = 4.0;
};

enum class SocietalCost {
  SumOfDiscomforts,  // c(x) = d(x)
  LinearFlow,        // c(x) = x
};

class ArcCostModel {
 public:
  ArcCostModel(BprParams bpr, SocietalCost cost_kind);

  const BprParams& bpr() const { return bpr_; }
  SocietalCost cost_kind() const { return cost_kind_; }

  /// Discomfort on a single arc (0 or 1) at the given flow on that arc.
  double arc_discomfort(int arc, double flow) const;
  std::array<double, 2> discomfort(const FlowVector& x) const;

  /// c(x)^T x.
  double societal_cost(const FlowVector& x) const;

 private:
  BprParams bpr_;
  SocietalCost cost_kind_;
};

/// Minimizer of c(x)^T x subject to x1 + x2 = total_flow, x >= 0.
FlowVector system_optimum(const ArcCostModel& model, double total_flow,
                          double tol = kDefaultFlowTol);

/// Flow split with equal discomfort on both arcs, or nullopt when arc 1
/// stays cheaper for every split.
std::optional<FlowVector> balanced_flow(const ArcCostModel& model, double total_flow,
                                        double tol = kDefaultFlowTol);

/// Sensitivity distribution. The mean is the reference sensitivity s-bar.
struct ExponentialSensitivity {
  double mean = 1.0;
};
struct UniformSensitivity {
  double min = 0.0;
  double max = 2.0;
};

class SensitivityDistribution {
 public:
  SensitivityDistribution() = default;
  SensitivityDistribution(ExponentialSensitivity e);
  SensitivityDistribution(UniformSensitivity u);

  static SensitivityDistribution exponential(double mean) {
    return SensitivityDistribution(ExponentialSensitivity{mean});
  }
  static SensitivityDistribution uniform(double lo, double hi) {
    return SensitivityDistribution(UniformSensitivity{lo, hi});
  }

  double mean() const;
  /// P(s < threshold). Zero at and below the lower end of the support.
  double cdf(double threshold) const;

  bool is_exponential() const { return std::holds_alternative<ExponentialSensitivity>(kind_); }
  const std::variant<ExponentialSensitivity, UniformSensitivity>& kind() const { return kind_; }

  /// Draws with any UniformRandomBitGenerator.
  template <class Rng>
  double sample(Rng& rng) const;

  bool operator==(const SensitivityDistribution&) const;

 private:
  std::variant<ExponentialSensitivity, UniformSensitivity> kind_{ExponentialSensitivity{}};
};

struct KarmaRange {
  double lo = 0.0;
  double hi = 100.0;
  bool operator==(const KarmaRange&) const = default;
};

struct KarmaInit {
  KarmaRange initial{0.0, 500.0};
  KarmaRange reference{0.0, 100.0};
  // Draw integer Karma levels (uniform over the integers in each range).
  bool integer_lattice = false;
  bool operator==(const KarmaInit&) const = default;
};

struct Scenario {
  double p_home = 0.05;
  int horizon = 6;
  int population = 1000;
  SensitivityDistribution sensitivity;
  KarmaInit karma;
  std::uint64_t seed = 42;

  double p_go() const { return 1.0 - p_home; }
  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
  bool operator==(const Scenario&) const = default;
};

}  // namespace karma

#include "karma/detail/sensitivity_sample.hpp"
