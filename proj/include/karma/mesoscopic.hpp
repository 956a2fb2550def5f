#pragma once

// Quantized Karma-distribution Markov chain.
//
// State index (0-based) i = k - k_ref + T * reward, so the chain covers the
// Karma deviations [k_ref - T*reward, k_wealthy + reward). Mass moves from
// state j to j + reward when the agent takes arc 2 and to j - toll when it
// takes arc 1. The transition matrix A = P_home * I + P_go * (A_chill + A_rush)
// is column-stochastic.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "karma/agent.hpp"

namespace karma {

class QuantizedDistribution {
 public:
  QuantizedDistribution() = default;
  explicit QuantizedDistribution(std::vector<double> mass);

  static QuantizedDistribution uniform(int size);
  static QuantizedDistribution point(int size, int index);

  int size() const { return static_cast<int>(mass_.size()); }
  double operator[](int i) const { return mass_[i]; }
  std::span<const double> mass() const { return mass_; }
  double total() const;

  /// Sum over [first, first + count).
  double band_mass(int first, int count) const;

 private:
  std::vector<double> mass_;
};

double l1_distance(const QuantizedDistribution& a, const QuantizedDistribution& b);
double total_variation(const QuantizedDistribution& a, const QuantizedDistribution& b);

/// Widths of the poor/ok/rich/wealthy bands, in chain states.
struct BandLayout {
  int poor = 0;
  int ok = 0;
  int rich = 0;
  int wealthy = 0;
};

class KarmaChain {
 public:
  /// Requires co-prime prices with reward >= toll and horizon >= 1.
  KarmaChain(PriceVector p, int horizon, double p_home, SensitivityDistribution sensitivity);

  int size() const { return size_; }
  const PriceVector& prices() const { return prices_; }
  int horizon() const { return horizon_; }
  double p_home() const { return p_home_; }
  double p_go() const { return 1.0 - p_home_; }
  BandLayout bands() const;

  /// A_chill(i, i - reward) and A_rush(i, i + toll); zero when out of range.
  double chill_entry(int row) const { return chill_[row]; }
  double rush_entry(int row) const { return rush_[row]; }

  Eigen::SparseMatrix<double> chill_matrix() const;
  Eigen::SparseMatrix<double> rush_matrix() const;
  Eigen::SparseMatrix<double> transition_matrix() const;

  /// A * P.
  QuantizedDistribution step(const QuantizedDistribution& dist) const;

  /// Power iteration from the uniform distribution until ||A P - P||_1 <= tol.
  /// Refuses P_home == 0 (A is not primitive there).
  QuantizedDistribution stationary(double tol = 1e-13, long max_iter = 5'000'000) const;

  /// Dense null-space solve of (A - I) P = 0, 1^T P = 1. Cross-check only.
  QuantizedDistribution stationary_dense() const;

  /// (P_go * 1^T A_rush P, P_go * 1^T A_chill P).
  FlowVector equilibrium_flows(const QuantizedDistribution& dist) const;

  double residual(const QuantizedDistribution& dist) const;

  /// Writes A as "row col value" lines (1-based indices).
  void write_coordinates(std::ostream& out) const;

 private:
  PriceVector prices_;
  int horizon_;
  double p_home_;
  SensitivityDistribution sensitivity_;
  int size_;
  std::vector<double> chill_;
  std::vector<double> rush_;
};

struct QuantizedPopulation {
  QuantizedDistribution distribution;
  int clamped = 0;
};

/// Histogram of (karma, reference) pairs over chain states. Agents outside
/// the chain's range are clamped to the nearest end state and counted.
QuantizedPopulation quantize_population(std::span<const std::pair<double, double>> agents,
                                        const PriceVector& p, int horizon);

}  // namespace karma
