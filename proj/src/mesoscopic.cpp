#include "karma/mesoscopic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace karma {

QuantizedDistribution::QuantizedDistribution(std::vector<double> mass) : mass_(std::move(mass)) {}

QuantizedDistribution QuantizedDistribution::uniform(int size) {
  return QuantizedDistribution(std::vector<double>(size, 1.0 / size));
}

QuantizedDistribution QuantizedDistribution::point(int size, int index) {
  std::vector<double> mass(size, 0.0);
  mass.at(index) = 1.0;
  return QuantizedDistribution(std::move(mass));
}

double QuantizedDistribution::total() const {
  return std::accumulate(mass_.begin(), mass_.end(), 0.0);
}

double QuantizedDistribution::band_mass(int first, int count) const {
  return std::accumulate(mass_.begin() + first, mass_.begin() + first + count, 0.0);
}

double l1_distance(const QuantizedDistribution& a, const QuantizedDistribution& b) {
  if (a.size() != b.size()) throw InvalidArgument("distribution sizes differ");
  double sum = 0.0;
  for (int i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

double total_variation(const QuantizedDistribution& a, const QuantizedDistribution& b) {
  return 0.5 * l1_distance(a, b);
}

KarmaChain::KarmaChain(PriceVector p, int horizon, double p_home,
                       SensitivityDistribution sensitivity)
    : prices_(p), horizon_(horizon), p_home_(p_home), sensitivity_(sensitivity) {
  if (!p.is_coprime()) throw InvalidArgument("chain prices must be co-prime; use reduced()");
  if (p.reward < p.toll) throw InvalidArgument("chain requires reward >= toll");
  if (horizon < 1) throw InvalidArgument("horizon must be at least 1");
  if (p_home < 0.0 || p_home > 1.0) throw InvalidArgument("p_home must lie in [0, 1]");

  const int toll = p.toll;
  const int reward = p.reward;
  const int span = toll + reward;
  const int T = horizon;
  size_ = (T + 1) * span;
  chill_.assign(size_, 0.0);
  rush_.assign(size_, 0.0);

  const double s_bar = sensitivity_.mean();
  const double chill_ok = sensitivity_.cdf(s_bar);
  for (int row = 1; row <= size_; ++row) {
    double& chill = chill_[row - 1];
    double& rush = rush_[row - 1];

    if (row >= reward + 1 && row <= reward + toll) {
      chill = 1.0;
    } else if (row >= span + 1 && row <= T * span) {
      chill = chill_ok;
    } else if (row >= T * span + 1) {
      chill = sensitivity_.cdf(s_bar * ((T + 1) * span + 1 - row) / span);
    }

    if (row <= (T - 1) * span) {
      rush = 1.0 - chill_ok;
    } else if (row <= T * span) {
      rush = 1.0 - sensitivity_.cdf(s_bar * (T * span + 1 - row) / span);
    } else if (row <= size_ - toll) {
      rush = 1.0;
    }
  }
}

BandLayout KarmaChain::bands() const {
  const int toll = prices_.toll;
  const int reward = prices_.reward;
  return {toll, (horizon_ - 1) * (toll + reward), toll + reward, reward};
}

Eigen::SparseMatrix<double> KarmaChain::chill_matrix() const {
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < size_; ++i) {
    if (chill_[i] != 0.0) entries.emplace_back(i, i - prices_.reward, chill_[i]);
  }
  Eigen::SparseMatrix<double> m(size_, size_);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

Eigen::SparseMatrix<double> KarmaChain::rush_matrix() const {
  std::vector<Eigen::Triplet<double>> entries;
  for (int i = 0; i < size_; ++i) {
    if (rush_[i] != 0.0) entries.emplace_back(i, i + prices_.toll, rush_[i]);
  }
  Eigen::SparseMatrix<double> m(size_, size_);
  m.setFromTriplets(entries.begin(), entries.end());
  return m;
}

Eigen::SparseMatrix<double> KarmaChain::transition_matrix() const {
  Eigen::SparseMatrix<double> identity(size_, size_);
  identity.setIdentity();
  Eigen::SparseMatrix<double> a = p_home_ * identity + p_go() * (chill_matrix() + rush_matrix());
  a.prune(0.0);
  return a;
}

QuantizedDistribution KarmaChain::step(const QuantizedDistribution& dist) const {
  if (dist.size() != size_) throw InvalidArgument("distribution size does not match the chain");
  const int toll = prices_.toll;
  const int reward = prices_.reward;
  const double go = p_go();
  std::vector<double> next(size_);
  for (int i = 0; i < size_; ++i) {
    double moved = 0.0;
    if (i - reward >= 0) moved += chill_[i] * dist[i - reward];
    if (i + toll < size_) moved += rush_[i] * dist[i + toll];
    next[i] = p_home_ * dist[i] + go * moved;
  }
  return QuantizedDistribution(std::move(next));
}

double KarmaChain::residual(const QuantizedDistribution& dist) const {
  return l1_distance(step(dist), dist);
}

QuantizedDistribution KarmaChain::stationary(double tol, long max_iter) const {
  if (p_home_ <= 0.0) {
    throw InvalidArgument(
        "stationary analysis needs P_home > 0 (A is not primitive); simulate trajectories instead");
  }
  if (tol <= 0.0) throw InvalidArgument("tolerance must be positive");
  auto current = QuantizedDistribution::uniform(size_);
  for (long it = 0; it < max_iter; ++it) {
    auto next = step(current);
    const double diff = l1_distance(next, current);
    current = std::move(next);
    if (diff <= tol) return current;
  }
  throw NonConvergence("power iteration did not reach residual " + std::to_string(tol) +
                       " within " + std::to_string(max_iter) + " iterations");
}

QuantizedDistribution KarmaChain::stationary_dense() const {
  const Eigen::MatrixXd a = Eigen::MatrixXd(transition_matrix());
  Eigen::MatrixXd system = a - Eigen::MatrixXd::Identity(size_, size_);
  system.row(size_ - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size_);
  rhs(size_ - 1) = 1.0;
  const Eigen::VectorXd solution = system.fullPivLu().solve(rhs);
  return QuantizedDistribution(std::vector<double>(solution.data(), solution.data() + size_));
}

FlowVector KarmaChain::equilibrium_flows(const QuantizedDistribution& dist) const {
  const int toll = prices_.toll;
  const int reward = prices_.reward;
  double rush = 0.0;
  double chill = 0.0;
  for (int i = 0; i < size_; ++i) {
    if (i + toll < size_) rush += rush_[i] * dist[i + toll];
    if (i - reward >= 0) chill += chill_[i] * dist[i - reward];
  }
  return {p_go() * rush, p_go() * chill};
}

void KarmaChain::write_coordinates(std::ostream& out) const {
  const auto a = transition_matrix();
  for (int col = 0; col < a.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, col); it; ++it) {
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
}

QuantizedPopulation quantize_population(std::span<const std::pair<double, double>> agents,
                                        const PriceVector& p, int horizon) {
  if (agents.empty()) throw InvalidArgument("cannot quantize an empty population");
  const int size = (horizon + 1) * (p.toll + p.reward);
  std::vector<double> counts(size, 0.0);
  int clamped = 0;
  for (const auto& [karma, reference] : agents) {
    const double raw = std::floor(karma - reference + static_cast<double>(horizon) * p.reward);
    int index;
    if (raw < 0.0) {
      index = 0;
      ++clamped;
    } else if (raw >= size) {
      index = size - 1;
      ++clamped;
    } else {
      index = static_cast<int>(raw);
    }
    counts[index] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(agents.size());
  return {QuantizedDistribution(std::move(counts)), clamped};
}

}  // namespace karma
