#pragma once

#include <random>

namespace karma {

template <class Rng>
double SensitivityDistribution::sample(Rng& rng) const {
  if (const auto* e = std::get_if<ExponentialSensitivity>(&kind_)) {
    std::exponential_distribution<double> dist(1.0 / e->mean);
    return dist(rng);
  }
  const auto& u = std::get<UniformSensitivity>(kind_);
  std::uniform_real_distribution<double> dist(u.min, u.max);
  return dist(rng);
}

}  // namespace karma
