#include "karma/network.hpp"

#include <algorithm>
#include <cmath>

namespace karma {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

void check_total_flow(double total_flow, double tol) {
  require(total_flow > 0.0 && total_flow <= 1.0, "total flow must lie in (0, 1]");
  require(tol > 0.0, "tolerance must be positive");
}

}  // namespace

ArcCostModel::ArcCostModel(BprParams bpr, SocietalCost cost_kind)
    : bpr_(bpr), cost_kind_(cost_kind) {
  for (int j = 0; j < 2; ++j) {
    require(bpr_.free_flow[j] > 0.0, "free-flow discomfort must be positive");
    require(bpr_.capacity[j] > 0.0, "capacity must be positive");
  }
  require(bpr_.alpha >= 0.0, "alpha must be non-negative");
  require(bpr_.beta >= 1.0, "beta must be at least 1");
}

double ArcCostModel::arc_discomfort(int arc, double flow) const {
  const double load = flow / bpr_.capacity[arc];
  return bpr_.free_flow[arc] * (1.0 + bpr_.alpha * std::pow(load, bpr_.beta));
}

std::array<double, 2> ArcCostModel::discomfort(const FlowVector& x) const {
  return {arc_discomfort(0, x.arc1), arc_discomfort(1, x.arc2)};
}

double ArcCostModel::societal_cost(const FlowVector& x) const {
  if (cost_kind_ == SocietalCost::LinearFlow) return x.arc1 * x.arc1 + x.arc2 * x.arc2;
  const auto d = discomfort(x);
  return d[0] * x.arc1 + d[1] * x.arc2;
}

FlowVector system_optimum(const ArcCostModel& model, double total_flow, double tol) {
  check_total_flow(total_flow, tol);
  auto objective = [&](double x1) {
    return model.societal_cost({x1, total_flow - x1});
  };

  // Golden-section search on [0, total_flow].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.0;
  double hi = total_flow;
  double a = hi - inv_phi * (hi - lo);
  double b = lo + inv_phi * (hi - lo);
  double fa = objective(a);
  double fb = objective(b);
  int iter = 0;
  while (hi - lo > tol) {
    if (++iter > 500) throw NonConvergence("system_optimum: golden-section search did not converge");
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - inv_phi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + inv_phi * (hi - lo);
      fb = objective(b);
    }
  }

  // Local sweep around the bracket plus both endpoints guards against flat
  // stretches where the golden-section comparisons are uninformative.
  double best_x = 0.5 * (lo + hi);
  double best_f = objective(best_x);
  auto consider = [&](double x1) {
    x1 = std::clamp(x1, 0.0, total_flow);
    const double f = objective(x1);
    if (f < best_f) {
      best_f = f;
      best_x = x1;
    }
  };
  constexpr int kSweep = 20;
  for (int i = -kSweep; i <= kSweep; ++i) consider(best_x + i * tol / 4.0);
  consider(0.0);
  consider(total_flow);
  return {best_x, total_flow - best_x};
}

std::optional<FlowVector> balanced_flow(const ArcCostModel& model, double total_flow,
                                        double tol) {
  check_total_flow(total_flow, tol);
  auto gap = [&](double x1) {
    return model.arc_discomfort(0, x1) - model.arc_discomfort(1, total_flow - x1);
  };
  if (gap(total_flow) < 0.0 || gap(0.0) > 0.0) return std::nullopt;

  double lo = 0.0;
  double hi = total_flow;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double g = gap(mid);
    if (hi - lo <= tol * 1e-3 && std::abs(g) <= tol) break;
    if (g < 0.0) lo = mid; else hi = mid;
  }
  const double x1 = 0.5 * (lo + hi);
  return FlowVector{x1, total_flow - x1};
}

SensitivityDistribution::SensitivityDistribution(ExponentialSensitivity e) : kind_(e) {
  require(e.mean > 0.0, "exponential sensitivity mean must be positive");
}

SensitivityDistribution::SensitivityDistribution(UniformSensitivity u) : kind_(u) {
  require(u.min >= 0.0 && u.max > u.min, "uniform sensitivity needs 0 <= min < max");
}

double SensitivityDistribution::mean() const {
  if (const auto* e = std::get_if<ExponentialSensitivity>(&kind_)) return e->mean;
  const auto& u = std::get<UniformSensitivity>(kind_);
  return 0.5 * (u.min + u.max);
}

double SensitivityDistribution::cdf(double threshold) const {
  if (const auto* e = std::get_if<ExponentialSensitivity>(&kind_)) {
    if (threshold <= 0.0) return 0.0;
    return -std::expm1(-threshold / e->mean);
  }
  const auto& u = std::get<UniformSensitivity>(kind_);
  if (threshold <= u.min) return 0.0;
  if (threshold >= u.max) return 1.0;
  return (threshold - u.min) / (u.max - u.min);
}

bool SensitivityDistribution::operator==(const SensitivityDistribution& other) const {
  if (kind_.index() != other.kind_.index()) return false;
  if (const auto* e = std::get_if<ExponentialSensitivity>(&kind_)) {
    return e->mean == std::get<ExponentialSensitivity>(other.kind_).mean;
  }
  const auto& a = std::get<UniformSensitivity>(kind_);
  const auto& b = std::get<UniformSensitivity>(other.kind_);
  return a.min == b.min && a.max == b.max;
}

void Scenario::validate() const {
  require(p_home >= 0.0 && p_home <= 1.0, "p_home must lie in [0, 1]");
  require(horizon >= 1, "horizon must be at least 1 day");
  require(population >= 1, "population must be at least 1");
  require(sensitivity.mean() > 0.0, "mean sensitivity must be positive");
  require(karma.initial.lo <= karma.initial.hi, "initial Karma range is reversed");
  require(karma.reference.lo <= karma.reference.hi, "reference Karma range is reversed");
  require(karma.reference.lo >= 0.0, "reference Karma must be non-negative");
  require(karma.initial.lo >= 0.0, "initial Karma must be non-negative");
}

}  // namespace karma
