#include "karma/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace karma {

double Population::mean_karma() const {
  return karma.empty() ? 0.0 : total_karma() / static_cast<double>(karma.size());
}

double Population::total_karma() const { return std::accumulate(karma.begin(), karma.end(), 0.0); }

namespace {

double draw(const KarmaRange& range, bool lattice, std::mt19937_64& rng) {
  if (lattice) {
    std::uniform_int_distribution<long> dist(static_cast<long>(std::ceil(range.lo)),
                                             static_cast<long>(std::floor(range.hi)));
    return static_cast<double>(dist(rng));
  }
  if (range.lo == range.hi) return range.lo;
  std::uniform_real_distribution<double> dist(range.lo, range.hi);
  return dist(rng);
}

}  // namespace

Population init_population(const Scenario& scenario, const PriceVector& p, std::mt19937_64& rng) {
  scenario.validate();
  Population pop;
  const auto m = static_cast<std::size_t>(scenario.population);
  pop.karma.resize(m);
  pop.reference.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    pop.reference[i] = draw(scenario.karma.reference, scenario.karma.integer_lattice, rng);
    pop.karma[i] = draw(scenario.karma.initial, scenario.karma.integer_lattice, rng);
    const double floor = thresholds(pop.reference[i], p, scenario.horizon).floor;
    if (pop.karma[i] < floor) {
      pop.karma[i] = floor;
      ++pop.clamped_at_init;
    }
  }
  return pop;
}

DayMetrics compute_metrics(std::span<const RouteChoice> choices, std::span<const double> sensitivities,
                           const FlowVector& flows, const ArcCostModel& model, double mean_sensitivity,
                           std::span<const double> karma) {
  const auto d = model.discomfort(flows);
  double perceived_gap = 0.0;
  double unaware = 0.0;
  double sensitivity_gap = 0.0;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    sensitivity_gap += sensitivities[i] - mean_sensitivity;
    if (choices[i] == RouteChoice::Stay) continue;
    const double di = d[choices[i] == RouteChoice::Arc1 ? 0 : 1];
    perceived_gap += (sensitivities[i] - mean_sensitivity) * di;
    unaware += mean_sensitivity * di;
  }
  DayMetrics m;
  if (unaware > 0.0) m.delta_discomfort = perceived_gap / unaware;
  m.delta_sensitivity =
      choices.empty() ? 0.0 : sensitivity_gap / (static_cast<double>(choices.size()) * mean_sensitivity);
  m.mean_karma = karma.empty() ? 0.0
                               : std::accumulate(karma.begin(), karma.end(), 0.0) /
                                     static_cast<double>(karma.size());
  m.societal_cost = model.societal_cost(flows);
  return m;
}

TailSummary summarize_tail(std::span<const DayRecord> days, double fraction) {
  TailSummary s;
  if (days.empty()) return s;
  const auto n = static_cast<int>(days.size());
  s.days = std::max(1, static_cast<int>(std::lround(n * fraction)));
  s.first_day = days[n - s.days].day;
  s.mean_cost_ratio = 0.0;
  int with_delta = 0;
  for (int i = n - s.days; i < n; ++i) {
    const DayRecord& r = days[i];
    s.mean_cost_ratio += r.cost_ratio;
    if (r.delta_discomfort) {
      s.mean_delta_discomfort += *r.delta_discomfort;
      ++with_delta;
    }
    s.mean_delta_sensitivity += r.delta_sensitivity;
    s.mean_flows.arc1 += r.flows.arc1;
    s.mean_flows.arc2 += r.flows.arc2;
    s.mean_karma += r.mean_karma;
    if (r.regime == Regime::Uncontrolled) ++s.uncontrolled_days;
  }
  s.mean_cost_ratio /= s.days;
  if (with_delta > 0) s.mean_delta_discomfort /= with_delta;
  s.mean_delta_sensitivity /= s.days;
  s.mean_flows.arc1 /= s.days;
  s.mean_flows.arc2 /= s.days;
  s.mean_karma /= s.days;
  return s;
}

Simulator::Simulator(Scenario scenario, ArcCostModel model, PriceVector prices, SimulationOptions opts)
    : scenario_(std::move(scenario)),
      model_(model),
      prices_(prices),
      opts_(opts),
      rng_(scenario_.seed) {
  scenario_.validate();
  population_ = init_population(scenario_, prices_, rng_);
  const std::size_t m = population_.size();
  thresholds_.reserve(m);
  for (double ref : population_.reference) thresholds_.push_back(thresholds(ref, prices_, scenario_.horizon));
  today_.resize(m);
  sensitivities_.resize(m);
  last_choices_.assign(m, RouteChoice::Stay);
  if (scenario_.p_go() > 0.0) previous_flows_ = system_optimum(model_, scenario_.p_go(), opts_.optimum_tol);
}

DayRecord Simulator::simulate_day() {
  const std::size_t m = population_.size();
  const double s_bar = scenario_.sensitivity.mean();

  std::bernoulli_distribution stays(scenario_.p_home);
  for (std::size_t i = 0; i < m; ++i) today_[i].travels = !stays(rng_);
  for (std::size_t i = 0; i < m; ++i) sensitivities_[i] = scenario_.sensitivity.sample(rng_);

  int travelers = 0;
  for (std::size_t i = 0; i < m; ++i) {
    today_[i].state = {population_.karma[i], population_.reference[i], sensitivities_[i]};
    today_[i].thresholds = thresholds_[i];
    travelers += today_[i].travels ? 1 : 0;
  }

  DayRecord rec;
  rec.day = day_;
  rec.travelers = travelers;

  const PolicyContext ctx{prices_, scenario_.horizon, s_bar};
  if (travelers > 0) {
    WardropResult we = wardrop_equilibrium(today_, model_, ctx, previous_flows_, opts_.wardrop);
    rec.flows = we.flows;
    rec.regime = we.regime;
    rec.nash_iterations = we.iterations;
    last_choices_ = std::move(we.choices);
  } else {
    std::fill(last_choices_.begin(), last_choices_.end(), RouteChoice::Stay);
  }

  // Karma updates in agent-index order.
  for (std::size_t i = 0; i < m; ++i) {
    population_.karma[i] = apply_choice(population_.karma[i], last_choices_[i], prices_);
    if (population_.karma[i] < thresholds_[i].floor) rec.floor_respected = false;
  }

  const DayMetrics metrics =
      compute_metrics(last_choices_, sensitivities_, rec.flows, model_, s_bar, population_.karma);
  rec.societal_cost = metrics.societal_cost;
  rec.delta_discomfort = metrics.delta_discomfort;
  rec.delta_sensitivity = metrics.delta_sensitivity;
  rec.mean_karma = metrics.mean_karma;
  rec.total_karma = population_.total_karma();
  if (travelers > 0) {
    const double share = travelers / static_cast<double>(m);
    rec.optimal_cost = model_.societal_cost(system_optimum(model_, share, opts_.optimum_tol));
    rec.cost_ratio = rec.societal_cost / rec.optimal_cost;
    previous_flows_ = rec.flows;
  }
  ++day_;
  return rec;
}

RunResult run_scenario(const Scenario& scenario, const ArcCostModel& model, const PriceVector& p,
                       int days, const SimulationOptions& opts) {
  if (days < 1) throw InvalidArgument("day count must be at least 1");
  Simulator sim(scenario, model, p, opts);
  RunResult result;
  result.days.reserve(days);
  for (int d = 0; d < days; ++d) result.days.push_back(sim.simulate_day());

  const Population& pop = sim.population();
  std::vector<std::pair<double, double>> agents(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) agents[i] = {pop.karma[i], pop.reference[i]};
  result.final_histogram = quantize_population(agents, p, scenario.horizon);
  result.tail = summarize_tail(result.days);
  result.final_population = pop;
  return result;
}

void write_run_csv(std::ostream& out, std::span<const DayRecord> days) {
  out << "day,x1,x2,cost,cost_opt_ratio,delta_d,delta_s,mean_karma,regime,nash_iters\n";
  const auto old_precision = out.precision(10);
  for (const DayRecord& r : days) {
    out << r.day << ',' << r.flows.arc1 << ',' << r.flows.arc2 << ',' << r.societal_cost << ','
        << r.cost_ratio << ',';
    if (r.delta_discomfort) out << *r.delta_discomfort;
    out << ',' << r.delta_sensitivity << ',' << r.mean_karma << ','
        << (r.regime == Regime::Controlled ? "controlled" : "uncontrolled") << ','
        << r.nash_iterations << '\n';
  }
  out.precision(old_precision);
}

void write_histogram_csv(std::ostream& out, const QuantizedPopulation& hist, std::size_t population) {
  out << "index,count\n";
  const auto& dist = hist.distribution;
  for (int i = 0; i < dist.size(); ++i) {
    out << i + 1 << ',' << std::lround(dist[i] * static_cast<double>(population)) << '\n';
  }
}

}  // namespace karma
