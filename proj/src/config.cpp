#include "karma/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <sstream>

namespace karma {

namespace pt = boost::property_tree;

bool RunConfig::operator==(const RunConfig& other) const {
  return preset == other.preset && scenario == other.scenario &&
         bpr.free_flow == other.bpr.free_flow && bpr.capacity == other.bpr.capacity &&
         bpr.alpha == other.bpr.alpha && bpr.beta == other.bpr.beta &&
         societal_cost == other.societal_cost && pricing == other.pricing && days == other.days;
}

void RunConfig::validate() const {
  scenario.validate();
  (void)model();
  if (days < 1) throw InvalidArgument("days must be at least 1");
  if (pricing.toll_scale < 1) throw InvalidArgument("toll_scale must be at least 1");
  if (pricing.max_price < 2) throw InvalidArgument("max_price must be at least 2");
  if (pricing.mode == PricingMode::Explicit && !pricing.explicit_prices.feasible_for(scenario.horizon)) {
    throw InvalidArgument("explicit prices violate reward/toll in [1/T, T]");
  }
}

void apply_preset(RunConfig& c, const std::string& name) {
  Scenario& s = c.scenario;
  s.horizon = 6;
  s.population = 1000;
  s.sensitivity = SensitivityDistribution::exponential(1.0);
  s.karma.integer_lattice = false;
  c.bpr = BprParams{};
  c.pricing.mode = PricingMode::Explicit;
  if (name == "fig3") {
    s.p_home = 0.05;
    s.karma.reference = {0.0, 100.0};
    s.karma.initial = {0.0, 500.0};
    c.societal_cost = SocietalCost::SumOfDiscomforts;
    c.pricing.explicit_prices = {10, 14};
  } else if (name == "fig5") {
    s.p_home = 0.0;
    s.karma.reference = {0.0, 100.0};
    s.karma.initial = {0.0, 100.0};
    c.societal_cost = SocietalCost::SumOfDiscomforts;
    c.pricing.explicit_prices = {10, 13};
  } else if (name == "fig6") {
    s.p_home = 0.05;
    s.karma.reference = {0.0, 100.0};
    s.karma.initial = {0.0, 500.0};
    c.societal_cost = SocietalCost::LinearFlow;
    c.pricing.explicit_prices = {10, 10};
  } else {
    throw InvalidArgument("unknown preset '" + name + "' (expected fig3, fig5 or fig6)");
  }
  c.preset = name;
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  apply_preset(c, name);
  return c;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* pricing_mode_name(PricingMode m) {
  switch (m) {
    case PricingMode::FixedToll: return "fixed_toll";
    case PricingMode::BestApproximation: return "best_approximation";
    case PricingMode::Explicit: return "explicit";
  }
  return "fixed_toll";
}

PricingMode parse_pricing_mode(const std::string& s) {
  if (s == "fixed_toll") return PricingMode::FixedToll;
  if (s == "best_approximation") return PricingMode::BestApproximation;
  if (s == "explicit") return PricingMode::Explicit;
  throw InvalidArgument("unknown pricing mode '" + s + "'");
}

SocietalCost parse_cost(const std::string& s) {
  if (s == "sum_of_discomforts") return SocietalCost::SumOfDiscomforts;
  if (s == "linear_flow") return SocietalCost::LinearFlow;
  throw InvalidArgument("unknown societal_cost '" + s + "'");
}

template <class T>
T get(const pt::ptree& tree, const std::string& key, T fallback) {
  try {
    return tree.get_child_optional(key) ? tree.get<T>(key) : fallback;
  } catch (const pt::ptree_bad_data&) {
    throw InvalidArgument("config key '" + key + "' has an invalid value");
  }
}

}  // namespace

RunConfig read_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw InvalidArgument(std::string("config parse error: ") + e.what());
  }

  RunConfig c;
  Scenario& s = c.scenario;
  s.p_home = get(tree, "scenario.p_home", s.p_home);
  s.horizon = get(tree, "scenario.horizon", s.horizon);
  s.population = get(tree, "scenario.population", s.population);
  s.seed = get(tree, "scenario.seed", s.seed);

  const std::string kind = get<std::string>(tree, "sensitivity.kind", "exponential");
  if (kind == "exponential") {
    s.sensitivity = SensitivityDistribution::exponential(get(tree, "sensitivity.mean", 1.0));
  } else if (kind == "uniform") {
    s.sensitivity = SensitivityDistribution::uniform(get(tree, "sensitivity.min", 0.0),
                                                     get(tree, "sensitivity.max", 2.0));
  } else {
    throw InvalidArgument("unknown sensitivity kind '" + kind + "'");
  }

  s.karma.initial.lo = get(tree, "karma.initial_lo", s.karma.initial.lo);
  s.karma.initial.hi = get(tree, "karma.initial_hi", s.karma.initial.hi);
  s.karma.reference.lo = get(tree, "karma.reference_lo", s.karma.reference.lo);
  s.karma.reference.hi = get(tree, "karma.reference_hi", s.karma.reference.hi);
  s.karma.integer_lattice = get(tree, "karma.integer_lattice", s.karma.integer_lattice);

  c.bpr.free_flow[0] = get(tree, "network.free_flow_1", c.bpr.free_flow[0]);
  c.bpr.free_flow[1] = get(tree, "network.free_flow_2", c.bpr.free_flow[1]);
  c.bpr.capacity[0] = get(tree, "network.capacity_1", c.bpr.capacity[0]);
  c.bpr.capacity[1] = get(tree, "network.capacity_2", c.bpr.capacity[1]);
  c.bpr.alpha = get(tree, "network.alpha", c.bpr.alpha);
  c.bpr.beta = get(tree, "network.beta", c.bpr.beta);
  c.societal_cost = parse_cost(get<std::string>(tree, "network.societal_cost", "sum_of_discomforts"));

  c.pricing.mode = parse_pricing_mode(get<std::string>(tree, "pricing.mode", "fixed_toll"));
  c.pricing.toll_scale = get(tree, "pricing.toll_scale", c.pricing.toll_scale);
  c.pricing.max_price = get(tree, "pricing.max_price", c.pricing.max_price);
  c.pricing.explicit_prices = PriceVector(get(tree, "pricing.toll", c.pricing.explicit_prices.toll),
                                          get(tree, "pricing.reward", c.pricing.explicit_prices.reward));

  c.days = get(tree, "run.days", c.days);
  if (auto preset = tree.get_optional<std::string>("run.preset"); preset && !preset->empty()) {
    apply_preset(c, *preset);
  }
  c.validate();
  return c;
}

RunConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  return read_config(in);
}

void write_config(std::ostream& out, const RunConfig& c) {
  const Scenario& s = c.scenario;
  out << "[scenario]\n"
      << "p_home = " << format_double(s.p_home) << '\n'
      << "horizon = " << s.horizon << '\n'
      << "population = " << s.population << '\n'
      << "seed = " << s.seed << "\n\n";

  out << "[sensitivity]\n";
  if (const auto* e = std::get_if<ExponentialSensitivity>(&s.sensitivity.kind())) {
    out << "kind = exponential\nmean = " << format_double(e->mean) << "\n\n";
  } else {
    const auto& u = std::get<UniformSensitivity>(s.sensitivity.kind());
    out << "kind = uniform\nmin = " << format_double(u.min) << "\nmax = " << format_double(u.max) << "\n\n";
  }

  out << "[karma]\n"
      << "initial_lo = " << format_double(s.karma.initial.lo) << '\n'
      << "initial_hi = " << format_double(s.karma.initial.hi) << '\n'
      << "reference_lo = " << format_double(s.karma.reference.lo) << '\n'
      << "reference_hi = " << format_double(s.karma.reference.hi) << '\n'
      << "integer_lattice = " << (s.karma.integer_lattice ? "true" : "false") << "\n\n";

  out << "[network]\n"
      << "free_flow_1 = " << format_double(c.bpr.free_flow[0]) << '\n'
      << "free_flow_2 = " << format_double(c.bpr.free_flow[1]) << '\n'
      << "capacity_1 = " << format_double(c.bpr.capacity[0]) << '\n'
      << "capacity_2 = " << format_double(c.bpr.capacity[1]) << '\n'
      << "alpha = " << format_double(c.bpr.alpha) << '\n'
      << "beta = " << format_double(c.bpr.beta) << '\n'
      << "societal_cost = "
      << (c.societal_cost == SocietalCost::LinearFlow ? "linear_flow" : "sum_of_discomforts") << "\n\n";

  out << "[pricing]\n"
      << "mode = " << pricing_mode_name(c.pricing.mode) << '\n'
      << "toll_scale = " << c.pricing.toll_scale << '\n'
      << "max_price = " << c.pricing.max_price << '\n'
      << "toll = " << c.pricing.explicit_prices.toll << '\n'
      << "reward = " << c.pricing.explicit_prices.reward << "\n\n";

  out << "[run]\n"
      << "days = " << c.days << '\n';
  if (c.preset) out << "preset = " << *c.preset << '\n';
}

PriceDesign design_prices(const RunConfig& config, double tol) {
  const double p_go = config.scenario.p_go();
  if (p_go <= 0.0) throw InvalidArgument("price design needs P_go > 0");
  PriceDesign design;
  design.optimum = system_optimum(config.model(), p_go, tol);
  const int horizon = config.scenario.horizon;
  switch (config.pricing.mode) {
    case PricingMode::Explicit:
      design.prices = config.pricing.explicit_prices;
      break;
    case PricingMode::FixedToll:
      design.ratio = conservation_prices(design.optimum);
      design.prices = rationalize_fixed_toll(*design.ratio, config.pricing.toll_scale, horizon);
      break;
    case PricingMode::BestApproximation:
      design.ratio = conservation_prices(design.optimum);
      design.prices = rationalize_best_approximation(*design.ratio, config.pricing.max_price, horizon);
      break;
  }
  return design;
}

}  // namespace karma
