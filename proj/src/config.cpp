#include "iam/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "iam/error.hpp"

namespace iam::config {

using nlohmann::json;

namespace {

// Line of the first `"key"` occurrence at or after `from`, for diagnostics.
struct Locator {
  const std::string& text;
  std::string source;

  std::size_t offset_of(const std::string& key, std::size_t from) const {
    const auto pos = text.find("\"" + key + "\"", from);
    return pos == std::string::npos ? from : pos;
  }
  std::size_t line_at(std::size_t offset) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) line += text[i] == '\n';
    return line;
  }
};

class Section {
 public:
  Section(const json& j, std::string name, const Locator& loc, std::size_t offset)
      : j_(j), name_(std::move(name)), loc_(loc), offset_(offset) {
    if (!j_.is_object()) fail("must be an object", offset_);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  bool is_number(const std::string& key) { return has(key) && j_.at(key).is_number(); }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      fail_key(key, "has the wrong type");
    }
  }

  double number(const std::string& key, double fallback) {
    get(key, fallback);
    return fallback;
  }

  std::string string(const std::string& key, const std::string& fallback) {
    std::string out = fallback;
    get(key, out);
    return out;
  }

  template <std::size_t N>
  void array(const std::string& key, std::array<double, N>& out) {
    std::vector<double> v;
    if (!has(key)) return;
    get(key, v);
    if (v.size() != N) fail_key(key, "must have " + std::to_string(N) + " entries");
    std::copy(v.begin(), v.end(), out.begin());
  }

  template <std::size_t N>
  void matrix(const std::string& key, std::array<std::array<double, N>, N>& out) {
    std::vector<std::vector<double>> v;
    if (!has(key)) return;
    get(key, v);
    if (v.size() != N) fail_key(key, "must be a " + std::to_string(N) + "x" + std::to_string(N) + " matrix");
    for (std::size_t i = 0; i < N; ++i) {
      if (v[i].size() != N) fail_key(key, "must be a " + std::to_string(N) + "x" + std::to_string(N) + " matrix");
      std::copy(v[i].begin(), v[i].end(), out[i].begin());
    }
  }

  // [[t, value], ...]
  void table(const std::string& key, std::vector<std::pair<double, double>>& out) {
    std::vector<std::vector<double>> v;
    if (!has(key)) return;
    get(key, v);
    out.clear();
    for (const auto& row : v) {
      if (row.size() != 2) fail_key(key, "rows must be [time, value] pairs");
      out.emplace_back(row[0], row[1]);
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), name_.empty() ? key : name_ + "." + key, loc_, loc_.offset_of(key, offset_));
  }

  [[noreturn]] void fail_key(const std::string& key, const std::string& what) const {
    fail("key '" + key + "' " + what, loc_.offset_of(key, offset_));
  }

  [[noreturn]] void fail(const std::string& what, std::size_t offset) const {
    std::ostringstream msg;
    msg << loc_.source << ":" << loc_.line_at(offset) << ": " << (name_.empty() ? "config" : name_) << ": " << what;
    throw ConfigError(msg.str());
  }

  // Rejects keys that were never looked up.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail_key(it.key(), "is unknown");
    }
  }

  template <class Fn>
  auto checked(const std::string& key, Fn&& fn) -> decltype(fn()) {
    try {
      return fn();
    } catch (const ConfigError& e) {
      fail_key(key, std::string("is invalid: ") + e.what());
    }
  }

 private:
  const json& j_;
  std::string name_;
  const Locator& loc_;
  std::size_t offset_;
  std::set<std::string> seen_;
};

costs::DcMode parse_dc_mode(const std::string& s) {
  if (s == "none") return costs::DcMode::none;
  if (s == "numeraire-relative") return costs::DcMode::numeraire_relative;
  if (s == "gdp-relative") return costs::DcMode::gdp_relative;
  throw ConfigError("expected none, numeraire-relative or gdp-relative, got '" + s + "'");
}

rates::RateModelKind parse_rate_kind(const std::string& s) {
  if (s == "constant") return rates::RateModelKind::constant;
  if (s == "deterministic-curve") return rates::RateModelKind::deterministic_curve;
  if (s == "hull-white") return rates::RateModelKind::hull_white;
  throw ConfigError("expected constant, deterministic-curve or hull-white, got '" + s + "'");
}

stochvar::Tail parse_tail(const std::string& s) {
  if (s == "left") return stochvar::Tail::left;
  if (s == "right") return stochvar::Tail::right;
  throw ConfigError("expected left or right, got '" + s + "'");
}

void read_climate(Section sec, climate::ClimateConfig& c) {
  sec.matrix("gammaT", c.gamma_t);
  sec.array("forcingLoading", c.forcing_loading);
  sec.matrix("gammaM", c.gamma_m);
  sec.get("forcingPerCarbonDoubling", c.forcing_per_carbon_doubling);
  if (sec.is_number("forcingExternal")) {
    sec.get("forcingExternal", c.forcing_external);
  } else {
    sec.table("forcingExternal", c.forcing_external_table);
  }
  sec.get("m0Reference", c.m0_reference);
  sec.get("cCperCO2", c.c_per_co2);
  sec.get("sigma0", c.sigma0);
  sec.get("deltaSigma0", c.delta_sigma0);
  sec.get("emissionIntensityRateDecay", c.emission_intensity_rate_decay);
  sec.get("externalEmissionsInitial", c.external_emissions_initial);
  sec.get("externalEmissionsDecay", c.external_emissions_decay);
  sec.table("externalEmissions", c.external_emissions_table);
  sec.array("temperatureInitial", c.temperature_initial);
  sec.array("carbonInitial", c.carbon_initial);
  sec.finish();
}

void read_economy(Section sec, economy::EconomyConfig& e) {
  sec.get("gamma", e.gamma);
  sec.get("deltaCapital5y", e.delta_capital_5y);
  sec.get("a0", e.a0);
  sec.get("ga", e.ga);
  sec.get("deltaA", e.delta_a);
  sec.get("l0", e.l0);
  sec.get("lInf", e.l_inf);
  sec.get("gPop", e.g_pop);
  sec.get("eta", e.eta);
  sec.get("k0", e.k0);
  sec.get("consumptionFloor", e.consumption_floor);
  sec.finish();
}

void read_costs(Section sec, costs::CostConfig& c) {
  sec.get("backstopPriceInitial", c.backstop_price_initial);
  sec.get("backstopPriceDecayRate", c.backstop_price_decay_rate);
  sec.get("theta", c.theta);
  sec.get("a2", c.a2);
  sec.get("fundingPeriod", c.funding_period);
  if (sec.has("dcMode")) {
    const std::string mode = sec.string("dcMode", "none");
    c.dc_mode = sec.checked("dcMode", [&] { return parse_dc_mode(mode); });
  }
  sec.get("dcThreshold", c.dc_threshold);
  sec.get("dcStrength", c.dc_strength);
  sec.get("dcPower", c.dc_power);
  sec.get("dcOnAbatement", c.dc_on_abatement);
  sec.get("fundDamages", c.fund_damages);
  sec.finish();
}

std::vector<stochvar::SampleValue> sample_table(Section& sec, const std::string& key) {
  std::vector<double> v;
  sec.get(key, v);
  return {v.begin(), v.end()};
}

void read_policy(Section sec, policy::PolicySpec& p) {
  if (sec.has("kind")) {
    const std::string kind = sec.string("kind", "reduced");
    p.kind = sec.checked("kind", [&] { return policy::parse_kind(kind); });
  }
  p.mu0 = sec.number("mu0", p.mu0.scalar());
  p.a0 = sec.number("a0", p.a0.scalar());
  p.a1 = sec.number("a1", p.a1.scalar());
  p.a2 = sec.number("a2", p.a2.scalar());
  p.s0 = sec.number("s0", p.s0.scalar());
  if (sec.has("muTable")) p.mu_table = sample_table(sec, "muTable");
  if (sec.has("sTable")) p.s_table = sample_table(sec, "sTable");
  sec.finish();
}

void read_objective(Section sec, objective::ObjectiveSpec& o) {
  if (sec.has("aggregation")) {
    const std::string a = sec.string("aggregation", "classical");
    if (a == "classical") {
      o.aggregation = objective::Aggregation::classical;
    } else if (a == "p-norm") {
      o.aggregation = objective::Aggregation::p_norm;
    } else {
      sec.fail_key("aggregation", "must be classical or p-norm");
    }
  }
  if (sec.has("statistic")) {
    const std::string s = sec.string("statistic", "expectation");
    if (s == "expectation") {
      o.statistic = stochvar::Statistic::expectation();
    } else if (s == "expected-shortfall") {
      o.statistic.kind = stochvar::Statistic::Kind::expected_shortfall;
    } else {
      sec.fail_key("statistic", "must be expectation or expected-shortfall");
    }
  }
  sec.get("alpha", o.statistic.alpha);
  if (sec.has("tail")) {
    const std::string t = sec.string("tail", "left");
    o.statistic.tail = sec.checked("tail", [&] { return parse_tail(t); });
  }
  sec.get("p", o.p);
  sec.get("generationSpan", o.generation_span);
  sec.get("utilityOffset", o.utility_offset);
  sec.finish();
}

void read_rates(Section sec, rates::RateModelSpec& r) {
  if (sec.has("kind")) {
    const std::string kind = sec.string("kind", "constant");
    r.kind = sec.checked("kind", [&] { return parse_rate_kind(kind); });
  }
  sec.get("r0", r.r0);
  sec.table("curve", r.curve);
  sec.get("meanReversion", r.mean_reversion);
  sec.get("volatility", r.volatility);
  sec.get("seed", r.seed);
  sec.get("paths", r.paths);
  sec.finish();
}

void read_experiment(Section sec, ExperimentConfig& x) {
  sec.get("rates", x.rates);
  sec.get("volatilities", x.volatilities);
  sec.get("quantiles", x.quantiles);
  sec.get("fundingPeriods", x.funding_periods);
  sec.get("horizons", x.horizons);
  if (sec.has("family")) {
    const std::string f = sec.string("family", "reduced");
    x.family = sec.checked("family", [&] { return policy::parse_kind(f); });
  }
  if (sec.has("quantileTail")) {
    const std::string t = sec.string("quantileTail", "right");
    x.quantile_tail = sec.checked("quantileTail", [&] { return parse_tail(t); });
  }
  sec.get("volatility", x.volatility);
  sec.get("alpha", x.alpha);
  sec.get("generationSpan", x.generation_span);
  sec.get("sensitivityTime", x.sensitivity_time);
  sec.get("bins", x.bins);
  sec.get("compareUntil", x.compare_until);
  sec.get("calibrationPaths", x.calibration_paths);
  sec.get("learningRate", x.adam.learning_rate);
  sec.get("iterations", x.adam.max_iterations);
  sec.get("gradientTolerance", x.adam.gradient_tolerance);
  sec.get("learningRateDecay", x.adam.decay);
  sec.get("chunkPaths", x.chunk_paths);
  sec.finish();
}

void require_nonempty(const std::vector<double>& v, const std::string& name) {
  if (v.empty()) throw ConfigError("experiment." + name + " must not be empty");
}

}  // namespace

void Config::validate() const {
  model.validate();
  const auto& x = experiment;
  require_nonempty(x.rates, "rates");
  require_nonempty(x.volatilities, "volatilities");
  require_nonempty(x.quantiles, "quantiles");
  require_nonempty(x.funding_periods, "fundingPeriods");
  require_nonempty(x.horizons, "horizons");
  for (double v : x.volatilities) {
    if (v < 0.0) throw ConfigError("experiment.volatilities must be >= 0");
  }
  for (double q : x.quantiles) {
    if (!(q > 0.0 && q <= 1.0)) throw ConfigError("experiment.quantiles must lie in (0,1]");
  }
  for (double d : x.funding_periods) {
    if (d < 0.0) throw ConfigError("experiment.fundingPeriods must be >= 0");
  }
  for (double h : x.horizons) {
    if (!(h > 0.0)) throw ConfigError("experiment.horizons must be positive");
  }
  if (x.volatility < 0.0) throw ConfigError("experiment.volatility must be >= 0");
  if (!(x.alpha > 0.0 && x.alpha <= 1.0)) throw ConfigError("experiment.alpha must lie in (0,1]");
  if (x.generation_span < 0.0) throw ConfigError("experiment.generationSpan must be >= 0");
  if (x.bins < 1) throw ConfigError("experiment.bins must be >= 1");
  if (x.calibration_paths < 1) throw ConfigError("experiment.calibrationPaths must be >= 1");
  if (x.chunk_paths < 1) throw ConfigError("experiment.chunkPaths must be >= 1");
  if (!(x.adam.learning_rate > 0.0)) throw ConfigError("experiment.learningRate must be positive");
  if (x.adam.max_iterations < 1) throw ConfigError("experiment.iterations must be >= 1");
  if (x.sensitivity_time < 0.0 || x.sensitivity_time >= model.horizon) {
    throw ConfigError("experiment.sensitivityTime must lie in [0, horizon)");
  }
}

Config parse(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const Locator loc{text, source};
    std::ostringstream msg;
    msg << source << ":" << loc.line_at(e.byte > 0 ? e.byte - 1 : 0) << ": malformed JSON: " << e.what();
    throw ConfigError(msg.str());
  }
  const Locator loc{text, source};
  Section root(doc, "", loc, 0);
  Config cfg;
  root.get("horizon", cfg.model.horizon);
  root.get("dt", cfg.model.dt);
  if (root.has("climate")) read_climate(root.child("climate"), cfg.model.climate);
  if (root.has("economy")) read_economy(root.child("economy"), cfg.model.economy);
  if (root.has("costs")) read_costs(root.child("costs"), cfg.model.costs);
  if (root.has("policy")) read_policy(root.child("policy"), cfg.model.policy);
  if (root.has("objective")) read_objective(root.child("objective"), cfg.model.objective);
  if (root.has("rates")) read_rates(root.child("rates"), cfg.model.rates);
  if (root.has("experiment")) read_experiment(root.child("experiment"), cfg.experiment);
  root.finish();
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

Config load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

}  // namespace iam::config
