#include "tdclt/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

#include "tdclt/rng.hpp"

namespace tdclt {

using nlohmann::json;

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::transform: return "transform";
    case ExperimentKind::lcond: return "lcond";
    case ExperimentKind::metrics: return "metrics";
    case ExperimentKind::cltcheck: return "cltcheck";
    case ExperimentKind::shatter: return "shatter";
    case ExperimentKind::chain: return "chain";
    case ExperimentKind::prop2: return "prop2";
  }
  return "?";
}

const std::vector<ExperimentKind>& all_experiments() {
  static const std::vector<ExperimentKind> all{
      ExperimentKind::transform, ExperimentKind::lcond,   ExperimentKind::metrics,
      ExperimentKind::cltcheck,  ExperimentKind::shatter, ExperimentKind::chain,
      ExperimentKind::prop2};
  return all;
}

ExperimentKind experiment_from_string(std::string_view name) {
  for (auto k : all_experiments())
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown experiment '" + std::string(name) + "'");
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error("invalid config: " + join(v)), violations(std::move(v)) {}

TimeGrid GridConfig::build() const {
  switch (kind) {
    case GridKind::interval_1d:
      if (dyadic >= 0) return TimeGrid::dyadic(dyadic, horizon);
      if (uniform) return TimeGrid::uniform(uniform, horizon);
      return TimeGrid::interval(points, horizon);
    case GridKind::sheet_2d:
      if (uniform) return TimeGrid::sheet_uniform(uniform, horizon);
      return TimeGrid::sheet(sheet_points, horizon);
    case GridKind::discrete_n:
      if (uniform) return TimeGrid::discrete(uniform, first);
      return TimeGrid::discrete_points(discrete_points);
  }
  throw std::logic_error("unreachable grid kind");
}

CdfModel CdfConfig::build(std::uint64_t master_seed) const {
  if (kind == "bernoulli") return cdf::bernoulli(p);
  if (kind == "point-mass") return cdf::point_mass(at);
  if (kind == "uniform") return cdf::uniform(lo, hi);
  if (kind == "normal") return cdf::normal(sigma);
  if (kind == "atom-uniform")
    return cdf::mixture({cdf::point_mass(at), cdf::uniform(lo, hi)}, {atom_weight, 1.0 - atom_weight});
  if (kind == "empirical-normal") {
    std::vector<double> x(size);
    RandomStream rng({master_seed, 0}, Substream::pilot, 1);
    for (auto& v : x) v = sigma * rng.normal();
    return cdf::empirical(x);
  }
  throw std::invalid_argument("unknown cdf kind '" + kind + "'");
}

std::string CdfConfig::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == "bernoulli") os << "bernoulli(" << p << ")";
  else if (kind == "point-mass") os << "point-mass(" << at << ")";
  else if (kind == "uniform") os << "uniform(" << lo << "," << hi << ")";
  else if (kind == "normal") os << "normal(" << sigma << ")";
  else if (kind == "atom-uniform") os << "atom-uniform(" << at << "," << atom_weight << "," << lo << "," << hi << ")";
  else if (kind == "empirical-normal") os << "empirical-normal(" << size << "," << sigma << ")";
  else os << kind;
  return os.str();
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::transform:
      c.replicates = 100000;
      break;
    case ExperimentKind::lcond:
      c.process.family = Family::fbm_shift;
      c.grid.uniform = 64;
      c.replicates = 20000;
      break;
    case ExperimentKind::metrics:
      c.process.family = Family::fbm_shift;
      c.grid.uniform = 64;
      c.replicates = 20000;
      c.L = 1.0;
      break;
    case ExperimentKind::cltcheck:
      c.process.family = Family::linear_u;
      c.grid.uniform = 32;
      c.levels = 16;
      c.replicates = 500;
      c.n_ladder = {16, 64, 256};
      break;
    case ExperimentKind::shatter:
      c.process.family = Family::linear_u;
      c.grid.uniform = 32;
      c.n_ladder = {3, 4, 5};
      c.trials = 20;
      break;
    case ExperimentKind::chain:
      c.process.family = Family::fbm_shift;
      c.grid.uniform = 16;
      c.replicates = 20000;
      c.levels = 8;
      c.L = 1.0;
      break;
    case ExperimentKind::prop2:
      c.process.family = Family::discrete_bernoulli;
      c.grid.kind = GridKind::discrete_n;
      c.grid.uniform = 16;
      c.t_max = 1000000;
      break;
  }
  if (c.eps_grid.empty()) {
    for (int k = 1; k <= 8; ++k) c.eps_grid.push_back(std::ldexp(1.0, -k));
  }
  return c;
}

namespace {

PtFamily parse_pt(const std::string& s) {
  PtFamily pt;
  const auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') throw std::invalid_argument("pt-family must look like log-power(a) or geometric(q)");
  const std::string name = s.substr(0, open);
  if (name == "log-power") pt.kind = PtFamily::Kind::log_power;
  else if (name == "geometric") pt.kind = PtFamily::Kind::geometric;
  else throw std::invalid_argument("unknown pt-family '" + name + "'");
  std::size_t used = 0;
  const std::string arg = s.substr(open + 1, s.size() - open - 2);
  pt.param = std::stod(arg, &used);
  if (used != arg.size()) throw std::invalid_argument("bad pt-family parameter '" + arg + "'");
  return pt;
}

// Reads known keys, recording violations instead of throwing.
class Reader {
 public:
  Reader(const json& j, std::string where, std::vector<std::string>& errs)
      : j_(j), where_(std::move(where)), errs_(errs) {
    if (!j.is_object()) errs_.push_back(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const std::exception& e) {
      errs_.push_back(path(key) + ": " + e.what());
    }
  }

  template <class F>
  void with(const char* key, F&& f) {
    seen_.insert(key);
    if (!j_.is_object() || !j_.contains(key)) return;
    try {
      f(j_.at(key));
    } catch (const ConfigError& e) {
      for (const auto& v : e.violations) errs_.push_back(v);
    } catch (const std::exception& e) {
      errs_.push_back(path(key) + ": " + e.what());
    }
  }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }
  std::string path(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  void finish() {
    if (!j_.is_object()) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) errs_.push_back(path(k) + ": unknown key");
  }

 private:
  const json& j_;
  std::string where_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
};

void parse_process(const json& j, ProcessSpec& p, std::vector<std::string>& errs) {
  Reader r(j, "process", errs);
  r.with("family", [&](const json& v) { p.family = family_from_string(v.get<std::string>()); });
  r.get("gamma", p.gamma);
  r.with("shift-law", [&](const json& v) { p.shift_law = shift_law_from_string(v.get<std::string>()); });
  r.get("shift-p", p.shift_p);
  r.with("pt-family", [&](const json& v) { p.pt = parse_pt(v.get<std::string>()); });
  r.get("oscillator-intervals", p.oscillator_intervals);
  r.with("holder-theta", [&](const json& v) {
    p.holder_theta = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  });
  r.get("h-variance", p.h_variance);
  r.finish();
}

void parse_grid(const json& j, GridConfig& g, std::vector<std::string>& errs) {
  Reader r(j, "grid", errs);
  r.with("kind", [&](const json& v) { g.kind = grid_kind_from_string(v.get<std::string>()); });
  r.get("horizon", g.horizon);
  r.get("uniform", g.uniform);
  r.get("dyadic", g.dyadic);
  r.get("first", g.first);
  r.with("points", [&](const json& v) {
    if (g.kind == GridKind::sheet_2d) {
      for (const auto& p : v) {
        const auto pair = p.get<std::vector<double>>();
        if (pair.size() != 2) throw std::invalid_argument("sheet points are [s, u] pairs");
        g.sheet_points.push_back({pair[0], pair[1]});
      }
    } else if (g.kind == GridKind::discrete_n) {
      g.discrete_points = v.get<std::vector<long>>();
    } else {
      g.points = v.get<std::vector<double>>();
    }
  });
  r.finish();
  const int sources = (r.has("points") ? 1 : 0) + (g.uniform ? 1 : 0) + (g.dyadic >= 0 ? 1 : 0);
  if (sources != 1) errs.push_back("grid: exactly one of points, uniform, dyadic is required");
}

void parse_cdf(const json& j, CdfConfig& c, std::vector<std::string>& errs) {
  Reader r(j, "cdf", errs);
  r.get("kind", c.kind);
  r.get("p", c.p);
  r.get("at", c.at);
  r.get("lo", c.lo);
  r.get("hi", c.hi);
  r.get("sigma", c.sigma);
  r.get("atom-weight", c.atom_weight);
  r.get("size", c.size);
  r.finish();
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  std::vector<std::string> errs;
  ExperimentConfig c;
  if (!j.is_object()) throw ConfigError({"config: expected a JSON object"});
  if (j.contains("experiment")) {
    try {
      c = default_config(experiment_from_string(j.at("experiment").get<std::string>()));
    } catch (const std::exception& e) {
      throw ConfigError({std::string("experiment: ") + e.what()});
    }
  } else {
    errs.push_back("experiment: required");
  }
  Reader r(j, "", errs);
  r.with("experiment", [](const json&) {});
  r.with("process", [&](const json& v) { parse_process(v, c.process, errs); });
  r.with("grid", [&](const json& v) {
    c.grid = GridConfig{};
    parse_grid(v, c.grid, errs);
  });
  r.get("replicates", c.replicates);
  r.get("n-ladder", c.n_ladder);
  r.get("eps-grid", c.eps_grid);
  r.get("trials", c.trials);
  r.get("master-seed", c.master_seed);
  r.get("workers", c.workers);
  r.get("output-dir", c.output_dir);
  r.with("cdf", [&](const json& v) { parse_cdf(v, c.cdf, errs); });
  r.get("variant", c.variant);
  r.get("alpha", c.alpha);
  r.get("L", c.L);
  r.get("lags", c.lags);
  r.get("levels", c.levels);
  r.get("t-max", c.t_max);
  r.get("r-grid", c.r_grid);
  r.get("limit", c.limit);
  r.get("limit-paths", c.limit_paths);
  r.get("ks-threshold", c.ks_threshold);
  r.get("max-level", c.max_level);
  r.get("lemma8", c.lemma8);
  r.get("lemma8-intervals", c.lemma8_intervals);
  r.get("lemma8-n", c.lemma8_n);
  r.get("witnesses", c.witnesses);
  r.finish();
  if (!errs.empty()) throw ConfigError(errs);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"config: cannot open '" + path + "'"});
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError({std::string("config: ") + e.what()});
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json p;
  p["family"] = to_string(c.process.family);
  p["gamma"] = c.process.gamma;
  p["shift-law"] = to_string(c.process.shift_law);
  p["shift-p"] = c.process.shift_p;
  p["pt-family"] = to_string(c.process.pt);
  p["oscillator-intervals"] = c.process.oscillator_intervals;
  p["holder-theta"] = std::isnan(c.process.holder_theta) ? json(nullptr) : json(c.process.holder_theta);
  p["h-variance"] = c.process.h_variance;

  json g;
  g["kind"] = to_string(c.grid.kind);
  g["horizon"] = c.grid.horizon;
  if (c.grid.dyadic >= 0) g["dyadic"] = c.grid.dyadic;
  else if (c.grid.uniform) g["uniform"] = c.grid.uniform;
  else if (c.grid.kind == GridKind::sheet_2d) {
    json pts = json::array();
    for (const auto& q : c.grid.sheet_points) pts.push_back({q.s, q.u});
    g["points"] = pts;
  } else if (c.grid.kind == GridKind::discrete_n) g["points"] = c.grid.discrete_points;
  else g["points"] = c.grid.points;
  if (c.grid.kind == GridKind::discrete_n && c.grid.uniform) g["first"] = c.grid.first;

  json cdf;
  cdf["kind"] = c.cdf.kind;
  cdf["p"] = c.cdf.p;
  cdf["at"] = c.cdf.at;
  cdf["lo"] = c.cdf.lo;
  cdf["hi"] = c.cdf.hi;
  cdf["sigma"] = c.cdf.sigma;
  cdf["atom-weight"] = c.cdf.atom_weight;
  cdf["size"] = c.cdf.size;

  json j;
  j["experiment"] = to_string(c.experiment);
  j["process"] = p;
  j["grid"] = g;
  j["replicates"] = c.replicates;
  j["n-ladder"] = c.n_ladder;
  j["eps-grid"] = c.eps_grid;
  j["trials"] = c.trials;
  j["master-seed"] = c.master_seed;
  j["workers"] = c.workers;
  j["output-dir"] = c.output_dir;
  j["cdf"] = cdf;
  j["variant"] = c.variant;
  j["alpha"] = c.alpha;
  j["L"] = c.L;
  j["lags"] = c.lags;
  j["levels"] = c.levels;
  j["t-max"] = c.t_max;
  j["r-grid"] = c.r_grid;
  j["limit"] = c.limit;
  j["limit-paths"] = c.limit_paths;
  j["ks-threshold"] = c.ks_threshold;
  j["max-level"] = c.max_level;
  j["lemma8"] = c.lemma8;
  j["lemma8-intervals"] = c.lemma8_intervals;
  j["lemma8-n"] = c.lemma8_n;
  j["witnesses"] = c.witnesses;
  return j;
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> v;
  if (c.workers <= 0) v.push_back("workers: must be a positive integer");
  if (c.replicates == 0) v.push_back("replicates: must be positive");
  if (c.trials == 0) v.push_back("trials: must be positive");
  if (c.output_dir.empty()) v.push_back("output-dir: must be nonempty");
  for (auto n : c.n_ladder)
    if (n == 0) v.push_back("n-ladder: entries must be positive");
  for (double e : c.eps_grid)
    if (!(e > 0.0)) v.push_back("eps-grid: entries must be positive");

  const bool needs_process = c.experiment != ExperimentKind::transform;
  if (needs_process) {
    for (const auto& s : validate_spec(c.process)) v.push_back("process: " + s);
    try {
      const TimeGrid grid = c.grid.build();
      for (const auto& s : validate_spec(c.process, grid))
        if (std::find(v.begin(), v.end(), "process: " + s) == v.end()) v.push_back("grid: " + s);
    } catch (const std::exception& e) {
      v.push_back(std::string("grid: ") + e.what());
    }
  }

  switch (c.experiment) {
    case ExperimentKind::transform:
      try {
        (void)c.cdf.build(c.master_seed);
      } catch (const std::exception& e) {
        v.push_back(std::string("cdf: ") + e.what());
      }
      if (c.replicates < 100) v.push_back("replicates: transform needs at least 100");
      break;
    case ExperimentKind::lcond:
      if (c.variant != "weak" && c.variant != "strong" && c.variant != "modified")
        v.push_back("variant: must be weak, strong or modified");
      if (c.variant == "modified" && c.process.family != Family::discrete_bernoulli)
        v.push_back("variant: modified requires the discrete-bernoulli family");
      if (c.eps_grid.empty()) v.push_back("eps-grid: required");
      if (!(c.alpha > 0.0)) v.push_back("alpha: must be positive");
      break;
    case ExperimentKind::metrics:
      if (c.lags.empty()) v.push_back("lags: required");
      for (auto l : c.lags)
        if (l == 0) v.push_back("lags: entries must be positive");
      if (!(c.alpha > 0.0)) v.push_back("alpha: must be positive");
      if (c.replicates < 1000) v.push_back("replicates: metrics needs at least 1000");
      break;
    case ExperimentKind::cltcheck:
      if (c.n_ladder.empty()) v.push_back("n-ladder: required");
      if (c.replicates < 500) v.push_back("replicates: cltcheck needs at least 500");
      if (c.limit != "auto" && c.limit != "estimated" && c.limit != "phi-bridge")
        v.push_back("limit: must be auto, estimated or phi-bridge");
      if (c.limit == "phi-bridge" && c.process.family != Family::linear_u)
        v.push_back("limit: phi-bridge requires linear-u");
      if (c.limit_paths < 10000) v.push_back("limit-paths: must be at least 10000");
      if (c.levels == 0) v.push_back("levels: must be positive");
      if (!(c.ks_threshold > 0.0)) v.push_back("ks-threshold: must be positive");
      break;
    case ExperimentKind::shatter:
      if (c.n_ladder.empty()) v.push_back("n-ladder: required");
      for (auto n : c.n_ladder)
        if (n > 24) v.push_back("n-ladder: entries must be <= 24");
      if (c.lemma8 && (c.lemma8_n == 0 || c.lemma8_n > 24)) v.push_back("lemma8-n: must lie in [1, 24]");
      if (c.lemma8 && c.lemma8_intervals < 1) v.push_back("lemma8-intervals: must be positive");
      break;
    case ExperimentKind::chain:
      if (c.max_level < 2 || c.max_level > 5) v.push_back("max-level: must lie in [2, 5]");
      if (c.levels == 0) v.push_back("levels: must be positive");
      if (!(c.alpha > 0.0)) v.push_back("alpha: must be positive");
      if (c.L < 0.0) v.push_back("L: chain needs a nonnegative L");
      if (c.replicates < 1000) v.push_back("replicates: chain needs at least 1000");
      break;
    case ExperimentKind::prop2:
      if (c.process.family != Family::discrete_bernoulli)
        v.push_back("process.family: prop2 requires discrete-bernoulli");
      if (c.t_max == 0) v.push_back("t-max: must be positive");
      if (c.r_grid.empty()) v.push_back("r-grid: required");
      for (double r : c.r_grid)
        if (!(r > 0.0)) v.push_back("r-grid: entries must be positive");
      if (c.eps_grid.empty()) v.push_back("eps-grid: required");
      break;
  }
  return v;
}

}  // namespace tdclt
