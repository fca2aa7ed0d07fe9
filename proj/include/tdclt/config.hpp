#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tdclt/cdf.hpp"
#include "tdclt/grid.hpp"
#include "tdclt/process.hpp"

namespace tdclt {

enum class ExperimentKind { transform, lcond, metrics, cltcheck, shatter, chain, prop2 };
std::string_view to_string(ExperimentKind k);
ExperimentKind experiment_from_string(std::string_view name);
const std::vector<ExperimentKind>& all_experiments();

//! Raised for malformed or invalid configs; carries every offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  std::vector<std::string> violations;
};

//! Serializable description of a grid.
struct GridConfig {
  GridKind kind = GridKind::interval_1d;
  double horizon = 1.0;
  //! Exactly one source of points: explicit `points`, `uniform` count, or
  //! `dyadic` depth (interval-1d only).
  std::vector<double> points;            // interval-1d
  std::vector<GridPoint> sheet_points;   // sheet-2d
  std::vector<long> discrete_points;     // discrete-n
  std::size_t uniform = 0;
  int dyadic = -1;
  long first = 1;  // discrete-n with `uniform`

  TimeGrid build() const;
};

//! Law for the transform experiment.
struct CdfConfig {
  std::string kind = "bernoulli";  // bernoulli|point-mass|uniform|normal|atom-uniform|empirical-normal
  double p = 0.3;
  double at = 0.0;
  double lo = 0.0, hi = 1.0;
  double sigma = 1.0;
  //! Weight of the atom at `at` for atom-uniform (rest uniform[lo,hi]).
  double atom_weight = 1.0 / 3.0;
  std::size_t size = 10000;  // empirical-normal sample size

  CdfModel build(std::uint64_t master_seed) const;
  std::string describe() const;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::transform;
  ProcessSpec process;
  GridConfig grid;
  std::size_t replicates = 100000;
  std::vector<std::size_t> n_ladder;
  std::vector<double> eps_grid;
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  int workers = 1;
  std::string output_dir = "out";

  // Experiment-specific parameters.
  CdfConfig cdf;
  std::string variant = "strong";  // lcond: weak|strong|modified
  double alpha = 1.0;
  double L = -1.0;  // < 0: estimate with the strong-L sweep
  std::vector<std::size_t> lags{1, 2, 4, 8};
  std::size_t levels = 64;  // quantile levels per grid point
  std::size_t t_max = 1000000;
  std::vector<double> r_grid{0.5, 1.0, 2.0};
  std::string limit = "auto";  // auto|estimated|phi-bridge
  std::size_t limit_paths = 20000;
  double ks_threshold = 0.08;
  std::size_t max_level = 4;
  bool lemma8 = false;
  int lemma8_intervals = 400;
  std::size_t lemma8_n = 4;
  bool witnesses = false;
};

//! Defaults for a subcommand run without a config file.
ExperimentConfig default_config(ExperimentKind kind);

//! Parses kebab-case JSON; unknown keys are violations. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

//! Empty iff `run` would accept the config.
std::vector<std::string> validate(const ExperimentConfig& c);

}  // namespace tdclt
