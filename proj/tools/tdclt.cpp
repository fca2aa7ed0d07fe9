#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tdclt/config.hpp"
#include "tdclt/experiment.hpp"
#include "tdclt/linalg.hpp"

namespace {

using nlohmann::json;

int fail(const json& record, int code) {
  std::cerr << record.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical-process CLT laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tdclt::tool_version()));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out_dir;
  bool check_only = false;

  for (auto kind : tdclt::all_experiments()) {
    const std::string name(tdclt::to_string(kind));
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", config_path, "JSON config (kebab-case keys)")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("--workers", workers, "worker threads (overrides the config)");
    sub->add_option("--out", out_dir, "output directory (overrides TDCLT_OUT and the config)");
    sub->add_flag("--validate", check_only, "validate the config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    const auto kind = tdclt::experiment_from_string(sub);
    tdclt::ExperimentConfig cfg =
        config_path.empty() ? tdclt::default_config(kind) : tdclt::load_config(config_path);
    if (cfg.experiment != kind) {
      return fail({{"error", "config"},
                   {"violations", {"experiment: config names '" + std::string(tdclt::to_string(cfg.experiment)) +
                                   "' but the subcommand is '" + sub + "'"}}},
                  2);
    }
    if (const char* env = std::getenv("TDCLT_OUT"); env && *env) cfg.output_dir = env;
    if (out_dir) cfg.output_dir = *out_dir;
    if (seed) cfg.master_seed = *seed;
    if (workers) cfg.workers = *workers;

    const auto violations = tdclt::validate(cfg);
    if (!violations.empty()) return fail({{"error", "config"}, {"violations", violations}}, 2);
    if (check_only) {
      std::cout << json{{"valid", true}, {"config", tdclt::to_json(cfg)}}.dump(1) << "\n";
      return 0;
    }
    const auto man = tdclt::run(cfg);
    json summary{{"output-dir", cfg.output_dir},
                 {"config-hash", man.config_hash},
                 {"wall-seconds", man.wall_seconds},
                 {"checksums", man.checksums}};
    std::cout << summary.dump(1) << "\n";
    return 0;
  } catch (const tdclt::ConfigError& e) {
    return fail({{"error", "config"}, {"violations", e.violations}}, 2);
  } catch (const tdclt::FactorizationError& e) {
    return fail({{"error", "factorization"},
                 {"message", e.what()},
                 {"spectrum",
                  {{"min-eigenvalue", e.min_eigenvalue},
                   {"max-eigenvalue", e.max_eigenvalue},
                   {"tolerance", e.tolerance}}}},
                3);
  } catch (const std::exception& e) {
    return fail({{"error", "runtime"}, {"message", e.what()}}, 1);
  }
}
