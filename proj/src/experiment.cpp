#include "tdclt/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "tdclt/chaining.hpp"
#include "tdclt/empirical_clt.hpp"
#include "tdclt/lcondition.hpp"
#include "tdclt/metrics.hpp"
#include "tdclt/shattering.hpp"
#include "tdclt/transform.hpp"

#ifndef TDCLT_VERSION
#define TDCLT_VERSION "0.0.0"
#endif

namespace tdclt {

using nlohmann::json;

std::string_view tool_version() { return TDCLT_VERSION; }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) {
  for (const auto& h : header) cell(h);
  end_row();
}

CsvWriter& CsvWriter::cell(std::string_view s) {
  if (!fresh_) buf_ += ',';
  buf_ += s;
  fresh_ = false;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_double(v))); }
CsvWriter& CsvWriter::cell(std::size_t v) { return cell(std::string_view(std::to_string(v))); }
CsvWriter& CsvWriter::cell(int v) { return cell(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
  buf_ += '\n';
  fresh_ = true;
}

std::string config_hash(const ExperimentConfig& config) {
  json j = to_json(config);
  j.erase("workers");
  j.erase("output-dir");
  return hex64(fnv1a64(j.dump()));
}

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }

std::string pair_label(std::string_view check, std::size_t s, std::size_t t) {
  return std::string(check) + "(" + std::to_string(s) + ";" + std::to_string(t) + ")";
}

OutputSet run_transform(const ExperimentConfig& c, const Exec& exec) {
  const CdfModel f = c.cdf.build(c.master_seed);
  const double ks = uniformity_check(f, quantile_sampler(f), c.replicates, c.master_seed, exec);
  CsvWriter w({"cdf", "n", "ks"});
  w.cell(c.cdf.describe()).cell(c.replicates).cell(ks).end_row();
  return {{"transform.csv", w.str()}};
}

void lcond_rows(CsvWriter& w, const LConditionReport& rep) {
  for (const auto& r : rep.rows) {
    w.cell(to_string(r.variant)).cell(r.t).cell(r.eps).cell(r.prob.value).cell(r.prob.se)
        .cell(r.ratio).cell(r.ball_trivial ? "trivial-ball" : "").end_row();
  }
}

OutputSet run_lcond(const ExperimentConfig& c, const Exec& exec) {
  LConditionReport rep;
  if (c.variant == "modified") {
    rep = exact_modified_l(c.process.pt, c.process.h_variance, c.t_max, c.eps_grid);
  } else {
    const TimeGrid grid = c.grid.build();
    rep = c.variant == "weak"
              ? estimate_weak_l(c.process, grid, c.eps_grid, c.replicates, c.master_seed, c.alpha, exec)
              : estimate_strong_l(c.process, grid, c.eps_grid, c.replicates, c.master_seed, c.alpha, exec);
  }
  CsvWriter w({"variant", "t", "eps", "prob", "stderr", "prob-over-eps2", "flags"});
  lcond_rows(w, rep);
  CsvWriter s({"variant", "l-hat"});
  s.cell(to_string(rep.variant)).cell(rep.l_hat).end_row();
  return {{"lcond.csv", w.str()}, {"lcond_summary.csv", s.str()}};
}

OutputSet run_metrics(const ExperimentConfig& c, const Exec& exec) {
  const TimeGrid grid = c.grid.build();
  const PathSampler sampler(c.process, grid);
  const PathBatch paths = sampler.batch(c.master_seed, 0, c.replicates, exec);
  double L = c.L;
  if (L < 0.0) {
    const std::uint64_t aux = random_word({c.master_seed, 0}, Substream::aux, 1, 0);
    L = estimate_strong_l(paths, c.process, grid, c.eps_grid, c.alpha, aux).l_hat;
  }
  CsvWriter w({"pair", "estimate", "stderr", "bound", "flag"});
  auto flag = [](double est, double se, double bound) {
    return est - kFlagSe * se > bound ? "violated" : "ok";
  };
  const std::size_t m = grid.size();
  for (auto lag : c.lags) {
    if (lag >= m) continue;
    std::vector<std::size_t> starts{0};
    if (m - 1 - lag != 0) starts.push_back(m - 1 - lag);
    for (auto s : starts) {
      const std::size_t t = s + lag;
      const CdfModel fs = analytic_cdf(c.process, grid[s]);
      const CdfModel ft = analytic_cdf(c.process, grid[t]);
      const auto xg = quantile_x_grid(fs, ft, 256);
      const auto rep = check_lemma1(paths, c.process, grid, s, t, xg, L, c.alpha);
      w.cell(pair_label("p-st", s, t)).cell(rep.p_st.value).cell(rep.p_st.se).cell(rep.bound_single)
          .cell(flag(rep.p_st.value, rep.p_st.se, rep.bound_single)).end_row();
      w.cell(pair_label("p-ts", s, t)).cell(rep.p_ts.value).cell(rep.p_ts.se).cell(rep.bound_single)
          .cell(flag(rep.p_ts.value, rep.p_ts.se, rep.bound_single)).end_row();
      w.cell(pair_label("l1", s, t)).cell(rep.l1.value).cell(rep.l1.se).cell(rep.bound_double)
          .cell(flag(rep.l1.value, rep.l1.se, rep.bound_double)).end_row();
      w.cell(pair_label("sup-diff", s, t)).cell(rep.sup_diff.value).cell(rep.sup_diff.se)
          .cell(rep.bound_single).cell(flag(rep.sup_diff.value, rep.sup_diff.se, rep.bound_single)).end_row();
      const double y = ft.quantile(0.5);
      const double x = fs.quantile(0.5);
      const auto tp = check_tau_pair(paths, c.process, grid, {s, x}, {t, y}, L, c.alpha);
      w.cell(pair_label("tau-sq", s, t)).cell(tp.tau_sq.value).cell(tp.tau_sq.se).cell(tp.lemma2_bound)
          .cell(tp.lemma2_excess > 0 ? "violated" : "ok").end_row();
      w.cell(pair_label("f-gap", s, t)).cell(tp.lemma3_lhs).cell(0.0).cell(tp.lemma3_bound)
          .cell(tp.lemma3_excess > 0 ? "violated" : "ok").end_row();
    }
  }
  CsvWriter s({"L"});
  s.cell(L).end_row();
  return {{"metrics.csv", w.str()}, {"metrics_summary.csv", s.str()}};
}

OutputSet run_cltcheck(const ExperimentConfig& c, const Exec& exec) {
  const TimeGrid grid = c.grid.build();
  const PathSampler sampler(c.process, grid);
  const auto index = quantile_index(c.process, grid, c.levels);
  CltOptions opt;
  opt.limit = c.limit == "estimated"    ? LimitKind::estimated
              : c.limit == "phi-bridge" ? LimitKind::phi_bridge
                                        : LimitKind::automatic;
  opt.limit_paths = c.limit_paths;
  opt.ks_threshold = c.ks_threshold;
  const auto rep = clt_diagnostic(sampler, index, c.n_ladder, c.replicates, c.master_seed, opt, exec);
  CsvWriter w({"n", "ks", "stderr", "verdict"});
  for (const auto& r : rep.rows) w.cell(r.n).cell(r.ks).cell(r.se).cell(r.verdict).end_row();
  CsvWriter t({"trend", "index-size"});
  t.cell(rep.trend).cell(index.size()).end_row();
  CsvWriter sups({"source", "n", "rep", "value"});
  for (std::size_t r = 0; r < rep.limit.values.size(); ++r)
    sups.cell("gaussian-limit").cell(std::size_t{0}).cell(r).cell(rep.limit.values[r]).end_row();
  for (const auto& e : rep.empirical)
    for (std::size_t r = 0; r < e.values.size(); ++r)
      sups.cell("empirical").cell(e.n).cell(r).cell(e.values[r]).end_row();
  return {{"clt.csv", w.str()}, {"clt_trend.csv", t.str()}, {"clt_sups.csv", sups.str()}};
}

OutputSet run_shatter(const ExperimentConfig& c, const Exec& exec) {
  const TimeGrid grid = c.grid.build();
  const auto rep = delta_growth_diagnostic(c.process, grid, c.n_ladder, c.trials, c.master_seed, exec);
  CsvWriter w({"trial", "n", "count", "ln-count-over-sqrt-n"});
  for (std::size_t k = 0; k < c.trials; ++k)
    for (const auto& row : rep.rows) {
      const double count = static_cast<double>(row.counts[k]);
      w.cell(k).cell(row.n).cell(row.counts[k])
          .cell(std::log(count) / std::sqrt(static_cast<double>(row.n))).end_row();
    }
  CsvWriter s({"n", "mean-ratio", "q10", "q50", "q90", "above-linear", "trend"});
  for (const auto& row : rep.rows)
    s.cell(row.n).cell(row.mean_ratio).cell(row.q10).cell(row.q50).cell(row.q90)
        .cell(row.above_linear).cell(rep.trend).end_row();
  OutputSet out{{"shatter.csv", w.str()}, {"shatter_summary.csv", s.str()}};

  if (c.lemma8) {
    CsvWriter l({"trial", "n", "count", "witnessed", "valid"});
    json wit = json::array();
    std::vector<std::optional<Lemma8Result>> results(c.trials);
    std::vector<std::size_t> counts(c.trials);
    parallel_for(c.trials, exec, [&](std::size_t k) {
      const std::uint64_t seed = random_word({c.master_seed, k}, Substream::branch, 1, 0);
      results[k] = lemma8_construct(c.lemma8_n, c.lemma8_intervals, seed);
      counts[k] = shatter_count(results[k]->paths).size();
    });
    for (std::size_t k = 0; k < c.trials; ++k) {
      const auto& r = *results[k];
      l.cell(k).cell(c.lemma8_n).cell(counts[k]).cell(r.witnesses.size())
          .cell(yes_no(validate_witnesses(r))).end_row();
      if (c.witnesses) {
        json list = json::array();
        for (const auto& x : r.witnesses)
          list.push_back({{"mask", x.mask}, {"t", format_double(x.t)}, {"y", format_double(x.y)},
                          {"interval", x.interval}});
        wit.push_back({{"trial", k}, {"witnesses", list}});
      }
    }
    out["lemma8.csv"] = l.str();
    if (c.witnesses) out["witnesses.json"] = wit.dump(1) + "\n";
  }
  return out;
}

OutputSet run_chain(const ExperimentConfig& c, const Exec& exec) {
  const TimeGrid grid = c.grid.build();
  const PseudoMetricTable rho = rho_table(c.process, c.alpha, grid);
  const PartitionSequence seq = greedy_admissible(rho);

  json tree;
  tree["metric"] = "rho";
  tree["points"] = grid.size();
  json levels = json::array();
  for (std::size_t n = 0; n < seq.levels.size(); ++n)
    levels.push_back({{"level", n}, {"card", seq.cards[n]}, {"cells", seq.levels[n].cells()}});
  tree["levels"] = levels;

  CsvWriter w({"level", "card", "max-diameter", "gamma-tail"});
  for (std::size_t n = 0; n < seq.levels.size(); ++n) {
    double diam = 0.0;
    for (const auto& cell : seq.levels[n].cells()) diam = std::max(diam, rho.diameter(cell));
    w.cell(n).cell(seq.cards[n]).cell(diam).cell(gamma_sum_tail(seq, rho, n)).end_row();
  }

  const PathSampler sampler(c.process, grid);
  const PathBatch paths = sampler.batch(c.master_seed, 0, c.replicates, exec);
  const auto comp = compose_admissible(c.process, grid, paths, c.L, c.alpha, c.levels, c.max_level);
  CsvWriter k({"r", "card", "rho-tail", "tau-tail", "geometric-tail"});
  for (std::size_t r = 0; r < comp.tau_tail.size(); ++r)
    k.cell(r).cell(comp.index_sequence.cards[r]).cell(comp.rho_tail[r]).cell(comp.tau_tail[r])
        .cell(comp.geometric_tail[r]).end_row();
  CsvWriter f({"fitted-c", "index-size"});
  f.cell(comp.fitted_c).cell(comp.index.size()).end_row();
  return {{"chain.json", tree.dump(1) + "\n"},
          {"chain.csv", w.str()},
          {"chain_composition.csv", k.str()},
          {"chain_summary.csv", f.str()}};
}

OutputSet run_prop2(const ExperimentConfig& c, const Exec&) {
  const auto rep = proposition2_criteria(c.process.pt, c.t_max, c.r_grid);
  const auto mod = exact_modified_l(c.process.pt, c.process.h_variance, c.t_max, c.eps_grid);
  double max_prob = 0.0;
  for (const auto& r : mod.rows) max_prob = std::max(max_prob, r.prob.value);
  CsvWriter w({"pt", "pregaussian", "clt", "modified-l-max"});
  w.cell(to_string(c.process.pt)).cell(yes_no(rep.pregaussian)).cell(yes_no(rep.clt))
      .cell(max_prob).end_row();
  CsvWriter s({"r", "summable", "partial-sum"});
  for (std::size_t i = 0; i < rep.r_grid.size(); ++i)
    s.cell(rep.r_grid[i]).cell(yes_no(rep.summable[i])).cell(rep.partial_sums[i]).end_row();
  CsvWriter m({"eps", "t", "prob"});
  for (const auto& r : mod.rows) m.cell(r.eps).cell(r.t).cell(r.prob.value).end_row();
  return {{"prop2.csv", w.str()}, {"prop2_sums.csv", s.str()}, {"prop2_modified.csv", m.str()}};
}

}  // namespace

OutputSet compute_outputs(const ExperimentConfig& c) {
  const auto violations = validate(c);
  if (!violations.empty()) throw ConfigError(violations);
  const Exec exec{c.workers};
  switch (c.experiment) {
    case ExperimentKind::transform: return run_transform(c, exec);
    case ExperimentKind::lcond: return run_lcond(c, exec);
    case ExperimentKind::metrics: return run_metrics(c, exec);
    case ExperimentKind::cltcheck: return run_cltcheck(c, exec);
    case ExperimentKind::shatter: return run_shatter(c, exec);
    case ExperimentKind::chain: return run_chain(c, exec);
    case ExperimentKind::prop2: return run_prop2(c, exec);
  }
  throw std::logic_error("unreachable experiment kind");
}

RunManifest run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const OutputSet outputs = compute_outputs(config);
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  RunManifest man;
  man.config_hash = config_hash(config);
  man.tool_version = std::string(tool_version());
  for (const auto& [name, bytes] : outputs) {
    std::ofstream out(dir / name, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    man.checksums[name] = hex64(fnv1a64(bytes));
  }
  man.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json j;
  j["config-hash"] = man.config_hash;
  j["tool-version"] = man.tool_version;
  j["wall-seconds"] = man.wall_seconds;
  j["checksums"] = man.checksums;
  j["config"] = to_json(config);
  std::ofstream out(dir / "manifest.json");
  out << j.dump(1) << "\n";
  if (!out) throw std::runtime_error("cannot write manifest");
  return man;
}

}  // namespace tdclt
