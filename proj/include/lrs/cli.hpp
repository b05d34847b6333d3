#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "lrs/baselines.hpp"
#include "lrs/bounds.hpp"
#include "lrs/errors.hpp"
#include "lrs/io.hpp"
#include "lrs/metrics.hpp"
#include "lrs/optimizer.hpp"
#include "lrs/oracles.hpp"
#include "lrs/synth.hpp"

namespace lrs::cli {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

/// Flat run configuration; the JSON config file and CLI flags both map
/// onto this (flags win).
struct RunConfig {
  std::string command;
  std::string input;
  std::string output_dir = ".";
  std::string method = "dnn";
  std::vector<std::uint64_t> seeds;

  // synthetic instance
  int n = 0;
  int k0 = 0;
  double s0 = 0.0;

  // architecture
  int k = 0;  // forced rank; 0 = use k0
  std::vector<int> hidden = {512};
  std::string activation = "tanh";

  // smoothing
  std::string smooth_variant = "huber";
  double smooth_eps = 1e-4;

  // init
  std::string init_scheme = "uniform-fanin";

  // step rule
  std::string step_rule = "armijo";
  double step_h = 1.0;
  double alpha = 0.1;
  double beta = 0.9;
  int max_bisections = 60;

  // stop rule
  long max_iters = 20000;
  double grad_tol = -1.0;  // < 0: default 1e-6 * sqrt(param count)
  int plateau_window = 0;
  double plateau_min_rel_decrease = 0.0;

  bool momentum = false;
  double momentum_coef = 0.9;

  // assumption check: count iterates leaving the ||Theta|| <= D ball
  double d_ball = -1.0;  // < 0: not tracked

  // metrics / shrinkage
  double metrics_eps = 0.01;
  bool shrinkage = false;
  double shrink_threshold = -1.0;  // < 0: 1/sqrt(n)

  // heatmaps
  bool heatmaps = true;
  double heat_lo = -0.2;
  double heat_hi = 0.9;

  // baselines
  double ialm_delta = -1.0;  // < 0: 1/sqrt(n)
  double ialm_mu0 = -1.0;    // < 0: 1.25/||Sigma||_2
  double ialm_rho = 1.5;
  int ialm_max_iters = 200;
  double ialm_tol = 1e-7;
  int fpcp_iters = 10;
  double fpcp_threshold = -1.0;  // < 0: 1/sqrt(n)
  std::string fpcp_schedule = "incremental";

  // bounds command
  double bound_d = 0.0;  // 0: infer from trace
  std::string trace_path;

  // gradcheck
  bool corrupt_gradient = false;

  int workers = 0;  // 0: hardware concurrency

  std::uint64_t single_seed() const {
    if (seeds.empty()) throw ConfigError("this command requires --seed");
    return seeds.front();
  }
};

// ---- strict JSON loading -----------------------------------------------------

namespace detail {

inline void require_keys(const json& j, const std::string& where,
                         const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      std::string valid;
      for (const auto& k : allowed) valid += (valid.empty() ? "" : ", ") + k;
      throw ConfigError("unknown key '" + it.key() + "' in " + where + " (allowed: " + valid +
                        ")");
    }
  }
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace detail

inline void apply_config_json(const json& j, RunConfig& cfg) {
  using detail::require_keys;
  using detail::take;
  require_keys(j, "config root",
               {"schema_version", "command", "input", "output_dir", "method", "seed", "seeds",
                "synth", "arch", "smooth", "init", "step", "stop", "momentum", "metrics",
                "shrinkage", "heatmap", "ialm", "fpcp", "bounds", "workers", "d_ball"});
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != kSchemaVersion)
    throw ConfigError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) +
                      ")");
  take(j, "command", cfg.command);
  take(j, "input", cfg.input);
  take(j, "output_dir", cfg.output_dir);
  take(j, "method", cfg.method);
  if (j.contains("seed")) cfg.seeds = {j.at("seed").get<std::uint64_t>()};
  if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  take(j, "workers", cfg.workers);
  take(j, "d_ball", cfg.d_ball);

  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    require_keys(s, "synth", {"n", "k0", "s0"});
    take(s, "n", cfg.n);
    take(s, "k0", cfg.k0);
    take(s, "s0", cfg.s0);
  }
  if (j.contains("arch")) {
    const auto& a = j.at("arch");
    require_keys(a, "arch", {"k", "hidden", "activation"});
    take(a, "k", cfg.k);
    take(a, "hidden", cfg.hidden);
    take(a, "activation", cfg.activation);
  }
  if (j.contains("smooth")) {
    const auto& s = j.at("smooth");
    require_keys(s, "smooth", {"variant", "epsilon"});
    take(s, "variant", cfg.smooth_variant);
    take(s, "epsilon", cfg.smooth_eps);
  }
  if (j.contains("init")) {
    const auto& s = j.at("init");
    require_keys(s, "init", {"scheme"});
    take(s, "scheme", cfg.init_scheme);
  }
  if (j.contains("step")) {
    const auto& s = j.at("step");
    require_keys(s, "step", {"rule", "h", "alpha", "beta", "max_bisections"});
    take(s, "rule", cfg.step_rule);
    take(s, "h", cfg.step_h);
    take(s, "alpha", cfg.alpha);
    take(s, "beta", cfg.beta);
    take(s, "max_bisections", cfg.max_bisections);
  }
  if (j.contains("stop")) {
    const auto& s = j.at("stop");
    require_keys(s, "stop", {"max_iters", "grad_tol", "plateau"});
    take(s, "max_iters", cfg.max_iters);
    take(s, "grad_tol", cfg.grad_tol);
    if (s.contains("plateau")) {
      const auto& p = s.at("plateau");
      require_keys(p, "stop.plateau", {"window", "min_rel_decrease"});
      take(p, "window", cfg.plateau_window);
      take(p, "min_rel_decrease", cfg.plateau_min_rel_decrease);
    }
  }
  if (j.contains("momentum")) {
    const auto& s = j.at("momentum");
    require_keys(s, "momentum", {"enabled", "coef"});
    take(s, "enabled", cfg.momentum);
    take(s, "coef", cfg.momentum_coef);
  }
  if (j.contains("metrics")) {
    const auto& s = j.at("metrics");
    require_keys(s, "metrics", {"epsilon"});
    take(s, "epsilon", cfg.metrics_eps);
  }
  if (j.contains("shrinkage")) {
    const auto& s = j.at("shrinkage");
    require_keys(s, "shrinkage", {"enabled", "threshold"});
    take(s, "enabled", cfg.shrinkage);
    take(s, "threshold", cfg.shrink_threshold);
  }
  if (j.contains("heatmap")) {
    const auto& s = j.at("heatmap");
    require_keys(s, "heatmap", {"enabled", "lo", "hi"});
    take(s, "enabled", cfg.heatmaps);
    take(s, "lo", cfg.heat_lo);
    take(s, "hi", cfg.heat_hi);
  }
  if (j.contains("ialm")) {
    const auto& s = j.at("ialm");
    require_keys(s, "ialm", {"delta", "mu0", "rho", "max_iters", "tol"});
    take(s, "delta", cfg.ialm_delta);
    take(s, "mu0", cfg.ialm_mu0);
    take(s, "rho", cfg.ialm_rho);
    take(s, "max_iters", cfg.ialm_max_iters);
    take(s, "tol", cfg.ialm_tol);
  }
  if (j.contains("fpcp")) {
    const auto& s = j.at("fpcp");
    require_keys(s, "fpcp", {"iters", "threshold", "schedule"});
    take(s, "iters", cfg.fpcp_iters);
    take(s, "threshold", cfg.fpcp_threshold);
    take(s, "schedule", cfg.fpcp_schedule);
  }
  if (j.contains("bounds")) {
    const auto& s = j.at("bounds");
    require_keys(s, "bounds", {"d_radius", "trace"});
    take(s, "d_radius", cfg.bound_d);
    take(s, "trace", cfg.trace_path);
  }
}

inline void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("config '" + path + "' is not valid JSON: " + e.what());
  }
  apply_config_json(j, cfg);
}

// ---- derived pieces -----------------------------------------------------------

inline Architecture make_arch(const RunConfig& cfg, int n) {
  Architecture arch;
  arch.n = n;
  arch.k = cfg.k > 0 ? cfg.k : cfg.k0;
  if (arch.k <= 0) throw ConfigError("forced rank k is not set (use arch.k or --k)");
  arch.hidden = cfg.hidden;
  arch.activation = parse_activation(cfg.activation);
  arch.validate();
  return arch;
}

inline SmoothAbs make_smooth(const RunConfig& cfg) {
  return SmoothAbs(parse_smooth_kind(cfg.smooth_variant), cfg.smooth_eps);
}

inline GdOptions make_gd_options(const RunConfig& cfg, const Architecture& arch) {
  GdOptions opt;
  if (cfg.step_rule == "armijo")
    opt.step = StepRule::goldstein_armijo(cfg.alpha, cfg.beta, cfg.max_bisections, cfg.step_h);
  else if (cfg.step_rule == "constant")
    opt.step = StepRule::constant(cfg.step_h);
  else if (cfg.step_rule == "inv-sqrt")
    opt.step = StepRule::inv_sqrt(cfg.step_h);
  else
    throw ConfigError("unknown step rule '" + cfg.step_rule +
                      "' (valid: armijo, constant, inv-sqrt)");
  opt.stop.max_iters = cfg.max_iters;
  opt.stop.grad_tol = cfg.grad_tol >= 0.0
                          ? cfg.grad_tol
                          : 1e-6 * std::sqrt(static_cast<double>(arch.param_count()));
  if (cfg.plateau_window > 0)
    opt.stop.plateau = StopRule::Plateau{cfg.plateau_window, cfg.plateau_min_rel_decrease};
  opt.momentum = cfg.momentum;
  opt.momentum_coef = cfg.momentum_coef;
  if (cfg.d_ball > 0.0) opt.d_ball = cfg.d_ball;
  return opt;
}

inline IalmConfig make_ialm_config(const RunConfig& cfg) {
  IalmConfig c;
  if (cfg.ialm_delta > 0.0) c.delta = cfg.ialm_delta;
  if (cfg.ialm_mu0 > 0.0) c.mu0 = cfg.ialm_mu0;
  c.rho = cfg.ialm_rho;
  c.max_iters = cfg.ialm_max_iters;
  c.tol = cfg.ialm_tol;
  return c;
}

inline FpcpConfig make_fpcp_config(const RunConfig& cfg, int fallback_k) {
  FpcpConfig c;
  c.k = cfg.k > 0 ? cfg.k : fallback_k;
  if (cfg.fpcp_threshold >= 0.0) c.shrink_threshold = cfg.fpcp_threshold;
  c.max_iters = cfg.fpcp_iters;
  if (cfg.fpcp_schedule == "fixed")
    c.schedule = FpcpRankSchedule::Fixed;
  else if (cfg.fpcp_schedule != "incremental")
    throw ConfigError("unknown fpcp schedule '" + cfg.fpcp_schedule +
                      "' (valid: incremental, fixed)");
  return c;
}

inline void check_method(const std::string& method) {
  if (method != "dnn" && method != "ialm" && method != "fpcp")
    throw ConfigError("unknown method '" + method + "' (valid: dnn, ialm, fpcp)");
}

inline std::filesystem::path ensure_output_dir(const RunConfig& cfg) {
  std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// ---- one method run on one instance -------------------------------------------

struct MethodRun {
  SymMatrix low_rank;
  SymMatrix sparse;
  EvalReport report;
  double phi_final = -1.0;
  long iters = 0;
  double running_max = -1.0;
  double wall_seconds = 0.0;
  std::optional<OptTrace> trace;
  std::optional<NetParams> params;
  std::optional<DenseMatrix> factor;
};

inline MethodRun run_method(const RunConfig& cfg, const std::string& method,
                            const SymMatrix& sigma, std::uint64_t seed,
                            const SymMatrix* true_l = nullptr, const SymMatrix* true_s = nullptr) {
  check_method(method);
  const auto t0 = std::chrono::steady_clock::now();
  MethodRun out;
  if (method == "dnn") {
    const Architecture arch = make_arch(cfg, sigma.dim());
    auto res = run(sigma, arch, make_smooth(cfg), parse_init_scheme(cfg.init_scheme),
                   make_gd_options(cfg, arch), seed);
    out.low_rank = std::move(res.decomposition.low_rank);
    out.sparse = std::move(res.decomposition.sparse);
    out.factor = std::move(res.decomposition.m);
    out.phi_final = res.trace.final_phi();
    out.iters = res.trace.records.back().iter;
    out.running_max = res.trace.running_max_norm();
    out.trace = std::move(res.trace);
    out.params = std::move(res.params);
  } else if (method == "ialm") {
    auto res = ialm(sigma, make_ialm_config(cfg));
    out.low_rank = std::move(res.low_rank);
    out.sparse = std::move(res.sparse);
    out.iters = res.iters;
  } else {
    auto res = fpcp(sigma, make_fpcp_config(cfg, cfg.k0));
    out.low_rank = std::move(res.low_rank);
    out.sparse = std::move(res.sparse);
    out.iters = res.iters;
  }
  std::optional<double> thr;
  if (cfg.shrink_threshold >= 0.0) thr = cfg.shrink_threshold;
  out.report = evaluate_decomposition(out.low_rank, out.sparse, sigma, true_l, true_s,
                                      cfg.metrics_eps, thr);
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// Table cells use the shrunk sparse part when the method itself shrinks
/// (fpcp) or when shrinkage was requested.
inline bool table_uses_shrunk(const RunConfig& cfg, const std::string& method) {
  return cfg.shrinkage && method == "dnn";
}

// ---- report JSON ----------------------------------------------------------------

inline json report_to_json(const RunConfig& cfg, const std::string& method, const MethodRun& run,
                           std::uint64_t seed) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["method"] = method;
  j["seed"] = seed;
  j["r_L"] = run.report.r_l;
  j["s_S"] = run.report.s_s;
  j["s_S_shrunk"] = run.report.s_s_shrunk;
  j["rel_err_sum"] = run.report.rel_err_sum;
  j["rel_err_sum_shrunk"] = run.report.rel_err_sum_shrunk;
  if (run.report.rel_err_l >= 0.0) j["rel_err_L"] = run.report.rel_err_l;
  if (run.report.rel_err_s >= 0.0) {
    j["rel_err_S"] = run.report.rel_err_s;
    j["rel_err_S_shrunk"] = run.report.rel_err_s_shrunk;
  }
  j["min_eig_L"] = run.report.min_eig_l;
  j["epsilon_threshold"] = run.report.epsilon_threshold;
  j["shrink_threshold"] = run.report.shrink_threshold;
  j["shrinkage_applied"] = cfg.shrinkage;
  j["iters"] = run.iters;
  if (run.phi_final >= 0.0) j["phi_final"] = run.phi_final;
  if (run.running_max >= 0.0) j["running_max_param_norm"] = run.running_max;
  if (cfg.d_ball > 0.0 && run.trace) j["d_ball_violations"] = run.trace->d_ball_violations;
  j["wall_time_seconds"] = run.wall_seconds;  // only field exempt from reproducibility
  return j;
}

// ---- worker pool -----------------------------------------------------------------

template <class F>
void parallel_for(int workers, int jobs, F&& f) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, jobs));
  if (workers == 1) {
    for (int i = 0; i < jobs; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= jobs) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---- commands ---------------------------------------------------------------------

inline int cmd_synth(const RunConfig& cfg) {
  if (cfg.n < 2 || cfg.k0 < 1 || !(cfg.s0 > 0.0 && cfg.s0 < 1.0))
    throw ConfigError("synth requires synth.n >= 2, synth.k0 >= 1, 0 < synth.s0 < 1");
  const auto dir = ensure_output_dir(cfg);
  const SynthInstance inst = gen_instance(cfg.n, cfg.k0, cfg.s0, cfg.single_seed());
  write_matrix_csv((dir / "sigma.csv").string(), inst.sigma);
  write_matrix_csv((dir / "L0.csv").string(), inst.low_rank0);
  write_matrix_csv((dir / "S0.csv").string(), inst.sparse0);
  json manifest;
  manifest["schema_version"] = kSchemaVersion;
  manifest["n"] = cfg.n;
  manifest["k0"] = cfg.k0;
  manifest["s0_target"] = inst.s0_target;
  manifest["s0_achieved"] = inst.s0_achieved;
  manifest["s0_exact_zero"] = inst.s0_exact_zero;
  manifest["seed"] = inst.seed;
  std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
  std::cout << manifest.dump(2) << '\n';
  return 0;
}

inline int cmd_decompose(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ConfigError("decompose requires an input CSV (--input)");
  check_method(cfg.method);
  const auto dir = ensure_output_dir(cfg);
  const LoadedMatrix loaded = read_matrix_csv(cfg.input);
  const std::uint64_t seed = cfg.seeds.empty() ? 0 : cfg.seeds.front();
  MethodRun mr = run_method(cfg, cfg.method, loaded.matrix, seed);

  write_matrix_csv((dir / "L.csv").string(), mr.low_rank);
  write_matrix_csv((dir / "S.csv").string(), mr.sparse);
  const double thr = cfg.shrink_threshold >= 0.0 ? cfg.shrink_threshold
                                                 : default_shrink_threshold(loaded.matrix.dim());
  if (cfg.shrinkage) write_matrix_csv((dir / "S_shrunk.csv").string(), shrink(mr.sparse, thr));
  if (mr.factor) write_matrix_csv((dir / "M.csv").string(), *mr.factor);
  if (mr.trace) write_trace_csv((dir / "trace.csv").string(), *mr.trace);
  if (mr.params)
    save_params((dir / "params.json").string(), make_arch(cfg, loaded.matrix.dim()), *mr.params);
  if (cfg.heatmaps) {
    write_pgm((dir / "sigma.pgm").string(), loaded.matrix, cfg.heat_lo, cfg.heat_hi);
    write_pgm((dir / "L.pgm").string(), mr.low_rank, cfg.heat_lo, cfg.heat_hi);
    write_pgm((dir / "S.pgm").string(), mr.sparse, cfg.heat_lo, cfg.heat_hi);
    if (cfg.shrinkage)
      write_pgm((dir / "S_shrunk.pgm").string(), shrink(mr.sparse, thr), cfg.heat_lo, cfg.heat_hi);
  }
  json rep = report_to_json(cfg, cfg.method, mr, seed);
  rep["input"] = cfg.input;
  rep["load_report"] = {{"dim", loaded.dim}, {"max_asymmetry", loaded.max_asymmetry}};
  std::ofstream(dir / "report.json") << rep.dump(2) << '\n';
  std::cout << rep.dump(2) << '\n';
  return 0;
}

struct SweepCell {
  double mean = 0.0;
  double stddev = 0.0;
};

inline SweepCell sweep_cell(const std::vector<double>& xs) {
  SweepCell c;
  for (double x : xs) c.mean += x;
  c.mean /= static_cast<double>(xs.size());
  for (double x : xs) c.stddev += (x - c.mean) * (x - c.mean);
  c.stddev = std::sqrt(c.stddev / static_cast<double>(xs.size()));
  return c;
}

inline std::string format_cell(const SweepCell& c) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f (%.2f)", c.mean, c.stddev);
  return buf;
}

/// Runs `methods` over all seeds on freshly generated instances and emits
/// one table row per method with mean (std) cells, Table-style.
inline json sweep_table(const RunConfig& cfg, const std::vector<std::string>& methods) {
  if (cfg.n < 2 || cfg.k0 < 1 || !(cfg.s0 > 0.0 && cfg.s0 < 1.0))
    throw ConfigError("benchmark sweeps require synth.n, synth.k0 and synth.s0");
  if (cfg.seeds.empty()) throw ConfigError("benchmark sweeps require --seed or --seeds");
  for (const auto& m : methods) check_method(m);

  const int per_method = static_cast<int>(cfg.seeds.size());
  const int jobs = per_method * static_cast<int>(methods.size());
  std::vector<json> cells(jobs);
  parallel_for(cfg.workers, jobs, [&](int job) {
    const int mi = job / per_method;
    const int si = job % per_method;
    const std::uint64_t seed = cfg.seeds[si];
    const SynthInstance inst = gen_instance(cfg.n, cfg.k0, cfg.s0, seed);
    const MethodRun mr =
        run_method(cfg, methods[mi], inst.sigma, seed, &inst.low_rank0, &inst.sparse0);
    json row = report_to_json(cfg, methods[mi], mr, seed);
    const bool shrunk = table_uses_shrunk(cfg, methods[mi]);
    row["table_s_S"] = shrunk ? mr.report.s_s_shrunk : mr.report.s_s;
    row["table_rel_err_S"] = shrunk ? mr.report.rel_err_s_shrunk : mr.report.rel_err_s;
    cells[job] = std::move(row);
  });

  json out;
  out["schema_version"] = kSchemaVersion;
  out["config"] = {{"n", cfg.n}, {"k0", cfg.k0}, {"k", cfg.k > 0 ? cfg.k : cfg.k0},
                   {"s0", cfg.s0}, {"seeds", cfg.seeds}};
  out["runs"] = json::array();
  out["rows"] = json::array();
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    std::vector<double> r, s, es, el;
    for (int si = 0; si < per_method; ++si) {
      const json& c = cells[mi * per_method + si];
      out["runs"].push_back(c);
      r.push_back(c.at("r_L").get<double>());
      s.push_back(c.at("table_s_S").get<double>());
      es.push_back(c.at("table_rel_err_S").get<double>());
      el.push_back(c.at("rel_err_L").get<double>());
    }
    json row;
    row["algorithm"] = methods[mi];
    row["r(L)"] = {{"mean", sweep_cell(r).mean}, {"std", sweep_cell(r).stddev}};
    row["s(S)"] = {{"mean", sweep_cell(s).mean}, {"std", sweep_cell(s).stddev}};
    row["rel.error(S)"] = {{"mean", sweep_cell(es).mean}, {"std", sweep_cell(es).stddev}};
    row["rel.error(L)"] = {{"mean", sweep_cell(el).mean}, {"std", sweep_cell(el).stddev}};
    out["rows"].push_back(row);
  }
  return out;
}

inline void write_table_csv(const std::string& path, const RunConfig& cfg, const json& table) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "n,k0,k,s0,algorithm,r(L),s(S),rel.error(S),rel.error(L)\n";
  for (const auto& row : table.at("rows")) {
    out << cfg.n << ',' << cfg.k0 << ',' << (cfg.k > 0 ? cfg.k : cfg.k0) << ',' << cfg.s0 << ','
        << row.at("algorithm").get<std::string>();
    for (const char* col : {"r(L)", "s(S)", "rel.error(S)", "rel.error(L)"}) {
      const auto& cell = row.at(col);
      out << ",\"" << format_cell({cell.at("mean").get<double>(), cell.at("std").get<double>()})
          << '"';
    }
    out << '\n';
  }
}

inline int cmd_bench(const RunConfig& cfg) {
  check_method(cfg.method);
  const auto dir = ensure_output_dir(cfg);
  const json table = sweep_table(cfg, {cfg.method});
  std::ofstream(dir / "bench.json") << table.dump(2) << '\n';
  write_table_csv((dir / "bench.csv").string(), cfg, table);
  std::cout << table.at("rows").dump(2) << '\n';
  return 0;
}

inline int cmd_compare(const RunConfig& cfg) {
  const auto dir = ensure_output_dir(cfg);
  const json table = sweep_table(cfg, {"dnn", "ialm", "fpcp"});
  std::ofstream(dir / "compare.json") << table.dump(2) << '\n';
  write_table_csv((dir / "compare.csv").string(), cfg, table);
  std::cout << table.at("rows").dump(2) << '\n';
  return 0;
}

inline int cmd_bounds(const RunConfig& cfg) {
  if (cfg.input.empty())
    throw ConfigError("bounds requires a Sigma CSV (--input) for ||Sigma||_S");
  const LoadedMatrix loaded = read_matrix_csv(cfg.input);
  const Architecture arch = make_arch(cfg, loaded.matrix.dim());
  double d_radius = cfg.bound_d;
  if (d_radius <= 0.0) {
    if (cfg.trace_path.empty())
      throw ConfigError("bounds needs either bounds.d_radius or a trace file to infer D");
    const OptTrace trace = read_trace_csv(cfg.trace_path);
    d_radius = 1.05 * trace.records.back().running_max_param_norm;
  }
  const SmoothnessInputs in =
      SmoothnessInputs::from(arch, make_smooth(cfg), loaded.matrix, d_radius);
  const SmoothnessReport rep = smoothness_report(in);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["inputs"] = {{"n", in.n},           {"k", in.k},
                 {"hidden", in.hidden}, {"D", in.d_radius},
                 {"sigma_s_norm", in.sigma_s_norm}, {"sigma_prime_max", in.sigma_prime},
                 {"sigma_second_max", in.sigma_second}, {"mu_second_max", in.mu_second}};
  j["lipschitz"] = {{"multi", rep.lip_multi}};
  if (rep.single_layer_forms) {
    j["lipschitz"]["b"] = rep.lip_b;
    j["lipschitz"]["d"] = rep.lip_d;
    j["lipschitz"]["single"] = rep.lip_single;
  }
  j["order_forms"] = {{"multi", rep.order_multi}};
  if (rep.single_layer_forms) {
    j["order_forms"]["b"] = rep.order_b;
    j["order_forms"]["d"] = rep.order_d;
  }
  j["order_forms"]["note"] = "constant-1 order forms, for scaling studies only (not sound bounds)";
  std::cout << j.dump(2) << '\n';
  if (!cfg.output_dir.empty() && cfg.output_dir != ".") {
    const auto dir = ensure_output_dir(cfg);
    std::ofstream(dir / "bounds.json") << j.dump(2) << '\n';
  }
  return 0;
}

inline int cmd_gradcheck(const RunConfig& cfg) {
  const std::uint64_t seed = cfg.seeds.empty() ? 12345 : cfg.seeds.front();
  const GradCheckReport fd = gradcheck_fd(seed, 1e-5, 1e-6, 2, cfg.corrupt_gradient);
  const GradCheckReport lemma = gradcheck_lemma(seed + 1, 20, 1e-12, cfg.corrupt_gradient);
  const GradCheckReport sandwich = gradcheck_sandwich(seed + 2);
  bool all = true;
  auto print = [&](const char* name, const GradCheckReport& rep) {
    for (const auto& c : rep.cases)
      std::cout << (c.pass ? "[pass] " : "[FAIL] ") << name << ": " << c.label
                << "  err=" << format_double(c.error) << " tol=" << format_double(c.tolerance)
                << '\n';
    all = all && rep.all_pass;
  };
  print("fd", fd);
  print("lemma", lemma);
  print("sandwich", sandwich);
  std::cout << (all ? "gradcheck: ALL PASS" : "gradcheck: FAILURES") << '\n';
  return all ? 0 : 4;
}

}  // namespace lrs::cli
