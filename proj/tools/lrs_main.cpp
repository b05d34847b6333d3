// Command-line front end: decompose user matrices, generate synthetic
// benchmarks, run method comparisons, print smoothness-bound certificates,
// and run the gradient-check suites.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrs/cli.hpp"

namespace {

// Exit codes: 0 success, 2 input/config error, 3 numerical error,
// 4 acceptance-check failure.
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

void add_common_flags(CLI::App* cmd, lrs::cli::RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config file (flags override its fields)");
  cmd->add_option("--output", cfg.output_dir, "output directory");
  cmd->add_option("--workers", cfg.workers, "worker pool size for sweeps");
}

void add_model_flags(CLI::App* cmd, lrs::cli::RunConfig& cfg) {
  cmd->add_option("--method", cfg.method, "dnn | ialm | fpcp");
  cmd->add_option("--k", cfg.k, "forced rank of L");
  cmd->add_option("--hidden", cfg.hidden, "hidden layer widths");
  cmd->add_option("--activation", cfg.activation, "tanh | scaled-arctan | logistic-rescaled");
  cmd->add_option("--mu", cfg.smooth_variant, "smoothing variant: huber | logcosh");
  cmd->add_option("--mu-eps", cfg.smooth_eps, "smoothing epsilon");
  cmd->add_option("--init", cfg.init_scheme, "init scheme: uniform-fanin | zeros");
  cmd->add_option("--step-rule", cfg.step_rule, "armijo | constant | inv-sqrt");
  cmd->add_option("--step", cfg.step_h, "constant step / inv-sqrt numerator / armijo trial");
  cmd->add_option("--alpha", cfg.alpha, "armijo lower constant");
  cmd->add_option("--beta", cfg.beta, "armijo upper constant");
  cmd->add_option("--iters", cfg.max_iters, "iteration cap");
  cmd->add_option("--grad-tol", cfg.grad_tol, "gradient-norm stop tolerance");
  cmd->add_flag("--momentum", cfg.momentum,
                "first-moment variant (outside the convergence certificate)");
  cmd->add_flag("--shrinkage", cfg.shrinkage, "apply shrinkage to the reported S");
  cmd->add_option("--shrink-threshold", cfg.shrink_threshold, "shrinkage threshold");
  cmd->add_option("--metrics-eps", cfg.metrics_eps, "rank/sparsity threshold");
  cmd->add_option("--d-ball", cfg.d_ball,
                  "record iterates leaving the ||Theta|| <= D ball (never projected)");
}

void add_synth_flags(CLI::App* cmd, lrs::cli::RunConfig& cfg) {
  cmd->add_option("--n", cfg.n, "matrix dimension");
  cmd->add_option("--k0", cfg.k0, "true rank of L0");
  cmd->add_option("--s0", cfg.s0, "target sparsity of S0");
}

std::string pre_scan_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  lrs::cli::RunConfig cfg;
  std::string config_path;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;

  // Seeds discipline: synth/bench/compare refuse to run without one.
  try {
    const std::string pre = pre_scan_config(argc, argv);
    if (!pre.empty()) lrs::cli::load_config_file(pre, cfg);
  } catch (const lrs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitInput;
  } catch (const lrs::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  }

  CLI::App app{"low-rank plus sparse decomposition of symmetric matrices"};
  app.require_subcommand(1);

  auto* decompose = app.add_subcommand("decompose", "decompose a CSV matrix into L + S");
  decompose->add_option("--input", cfg.input, "square matrix CSV");
  decompose->add_option("--seed", seed_flag, "initialization seed")
      ->each([&](const std::string&) { seed_given = true; });
  decompose->add_flag(
      "--no-heatmaps", [&cfg](std::int64_t) { cfg.heatmaps = false; }, "skip PGM heatmaps");
  decompose->add_option("--heat-lo", cfg.heat_lo, "heatmap clip low");
  decompose->add_option("--heat-hi", cfg.heat_hi, "heatmap clip high");
  add_common_flags(decompose, cfg, config_path);
  add_model_flags(decompose, cfg);

  auto* synth = app.add_subcommand("synth", "generate a synthetic Sigma = L0 + S0 instance");
  synth->add_option("--seed", seed_flag, "generator seed")->each([&](const std::string&) {
    seed_given = true;
  });
  add_synth_flags(synth, cfg);
  add_common_flags(synth, cfg, config_path);

  auto* bench = app.add_subcommand("bench", "run one method over synthetic seeds");
  bench->add_option("--seeds", cfg.seeds, "explicit seed list");
  add_synth_flags(bench, cfg);
  add_common_flags(bench, cfg, config_path);
  add_model_flags(bench, cfg);

  auto* compare = app.add_subcommand("compare", "dnn vs ialm vs fpcp table over seeds");
  compare->add_option("--seeds", cfg.seeds, "explicit seed list");
  add_synth_flags(compare, cfg);
  add_common_flags(compare, cfg, config_path);
  add_model_flags(compare, cfg);

  auto* bounds = app.add_subcommand("bounds", "smoothness-bound report as JSON");
  bounds->add_option("--input", cfg.input, "Sigma CSV (for ||Sigma||_S)");
  bounds->add_option("--D", cfg.bound_d, "parameter-ball radius");
  bounds->add_option("--trace", cfg.trace_path, "trace CSV to infer D = 1.05 x running max");
  add_common_flags(bounds, cfg, config_path);
  add_model_flags(bounds, cfg);

  auto* gradcheck = app.add_subcommand("gradcheck", "run the gradient verification suites");
  gradcheck->add_option("--seed", seed_flag, "suite seed")->each([&](const std::string&) {
    seed_given = true;
  });
  gradcheck->add_flag("--self-test-corrupt", cfg.corrupt_gradient,
                      "negative control: corrupt gradients so the suites must fail");
  add_common_flags(gradcheck, cfg, config_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (seed_given) cfg.seeds = {seed_flag};
    const std::string sub = app.get_subcommands().front()->get_name();
    if ((sub == "synth" || sub == "bench" || sub == "compare") && cfg.seeds.empty())
      throw lrs::ConfigError(sub + " requires an explicit --seed/--seeds (reproducibility)");
    if (sub == "decompose") return lrs::cli::cmd_decompose(cfg);
    if (sub == "synth") return lrs::cli::cmd_synth(cfg);
    if (sub == "bench") return lrs::cli::cmd_bench(cfg);
    if (sub == "compare") return lrs::cli::cmd_compare(cfg);
    if (sub == "bounds") return lrs::cli::cmd_bounds(cfg);
    if (sub == "gradcheck") return lrs::cli::cmd_gradcheck(cfg);
    std::cerr << "unknown subcommand\n";
    return kExitInput;
  } catch (const lrs::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitInput;
  } catch (const lrs::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const lrs::DimensionError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const lrs::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
