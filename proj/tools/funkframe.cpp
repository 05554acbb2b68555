// Command-line driver: precompute / forward / reconstruct / experiment /
// selftest / export.  Configuration comes from an optional flat config file
// (`--config PATH`, `key = value` lines) with per-field flag overrides.
// Exit codes: 0 success, 1 validation or I/O error, 2 numerical failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "funkframe/experiment.hpp"

namespace {

using funkframe::ExperimentConfig;

struct Overrides {
  std::string config_path;
  std::optional<int> N, l_max, n_theta, n_lambda, m_circle;
  std::optional<std::string> design, phantom, filter, output_dir, table, data;
  std::optional<double> noise_level, alpha, pinv_threshold;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> alphas;
};

void add_common_options(CLI::App* sub, Overrides& ov) {
  sub->add_option("--config", ov.config_path, "flat key = value configuration file");
  sub->add_option("--N", ov.N, "frame truncation parameter");
  sub->add_option("--l-max", ov.l_max, "spherical harmonic degree cutoff");
  sub->add_option("--n-theta", ov.n_theta, "colatitude rule size of the product grid");
  sub->add_option("--n-lambda", ov.n_lambda, "azimuth count of the product grid");
  sub->add_option("--design", ov.design, "point-set file replacing the product grid");
  sub->add_option("--m-circle", ov.m_circle, "points per great circle in the forward rule");
  sub->add_option("--phantom", ov.phantom,
                  "phantom file; 'none' disables the ground truth");
  sub->add_option("--noise-level", ov.noise_level, "relative noise level, e.g. 0.2");
  sub->add_option("--seed", ov.seed, "noise seed");
  sub->add_option("--filter", ov.filter, "'exact' or 'tikhonov'");
  sub->add_option("--alpha", ov.alpha, "regularization parameter");
  sub->add_option("--alphas", ov.alphas, "comma-separated sweep, e.g. 0,0.02,0.05");
  sub->add_option("--pinv-threshold", ov.pinv_threshold,
                  "relative spectral cutoff of the pseudo-inverse");
  sub->add_option("--output-dir", ov.output_dir, "directory for outputs and reports");
  sub->add_option("--table", ov.table, "frame table file (.frfd)");
  sub->add_option("--data", ov.data, "data CSV for reconstruction");
}

ExperimentConfig resolve(const Overrides& ov) {
  ExperimentConfig cfg;
  if (!ov.config_path.empty()) funkframe::load_config_file(cfg, ov.config_path);
  if (ov.N) cfg.N = *ov.N;
  if (ov.l_max) cfg.l_max = *ov.l_max;
  if (ov.n_theta) cfg.n_theta = *ov.n_theta;
  if (ov.n_lambda) cfg.n_lambda = *ov.n_lambda;
  if (ov.design) cfg.design_path = *ov.design;
  if (ov.m_circle) cfg.m_circle = *ov.m_circle;
  if (ov.phantom) cfg.phantom_path = *ov.phantom;
  if (ov.noise_level) cfg.noise_level = *ov.noise_level;
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.filter) cfg.filter = *ov.filter;
  if (ov.alpha) cfg.alpha = *ov.alpha;
  if (ov.alphas) cfg.alphas = funkframe::parse_alpha_list(*ov.alphas);
  if (ov.pinv_threshold) cfg.pinv_threshold = *ov.pinv_threshold;
  if (ov.output_dir) cfg.output_dir = *ov.output_dir;
  if (ov.table) cfg.table_path = *ov.table;
  if (ov.data) cfg.data_path = *ov.data;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Great-circle transform frame pipeline"};
  app.require_subcommand(1);

  Overrides ov;
  CLI::App* precompute = app.add_subcommand("precompute", "assemble and persist the dual-frame tables");
  CLI::App* forward = app.add_subcommand("forward", "evaluate the forward operator on a phantom");
  CLI::App* reconstruct = app.add_subcommand("reconstruct", "invert one data file against a table");
  CLI::App* experiment = app.add_subcommand("experiment", "forward + noise + per-alpha reconstructions");
  CLI::App* selftest = app.add_subcommand("selftest", "run the reduced-size invariant checks");
  for (CLI::App* sub : {precompute, forward, reconstruct, experiment, selftest})
    add_common_options(sub, ov);

  CLI::App* exportc = app.add_subcommand("export", "render a coefficient file as a 16-bit PGM");
  std::string in_path, out_path;
  int width = 512, height = 256;
  exportc->add_option("--input", in_path, "coefficient CSV (l,m,re,im)")->required();
  exportc->add_option("--output", out_path, "output PGM path")->required();
  exportc->add_option("--width", width, "raster width (default 512)");
  exportc->add_option("--height", height, "raster height (default 256)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (precompute->parsed()) {
      funkframe::cmd_precompute(resolve(ov));
    } else if (forward->parsed()) {
      funkframe::cmd_forward(resolve(ov));
    } else if (reconstruct->parsed()) {
      funkframe::cmd_reconstruct(resolve(ov));
    } else if (experiment->parsed()) {
      funkframe::cmd_experiment(resolve(ov));
    } else if (selftest->parsed()) {
      ExperimentConfig cfg = resolve(ov);
      funkframe::validate_config(cfg);
      if (funkframe::cmd_selftest(cfg) != 0) return 1;
    } else if (exportc->parsed()) {
      funkframe::export_pgm(funkframe::read_coeffs_csv(in_path), out_path, width, height);
      std::cout << "export: wrote " << out_path << "\n";
    }
  } catch (const funkframe::numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
