// irlm: estimate, simulate, build-table, validate.

#include <cmath>
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "irlm/harness.hpp"

using namespace irlm;

namespace {

int run_estimate(const std::string& csv, std::size_t p, const std::string& table_path, bool diagnostics, bool as_json,
                 std::size_t column, const std::string& column_name, bool skip_header, const std::string& delim) {
  FileEstimateOptions opt;
  opt.csv.column = column;
  opt.csv.column_name = column_name;
  opt.csv.skip_header = skip_header;
  if (delim.size() != 1) throw std::invalid_argument("--delimiter must be a single character");
  opt.csv.delimiter = delim[0];
  opt.estimate.p = p;
  opt.diagnostics = diagnostics;
  std::unique_ptr<AsymptoticTable> table;
  if (!table_path.empty()) {
    table = std::make_unique<AsymptoticTable>(load_table(table_path));
    opt.estimate.table = table.get();
  }
  const auto out = estimate_file(csv, opt);
  std::cout << (as_json ? out.json + "\n" : out.text);
  return 0;
}

int run_simulate(const std::string& cfg_path, int threads, const std::string& density_stem) {
  auto cfg = load_scenario(cfg_path);
  if (threads > 0) cfg.threads = threads;
  const auto s = run_scenario(cfg);
  std::printf("%s  n=%zu  p=%zu\n", s.model.c_str(), s.n, s.p);
  std::printf("%8s %6s %6s %10s %10s %10s %10s\n", "d", "ok", "fail", "sqrt_mse", "bias", "mean_m", "accept");
  auto row = [](const CellSummary& c, const char* label) {
    char d[32];
    if (label) std::snprintf(d, sizeof d, "%s", label);
    else std::snprintf(d, sizeof d, "%.3f", c.d);
    std::printf("%8s %6d %6d %10.4f %10.4f %10.2f %10.3f\n", d, c.successes, c.failures, c.sqrt_mse, c.bias,
                c.mean_m_tilde, c.acceptance);
  };
  for (const auto& c : s.cells) row(c, nullptr);
  row(s.pooled, "pooled");
  if (!density_stem.empty()) {
    std::vector<double> z, t;
    for (const auto& r : s.records) {
      if (!r.ok) continue;
      if (r.asymptotic_sd > 0.0) z.push_back((r.d_ir - r.d) / r.asymptotic_sd);
      t.push_back(r.test_stat);
    }
    write_density(export_density(z, Overlay::normal(0.0, 1.0)), density_stem + "_d");
    write_density(export_density(t, Overlay::chi2(static_cast<double>(s.p - 1))), density_stem + "_t");
  }
  if (s.batch_failed) {
    std::fprintf(stderr, "batch failed: %d of %d replicates failed\n", s.pooled.failures,
                 s.pooled.failures + s.pooled.successes);
    for (const auto& r : s.records)
      if (!r.ok) {
        std::fprintf(stderr, "  first failure (d=%g, replicate %d): %s\n", r.d, r.replicate, r.error.c_str());
        break;
      }
    return 1;
  }
  return 0;
}

int run_build_table(int p, double step, const std::string& out, int threads, const std::string& method,
                    std::size_t mc_samples) {
  TableBuildSpec spec;
  spec.p_max = p;
  spec.d_step = step;
  spec.threads = threads;
  if (method == "monte_carlo") {
    spec.gamma.method = GammaMethod::kMonteCarlo;
    spec.gamma.mc_samples = mc_samples;
  } else if (method != "cubature") {
    throw std::invalid_argument("--method must be cubature or monte_carlo");
  }
  spec.progress = [](int done, int total) { std::fprintf(stderr, "\r%d/%d", done, total); };
  const auto t = build_table(spec);
  std::fprintf(stderr, "\n");
  save_table(t, out);
  std::printf("wrote %s (p_max=%d, %zu points, Gamma up to d=%.2f)\n", out.c_str(), t.p_max, t.d_grid.size(),
              t.gamma_d_max());
  return 0;
}

int run_validate(std::size_t mc_samples) {
  ValidationOptions opt;
  opt.mc_samples = mc_samples;
  const auto checks = validate_asymptotics(opt);
  int failed = 0;
  for (const auto& c : checks) {
    std::printf("%-4s %-50s value=%.8g target=%.8g %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.target, c.detail.c_str());
    failed += c.passed ? 0 : 1;
  }
  std::printf("%d of %zu checks passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive increment-ratio estimation of the memory parameter"};
  app.require_subcommand(1);

  auto* est = app.add_subcommand("estimate", "Estimate d from a CSV column");
  std::string csv, table_path, column_name, delim = ",";
  std::size_t p = 0, column = 0;
  bool diagnostics = false, as_json = false, skip_header = false;
  est->add_option("csv", csv, "Input CSV file")->required()->check(CLI::ExistingFile);
  est->add_option("--p", p, "Number of scales (default [1.5 log n])");
  est->add_option("--table", table_path, "Asymptotic table (default $IRLM_TABLE or the installed table)");
  est->add_flag("--diagnostics", diagnostics, "Include every grid point and the per-scale estimates");
  est->add_flag("--json", as_json, "Print the structured report");
  est->add_option("--column", column, "Zero-based column index");
  est->add_option("--column-name", column_name, "Column selected by header name");
  est->add_flag("--skip-header", skip_header, "First row is a header");
  est->add_option("--delimiter", delim, "Field delimiter");

  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo scenario");
  std::string cfg;
  int sim_threads = 0;
  std::string density_stem;
  sim->add_option("scenario", cfg, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  sim->add_option("--threads", sim_threads, "Worker threads (overrides the scenario)");
  sim->add_option("--density", density_stem, "Write density plot data with this path prefix");

  auto* build = app.add_subcommand("build-table", "Build the asymptotic table");
  int bp = 20, bthreads = 0;
  double grid = 0.01;
  std::string out = "gamma_table", method = "cubature";
  std::size_t mc_samples = 200000;
  build->add_option("--p", bp, "Largest p");
  build->add_option("--grid", grid, "Grid step in d");
  build->add_option("--out", out, "Output path");
  build->add_option("--threads", bthreads, "Worker threads");
  build->add_option("--method", method, "cubature or monte_carlo");
  build->add_option("--mc-samples", mc_samples, "Samples per tau node (monte_carlo)");

  auto* val = app.add_subcommand("validate", "Numerical checks of the asymptotic constants");
  std::size_t val_samples = 200000;
  val->add_option("--mc-samples", val_samples, "Samples per tau node for the sigma^2 check");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*est) return run_estimate(csv, p, table_path, diagnostics, as_json, column, column_name, skip_header, delim);
    if (*sim) return run_simulate(cfg, sim_threads, density_stem);
    if (*build) return run_build_table(bp, grid, out, bthreads, method, mc_samples);
    if (*val) return run_validate(val_samples);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
