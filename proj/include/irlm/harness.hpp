#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "irlm/estimator.hpp"
#include "irlm/processes.hpp"

namespace irlm {

constexpr int kScenarioVersion = 1;

struct ScenarioConfig {
  SpectralModel model;  // d is overwritten per cell
  std::size_t n = 1000;
  std::vector<double> d_values;
  std::size_t p = 0;  // 0 = "auto"
  int replicates = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  std::filesystem::path table;  // empty = default table
  std::filesystem::path summary_path;
  std::filesystem::path records_path;

  void validate() const;
};

/// Versioned JSON scenario; see README for the fields.
[[nodiscard]] ScenarioConfig load_scenario(const std::filesystem::path& path);
[[nodiscard]] ScenarioConfig parse_scenario(const std::string& json_text);
[[nodiscard]] std::string scenario_to_json(const ScenarioConfig& cfg);

struct ReplicateRecord {
  double d = 0.0;
  int replicate = 0;
  bool ok = false;
  std::string error;
  double d_ir = 0.0;
  std::size_t m_tilde = 0;
  double test_stat = 0.0;
  double p_value = 0.0;
  double asymptotic_sd = 0.0;
  EstimationFlags flags;
};

struct CellSummary {
  double d = 0.0;  // NaN for the pooled row
  int successes = 0;
  int failures = 0;
  double sqrt_mse = 0.0;
  double bias = 0.0;
  double mean_m_tilde = 0.0;
  double acceptance = 0.0;  // share with T <= chi2(p-1) 0.95 quantile
};

struct MCSummary {
  std::string model;
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<CellSummary> cells;
  CellSummary pooled;
  std::vector<ReplicateRecord> records;
  bool batch_failed = false;  // more than 10% of replicates failed
};

/// Summary statistics recomputed from the records.
[[nodiscard]] MCSummary summarize(const std::string& model, std::size_t n, std::size_t p,
                                  const std::vector<double>& d_values, std::vector<ReplicateRecord> records);

/// Runs every (d, replicate) pair; replicate r of cell c draws from stream
/// (c << 32) | r, so results do not depend on the thread count.
[[nodiscard]] MCSummary run_scenario(const ScenarioConfig& cfg);

void write_summary_csv(const MCSummary& s, const std::filesystem::path& path);
void write_records_csv(const MCSummary& s, const std::filesystem::path& path);

struct FileEstimateOptions {
  CsvOptions csv;
  EstimateOptions estimate;
  bool diagnostics = false;
};

struct RenderedReport {
  EstimationReport report;
  std::string text;
  std::string json;
};

/// Smallest admissible length for p scales.
[[nodiscard]] std::size_t minimum_length(std::size_t p);

[[nodiscard]] RenderedReport estimate_file(const std::filesystem::path& path, const FileEstimateOptions& opt = {});
[[nodiscard]] RenderedReport render_report(const EstimationReport& r, bool diagnostics);

struct Overlay {
  enum class Kind { kNormal, kChi2 } kind = Kind::kNormal;
  double mean = 0.0;
  double sd = 1.0;
  double dof = 1.0;

  static Overlay normal(double mean, double sd) { return {Kind::kNormal, mean, sd, 1.0}; }
  static Overlay chi2(double k) { return {Kind::kChi2, 0.0, 1.0, k}; }
  [[nodiscard]] double density(double x) const;
};

struct DensityExport {
  std::vector<double> x;
  std::vector<double> kde;
  std::vector<double> overlay;
  double bandwidth = 0.0;
};

/// Gaussian-kernel density with Silverman's bandwidth on 200 points.
[[nodiscard]] DensityExport export_density(const std::vector<double>& samples, const Overlay& overlay,
                                           std::size_t points = 200);
/// Writes <stem>_kde.csv and <stem>_overlay.csv, two columns each.
void write_density(const DensityExport& e, const std::filesystem::path& stem);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double target = 0.0;
  std::string detail;
};

struct ValidationOptions {
  std::size_t mc_samples = 200000;
  std::uint64_t seed = 7;
};

[[nodiscard]] std::vector<ValidationCheck> validate_asymptotics(const ValidationOptions& opt = {});

/// Least-squares slope of log|E[IR(m)] - Lambda0(d)| against log m.
[[nodiscard]] double expected_ir_rate_slope(const SpectralModel& model, const std::vector<std::size_t>& m_values);

}  // namespace irlm
