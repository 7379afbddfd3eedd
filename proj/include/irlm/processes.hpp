#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "irlm/numerics.hpp"

namespace irlm {

enum class ProcessKind { kFgn, kFarima, kPowerLaw, kGarma0, kCustom };

/// Polynomial sign convention for FARIMA(p,d,q).
///   kStandard: (1 - sum phi_k B^k)(1-B)^d X = (1 + sum theta_k B^k) eps
///   kNegated:  (1 + sum phi_k B^k)(1-B)^d X = (1 - sum theta_k B^k) eps
enum class ArmaConvention { kStandard, kNegated };

enum class InnovationLaw { kGaussian, kUniform, kBurr2, kBurr15 };

struct Contamination {
  InnovationLaw innovation = InnovationLaw::kGaussian;
  double trend_slope = 0.0;
  double seasonal_amplitude = 0.0;
  double seasonal_period = 12.0;
};

struct SpectralModel {
  ProcessKind kind = ProcessKind::kFgn;
  /// Memory parameter; for fGn the Hurst index is d + 1/2.
  double d = 0.0;
  double sigma2 = 1.0;
  /// Second-order exponent of the power-law model.
  double beta = 1.0;
  std::vector<double> ar;
  std::vector<double> ma;
  ArmaConvention convention = ArmaConvention::kStandard;
  /// Tabulated density on an ascending grid ending at pi (linear in between,
  /// constant below the first node).
  std::vector<double> custom_lambda;
  std::vector<double> custom_density;
  Contamination contamination{};

  static SpectralModel fgn(double hurst, double sigma2 = 1.0);
  static SpectralModel farima(double d, std::vector<double> ar = {}, std::vector<double> ma = {},
                              double sigma2 = 1.0,
                              ArmaConvention convention = ArmaConvention::kStandard);
  static SpectralModel power_law(double d, double beta);
  static SpectralModel garma0(double d);
  static SpectralModel custom(std::vector<double> lambda, std::vector<double> density);

  [[nodiscard]] double hurst() const noexcept { return d + 0.5; }
  [[nodiscard]] bool gaussian() const noexcept {
    return contamination.innovation == InnovationLaw::kGaussian;
  }
  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
  [[nodiscard]] std::string describe() const;
};

struct TimeSeries {
  std::vector<double> values;
  std::string origin;
  /// Set when tiny negative circulant eigenvalues were clipped.
  bool clipped = false;
  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// gamma(0..max_lag) of the Gaussian part of the model.
[[nodiscard]] std::vector<double> autocovariance(const SpectralModel& model, std::size_t max_lag);

/// f(lambda) on (0, pi], normalized so that gamma(k) = 2 int_0^pi f cos(k x) dx.
[[nodiscard]] double spectral_density(const SpectralModel& model, double lambda);

/// Exact sample via circulant embedding (Gaussian innovations) or a
/// truncated moving average (uniform or Burr innovations, FARIMA only).
[[nodiscard]] TimeSeries generate(const SpectralModel& model, std::size_t n, RngStream& rng);

/// X_t += slope * t + amplitude * sin(2 pi t / period), t = 1..n.
void apply_contamination(std::span<double> values, const Contamination& c);

/// Moving-average weights of the FARIMA model, psi_0 = 1.
[[nodiscard]] std::vector<double> farima_ma_weights(const SpectralModel& model, std::size_t count);

/// Symmetric Burr law F(x) = 1 - 1/(2(1 + x^alpha)) for x >= 0.
[[nodiscard]] double burr_cdf(double x, double alpha);
[[nodiscard]] double burr_quantile(double u, double alpha);

// ---------------------------------------------------------------- CSV

struct CsvOptions {
  std::size_t column = 0;
  /// Column selected by header name when non-empty (implies a header row).
  std::string column_name;
  char delimiter = ',';
  bool skip_header = false;
  std::size_t min_rows = 0;
};

[[nodiscard]] TimeSeries ingest_csv(const std::filesystem::path& path, const CsvOptions& opt = {});
void write_csv(const std::filesystem::path& path, std::span<const double> values,
               const std::string& header = "");

}  // namespace irlm
