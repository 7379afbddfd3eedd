#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irlm/numerics.hpp"

namespace irlm {

inline constexpr double kLambda0DMin = -0.49;
inline constexpr double kLambda0DMax = 1.49;
inline constexpr double kGammaDMax = 0.49;

// ----------------------------------------------------- transfer functions

/// Limit mean of psi for a standard Gaussian pair with correlation r.
[[nodiscard]] double lambda(double r);
[[nodiscard]] double lambda_prime(double r);
/// Correlation of consecutive second-difference blocks of fBm with H = d + 1/2.
[[nodiscard]] double rho(double d);
[[nodiscard]] double rho_prime(double d);
[[nodiscard]] double lambda0(double d);
[[nodiscard]] double lambda0_prime(double d);

struct Lambda0Inverse {
  double d = 0.0;
  bool clamped = false;
};
/// Inverse of lambda0 on [-0.49, 1.49]. Out-of-range input is clamped and
/// flagged, or rejected with std::domain_error when `clamp` is false.
[[nodiscard]] Lambda0Inverse lambda0_inv(double x, bool clamp = true);

// -------------------------------------------- fBm second-difference kernel

struct FbmSecondDifferenceKernel {
  double d = 0.0;
  int j1 = 1;
  int j2 = 1;
  [[nodiscard]] double hurst() const noexcept { return d + 0.5; }
};

/// Cov(Z^{(j1)}(s), Z^{(j2)}(t)); normalized so that Var Z^{(j)} = j^{2H}.
[[nodiscard]] double z_cov(const FbmSecondDifferenceKernel& k, double s, double t);

/// Correlation matrix of (Z^{(i)}(0), Z^{(i)}(i), Z^{(j)}(tau), Z^{(j)}(tau+j)).
[[nodiscard]] Eigen::Matrix4d pair_correlation(double d, int i, int j, double tau);

// -------------------------------------------- E[psi(X1,X2) psi(X3,X4)]

struct CubatureRule {
  int outer_order = 8;
  int inner_order = 8;
  /// Use a global adaptive outer integral with this tolerance instead of the
  /// fixed graded rule (slower, used for validation).
  bool adaptive = false;
  double tol = 1e-10;
};

struct PsiPairValue {
  double value = 0.0;
  bool regularized = false;
};

/// Deterministic angular cubature of E[psi(X1,X2) psi(X3,X4)] for a centered
/// Gaussian vector with the given correlation matrix.
[[nodiscard]] PsiPairValue psi_pair_expectation(const Eigen::Matrix4d& corr,
                                                const CubatureRule& rule = {});

struct MonteCarloValue {
  double value = 0.0;
  double std_error = 0.0;
};
/// Plain Monte Carlo estimate of the same expectation.
[[nodiscard]] MonteCarloValue psi_pair_expectation_mc(const Eigen::Matrix4d& corr,
                                                      std::size_t samples, RngStream& rng);

/// Second and fourth order Hermite coefficients of psi(L s) for standard s,
/// where L is the Cholesky factor of [[1, r], [r, 1]].
class HermiteFarField {
 public:
  explicit HermiteFarField(double r);
  /// Covariance of psi over the two pairs given the whitened cross block C.
  [[nodiscard]] double covariance(const Eigen::Matrix2d& c) const;
  [[nodiscard]] const Eigen::Matrix2d& cholesky() const noexcept { return l_; }

 private:
  Eigen::Matrix2d l_;
  Eigen::Matrix2d f2_;
  std::array<double, 16> f4_{};
};

// ------------------------------------------------------------ Gamma_p(d)

enum class GammaMethod { kCubature, kMonteCarlo };

struct GammaOptions {
  GammaMethod method = GammaMethod::kCubature;
  CubatureRule rule{};
  /// Whitened cross-correlation size below which the Hermite far field is used.
  double far_field_threshold = 0.08;
  /// Geometric grading of tau panels toward kinks.
  int grading_levels = 4;
  int tau_order = 6;
  // Monte Carlo route.
  std::size_t mc_samples = 200000;
  double tau_max = 100.0;
  double tau_step = 0.25;
  std::uint64_t seed = 20240601;
};

struct SigmaValue {
  double value = 0.0;
  double std_error = 0.0;  // zero for the deterministic route
  /// Bound on the mass beyond tau_max (Monte Carlo route only).
  double tail_bound = 0.0;
  bool regularized = false;
  int evaluations = 0;
};

/// sigma_{i,j}(d) = integral over the real line of the psi cross-covariance.
[[nodiscard]] SigmaValue sigma_entry(double d, int i, int j, const GammaOptions& opt = {});

/// The one-sided form 2 * integral over tau >= 0 of the scale-1 covariance.
[[nodiscard]] SigmaValue sigma2_one_sided(double d, const GammaOptions& opt = {});

struct GammaResult {
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd std_error;
  bool regularized = false;
};

/// The p x p matrix (sigma_{i,j}(d)), symmetrized. Uses the exact scaling
/// sigma_{ci,cj} = c sigma_{i,j} so only coprime pairs are integrated.
[[nodiscard]] GammaResult gamma_matrix(double d, int p, const GammaOptions& opt = {});

// ------------------------------------------------------------- table

struct AsymptoticTable {
  int p_max = 0;
  double d_min = kLambda0DMin;
  double d_step = 0.01;
  std::vector<double> d_grid;  // spans [d_min, 1.49]
  std::vector<double> lambda0;
  std::vector<double> lambda0_prime;
  std::vector<Eigen::MatrixXd> gamma;  // one per d_grid point with d <= 0.49
  GammaOptions options{};

  [[nodiscard]] std::size_t gamma_points() const noexcept { return gamma.size(); }
  [[nodiscard]] double gamma_d_max() const { return d_grid.at(gamma.size() - 1); }
};

struct TableBuildSpec {
  int p_max = 20;
  double d_step = 0.01;
  GammaOptions gamma{};
  int threads = 0;  // 0 = hardware concurrency
  /// Optional progress callback, called with (completed, total).
  std::function<void(int, int)> progress;
};

[[nodiscard]] AsymptoticTable build_table(const TableBuildSpec& spec);
void save_table(const AsymptoticTable& table, const std::filesystem::path& path);
[[nodiscard]] AsymptoticTable load_table(const std::filesystem::path& path);

struct Interpolated {
  double lambda0 = 0.0;
  double lambda0_prime = 0.0;
  Eigen::MatrixXd gamma;
};

/// Local cubic interpolation. Gamma is only defined up to d = 0.49 and
/// truncated to p x p.
[[nodiscard]] Interpolated interpolate(const AsymptoticTable& table, double d, int p);

/// Resolve the table path: explicit argument, then $IRLM_TABLE, then the
/// installed default.
[[nodiscard]] std::filesystem::path default_table_path();
/// Loads and caches tables by path.
[[nodiscard]] const AsymptoticTable& cached_table(const std::filesystem::path& path);

}  // namespace irlm
