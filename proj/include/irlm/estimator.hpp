#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "irlm/asymptotics.hpp"
#include "irlm/ir_core.hpp"

namespace irlm {

/// Failure inside estimate(), tagged with the pipeline stage.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(std::string stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(std::move(stage)) {}
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct EstimationFlags {
  bool clamped_inversion = false;  // some IR value fell outside the range of Lambda0
  bool gamma_clamped = false;      // Gamma looked up at a clamped d
  bool jittered = false;           // a covariance solve needed a diagonal jitter
  bool grid_boundary = false;      // alpha-hat is the largest feasible grid point
  bool m_capped = false;           // m-tilde reduced to the largest feasible window

  [[nodiscard]] bool any() const noexcept {
    return clamped_inversion || gamma_clamped || jittered || grid_boundary || m_capped;
  }
  void merge(const EstimationFlags& o) noexcept {
    clamped_inversion |= o.clamped_inversion;
    gamma_clamped |= o.gamma_clamped;
    jittered |= o.jittered;
    grid_boundary |= o.grid_boundary;
    m_capped |= o.m_capped;
  }
};

struct ScaleEstimates {
  Eigen::VectorXd d;
  EstimationFlags flags;
};

/// Lambda0^{-1} of IR at scales m, 2m, ..., pm.
[[nodiscard]] ScaleEstimates d_hat(std::span<const double> series, std::size_t m, std::size_t p);
[[nodiscard]] ScaleEstimates d_hat(const IRProfile& profile);

struct SigmaHat {
  Eigen::MatrixXd sigma;
  EstimationFlags flags;
};

/// Lambda0'(d_ref)^{-2} Gamma_p(d_ref), Gamma looked up at d_ref clamped to
/// the tabulated range.
[[nodiscard]] SigmaHat sigma_hat(double d_ref, std::size_t p, const AsymptoticTable& table);

struct GlsResult {
  double d = 0.0;
  double quad_form = 0.0;
  Eigen::VectorXd weights;
  bool jittered = false;
};

[[nodiscard]] GlsResult gls_estimate(const Eigen::VectorXd& d_vec, const Eigen::MatrixXd& sigma);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool jittered = false;
};

/// (n/m) (d_vec - d)' sigma^{-1} (d_vec - d), referred to chi2(p-1).
[[nodiscard]] TestResult test_statistic(const Eigen::VectorXd& d_vec, double d, const Eigen::MatrixXd& sigma,
                                        std::size_t n, std::size_t m);

struct ScaleGrid {
  std::vector<int> k_values;
  std::vector<double> alphas;
  std::vector<std::size_t> m_values;
};

/// k = 2..floor(log(n/p)), alpha = k/log n, m = [e^k].
[[nodiscard]] ScaleGrid scale_grid(std::size_t n, std::size_t p);

struct GridPoint {
  double alpha = 0.0;
  std::size_t m = 0;
  bool feasible = false;
  double q = 0.0;      // (d_vec - d)' sigma^{-1} (d_vec - d)
  double d_gls = 0.0;
};

struct AlphaSelection {
  double alpha = 0.0;
  std::size_t m = 0;
  std::vector<GridPoint> grid;
  EstimationFlags flags;
};

[[nodiscard]] AlphaSelection select_alpha(std::span<const double> series, std::size_t p,
                                          const AsymptoticTable& table);

struct AdaptedScale {
  double alpha = 0.0;
  std::size_t m_raw = 0;  // [n^alpha]
  std::size_t m = 0;      // after the feasibility cap
  bool capped = false;
};

[[nodiscard]] AdaptedScale adapt_alpha(double alpha_hat, std::size_t p, std::size_t n);

/// [1.5 log n].
[[nodiscard]] std::size_t default_p(std::size_t n);

struct EstimateOptions {
  std::size_t p = 0;  // 0 selects default_p(n)
  /// Table to use; when null the default table is loaded and cached.
  const AsymptoticTable* table = nullptr;
};

struct EstimationReport {
  std::size_t n = 0;
  std::size_t p = 0;
  Eigen::VectorXd per_scale_d;
  double gls_d = 0.0;
  Eigen::MatrixXd sigma_hat;
  double alpha_hat = 0.0;
  double alpha_tilde = 0.0;
  std::size_t m_hat = 0;
  std::size_t m_tilde = 0;
  std::size_t m_tilde_raw = 0;
  double d_ir = 0.0;
  double test_stat = 0.0;
  double p_value = 1.0;
  double asymptotic_sd = 0.0;
  std::vector<GridPoint> grid;
  EstimationFlags flags;
};

[[nodiscard]] EstimationReport estimate(std::span<const double> series, const EstimateOptions& opt = {});

}  // namespace irlm
