#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace irlm {

/// Raised when an adaptive routine runs out of budget. Carries the best
/// estimate so callers can decide whether it is good enough.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_bound)
      : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}
  [[nodiscard]] double estimate() const noexcept { return estimate_; }
  [[nodiscard]] double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

// ---------------------------------------------------------------- FFT

[[nodiscard]] bool is_power_of_two(std::size_t n) noexcept;
[[nodiscard]] std::size_t next_power_of_two(std::size_t n) noexcept;

/// Forward DFT of a real sequence, full-length complex output.
[[nodiscard]] std::vector<std::complex<double>> fft_real(std::span<const double> values);
/// Forward DFT, X_k = sum_j x_j exp(-2 pi i jk/n).
[[nodiscard]] std::vector<std::complex<double>> fft(std::span<const std::complex<double>> values);
/// Inverse DFT including the 1/n factor.
[[nodiscard]] std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> values);

// ---------------------------------------------------------- quadrature

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 1000;
  /// Power-law exponent e of f(x) ~ (x-a)^e at the left endpoint, e in (-1, 1).
  std::optional<double> endpoint_singularity_exponent;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

using RealFunction = std::function<double(double)>;

/// Global adaptive Gauss-Kronrod (7/15) integration. Throws ConvergenceError
/// if the budget runs out before the tolerance is met.
double integrate(const RealFunction& f, double a, double b, const QuadratureSpec& spec = {});

/// Same, starting from a caller-supplied partition (sorted, first/last are the limits).
/// Never throws on budget exhaustion; inspect `converged`.
[[nodiscard]] QuadratureResult integrate_partitioned(const RealFunction& f,
                                                     std::span<const double> breakpoints,
                                                     const QuadratureSpec& spec);

/// Gauss-Legendre nodes and weights on [-1, 1], cached per order.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
[[nodiscard]] const GaussRule& gauss_legendre(int order);

/// Fixed-order Gauss-Legendre sum over [a, b].
template <class F>
double gauss_panel(const F& f, double a, double b, const GaussRule& rule) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) s += rule.weights[k] * f(c + h * rule.nodes[k]);
  return s * h;
}

// -------------------------------------------------------- root finding

/// Bracketing root finder for a monotone g (TOMS 748 under the hood).
double brent_root(const RealFunction& g, double lo, double hi, double tol = 1e-12);

// ------------------------------------------------------------ SPD solve

struct SpdSolveResult {
  Eigen::VectorXd x;
  bool jittered = false;
};

/// Cholesky solve. On failure retries with diagonal jitter 1e-10 * trace(A)/p.
[[nodiscard]] SpdSolveResult spd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// --------------------------------------------------------- distributions

[[nodiscard]] double chi2_sf(double x, double k);
[[nodiscard]] double chi2_quantile(double prob, double k);
[[nodiscard]] double normal_cdf(double x);

/// One-sample Kolmogorov-Smirnov test against N(0,1).
struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};
[[nodiscard]] KsResult ks_test_normal(std::span<const double> samples);

/// Hurwitz zeta sum_{k>=0} (k+q)^{-s} for s > 1, q > 0.
[[nodiscard]] double hurwitz_zeta(double s, double q);

// --------------------------------------------------------------- RNG

/// Independent random stream keyed by (seed, stream_id).
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }

  double normal();
  /// Uniform on the open interval (0, 1).
  double uniform();
  void fill_normal(std::span<double> out);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace irlm
