#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "irlm/processes.hpp"

namespace irlm {

/// |x+y| / (|x|+|y|), with psi(0,0) = 1.
[[nodiscard]] inline double psi(double x, double y) noexcept {
  const double s = (x < 0 ? -x : x) + (y < 0 ? -y : y);
  if (s == 0.0) return 1.0;
  const double t = x + y;
  return (t < 0 ? -t : t) / s;
}

/// Increment ratio statistic at window m.
[[nodiscard]] double ir_statistic(std::span<const double> values, std::size_t m);

struct IRProfile {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t p = 0;
  std::vector<double> values;  // IR at scales m, 2m, ..., pm
};

/// Feasibility of the scales m, ..., pm for a series of length n.
[[nodiscard]] bool profile_feasible(std::size_t n, std::size_t m, std::size_t p) noexcept;

/// Largest m with n - 3pm >= 1, or 0 when none.
[[nodiscard]] std::size_t max_feasible_window(std::size_t n, std::size_t p) noexcept;

[[nodiscard]] IRProfile ir_profile(std::span<const double> values, std::size_t m, std::size_t p);

/// Prefix sums of the centered series, shared across scales.
class IncrementSums {
 public:
  explicit IncrementSums(std::span<const double> values);
  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] double ir(std::size_t m) const;

 private:
  std::size_t n_;
  std::vector<double> prefix_;
};

struct SpectralRatio {
  std::size_t m = 0;
  double ratio = 0.0;
  double expected_ir = 0.0;
  double j4 = 0.0;
  double j6 = 0.0;
};

/// Exact mean of the IR statistic for a stationary Gaussian model.
[[nodiscard]] SpectralRatio expected_ir(const SpectralModel& model, std::size_t m);

/// int_0^pi x^a sin^power(m x/2) / sin^2(x/2) dx, power 4 or 6.
[[nodiscard]] double j_integral(double a, std::size_t m, int power);

struct LemmaConstants {
  std::optional<double> c41, c42, c61, c62;            // a < 1
  std::optional<double> c41p, c42p, c61p, c62p;        // a = 1
  std::optional<double> c41pp, c61pp;                  // a > 1
};

[[nodiscard]] LemmaConstants lemma_constants(double a);

}  // namespace irlm
