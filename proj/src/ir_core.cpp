#include "irlm/ir_core.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/constants/constants.hpp>

#include "irlm/asymptotics.hpp"

namespace irlm {

using std::numbers::pi;

// ------------------------------------------------------ IR statistics

IncrementSums::IncrementSums(std::span<const double> values) : n_(values.size()), prefix_(values.size() + 1) {
  long double mean = 0.0L;
  for (double v : values) mean += v;
  if (n_ > 0) mean /= static_cast<long double>(n_);
  long double acc = 0.0L;
  prefix_[0] = 0.0;
  for (std::size_t t = 0; t < n_; ++t) {
    acc += static_cast<long double>(values[t]) - mean;
    prefix_[t + 1] = static_cast<double>(acc);
  }
}

double IncrementSums::ir(std::size_t m) const {
  if (m < 1) throw std::invalid_argument("ir_statistic: m must be >= 1");
  if (n_ < 3 * m + 1)
    throw std::invalid_argument("ir_statistic: window m=" + std::to_string(m) + " too large for n=" +
                                std::to_string(n_) + " (need n - 3m >= 1)");
  const std::size_t terms = n_ - 3 * m;
  const double* s = prefix_.data();
  double total = 0.0;
  for (std::size_t k = 0; k < terms; ++k) {
    // a_k = S(k+2m) - 2S(k+m) + S(k); b_k = a_{k+m}.
    const double a = s[k + 2 * m] - 2.0 * s[k + m] + s[k];
    const double b = s[k + 3 * m] - 2.0 * s[k + 2 * m] + s[k + m];
    total += psi(a, b);
  }
  return total / static_cast<double>(terms);
}

double ir_statistic(std::span<const double> values, std::size_t m) { return IncrementSums(values).ir(m); }

bool profile_feasible(std::size_t n, std::size_t m, std::size_t p) noexcept {
  if (m < 1 || p < 2) return false;
  // n - 3pm >= 1; p <= [n/m] - 4 then holds automatically for p >= 2.
  return n >= 3 * p * m + 1 && p + 4 <= n / m;
}

std::size_t max_feasible_window(std::size_t n, std::size_t p) noexcept {
  if (p < 1 || n < 1) return 0;
  std::size_t m = (n - 1) / (3 * p);
  while (m > 0 && !profile_feasible(n, m, p)) --m;
  return m;
}

IRProfile ir_profile(std::span<const double> values, std::size_t m, std::size_t p) {
  if (p < 2) throw std::invalid_argument("ir_profile: p must be >= 2");
  if (!profile_feasible(values.size(), m, p))
    throw std::invalid_argument("ir_profile: infeasible scales m=" + std::to_string(m) + ", p=" +
                                std::to_string(p) + " for n=" + std::to_string(values.size()) +
                                " (need n - 3pm >= 1)");
  IncrementSums sums(values);
  IRProfile prof{values.size(), m, p, std::vector<double>(p)};
  for (std::size_t j = 1; j <= p; ++j) prof.values[j - 1] = sums.ir(j * m);
  return prof;
}

// ------------------------------------------------- spectral integrals

namespace {

double sin_ratio_kernel(double x, std::size_t m, int power) {
  const double s = std::sin(0.5 * static_cast<double>(m) * x);
  const double base = std::sin(0.5 * x);
  double sp = s * s;
  sp *= sp;
  if (power == 6) sp *= s * s;
  return sp / (base * base);
}

std::vector<double> uniform_points(double lo, double hi, double max_width) {
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / max_width - 1e-9));
  std::vector<double> pts(n + 1);
  for (std::size_t k = 0; k <= n; ++k) pts[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
  pts.back() = hi;
  return pts;
}

// Integral over [0, pi] on panels of width <= pi/(4m). A power-law pole of
// exponent `pole_exp` at an interior point `pole` is handled by the
// singular-endpoint rule on the two panels touching it.
double oscillatory_integral(const RealFunction& f, std::size_t m, double pole, double pole_exp) {
  QuadratureSpec spec;
  spec.abs_tol = 1e-15;
  spec.rel_tol = 1e-13;
  const double width = pi / (4.0 * static_cast<double>(m));
  spec.max_subdivisions = static_cast<int>(4 * m) + 20000;
  auto run = [&](const std::vector<double>& pts) {
    if (pts.size() < 2) return 0.0;
    auto r = integrate_partitioned(f, pts, spec);
    if (!r.converged && r.error > 1e-9 * std::abs(r.value))
      throw ConvergenceError("oscillatory integral did not converge", r.value, r.error);
    return r.value;
  };
  if (!(pole > 0.0 && pole < pi)) return run(uniform_points(0.0, pi, width));
  auto left = uniform_points(0.0, pole, width);
  auto right = uniform_points(pole, pi, width);
  const double lo = left[left.size() - 2], hi = right[1];
  left.pop_back();
  right.erase(right.begin());
  QuadratureSpec sing = spec;
  sing.endpoint_singularity_exponent = pole_exp;
  double total = run(left) + run(right);
  total += integrate(f, pole, hi, sing);
  total += integrate([&](double u) { return f(2.0 * pole - u); }, pole, 2.0 * pole - lo, sing);
  return total;
}

}  // namespace

SpectralRatio expected_ir(const SpectralModel& model, std::size_t m) {
  model.validate();
  if (!model.gaussian()) throw std::invalid_argument("expected_ir: Gaussian model required");
  if (m < 1) throw std::invalid_argument("expected_ir: m must be >= 1");
  const double pole = model.kind == ProcessKind::kGarma0 ? 0.5 * pi : -1.0;
  const double pole_exp = -2.0 * model.d;
  auto integrand = [&](int power) {
    return [&, power](double x) {
      if (x <= 0.0) return 0.0;
      return spectral_density(model, x) * sin_ratio_kernel(x, m, power);
    };
  };
  SpectralRatio out;
  out.m = m;
  out.j4 = oscillatory_integral(integrand(4), m, pole, pole_exp);
  out.j6 = oscillatory_integral(integrand(6), m, pole, pole_exp);
  out.ratio = 1.0 - 2.0 * out.j6 / out.j4;
  out.expected_ir = lambda(out.ratio);
  return out;
}

double j_integral(double a, std::size_t m, int power) {
  if (!(a > -1.0)) throw std::invalid_argument("j_integral: a must be > -1");
  if (m < 1) throw std::invalid_argument("j_integral: m must be >= 1");
  if (power != 4 && power != 6) throw std::invalid_argument("j_integral: power must be 4 or 6");
  auto f = [a, m, power](double x) {
    if (x <= 0.0) return 0.0;
    return std::pow(x, a) * sin_ratio_kernel(x, m, power);
  };
  return oscillatory_integral(f, m, -1.0, 0.0);
}

// ------------------------------------------------------------ constants

namespace {

// int_0^{pi/2} y^a (1/sin^2 y - 1/y^2) dy; smooth apart from the y^a factor.
double cosecant_remainder(double a) {
  auto f = [a](double y) {
    if (y <= 0.0) return 0.0;
    const double s = std::sin(y);
    // 1/sin^2 - 1/y^2 = (y - sin y)(y + sin y) / (y sin y)^2, with y - sin y by its series.
    double diff = y - s;
    if (y < 0.5) {
      const double y2 = y * y;
      double term = y * y2 / 6.0;
      diff = 0.0;
      for (int k = 1; k < 12 && term != 0.0; ++k) {
        diff += term;
        term *= -y2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      }
    }
    const double ys = y * s;
    return std::pow(y, a) * diff * (y + s) / (ys * ys);
  };
  QuadratureSpec spec;
  spec.abs_tol = 1e-15;
  spec.rel_tol = 1e-12;
  if (a > -1.0 && a < 1.0 && a != 0.0) spec.endpoint_singularity_exponent = a;
  return integrate(f, 0.0, 0.5 * pi, spec);
}

}  // namespace

LemmaConstants lemma_constants(double a) {
  if (!(a > -1.0)) throw std::invalid_argument("lemma_constants: a must be > -1");
  LemmaConstants c;
  if (std::abs(a - 1.0) < 1e-12) {
    const double euler = boost::math::constants::euler<double>();
    const double k = cosecant_remainder(1.0);
    c.c41p = 1.5;
    c.c61p = 1.25;
    c.c42p = 1.5 * (euler + std::log(0.5 * pi)) + std::log(2.0) + 1.5 * k;
    c.c62p = 1.25 * (euler + std::log(0.5 * pi)) + (3.0 * std::log(2.0) + std::log(6.0)) / 8.0 + 1.25 * k;
  } else if (a < 1.0) {
    const double g = std::tgamma(1.0 - a) * (1.0 - a) * std::sin(0.5 * (1.0 - a) * pi);
    c.c41 = pi * (1.0 - std::pow(2.0, -1.0 - a)) / g;
    c.c61 = pi * (15.0 + std::pow(3.0, 1.0 - a) - 6.0 * std::pow(2.0, 1.0 - a)) / (16.0 * g);
    c.c42 = 3.0 / std::pow(2.0, 2.0 - a) * cosecant_remainder(a) - 3.0 * std::pow(pi, a - 1.0) / (2.0 * (1.0 - a));
    c.c62 = 5.0 / 6.0 * *c.c42;
  } else {
    auto f = [a](double x) {
      if (x <= 0.0) return 0.0;
      const double s = std::sin(0.5 * x);
      return std::pow(x, a) / (s * s);
    };
    QuadratureSpec spec;
    spec.abs_tol = 1e-15;
    spec.rel_tol = 1e-11;
    spec.max_subdivisions = 5000;
    if (a - 2.0 > -1.0 && a - 2.0 < 1.0 && a != 2.0) spec.endpoint_singularity_exponent = a - 2.0;
    c.c41pp = 0.375 * integrate(f, 0.0, pi, spec);
    c.c61pp = 5.0 / 6.0 * *c.c41pp;
  }
  return c;
}

}  // namespace irlm
