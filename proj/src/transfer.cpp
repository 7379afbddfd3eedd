#include <cmath>
#include <numbers>
#include <stdexcept>

#include "irlm/asymptotics.hpp"

namespace irlm {

using std::numbers::pi;

double lambda(double r) {
  if (!(std::abs(r) <= 1.0)) throw std::domain_error("lambda: need |r| <= 1");
  if (r == 1.0) return 1.0;
  if (r == -1.0) return 0.0;
  const double u = std::sqrt((1.0 + r) / (1.0 - r));
  return (2.0 / pi) * std::atan(u) + (1.0 / pi) * u * std::log(2.0 / (1.0 + r));
}

double lambda_prime(double r) {
  if (!(std::abs(r) < 1.0)) throw std::domain_error("lambda_prime: need |r| < 1");
  // The arctan term cancels against part of the log term.
  return std::log(2.0 / (1.0 + r)) / (pi * std::pow(1.0 - r, 1.5) * std::sqrt(1.0 + r));
}

namespace {

const double kLn4 = std::log(4.0);
const double kLn9 = std::log(9.0);

void check_rho_domain(double d) {
  if (!(d >= -0.5 && d < 1.5)) throw std::domain_error("rho: d must lie in [-0.5, 1.5)");
}

// Taylor coefficients at h = H - 1 of N(h) = 16(4^h - 1) - 9(9^h - 1) and
// D(h) = -8(4^h - 1), both divided by h.
struct RhoSeries {
  double a[6];
  double b[6];
  RhoSeries() {
    double fact = 1.0, l4 = 1.0, l9 = 1.0;
    for (int k = 0; k < 6; ++k) {
      fact *= k + 1;
      l4 *= kLn4;
      l9 *= kLn9;
      a[k] = (16.0 * l4 - 9.0 * l9) / fact;
      b[k] = -8.0 * l4 / fact;
    }
  }
};

const RhoSeries& rho_series() {
  static const RhoSeries s;
  return s;
}

}  // namespace

double rho(double d) {
  check_rho_domain(d);
  const double h = d - 0.5;
  if (std::abs(h) < 1e-4) {
    const auto& s = rho_series();
    double num = 0.0, den = 0.0;
    for (int k = 5; k >= 0; --k) {
      num = num * h + s.a[k];
      den = den * h + s.b[k];
    }
    return num / den;
  }
  if (std::abs(h) >= 0.25) {
    // Same ratio in H = d + 1/2; exact at H = 0 and H = 1/2.
    const double t4 = std::exp2(2.0 * d + 1.0), t9 = std::pow(3.0, 2.0 * d + 1.0);
    return (4.0 * t4 - t9 - 7.0) / (8.0 - 2.0 * t4);
  }
  const double e4 = std::expm1(h * kLn4), e9 = std::expm1(h * kLn9);
  return (16.0 * e4 - 9.0 * e9) / (-8.0 * e4);
}

double rho_prime(double d) {
  check_rho_domain(d);
  const double h = d - 0.5;
  if (std::abs(h) < 1e-4) {
    const auto& s = rho_series();
    double num = 0.0, den = 0.0, dnum = 0.0, dden = 0.0;
    for (int k = 5; k >= 0; --k) {
      dnum = dnum * h + num;
      dden = dden * h + den;
      num = num * h + s.a[k];
      den = den * h + s.b[k];
    }
    return (dnum * den - num * dden) / (den * den);
  }
  const double e4 = std::expm1(h * kLn4), e9 = std::expm1(h * kLn9);
  const double num = 16.0 * e4 - 9.0 * e9, den = -8.0 * e4;
  const double dnum = 16.0 * kLn4 * (e4 + 1.0) - 9.0 * kLn9 * (e9 + 1.0);
  const double dden = -8.0 * kLn4 * (e4 + 1.0);
  return (dnum * den - num * dden) / (den * den);
}

double lambda0(double d) { return lambda(rho(d)); }

double lambda0_prime(double d) { return lambda_prime(rho(d)) * rho_prime(d); }

Lambda0Inverse lambda0_inv(double x, bool clamp) {
  static const double lo = lambda0(kLambda0DMin);
  static const double hi = lambda0(kLambda0DMax);
  if (!(x > lo && x < hi)) {
    if (!clamp || std::isnan(x))
      throw std::domain_error("lambda0_inv: value outside (lambda0(-0.49), lambda0(1.49))");
    return {x <= lo ? kLambda0DMin : kLambda0DMax, true};
  }
  double d = brent_root([x](double t) { return lambda0(t) - x; }, kLambda0DMin, kLambda0DMax, 1e-14);
  return {d, false};
}

namespace {

// Cov(Z^{(j1)}(s), Z^{(j2)}(t)) as a function of diff = s - t.
double z_cov_lag(const FbmSecondDifferenceKernel& k, double diff) {
  const double h2 = 2.0 * k.hurst();
  if (!(h2 > 0.0 && h2 < 2.0)) throw std::domain_error("z_cov: need H in (0, 1)");
  static constexpr double c[3] = {1.0, -2.0, 1.0};
  double acc = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      // Integer offset added last: rounding residue r gives r^{2H}, which is
      // not small when H is.
      double lag = std::abs(diff + static_cast<double>(a * k.j1 - b * k.j2));
      if (lag > 0.0) acc += c[a] * c[b] * std::pow(lag, h2);
    }
  return -0.5 * acc / (4.0 - std::pow(4.0, k.hurst()));
}

}  // namespace

double z_cov(const FbmSecondDifferenceKernel& k, double s, double t) { return z_cov_lag(k, s - t); }

Eigen::Matrix4d pair_correlation(double d, int i, int j, double tau) {
  if (i < 1 || j < 1) throw std::invalid_argument("pair_correlation: scales must be >= 1");
  // Position = offset + has_tau * tau, kept apart so differences are exact.
  const int offset[4] = {0, i, 0, j};
  const int has_tau[4] = {0, 0, 1, 1};
  const int scale[4] = {i, i, j, j};
  const double h = d + 0.5;
  Eigen::Matrix4d s;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) {
      const double diff = static_cast<double>(has_tau[a] - has_tau[b]) * tau + (offset[a] - offset[b]);
      const double v = z_cov_lag({d, scale[a], scale[b]}, diff) / (std::pow(scale[a], h) * std::pow(scale[b], h));
      s(a, b) = s(b, a) = v;
    }
  return s;
}

}  // namespace irlm
