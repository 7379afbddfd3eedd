#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "irlm/asymptotics.hpp"
#include "irlm/ir_core.hpp"

using namespace irlm;
using doctest::Approx;

namespace {

// O(N m) re-summation of the block increments.
double naive_ir(const std::vector<double>& x, std::size_t m) {
  const std::size_t n = x.size();
  auto block = [&](std::size_t k) {
    double s = 0;
    for (std::size_t t = k + 1; t <= k + m; ++t) s += x[t + m - 1] - x[t - 1];
    return s;
  };
  double acc = 0;
  for (std::size_t k = 0; k + 3 * m < n; ++k) acc += psi(block(k), block(k + m));
  return acc / static_cast<double>(n - 3 * m);
}

double c41(double a) {
  const double pi = std::numbers::pi;
  return pi * (1 - std::pow(2.0, -1 - a)) / ((1 - a) * std::tgamma(1 - a) * std::sin((1 - a) * pi / 2));
}

}  // namespace

TEST_CASE("psi") {
  CHECK(psi(1, 1) == 1.0);
  CHECK(psi(1, -1) == 0.0);
  CHECK(psi(2, -1) == Approx(1.0 / 3).epsilon(1e-15));
  CHECK(psi(0, 0) == 1.0);
  CHECK(psi(-3, 0) == 1.0);
}

TEST_CASE("exact small series") {
  std::vector<double> line(50);
  for (std::size_t t = 0; t < line.size(); ++t) line[t] = static_cast<double>(t + 1);
  CHECK(std::abs(ir_statistic(line, 1) - 1.0) < 1e-12);
  CHECK(std::abs(ir_statistic(std::vector<double>{1, -1, 1, -1, 1, -1, 1}, 1)) < 1e-12);
  CHECK(std::abs(ir_statistic(std::vector<double>{0, 1, 0, 2, 0, 3, 0}, 1) - 2.0 / 15) < 1e-12);
  CHECK_THROWS(ir_statistic(std::vector<double>{1, 2, 3}, 1));
}

TEST_CASE("profile") {
  std::vector<double> line(40);
  for (std::size_t t = 0; t < line.size(); ++t) line[t] = static_cast<double>(t);
  const auto prof = ir_profile(line, 2, 3);
  REQUIRE(prof.values.size() == 3);
  for (double v : prof.values) CHECK(v == Approx(1.0));

  RngStream rng(1, 0);
  std::vector<double> x(500);
  rng.fill_normal(x);
  CHECK(ir_profile(x, 4, 5).values[0] == ir_statistic(x, 4));
  CHECK_THROWS(ir_profile(x, 40, 5));
  CHECK_THROWS(ir_profile(x, 4, 1));
}

TEST_CASE("feasibility") {
  CHECK(profile_feasible(1000, 7, 10));
  CHECK_FALSE(profile_feasible(100, 10, 5));
  CHECK(max_feasible_window(1000, 10) == 33);
  CHECK(max_feasible_window(10, 10) == 0);
}

TEST_CASE("sliding windows match naive sums") {
  RngStream rng(8, 2);
  std::vector<double> x(3000);
  rng.fill_normal(x);
  for (std::size_t t = 1; t < x.size(); ++t) x[t] += 0.7 * x[t - 1];
  for (std::size_t m : {1, 2, 5, 17, 60}) CHECK(std::abs(ir_statistic(x, m) - naive_ir(x, m)) < 1e-12);
  IncrementSums sums(x);
  CHECK(std::abs(sums.ir(17) - naive_ir(x, 17)) < 1e-12);
}

TEST_CASE("affine invariance") {
  RngStream rng(8, 3);
  std::vector<double> x(2000), y(2000);
  rng.fill_normal(x);
  for (std::size_t t = 0; t < x.size(); ++t) y[t] = -3.5 * x[t] + 1e4;
  for (std::size_t m : {1, 9, 30}) CHECK(ir_statistic(y, m) == Approx(ir_statistic(x, m)).epsilon(1e-10));
}

TEST_CASE("expected IR oracle") {
  const auto w = expected_ir(SpectralModel::fgn(0.5), 1);
  CHECK(w.j4 / w.j6 == Approx(4.0 / 3).epsilon(1e-10));
  CHECK(w.ratio == Approx(-0.5).epsilon(1e-10));
  // Angular integral of psi at correlation -1/2, evaluated separately.
  CHECK(w.expected_ir == Approx(0.5881013796152294).epsilon(1e-12));
  CHECK(w.expected_ir == Approx(lambda(-0.5)).epsilon(1e-12));

  const auto far = expected_ir(SpectralModel::fgn(0.7), 512);
  CHECK(std::abs(far.ratio - rho(0.2)) < 1e-3);

  for (const auto& m : {SpectralModel::farima(0.3), SpectralModel::power_law(-0.3, 0.5), SpectralModel::fgn(0.9)}) {
    const auto r = expected_ir(m, 7);
    CHECK(r.ratio > -1.0);
    CHECK(r.ratio < 1.0);
  }
}

TEST_CASE("bias sign for the power-law model") {
  for (double d : {0.1, 0.3})
    for (std::size_t m : {32, 100, 400}) {
      const auto model = SpectralModel::power_law(d, 0.8);
      CHECK(expected_ir(model, m).expected_ir < lambda0(d));
    }
}

TEST_CASE("j integrals") {
  const double pi = std::numbers::pi;
  CHECK(std::abs(j_integral(0, 1, 4) - pi / 2) < 1e-10);
  CHECK(std::abs(j_integral(0, 1, 6) - 3 * pi / 8) < 1e-10);
  double prev = 1e9;
  for (std::size_t m : {128, 256, 512}) {
    const double gap = std::abs(j_integral(0.4, m, 4) / (c41(0.4) * std::pow(m, 0.6)) - 1);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 0.02);
  CHECK(j_integral(-0.4, 512, 4) / (c41(-0.4) * std::pow(512.0, 1.4)) == Approx(1.0).epsilon(0.02));
}

TEST_CASE("expansion constants") {
  const auto c0 = lemma_constants(0.0);
  REQUIRE(c0.c42);
  CHECK(std::abs(*c0.c42) < 1e-10);
  CHECK(*c0.c41 == Approx(c41(0.0)));
  CHECK(*c0.c62 == Approx(5.0 / 6 * *c0.c42).scale(1e-12));

  // Away from a = 0 the constant term is checked against J4 itself.
  for (double a : {-0.4, 0.4}) {
    const auto c = lemma_constants(a);
    REQUIRE(c.c41);
    REQUIRE(c.c42);
    CHECK(*c.c41 == Approx(c41(a)).epsilon(1e-10));
    const double rest = j_integral(a, 4096, 4) - *c.c41 * std::pow(4096.0, 1 - a);
    CHECK(rest == Approx(*c.c42).epsilon(0.005));
  }

  const auto c1 = lemma_constants(1.0);
  CHECK(*c1.c41p == 1.5);
  CHECK(*c1.c61p == 1.25);
  // 1.5 (1 + Euler gamma) + log 2, from the direct large-m limit.
  CHECK(*c1.c42p == Approx(1.5 * (1 + std::numbers::egamma) + std::log(2.0)).epsilon(1e-7));
  CHECK(*c1.c42p == Approx(j_integral(1.0, 4096, 4) - 1.5 * std::log(4096.0)).epsilon(1e-3));
  CHECK_FALSE(c1.c41);

  const auto c2 = lemma_constants(1.5);
  REQUIRE(c2.c41pp);
  CHECK(*c2.c61pp == Approx(5.0 / 6 * *c2.c41pp));
}
