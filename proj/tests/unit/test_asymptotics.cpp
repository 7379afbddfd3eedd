#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "irlm/asymptotics.hpp"

using namespace irlm;
using doctest::Approx;

namespace {

const AsymptoticTable& small_table() {
  static const AsymptoticTable t = [] {
    TableBuildSpec spec;
    spec.p_max = 3;
    spec.d_step = 0.09;
    return build_table(spec);
  }();
  return t;
}

}  // namespace

TEST_CASE("rho and Lambda closed values") {
  CHECK(rho(0.0) == -0.5);
  CHECK(rho(-0.5) == -2.0 / 3);
  CHECK(rho(0.5) == Approx(-0.21693).epsilon(1e-4));
  CHECK(std::abs(lambda(0.0) - (0.5 + std::log(2.0) / std::numbers::pi)) < 1e-12);
  CHECK(lambda(-0.5) == Approx(0.5881013796152294).epsilon(1e-12));
  CHECK(lambda0(0.0) == Approx(lambda(-0.5)).epsilon(1e-15));
  CHECK(lambda(1.0) == 1.0);
  CHECK(lambda(-1.0) == 0.0);
  CHECK(lambda(0.999999) == Approx(1.0).epsilon(1e-3));
}

TEST_CASE("rho is smooth across the series branch") {
  for (double d : {0.49999, 0.5, 0.50001})
    CHECK(rho(d) == Approx((rho(d - 1e-3) + rho(d + 1e-3)) / 2).epsilon(1e-6));
}

TEST_CASE("Lambda0 inverse and derivative") {
  for (int k = 0; k < 50; ++k) {
    const double d = -0.48 + 1.95 * k / 49.0;
    CHECK(std::abs(lambda0_inv(lambda0(d)).d - d) < 1e-9);
    const double h = 1e-5;
    const double fd = (lambda0(d + h) - lambda0(d - h)) / (2 * h);
    CHECK(lambda0_prime(d) == Approx(fd).epsilon(1e-5));
  }
  const auto lo = lambda0_inv(0.1);
  CHECK(lo.clamped);
  CHECK(lo.d == kLambda0DMin);
  CHECK(lambda0_inv(1.0).d == kLambda0DMax);
  CHECK_THROWS_AS(lambda0_inv(1.0, false), std::domain_error);
}

TEST_CASE("second-difference kernel") {
  for (double d : {-0.4, 0.0, 0.4}) {
    const auto c = pair_correlation(d, 1, 1, 5.0);
    CHECK(std::abs(c(0, 1) - rho(d)) < 1e-10);
    FbmSecondDifferenceKernel k{d, 1, 1};
    CHECK(z_cov(k, 0, 0) == Approx(1.0));
    if (d == 0.0) {
      CHECK(z_cov(k, 0, 3) == 0.0);
      continue;
    }
    // Decays like |t|^{2H-4}.
    const double r50 = z_cov(k, 0, 50), r100 = z_cov(k, 0, 100);
    CHECK(r100 / r50 == Approx(std::pow(2.0, 2 * (d + 0.5) - 4)).epsilon(1e-2));
  }
  FbmSecondDifferenceKernel k2{0.2, 2, 2};
  CHECK(z_cov(k2, 0, 0) == Approx(std::pow(2.0, 1.4)));
}

TEST_CASE("psi pair expectation: cubature against Monte Carlo") {
  RngStream rng(4, 4);
  for (double tau : {0.5, 1.7, 3.0}) {
    const auto c = pair_correlation(0.2, 1, 2, tau);
    const double v = psi_pair_expectation(c).value;
    const auto mc = psi_pair_expectation_mc(c, 400000, rng);
    CHECK(std::abs(v - mc.value) < 4 * mc.std_error);
  }
  CubatureRule adaptive;
  adaptive.adaptive = true;
  const auto c = pair_correlation(0.2, 1, 1, 0.5);
  CHECK(psi_pair_expectation(c).value == Approx(psi_pair_expectation(c, adaptive).value).epsilon(1e-9));
}

TEST_CASE("psi pair expectation on singular correlations") {
  // tau = 0 repeats the first pair, giving E[psi^2] at correlation -1/2
  // (angular integral evaluated separately).
  const auto v = psi_pair_expectation(pair_correlation(0.0, 1, 1, 0.0));
  CHECK(v.regularized);
  CHECK(v.value == Approx(0.4786637080589725).epsilon(1e-8));
}

TEST_CASE("Hermite far field matches the exact covariance") {
  const double d = 0.1;
  const auto c = pair_correlation(d, 1, 1, 6.0);
  HermiteFarField ff(rho(d));
  const Eigen::Matrix2d l = ff.cholesky();
  const Eigen::Matrix2d cross = l.inverse() * c.block<2, 2>(0, 2) * l.inverse().transpose();
  REQUIRE(cross.cwiseAbs().maxCoeff() < 0.08);
  const double exact = psi_pair_expectation(c).value - lambda0(d) * lambda0(d);
  CHECK(ff.covariance(cross) == Approx(exact).epsilon(1e-3));
}

TEST_CASE("sigma entries") {
  CHECK(sigma_entry(0.0, 1, 1).value == Approx(0.0429442).epsilon(1e-6));
  CHECK(sigma_entry(-0.3, 1, 1).value == Approx(0.0151975).epsilon(1e-6));
  CHECK(sigma_entry(0.0, 1, 2).value == Approx(-0.01129365).epsilon(1e-6));
  CHECK(sigma_entry(0.0, 2, 4).value == Approx(2 * sigma_entry(0.0, 1, 2).value).epsilon(1e-12));
  CHECK(sigma_entry(0.0, 2, 1).value == Approx(sigma_entry(0.0, 1, 2).value).epsilon(1e-10));
  CHECK(sigma2_one_sided(0.3).value == Approx(sigma_entry(0.3, 1, 1).value).epsilon(1e-5));
}

TEST_CASE("sigma by Monte Carlo brackets the cubature value") {
  GammaOptions mc;
  mc.method = GammaMethod::kMonteCarlo;
  mc.mc_samples = 20000;
  mc.tau_max = 8;
  mc.tau_step = 1.0;
  const auto a = sigma2_one_sided(0.0, mc);
  const double exact = sigma_entry(0.0, 1, 1).value;
  CHECK(a.std_error > 0);
  CHECK(std::abs(a.value - exact) < 4 * a.std_error + a.tail_bound);
}

TEST_CASE("Gamma is symmetric and positive definite") {
  for (double d : {-0.45, 0.0, 0.45}) {
    const auto g = gamma_matrix(d, 6);
    CHECK((g.gamma - g.gamma.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.gamma);
    CHECK(es.eigenvalues().minCoeff() > 0);
  }
}

TEST_CASE("table save and load are bit exact") {
  const auto& t = small_table();
  const auto path = std::filesystem::temp_directory_path() / "irlm_table_test";
  save_table(t, path);
  const auto back = load_table(path);
  REQUIRE(back.d_grid.size() == t.d_grid.size());
  REQUIRE(back.gamma_points() == t.gamma_points());
  for (std::size_t k = 0; k < t.d_grid.size(); ++k) {
    CHECK(back.d_grid[k] == t.d_grid[k]);
    CHECK(back.lambda0[k] == t.lambda0[k]);
    CHECK(back.lambda0_prime[k] == t.lambda0_prime[k]);
  }
  for (std::size_t k = 0; k < t.gamma_points(); ++k) CHECK(back.gamma[k] == t.gamma[k]);
}

TEST_CASE("table corruption is detected") {
  const auto path = std::filesystem::temp_directory_path() / "irlm_table_bad";
  save_table(small_table(), path);
  std::string body;
  {
    std::ifstream in(path);
    body.assign(std::istreambuf_iterator<char>(in), {});
  }
  const auto pos = body.rfind("row ");
  body[pos + 6] = body[pos + 6] == '1' ? '2' : '1';
  std::ofstream(path) << body;
  CHECK_THROWS(load_table(path));
}

TEST_CASE("interpolation") {
  const auto& t = small_table();
  for (std::size_t k = 0; k < t.gamma_points(); ++k) {
    const auto v = interpolate(t, t.d_grid[k], 3);
    CHECK(v.gamma == t.gamma[k]);
    CHECK(v.lambda0 == t.lambda0[k]);
  }
  const auto mid = interpolate(t, 0.05, 2);
  CHECK(mid.gamma.rows() == 2);
  CHECK(mid.lambda0 == Approx(lambda0(0.05)).epsilon(1e-5));
  CHECK(mid.gamma(0, 0) == Approx(sigma_entry(0.05, 1, 1).value).epsilon(2e-3));
  CHECK_THROWS(interpolate(t, 0.6, 2));
  CHECK_THROWS(interpolate(t, 0.0, 4));
}

TEST_CASE("tabulated Lambda0 is increasing with a derivative floor") {
  const auto& t = small_table();
  for (std::size_t k = 0; k < t.d_grid.size(); ++k) {
    CHECK(t.lambda0_prime[k] > 0.05);
    if (k > 0) CHECK(t.lambda0[k] > t.lambda0[k - 1]);
  }
}

TEST_CASE("Monte Carlo sigma is stable when the sample count doubles") {
  GammaOptions mc;
  mc.method = GammaMethod::kMonteCarlo;
  mc.mc_samples = 10000;
  mc.tau_max = 8;
  mc.tau_step = 1.0;
  const auto a = sigma_entry(0.1, 1, 2, mc);
  const auto again = sigma_entry(0.1, 1, 2, mc);
  CHECK(a.value == again.value);
  mc.mc_samples = 20000;
  const auto b = sigma_entry(0.1, 1, 2, mc);
  CHECK(std::abs(a.value - b.value) < 3 * std::hypot(a.std_error, b.std_error));
}
