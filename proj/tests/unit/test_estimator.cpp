#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irlm/estimator.hpp"
#include "test_support.hpp"

using namespace irlm;
using doctest::Approx;

namespace {

const AsymptoticTable& synthetic() {
  static const AsymptoticTable t = testing::synthetic_table(20);
  return t;
}

std::vector<double> fgn_sample(double d, std::size_t n, std::uint64_t stream) {
  RngStream rng(77, stream);
  return generate(SpectralModel::fgn(d + 0.5), n, rng).values;
}

double quad(const Eigen::VectorXd& v, double d, const Eigen::MatrixXd& s) {
  const Eigen::VectorXd r = v.array() - d;
  return r.dot(s.ldlt().solve(r));
}

}  // namespace

TEST_CASE("GLS hand cases") {
  Eigen::Vector3d same(0.3, 0.3, 0.3);
  const auto a = gls_estimate(same, Eigen::Matrix3d::Identity());
  CHECK(a.d == Approx(0.3));
  CHECK(a.quad_form == Approx(0.0).scale(1));

  Eigen::Vector3d v(0.1, 0.2, 0.6);
  CHECK(gls_estimate(v, Eigen::Matrix3d::Identity()).d == Approx(0.3));

  const auto b = gls_estimate(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 4).asDiagonal().toDenseMatrix());
  CHECK(b.d == Approx(0.2));
  CHECK(b.weights[0] == Approx(0.8));
  CHECK(b.weights.sum() == Approx(1.0));
}

TEST_CASE("GLS minimizes the quadratic form") {
  RngStream rng(31, 0);
  const Eigen::MatrixXd s = synthetic().gamma[40];
  Eigen::VectorXd v(s.rows());
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = 0.2 + 0.1 * rng.normal();
  const auto g = gls_estimate(v, s);
  CHECK(quad(v, g.d, s) == Approx(g.quad_form).epsilon(1e-10));
  for (int k = 0; k < 200; ++k) CHECK(quad(v, g.d + 0.05 * rng.normal(), s) >= g.quad_form);
}

TEST_CASE("test statistic") {
  const Eigen::MatrixXd s = synthetic().gamma[10].topLeftCorner(4, 4);
  const auto zero = test_statistic(Eigen::Vector4d::Constant(0.1), 0.1, s, 1000, 10);
  CHECK(zero.statistic == 0.0);
  CHECK(zero.p_value == 1.0);

  const Eigen::Vector4d v(0.1, 0.15, 0.05, 0.2);
  const auto g = gls_estimate(v, s);
  const std::size_t n = 10000;
  const double alpha = 3.0 / std::log(10000.0);
  const auto m = static_cast<std::size_t>(std::floor(std::pow(10000.0, alpha)));
  const auto t = test_statistic(v, g.d, s, n, m);
  CHECK(t.statistic == Approx(static_cast<double>(n) / static_cast<double>(m) * g.quad_form).epsilon(1e-12));
  CHECK(t.p_value == Approx(chi2_sf(t.statistic, 3)).epsilon(1e-14));
}

TEST_CASE("scale grid") {
  const auto g = scale_grid(1000, 10);
  CHECK(g.k_values == std::vector<int>{2, 3, 4});
  CHECK(g.m_values == std::vector<std::size_t>{7, 20, 54});
  CHECK(g.alphas[1] == Approx(3.0 / std::log(1000.0)));
  CHECK(scale_grid(100000, 17).k_values.back() == 8);
  CHECK_THROWS_WITH(scale_grid(100, 20), doctest::Contains("too short"));
}

TEST_CASE("adaptive shift") {
  const auto a = adapt_alpha(0.4343, 10, 1000);
  CHECK(a.alpha == Approx(0.5954).epsilon(1e-3));
  CHECK(a.m_raw == 61);
  CHECK(a.m == 33);
  CHECK(a.capped);
  CHECK(adapt_alpha(0.3, 15, 100000).alpha > 0.3);
  const double s3 = adapt_alpha(0.3, 10, 1000).alpha - 0.3;
  const double s8 = adapt_alpha(0.3, 10, 100000000).alpha - 0.3;
  CHECK(s8 < s3);
  CHECK_THROWS(adapt_alpha(0.3, 2, 1000));
}

TEST_CASE("default p") {
  CHECK(default_p(1000) == 10);
  CHECK(default_p(10000) == 13);
  CHECK(default_p(100000) == 17);
}

TEST_CASE("sigma hat scaling") {
  const auto& t = synthetic();
  const auto s = sigma_hat(0.0, 5, t);
  const auto g = interpolate(t, 0.0, 5).gamma;
  const double h = 1e-5;
  const double fd = (lambda0(h) - lambda0(-h)) / (2 * h);
  CHECK((s.sigma.array() / g.array() * fd * fd - 1.0).abs().maxCoeff() < 1e-4);
  CHECK((s.sigma - s.sigma.transpose()).norm() == 0.0);
  CHECK_FALSE(s.flags.gamma_clamped);
  CHECK(sigma_hat(0.8, 5, t).flags.gamma_clamped);
}

TEST_CASE("per-scale estimates") {
  std::vector<double> line(2000);
  for (std::size_t k = 0; k < line.size(); ++k) line[k] = static_cast<double>(k);
  const auto c = d_hat(line, 3, 4);
  CHECK(c.flags.clamped_inversion);
  for (Eigen::Index k = 0; k < 4; ++k) CHECK(c.d[k] == kLambda0DMax);

  const auto x = fgn_sample(0.2, 10000, 1);
  const auto e = d_hat(x, 5, 5);
  CHECK(e.d[0] == lambda0_inv(ir_statistic(x, 5)).d);
  for (Eigen::Index k = 0; k < 5; ++k) CHECK(std::abs(e.d[k] - 0.2) < 0.1);
  CHECK_THROWS(d_hat(x, 1000, 5));
}

TEST_CASE("alpha selection") {
  const auto x = fgn_sample(0.0, 1000, 2);
  const auto sel = select_alpha(x, 10, synthetic());
  REQUIRE(sel.grid.size() == 3);
  // m = 54 breaks n - 3pm >= 1.
  CHECK(sel.grid[0].feasible);
  CHECK(sel.grid[1].feasible);
  CHECK_FALSE(sel.grid[2].feasible);
  double best = 1e300;
  for (const auto& g : sel.grid)
    if (g.feasible) best = std::min(best, g.q);
  for (const auto& g : sel.grid)
    if (g.m == sel.m) CHECK(g.q == best);

  // n = 160, p = 3: only k = 2..3 and m = 20 fails n - 3pm >= 1.
  const auto y = fgn_sample(0.0, 160, 3);
  const auto one = select_alpha(y, 3, synthetic());
  CHECK(one.m == 7);
  CHECK_FALSE(one.grid.back().feasible);
}

TEST_CASE("pipeline on the synthetic table") {
  const auto x = fgn_sample(0.2, 5000, 4);
  EstimateOptions opt;
  opt.table = &synthetic();
  const auto r = estimate(x, opt);
  CHECK(r.p == default_p(5000));
  CHECK(r.per_scale_d.size() == static_cast<Eigen::Index>(r.p));
  CHECK(r.m_tilde >= 7);
  CHECK(r.alpha_tilde > r.alpha_hat);
  CHECK(r.test_stat >= 0);
  CHECK(r.p_value >= 0);
  CHECK(r.p_value <= 1);
  CHECK(r.asymptotic_sd > 0);
  CHECK(std::abs(r.d_ir - 0.2) < 0.15);

  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = -2.0 * x[k] + 7.0;
  const auto s = estimate(y, opt);
  CHECK(s.d_ir == Approx(r.d_ir).epsilon(1e-9));
  CHECK(s.test_stat == Approx(r.test_stat).epsilon(1e-7));
  CHECK(s.m_tilde == r.m_tilde);
}

TEST_CASE("pipeline errors name the stage") {
  const auto x = fgn_sample(0.0, 1000, 5);
  EstimateOptions opt;
  opt.table = &synthetic();
  opt.p = 2;
  try {
    (void)estimate(x, opt);
    FAIL("expected an error");
  } catch (const EstimationError& e) {
    CHECK(e.stage() == "configuration");
  }
  opt.p = 10;
  try {
    (void)estimate(std::vector<double>(50, 1.0), opt);
    FAIL("expected an error");
  } catch (const EstimationError& e) {
    CHECK(e.stage() == "select_alpha");
  }
}

TEST_CASE("trend is clamped with the shipped table") {
  std::vector<double> line(3000);
  for (std::size_t k = 0; k < line.size(); ++k) line[k] = static_cast<double>(k + 1);
  const auto r = estimate(line);
  CHECK(r.d_ir == kLambda0DMax);
  CHECK(r.flags.clamped_inversion);
  CHECK(r.flags.gamma_clamped);
}
