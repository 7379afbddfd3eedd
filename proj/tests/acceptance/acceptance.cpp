// Acceptance run: one PASS/FAIL line per criterion, exit code 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "irlm/harness.hpp"

using namespace irlm;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double time_limit_s, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail << " [error: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (time_limit_s > 0 && secs > time_limit_s) {
    o.passed = false;
    o.detail << " [runtime " << secs << " s over " << time_limit_s << " s]";
  }
  failures += o.passed ? 0 : 1;
  std::printf("%s criterion %d: %s (%.1f s)%s\n", o.passed ? "PASS" : "FAIL", id, title, secs, o.detail.str().c_str());
  std::fflush(stdout);
}

ScenarioConfig fgn_table1(std::size_t n, std::size_t p) {
  ScenarioConfig c;
  c.model = SpectralModel::fgn(0.5);
  c.n = n;
  c.p = p;
  c.d_values = {-0.4, -0.2, 0.0, 0.2, 0.4};
  c.replicates = 100;
  c.seed = 2010;
  return c;
}

}  // namespace

int main() {
  const double pi = std::numbers::pi;

  criterion(1, "exact small cases", 1.0, [](Outcome& o) {
    o.require(psi(1, 1) == 1.0 && psi(1, -1) == 0.0 && std::abs(psi(2, -1) - 1.0 / 3) < 1e-12, "psi table");
    std::vector<double> line(100);
    for (std::size_t t = 0; t < line.size(); ++t) line[t] = static_cast<double>(t + 1);
    o.require(std::abs(ir_statistic(line, 1) - 1.0) < 1e-12, "IR of a line");
    o.require(std::abs(ir_statistic(std::vector<double>{1, -1, 1, -1, 1, -1, 1}, 1)) < 1e-12, "alternating");
    const double v = ir_statistic(std::vector<double>{0, 1, 0, 2, 0, 3, 0}, 1);
    o.detail << " IR(0,1,0,2,0,3,0)=" << v;
    o.require(std::abs(v - 2.0 / 15) < 1e-12, "2/15 case");
  });

  criterion(2, "transfer functions", 5.0, [&](Outcome& o) {
    o.require(rho(0.0) == -0.5, "rho(0)");
    o.require(std::abs(rho(-0.5) + 2.0 / 3) < 1e-15, "rho(-0.5)");
    o.require(std::abs(lambda(0.0) - (0.5 + std::log(2.0) / pi)) < 1e-12, "Lambda(0)");
    double inv_err = 0, der_err = 0;
    for (int k = 0; k < 50; ++k) {
      const double d = -0.48 + 1.95 * k / 49.0;
      inv_err = std::max(inv_err, std::abs(lambda0_inv(lambda0(d)).d - d));
      const double h = 1e-5;
      const double fd = (lambda0(d + h) - lambda0(d - h)) / (2 * h);
      der_err = std::max(der_err, std::abs(lambda0_prime(d) / fd - 1));
    }
    o.detail << " max inverse error " << inv_err << ", max derivative rel. error " << der_err;
    o.require(inv_err < 1e-9, "inverse round trip");
    o.require(der_err < 1e-5, "derivative");
  });

  criterion(3, "Monte Carlo mean of IR against the exact mean", 120.0, [](Outcome& o) {
    const std::size_t n = 10000, reps = 200;
    int cell = 0;
    for (double d : {-0.4, 0.0, 0.4}) {
      const auto model = SpectralModel::fgn(d + 0.5);
      std::vector<std::vector<double>> ir(2);
      for (std::size_t r = 0; r < reps; ++r) {
        RngStream rng(303, (static_cast<std::uint64_t>(cell) << 32) | r);
        const auto x = generate(model, n, rng);
        ir[0].push_back(ir_statistic(x.values, 5));
        ir[1].push_back(ir_statistic(x.values, 20));
      }
      for (int k = 0; k < 2; ++k) {
        const std::size_t m = k == 0 ? 5 : 20;
        double mean = 0, var = 0;
        for (double v : ir[k]) mean += v;
        mean /= reps;
        for (double v : ir[k]) var += (v - mean) * (v - mean);
        const double se = std::sqrt(var / (reps - 1) / reps);
        const double target = expected_ir(model, m).expected_ir;
        const double z = (mean - target) / se;
        o.detail << " d=" << d << ",m=" << m << ":z=" << std::round(z * 100) / 100;
        o.require(std::abs(z) < 4, "d=" + std::to_string(d) + " m=" + std::to_string(m));
      }
      ++cell;
    }
  });

  criterion(4, "expansion integrals and constants", 60.0, [&](Outcome& o) {
    o.require(std::abs(j_integral(0, 1, 4) - pi / 2) < 1e-10, "J4(0,1)");
    o.require(std::abs(j_integral(0, 1, 6) - 3 * pi / 8) < 1e-10, "J6(0,1)");
    for (double a : {-0.4, 0.4}) {
      const double r = j_integral(a, 512, 4) / (*lemma_constants(a).c41 * std::pow(512.0, 1 - a));
      o.detail << " J4 ratio(a=" << a << ")=" << r;
      o.require(std::abs(r - 1) < 0.02, "J4 ratio a=" + std::to_string(a));
    }
    const double c = *lemma_constants(1.0).c42p;
    const double direct = j_integral(1.0, 4096, 4) - 1.5 * std::log(4096.0);
    o.detail << " C'42=" << c << " (J4(1,4096)-1.5 log 4096=" << direct << ")";
    o.require(std::abs(c - 2.34) < 0.005, "C'42 = 2.34 to two decimals");
  });

  criterion(5, "covariance consistency", 600.0, [](Outcome& o) {
    for (double d : {-0.4, 0.0, 0.4}) {
      const auto c = pair_correlation(d, 1, 1, 3.0);
      o.require(std::abs(c(0, 1) - rho(d)) < 1e-10, "corr(Z(0),Z(1)) at d=" + std::to_string(d));
    }
    ValidationOptions vo;
    for (const auto& chk : validate_asymptotics(vo)) {
      if (chk.name.rfind("sigma_11", 0) != 0) continue;
      o.detail << " " << chk.detail << ";";
      o.require(chk.passed, chk.name);
    }
    const auto& table = cached_table(default_table_path());
    double min_eig = 1e300;
    for (const auto& g : table.gamma) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    o.detail << " smallest Gamma eigenvalue over " << table.gamma.size() << " points: " << min_eig;
    o.require(min_eig > 0, "Gamma positive definite");
  });

  // Criteria 6, 7 and 9 share the fGn runs.
  MCSummary small, large;
  criterion(6, "fGn accuracy and test level", 1800.0, [&](Outcome& o) {
    small = run_scenario(fgn_table1(1000, 10));
    large = run_scenario(fgn_table1(10000, 15));
    o.detail << " N=1000: sqrt_mse=" << small.pooled.sqrt_mse << " accept=" << small.pooled.acceptance
             << "; N=10000: sqrt_mse=" << large.pooled.sqrt_mse << " accept=" << large.pooled.acceptance;
    o.require(!small.batch_failed && !large.batch_failed, "batch failures");
    o.require(small.pooled.sqrt_mse >= 0.05 && small.pooled.sqrt_mse <= 0.15, "sqrt_mse N=1000 in [0.05, 0.15]");
    o.require(large.pooled.sqrt_mse <= 0.04, "sqrt_mse N=10000 <= 0.04");
    for (const auto* s : {&small, &large})
      o.require(s->pooled.acceptance >= 0.80 && s->pooled.acceptance <= 0.99,
                "acceptance N=" + std::to_string(s->n) + " in [0.80, 0.99]");
  });

  criterion(7, "adaptive window against d", 0.0, [&](Outcome& o) {
    if (large.cells.size() != 5) {
      o.require(false, "criterion 6 run missing");
      return;
    }
    bool decreasing = true;
    for (std::size_t k = 0; k < large.cells.size(); ++k) {
      o.detail << " " << large.cells[k].mean_m_tilde;
      if (k > 0 && large.cells[k].mean_m_tilde >= large.cells[k - 1].mean_m_tilde) decreasing = false;
    }
    o.require(decreasing, "mean m decreasing in d");
    o.require(large.cells.front().mean_m_tilde > 2 * large.cells.back().mean_m_tilde, "m(-0.4) > 2 m(0.4)");
  });

  criterion(8, "robustness to a trend and to uniform innovations", 900.0, [](Outcome& o) {
    ScenarioConfig trend;
    trend.model = SpectralModel::fgn(0.7);
    trend.model.contamination.trend_slope = 10.0 / 10000.0;
    trend.n = 10000;
    trend.d_values = {0.2};
    trend.replicates = 100;
    trend.seed = 505;
    const auto a = run_scenario(trend);

    ScenarioConfig uni;
    uni.model = SpectralModel::farima(0.0);
    uni.model.contamination.innovation = InnovationLaw::kUniform;
    uni.n = 10000;
    uni.d_values = {0.0};
    uni.replicates = 100;
    uni.seed = 506;
    const auto b = run_scenario(uni);
    o.detail << " trend: sqrt_mse=" << a.pooled.sqrt_mse << " (p=" << a.p << "); uniform: sqrt_mse="
             << b.pooled.sqrt_mse;
    o.require(!a.batch_failed && a.pooled.sqrt_mse <= 0.05, "trend sqrt_mse <= 0.05");
    o.require(!b.batch_failed && b.pooled.sqrt_mse <= 0.06, "uniform sqrt_mse <= 0.06");
  });

  criterion(9, "distribution of standardized errors and of T", 0.0, [&](Outcome& o) {
    if (large.cells.size() != 5) {
      o.require(false, "criterion 6 run missing");
      return;
    }
    std::vector<double> z;
    double tsum = 0;
    int count = 0;
    for (const auto& r : large.records) {
      if (!r.ok || r.d != 0.2) continue;
      z.push_back((r.d_ir - r.d) / r.asymptotic_sd);
      tsum += r.test_stat;
      ++count;
    }
    const auto ks = ks_test_normal(z);
    const double tmean = tsum / count;
    const double dof = static_cast<double>(large.p - 1);
    o.detail << " KS D=" << ks.statistic << " p=" << ks.p_value << "; mean T=" << tmean << " for " << dof << " dof";
    o.require(ks.p_value > 0.01, "KS at 1%");
    o.require(tmean >= 0.7 * dof && tmean <= 1.3 * dof, "mean T in [0.7, 1.3](p-1)");
  });

  criterion(10, "single estimate at N=100000, p=17", 0.0, [](Outcome& o) {
    RngStream rng(1010, 0);
    const auto x = generate(SpectralModel::fgn(0.8), 100000, rng);
    (void)cached_table(default_table_path());
    const auto t0 = Clock::now();
    EstimateOptions eo;
    eo.p = 17;
    const auto r = estimate(x.values, eo);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    o.detail << " estimate() " << secs << " s, d_ir=" << r.d_ir;
    o.require(secs < 2.0, "under 2 s");
  });

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
