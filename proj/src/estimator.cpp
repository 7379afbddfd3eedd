#include "irlm/estimator.hpp"

#include <algorithm>
#include <cmath>

namespace irlm {

namespace {

ScaleEstimates invert_profile(const IncrementSums& sums, std::size_t m, std::size_t p) {
  if (!profile_feasible(sums.size(), m, p))
    throw std::invalid_argument("d_hat: infeasible scales m=" + std::to_string(m) + ", p=" + std::to_string(p) +
                                " for n=" + std::to_string(sums.size()));
  ScaleEstimates out;
  out.d.resize(static_cast<Eigen::Index>(p));
  for (std::size_t j = 1; j <= p; ++j) {
    const auto inv = lambda0_inv(sums.ir(j * m));
    out.d[static_cast<Eigen::Index>(j - 1)] = inv.d;
    out.flags.clamped_inversion |= inv.clamped;
  }
  return out;
}

struct Fit {
  Eigen::VectorXd d;
  GlsResult gls;
  SigmaHat sigma;
};

Fit fit_at(const IncrementSums& sums, std::size_t m, std::size_t p, const AsymptoticTable& table) {
  Fit f;
  auto est = invert_profile(sums, m, p);
  f.d = std::move(est.d);
  f.sigma = sigma_hat(f.d[0], p, table);
  f.sigma.flags.merge(est.flags);
  f.gls = gls_estimate(f.d, f.sigma.sigma);
  f.sigma.flags.jittered |= f.gls.jittered;
  return f;
}

}  // namespace

ScaleEstimates d_hat(std::span<const double> series, std::size_t m, std::size_t p) {
  return invert_profile(IncrementSums(series), m, p);
}

ScaleEstimates d_hat(const IRProfile& profile) {
  ScaleEstimates out;
  out.d.resize(static_cast<Eigen::Index>(profile.values.size()));
  for (std::size_t j = 0; j < profile.values.size(); ++j) {
    const auto inv = lambda0_inv(profile.values[j]);
    out.d[static_cast<Eigen::Index>(j)] = inv.d;
    out.flags.clamped_inversion |= inv.clamped;
  }
  return out;
}

SigmaHat sigma_hat(double d_ref, std::size_t p, const AsymptoticTable& table) {
  if (p < 1) throw std::invalid_argument("sigma_hat: p must be >= 1");
  if (static_cast<int>(p) > table.p_max)
    throw std::invalid_argument("sigma_hat: p=" + std::to_string(p) + " exceeds table p_max=" +
                                std::to_string(table.p_max));
  SigmaHat out;
  const double lo = table.d_min, hi = table.gamma_d_max();
  double d_gamma = d_ref;
  if (d_gamma < lo || d_gamma > hi) {
    d_gamma = std::clamp(d_gamma, lo, hi);
    out.flags.gamma_clamped = true;
  }
  const double d_lp = std::clamp(d_ref, kLambda0DMin, kLambda0DMax);
  const double lp = lambda0_prime(d_lp);
  const auto interp = interpolate(table, d_gamma, static_cast<int>(p));
  out.sigma = interp.gamma / (lp * lp);
  return out;
}

GlsResult gls_estimate(const Eigen::VectorXd& d_vec, const Eigen::MatrixXd& sigma) {
  const Eigen::Index p = d_vec.size();
  if (p < 1 || sigma.rows() != p || sigma.cols() != p)
    throw std::invalid_argument("gls_estimate: dimension mismatch");
  GlsResult out;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);
  const auto s_one = spd_solve(sigma, ones);
  const double denom = ones.dot(s_one.x);
  if (!(denom > 0.0) || !std::isfinite(denom)) throw std::runtime_error("gls_estimate: singular covariance");
  out.weights = s_one.x / denom;
  out.d = out.weights.dot(d_vec);
  const Eigen::VectorXd r = d_vec.array() - out.d;
  const auto s_r = spd_solve(sigma, r);
  out.quad_form = std::max(0.0, r.dot(s_r.x));
  out.jittered = s_one.jittered || s_r.jittered;
  return out;
}

TestResult test_statistic(const Eigen::VectorXd& d_vec, double d, const Eigen::MatrixXd& sigma, std::size_t n,
                          std::size_t m) {
  if (d_vec.size() < 2) throw std::invalid_argument("test_statistic: need p >= 2");
  if (m < 1) throw std::invalid_argument("test_statistic: m must be >= 1");
  const Eigen::VectorXd r = d_vec.array() - d;
  const auto s = spd_solve(sigma, r);
  TestResult out;
  out.statistic = std::max(0.0, static_cast<double>(n) / static_cast<double>(m) * r.dot(s.x));
  out.p_value = chi2_sf(out.statistic, static_cast<double>(d_vec.size() - 1));
  out.jittered = s.jittered;
  return out;
}

ScaleGrid scale_grid(std::size_t n, std::size_t p) {
  if (n < 2 || p < 1) throw std::invalid_argument("scale_grid: need n >= 2 and p >= 1");
  const double ln = std::log(static_cast<double>(n));
  const int kmax = static_cast<int>(std::floor(std::log(static_cast<double>(n) / static_cast<double>(p))));
  if (kmax < 2)
    throw std::invalid_argument("scale_grid: series too short (n/p=" +
                                std::to_string(static_cast<double>(n) / static_cast<double>(p)) +
                                " must exceed e^2)");
  ScaleGrid g;
  for (int k = 2; k <= kmax; ++k) {
    g.k_values.push_back(k);
    g.alphas.push_back(k / ln);
    g.m_values.push_back(static_cast<std::size_t>(std::floor(std::exp(static_cast<double>(k)))));
  }
  return g;
}

namespace {

AlphaSelection select_on(const IncrementSums& sums, std::size_t p, const AsymptoticTable& table) {
  const auto grid = scale_grid(sums.size(), p);
  AlphaSelection out;
  int best = -1;
  int last_feasible = -1;
  for (std::size_t k = 0; k < grid.k_values.size(); ++k) {
    GridPoint gp;
    gp.alpha = grid.alphas[k];
    gp.m = grid.m_values[k];
    gp.feasible = profile_feasible(sums.size(), gp.m, p);
    if (gp.feasible) {
      auto f = fit_at(sums, gp.m, p, table);
      gp.q = f.gls.quad_form;
      gp.d_gls = f.gls.d;
      out.flags.merge(f.sigma.flags);
      last_feasible = static_cast<int>(k);
      // Strict comparison keeps the smaller alpha on ties.
      if (best < 0 || gp.q < out.grid[static_cast<std::size_t>(best)].q) best = static_cast<int>(k);
    }
    out.grid.push_back(gp);
  }
  if (best < 0) throw std::invalid_argument("select_alpha: no feasible grid point");
  out.alpha = out.grid[static_cast<std::size_t>(best)].alpha;
  out.m = out.grid[static_cast<std::size_t>(best)].m;
  out.flags.grid_boundary = best == last_feasible && last_feasible > 0;
  return out;
}

}  // namespace

AlphaSelection select_alpha(std::span<const double> series, std::size_t p, const AsymptoticTable& table) {
  return select_on(IncrementSums(series), p, table);
}

AdaptedScale adapt_alpha(double alpha_hat, std::size_t p, std::size_t n) {
  if (p < 3) throw std::invalid_argument("adapt_alpha: p must be >= 3");
  if (!(alpha_hat > 0.0 && alpha_hat < 1.0)) throw std::invalid_argument("adapt_alpha: alpha must lie in (0, 1)");
  if (n < 16) throw std::invalid_argument("adapt_alpha: n too small");
  const double ln = std::log(static_cast<double>(n));
  AdaptedScale out;
  out.alpha = alpha_hat + 6.0 * alpha_hat / (static_cast<double>(p - 2) * (1.0 - alpha_hat)) * std::log(ln) / ln;
  out.m_raw = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), out.alpha)));
  out.m = out.m_raw;
  const std::size_t cap = max_feasible_window(n, p);
  if (out.m > cap) {
    out.m = cap;
    out.capped = true;
  }
  return out;
}

std::size_t default_p(std::size_t n) {
  if (n < 2) throw std::invalid_argument("default_p: n must be >= 2");
  return static_cast<std::size_t>(std::floor(1.5 * std::log(static_cast<double>(n))));
}

EstimationReport estimate(std::span<const double> series, const EstimateOptions& opt) {
  EstimationReport r;
  r.n = series.size();
  const AsymptoticTable* table = opt.table;
  try {
    r.p = opt.p == 0 ? default_p(r.n) : opt.p;
    if (r.p < 3) throw std::invalid_argument("p must be >= 3 (the adaptive scale shift divides by p - 2)");
    for (double v : series)
      if (!std::isfinite(v)) throw std::invalid_argument("series contains non-finite values");
  } catch (const std::exception& e) {
    throw EstimationError("configuration", e.what());
  }
  try {
    if (!table) table = &cached_table(default_table_path());
  } catch (const std::exception& e) {
    throw EstimationError("table", e.what());
  }

  IncrementSums sums(series);
  AlphaSelection sel;
  try {
    sel = select_on(sums, r.p, *table);
  } catch (const std::exception& e) {
    throw EstimationError("select_alpha", e.what());
  }
  r.alpha_hat = sel.alpha;
  r.m_hat = sel.m;
  r.grid = sel.grid;
  r.flags = sel.flags;
  for (const auto& g : sel.grid)
    if (g.m == sel.m) r.gls_d = g.d_gls;

  AdaptedScale ad;
  try {
    ad = adapt_alpha(sel.alpha, r.p, r.n);
    if (ad.m < 1) throw std::invalid_argument("no feasible window after adaptation");
  } catch (const std::exception& e) {
    throw EstimationError("adapt_alpha", e.what());
  }
  r.alpha_tilde = ad.alpha;
  r.m_tilde = ad.m;
  r.m_tilde_raw = ad.m_raw;
  r.flags.m_capped = ad.capped;

  Fit f;
  try {
    f = fit_at(sums, r.m_tilde, r.p, *table);
  } catch (const std::exception& e) {
    throw EstimationError("gls", e.what());
  }
  r.per_scale_d = f.d;
  r.sigma_hat = f.sigma.sigma;
  r.flags.merge(f.sigma.flags);
  r.d_ir = f.gls.d;
  if (r.d_ir < kLambda0DMin || r.d_ir > kLambda0DMax) {
    r.d_ir = std::clamp(r.d_ir, kLambda0DMin, kLambda0DMax);
    r.flags.clamped_inversion = true;
  }

  try {
    const auto t = test_statistic(r.per_scale_d, r.d_ir, r.sigma_hat, r.n, r.m_tilde);
    r.test_stat = t.statistic;
    r.p_value = t.p_value;
    r.flags.jittered |= t.jittered;

    // Lambda0'(d)^{-1} (J' Gamma^{-1} J)^{-1/2} sqrt(m/n) at d = d_ir.
    const auto at = sigma_hat(r.d_ir, r.p, *table);
    const double lp = lambda0_prime(r.d_ir);
    const Eigen::MatrixXd gamma = at.sigma * lp * lp;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(r.p));
    const auto s = spd_solve(gamma, ones);
    r.flags.jittered |= s.jittered;
    r.flags.gamma_clamped |= at.flags.gamma_clamped;
    r.asymptotic_sd = std::sqrt(static_cast<double>(r.m_tilde) / static_cast<double>(r.n) / ones.dot(s.x)) / lp;
  } catch (const std::exception& e) {
    throw EstimationError("test_statistic", e.what());
  }
  return r;
}

}  // namespace irlm
