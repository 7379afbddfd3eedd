// sigma_{i,j}(d): integrals over tau of the psi cross-covariance between the
// scale-i and scale-j second-difference pairs of fBm.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <set>

#include "irlm/asymptotics.hpp"

namespace irlm {

namespace {

constexpr double kGrade = 0.25;

// Cov over the two pairs by cubature, with the Hermite far field once the
// whitened cross block is small.
struct CubatureIntegrand {
  double d;
  int i, j;
  const GammaOptions& opt;
  HermiteFarField far;
  Eigen::Matrix2d l_inv;
  double mean_sq;
  bool regularized = false;
  int evaluations = 0;

  CubatureIntegrand(double d_, int i_, int j_, const GammaOptions& o)
      : d(d_), i(i_), j(j_), opt(o), far(rho(d_)) {
    l_inv = far.cholesky().inverse();
    const double l0 = lambda0(d_);
    mean_sq = l0 * l0;
  }

  double operator()(double tau) {
    const Eigen::Matrix4d s = pair_correlation(d, i, j, tau);
    const Eigen::Matrix2d c = l_inv * s.block<2, 2>(0, 2) * l_inv.transpose();
    if (c.cwiseAbs().maxCoeff() < opt.far_field_threshold) return far.covariance(c);
    ++evaluations;
    auto v = psi_pair_expectation(s, opt.rule);
    regularized = regularized || v.regularized;
    return v.value - mean_sq;
  }
};

struct Node {
  double tau;
  double weight;
};

// Kinks of tau -> Cov: where some |tau + a i - b j| vanishes.
std::vector<double> kink_points(int i, int j) {
  std::set<double> b;
  for (int a = 0; a <= 3; ++a)
    for (int c = 0; c <= 3; ++c) b.insert(static_cast<double>(a * i - c * j));
  return {b.begin(), b.end()};
}

bool degenerate_point(int i, int j, double tau) {
  return i == j && (tau == 0.0 || std::abs(tau) == static_cast<double>(i));
}

void add_panel(std::vector<Node>& nodes, double lo, double hi, const GaussRule& g) {
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (std::size_t k = 0; k < g.nodes.size(); ++k) nodes.push_back({mid + half * g.nodes[k], half * g.weights[k]});
}

// Nodes for the integral over [a, a + dir*h], graded geometrically toward a.
// The innermost piece [0, eps] assumes f = alpha + beta s^e with alpha, beta
// fitted from f at eps and eps/4, which is linear in those two values.
void graded_half(std::vector<Node>& nodes, double a, double dir, double h, bool degenerate, double hurst,
                 const GammaOptions& opt) {
  const GaussRule& g = gauss_legendre(opt.tau_order);
  double outer = h;
  int levels = opt.grading_levels;
  if (degenerate) {
    // Stay ~1e-3 away from a repeated coordinate.
    levels = 0;
    while (outer * std::pow(kGrade, levels + 1) >= 2e-3) ++levels;
  }
  for (int k = 0; k < levels; ++k) {
    const double inner = outer * kGrade;
    const std::size_t first = nodes.size();
    add_panel(nodes, inner, outer, g);
    for (std::size_t n = first; n < nodes.size(); ++n) nodes[n].tau = a + dir * nodes[n].tau;
    outer = inner;
  }
  const double e = degenerate ? hurst : 2.0 * hurst;
  const double c = e / ((1.0 + e) * (1.0 - std::pow(0.25, e)));
  nodes.push_back({a + dir * outer, outer * (1.0 - c)});
  nodes.push_back({a + dir * 0.25 * outer, outer * c});
}

// Nodes for every tau with |tau| beyond the outermost kinks are dropped past
// tau_max when it is finite.
std::vector<Node> tau_nodes(int i, int j, double hurst, const GammaOptions& opt, bool one_sided, double tau_max,
                            double max_width) {
  auto kinks = kink_points(i, j);
  if (one_sided)
    kinks.erase(std::remove_if(kinks.begin(), kinks.end(), [](double x) { return x < 0.0; }), kinks.end());
  std::vector<Node> nodes;
  for (std::size_t k = 0; k + 1 < kinks.size(); ++k) {
    const double a = kinks[k], b = kinks[k + 1];
    const double h = 0.5 * (b - a);
    graded_half(nodes, a, 1.0, h, degenerate_point(i, j, a), hurst, opt);
    graded_half(nodes, b, -1.0, h, degenerate_point(i, j, b), hurst, opt);
  }
  const double span = std::max(i, j);
  auto tail = [&](double b, double dir) {
    graded_half(nodes, b, dir, span, false, hurst, opt);
    if (std::isfinite(tau_max)) {
      // Uniform panels out to tau_max.
      const double lo = std::abs(b) + span;
      if (tau_max <= lo) return;
      const auto panels = static_cast<int>(std::ceil((tau_max - lo) / max_width - 1e-9));
      const double w = (tau_max - lo) / panels;
      const GaussRule& g = gauss_legendre(opt.tau_order);
      for (int p = 0; p < panels; ++p) {
        const std::size_t first = nodes.size();
        add_panel(nodes, lo + p * w, lo + (p + 1) * w, g);
        for (std::size_t n = first; n < nodes.size(); ++n) nodes[n].tau *= dir;
      }
      return;
    }
    // Beyond b + span substitute tau - b = 1/u; the integrand decays like
    // tau^{4H-8}, so u^{-2} f is a smooth power of u at 0.
    const GaussRule& g = gauss_legendre(8);
    const double umax = 1.0 / span;
    std::vector<Node> u;
    add_panel(u, 0.25 * umax, umax, g);
    add_panel(u, 0.0, 0.25 * umax, g);
    for (const auto& n : u) {
      const double t = 1.0 / n.tau;
      nodes.push_back({b + dir * t, n.weight * t * t});
    }
  };
  tail(kinks.back(), 1.0);
  if (!one_sided) tail(kinks.front(), -1.0);
  return nodes;
}

SigmaValue integrate_cubature(double d, int i, int j, const GammaOptions& opt, bool one_sided) {
  CubatureIntegrand f(d, i, j, opt);
  const auto nodes = tau_nodes(i, j, d + 0.5, opt, one_sided, std::numeric_limits<double>::infinity(), 0.0);
  double total = 0.0;
  for (const auto& n : nodes) total += n.weight * f(n.tau);
  SigmaValue out;
  out.value = one_sided ? 2.0 * total : total;
  out.regularized = f.regularized;
  out.evaluations = f.evaluations;
  return out;
}

// Same tau rule truncated at tau_max, with an independent Monte Carlo
// estimate of the covariance at every node.
SigmaValue integrate_monte_carlo(double d, int i, int j, const GammaOptions& opt, bool one_sided) {
  if (!(opt.tau_step > 0.0) || !(opt.tau_max > 0.0))
    throw std::invalid_argument("gamma: tau_step and tau_max must be positive");
  const double mean_sq = std::pow(lambda0(d), 2);
  const auto nodes = tau_nodes(i, j, d + 0.5, opt, one_sided, opt.tau_max, opt.tau_step);
  const std::uint64_t stream = (static_cast<std::uint64_t>(i) << 40) ^ (static_cast<std::uint64_t>(j) << 20) ^
                               (static_cast<std::uint64_t>(std::llround((d + 1.0) * 1e4)) << 1);
  SigmaValue out;
  double total = 0.0, var = 0.0;
  // Covariance level over the outermost nodes, for the tail bound.
  const double edge_from = 0.75 * opt.tau_max;
  double edge_sum = 0.0, edge_var = 0.0;
  int edge_n = 0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Eigen::Matrix4d s = pair_correlation(d, i, j, nodes[k].tau);
    RngStream rng(opt.seed, stream + (k + 1) * 0x9E3779B97F4A7C15ull);
    const auto mc = psi_pair_expectation_mc(s, opt.mc_samples, rng);
    total += nodes[k].weight * (mc.value - mean_sq);
    var += nodes[k].weight * nodes[k].weight * mc.std_error * mc.std_error;
    if (std::abs(nodes[k].tau) >= edge_from) {
      edge_sum += mc.value - mean_sq;
      edge_var += mc.std_error * mc.std_error;
      ++edge_n;
    }
    ++out.evaluations;
  }
  const double factor = one_sided ? 2.0 : 1.0;
  out.value = factor * total;
  out.std_error = factor * std::sqrt(var);
  // Beyond tau_max the covariance is O(tau^-2), so each neglected tail is at
  // most edge * tau_max.
  if (edge_n > 0) {
    const double en = static_cast<double>(edge_n);
    const double edge = std::abs(edge_sum / en) + 2.0 * std::sqrt(edge_var) / en;
    out.tail_bound = factor * (one_sided ? 1.0 : 2.0) * edge * opt.tau_max;
  }
  return out;
}

}  // namespace

SigmaValue sigma_entry(double d, int i, int j, const GammaOptions& opt) {
  if (!(d > -0.5 && d < 0.5)) throw std::domain_error("sigma_entry: d must lie in (-0.5, 0.5)");
  if (i < 1 || j < 1) throw std::invalid_argument("sigma_entry: scales must be >= 1");
  if (i > j) std::swap(i, j);
  const int g = std::gcd(i, j);
  SigmaValue v = opt.method == GammaMethod::kCubature ? integrate_cubature(d, i / g, j / g, opt, false)
                                                      : integrate_monte_carlo(d, i / g, j / g, opt, false);
  v.value *= g;
  v.std_error *= g;
  v.tail_bound *= g;
  return v;
}

SigmaValue sigma2_one_sided(double d, const GammaOptions& opt) {
  if (!(d > -0.5 && d < 0.5)) throw std::domain_error("sigma2_one_sided: d must lie in (-0.5, 0.5)");
  return opt.method == GammaMethod::kCubature ? integrate_cubature(d, 1, 1, opt, true)
                                              : integrate_monte_carlo(d, 1, 1, opt, true);
}

GammaResult gamma_matrix(double d, int p, const GammaOptions& opt) {
  if (p < 1) throw std::invalid_argument("gamma_matrix: p must be >= 1");
  if (!(d > -0.5 && d < 0.5)) throw std::domain_error("gamma_matrix: d must lie in (-0.5, 0.5)");
  GammaResult out;
  out.gamma = Eigen::MatrixXd::Zero(p, p);
  out.std_error = Eigen::MatrixXd::Zero(p, p);
  // Coprime pairs only; the rest follow from sigma_{ci,cj} = c sigma_{i,j}.
  std::vector<std::vector<SigmaValue>> base(p + 1, std::vector<SigmaValue>(p + 1));
  for (int j = 1; j <= p; ++j)
    for (int i = 1; i <= j; ++i) {
      if (std::gcd(i, j) != 1) continue;
      base[i][j] = opt.method == GammaMethod::kCubature ? integrate_cubature(d, i, j, opt, false)
                                                        : integrate_monte_carlo(d, i, j, opt, false);
      out.regularized = out.regularized || base[i][j].regularized;
    }
  for (int a = 1; a <= p; ++a)
    for (int b = a; b <= p; ++b) {
      const int g = std::gcd(a, b);
      const auto& v = base[a / g][b / g];
      out.gamma(a - 1, b - 1) = out.gamma(b - 1, a - 1) = g * v.value;
      out.std_error(a - 1, b - 1) = out.std_error(b - 1, a - 1) =
          g * std::sqrt(v.std_error * v.std_error + v.tail_bound * v.tail_bound);
    }
  return out;
}

}  // namespace irlm
