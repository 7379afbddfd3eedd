// Four-dimensional Gaussian expectations of products of psi.
//
// psi is even and 0-homogeneous in each pair, so after whitening each pair
// the radial parts integrate out in closed form and only two angles remain.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "irlm/asymptotics.hpp"
#include "irlm/ir_core.hpp"

namespace irlm {

using std::numbers::pi;

namespace {

// K(r) + K(-r) with K(r) = (1 - r acos(r)/sqrt(1-r^2)) / (1 - r^2): the folded
// radial integral of r1 r2 exp(-Q/2) over two half-lines.
double folded_radial(double r) {
  r = std::clamp(r, -1.0, 1.0);
  double q = std::max((1.0 - r) * (1.0 + r), 1e-300);
  return 2.0 / q * (1.0 + r * std::asin(r) / std::sqrt(q));
}

// Angle of a direction modulo pi, in [0, pi).
double angle_mod_pi(const Eigen::Vector2d& v) {
  double a = std::atan2(v[1], v[0]);
  a = std::fmod(a + 2.0 * pi, pi);
  return a;
}

double wrap_into(double x, double lo, double hi) {
  while (x < lo) x += pi;
  while (x > hi) x -= pi;
  return x;
}

// Directions (mod pi) where psi(L e) has a kink: a row of L or their sum is
// orthogonal to e.
std::array<double, 3> kink_angles(const Eigen::Matrix2d& l) {
  std::array<double, 3> k{};
  const Eigen::Vector2d rows[3] = {l.row(0).transpose(), l.row(1).transpose(),
                                   (l.row(0) + l.row(1)).transpose()};
  for (int r = 0; r < 3; ++r) k[r] = angle_mod_pi(Eigen::Vector2d(rows[r][1], -rows[r][0]));
  return k;
}

void append_graded(std::vector<double>& pts, double centre, double width, double half_span) {
  for (double s = width; s < half_span; s *= 4.0) {
    pts.push_back(centre - s);
    pts.push_back(centre + s);
  }
  pts.push_back(centre);
}

// E[psi(A e) psi(B e)] for e uniform on the circle.
double rank_two_expectation(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  std::vector<double> pts{0.0, pi};
  for (const auto& m : {a, b})
    for (double k : kink_angles(m)) pts.push_back(k);
  std::sort(pts.begin(), pts.end());
  const GaussRule& g = gauss_legendre(20);
  auto f = [&](double phi) {
    const Eigen::Vector2d e(std::cos(phi), std::sin(phi));
    const Eigen::Vector2d u = a * e, v = b * e;
    return psi(u[0], u[1]) * psi(v[0], v[1]);
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    if (pts[k + 1] - pts[k] > 1e-15) total += gauss_panel(f, pts[k], pts[k + 1], g);
  return total / pi;
}

}  // namespace

PsiPairValue psi_pair_expectation(const Eigen::Matrix4d& corr, const CubatureRule& rule) {
  PsiPairValue out;
  const Eigen::Matrix2d s11 = corr.block<2, 2>(0, 0), s22 = corr.block<2, 2>(2, 2);
  const Eigen::Matrix2d s12 = corr.block<2, 2>(0, 2);
  Eigen::LLT<Eigen::Matrix2d> llt1(s11), llt2(s22);
  if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success)
    throw std::domain_error("psi_pair_expectation: degenerate pair");
  const Eigen::Matrix2d l1 = llt1.matrixL(), l2 = llt2.matrixL();
  Eigen::Matrix2d c = l1.triangularView<Eigen::Lower>().solve(s12);
  c = l2.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();

  Eigen::Matrix4d w = Eigen::Matrix4d::Identity();
  w.block<2, 2>(0, 2) = c;
  w.block<2, 2>(2, 0) = c.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(w);
  if (es.eigenvalues()[1] < 1e-8) {
    // Rank two: the second whitened pair is c^T times the first.
    out.regularized = true;
    out.value = rank_two_expectation(l1, l2 * c.transpose());
    return out;
  }
  if (es.eigenvalues().minCoeff() < 1e-12) {
    Eigen::Vector4d ev = es.eigenvalues().cwiseMax(1e-12);
    w = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    out.regularized = true;
  }
  const Eigen::Matrix4d p = w.inverse();
  const double norm = 2.0 / (4.0 * pi * pi * std::sqrt(w.determinant()));
  const Eigen::Matrix2d p11 = p.block<2, 2>(0, 0), p12 = p.block<2, 2>(0, 2),
                        p22 = p.block<2, 2>(2, 2);
  const Eigen::Matrix2d p22_inv = p22.inverse();
  // Maps the first angle to the peak of the conditional density of the second.
  const Eigen::Matrix2d peak_map = p22_inv * p12.transpose();

  const auto k1 = kink_angles(l1), k2 = kink_angles(l2);

  std::vector<double> outer_pts(k1.begin(), k1.end());
  outer_pts.push_back(0.0);
  outer_pts.push_back(pi);
  Eigen::FullPivLU<Eigen::Matrix2d> lu(peak_map);
  if (lu.isInvertible())
    for (double k : k2) outer_pts.push_back(angle_mod_pi(lu.solve(Eigen::Vector2d(std::cos(k), std::sin(k)))));
  {
    // Direction of strongest coupling between the pairs.
    const Eigen::Matrix2d m = p12 * p22_inv * p12.transpose();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix2d> ges(m, p11);
    const double lam = ges.eigenvalues()[1];
    const double width = std::sqrt(std::max(1.0 - lam, 1e-300));
    const double centre = angle_mod_pi(ges.eigenvectors().col(1));
    std::vector<double> g;
    append_graded(g, centre, width, pi / 2);
    for (double x : g) outer_pts.push_back(wrap_into(x, 0.0, pi));
  }
  std::sort(outer_pts.begin(), outer_pts.end());

  const GaussRule& gin = gauss_legendre(rule.inner_order);
  std::vector<double> inner_pts;
  inner_pts.reserve(32);

  auto outer = [&](double phi1) {
    const Eigen::Vector2d e1(std::cos(phi1), std::sin(phi1));
    const Eigen::Vector2d u = l1 * e1;
    const double psi1 = psi(u[0], u[1]);
    const double a = e1.dot(p11 * e1);
    const Eigen::Vector2d bb = p12.transpose() * e1;
    const Eigen::Vector2d pk_dir = peak_map * e1;
    const double pk = angle_mod_pi(pk_dir);
    const Eigen::Vector2d ep(std::cos(pk), std::sin(pk));
    const double rmax = bb.dot(ep) / std::sqrt(a * ep.dot(p22 * ep));
    const double width = std::sqrt(std::max((1.0 - rmax) * (1.0 + rmax), 1e-300));

    inner_pts.clear();
    inner_pts.push_back(pk - pi / 2);
    inner_pts.push_back(pk + pi / 2);
    for (double k : k2) inner_pts.push_back(wrap_into(k, pk - pi / 2, pk + pi / 2));
    append_graded(inner_pts, pk, width, pi / 2);
    std::sort(inner_pts.begin(), inner_pts.end());

    auto f = [&](double phi2) {
      const Eigen::Vector2d e2(std::cos(phi2), std::sin(phi2));
      const Eigen::Vector2d v = l2 * e2;
      const double cc = e2.dot(p22 * e2);
      const double r = bb.dot(e2) / std::sqrt(a * cc);
      return psi(v[0], v[1]) * folded_radial(r) / (a * cc);
    };
    double inner = 0.0;
    for (std::size_t b = 0; b + 1 < inner_pts.size(); ++b)
      if (inner_pts[b + 1] - inner_pts[b] > 1e-15) inner += gauss_panel(f, inner_pts[b], inner_pts[b + 1], gin);
    return psi1 * inner;
  };

  double total = 0.0;
  if (rule.adaptive) {
    QuadratureSpec spec;
    spec.abs_tol = rule.tol / norm;
    spec.rel_tol = 1e-14;
    spec.max_subdivisions = 400;
    std::vector<double> pts;
    for (double x : outer_pts)
      if (pts.empty() || x - pts.back() > 1e-15) pts.push_back(x);
    total = integrate_partitioned(outer, pts, spec).value;
  } else {
    const GaussRule& gout = gauss_legendre(rule.outer_order);
    for (std::size_t b = 0; b + 1 < outer_pts.size(); ++b)
      if (outer_pts[b + 1] - outer_pts[b] > 1e-15)
        total += gauss_panel(outer, outer_pts[b], outer_pts[b + 1], gout);
  }
  out.value = total * norm;
  return out;
}

MonteCarloValue psi_pair_expectation_mc(const Eigen::Matrix4d& corr, std::size_t samples,
                                        RngStream& rng) {
  if (samples < 2) throw std::invalid_argument("psi_pair_expectation_mc: need >= 2 samples");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(corr);
  const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
  const Eigen::Matrix4d root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
  double sum = 0.0, sum2 = 0.0;
  Eigen::Vector4d z;
  for (std::size_t n = 0; n < samples; ++n) {
    for (int k = 0; k < 4; ++k) z[k] = rng.normal();
    const Eigen::Vector4d x = root * z;
    const double v = psi(x[0], x[1]) * psi(x[2], x[3]);
    sum += v;
    sum2 += v * v;
  }
  const double ns = static_cast<double>(samples);
  const double mean = sum / ns;
  const double var = std::max(sum2 / ns - mean * mean, 0.0) * ns / (ns - 1.0);
  return {mean, std::sqrt(var / ns)};
}

// ---------------------------------------------------------- far field

HermiteFarField::HermiteFarField(double r) {
  if (!(std::abs(r) < 1.0)) throw std::domain_error("HermiteFarField: need |r| < 1");
  l_ << 1.0, 0.0, r, std::sqrt((1.0 - r) * (1.0 + r));
  // Coefficients E[psi(L s) He_k(s)] reduce to averages over the angle of s,
  // with E|s|^2 = 2 and E|s|^4 = 8.
  const auto k = kink_angles(l_);
  std::vector<double> brk{0.0, pi, k[0], k[1], k[2]};
  std::sort(brk.begin(), brk.end());
  const GaussRule& g = gauss_legendre(40);
  f2_.setZero();
  f4_.fill(0.0);
  auto idx = [](int a, int b, int c, int d) { return ((a * 2 + b) * 2 + c) * 2 + d; };
  for (std::size_t b = 0; b + 1 < brk.size(); ++b) {
    const double lo = brk[b], hi = brk[b + 1];
    if (hi - lo < 1e-15) continue;
    const double cm = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    for (std::size_t n = 0; n < g.nodes.size(); ++n) {
      const double phi = cm + h * g.nodes[n];
      const double wgt = g.weights[n] * h / pi;
      const double e[2] = {std::cos(phi), std::sin(phi)};
      const Eigen::Vector2d u = l_ * Eigen::Vector2d(e[0], e[1]);
      const double v = psi(u[0], u[1]) * wgt;
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) f2_(a, bb) += v * (2.0 * e[a] * e[bb] - (a == bb ? 1.0 : 0.0));
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
          for (int c = 0; c < 2; ++c)
            for (int dd = 0; dd < 2; ++dd) {
              auto dl = [](int x, int y) { return x == y ? 1.0 : 0.0; };
              double h4 = 8.0 * e[a] * e[bb] * e[c] * e[dd] -
                          2.0 * (dl(a, bb) * e[c] * e[dd] + dl(a, c) * e[bb] * e[dd] +
                                 dl(a, dd) * e[bb] * e[c] + dl(bb, c) * e[a] * e[dd] +
                                 dl(bb, dd) * e[a] * e[c] + dl(c, dd) * e[a] * e[bb]) +
                          dl(a, bb) * dl(c, dd) + dl(a, c) * dl(bb, dd) + dl(a, dd) * dl(bb, c);
              f4_[idx(a, bb, c, dd)] += v * h4;
            }
    }
  }
}

double HermiteFarField::covariance(const Eigen::Matrix2d& c) const {
  // sum_n (1/n!) <F_n, (C^{otimes n}) G_n> for n = 2, 4; odd orders vanish.
  double second = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) second += f2_(a, b) * f2_(x, y) * c(a, x) * c(b, y);
  double fourth = 0.0;
  for (int i = 0; i < 16; ++i) {
    if (f4_[i] == 0.0) continue;
    const int a = i >> 3, b = (i >> 2) & 1, cc = (i >> 1) & 1, dd = i & 1;
    for (int j = 0; j < 16; ++j) {
      const int x = j >> 3, y = (j >> 2) & 1, z = (j >> 1) & 1, w = j & 1;
      fourth += f4_[i] * f4_[j] * c(a, x) * c(b, y) * c(cc, z) * c(dd, w);
    }
  }
  return 0.5 * second + fourth / 24.0;
}

}  // namespace irlm
