#include "irlm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <fftw3.h>

namespace irlm {

// ---------------------------------------------------------------- FFT

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) noexcept {
  std::size_t m = 1;
  while (m < n) m <<= 1;
  return m;
}

namespace {

// FFTW planning is not thread safe; execution on new arrays is.
std::mutex g_plan_mutex;

fftw_plan cached_plan(std::size_t n, int sign) {
  static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(n, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::vector<std::complex<double>> scratch_in(n), scratch_out(n);
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n),
                                    reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                    reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(key, plan);
  return plan;
}

std::vector<std::complex<double>> run_dft(std::span<const std::complex<double>> in, int sign) {
  if (in.size() < 2 || !is_power_of_two(in.size()))
    throw std::invalid_argument("fft: length must be a power of two >= 2, got " +
                                std::to_string(in.size()));
  std::vector<std::complex<double>> src(in.begin(), in.end());
  std::vector<std::complex<double>> out(in.size());
  fftw_execute_dft(cached_plan(in.size(), sign), reinterpret_cast<fftw_complex*>(src.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace

std::vector<std::complex<double>> fft_real(std::span<const double> values) {
  std::vector<std::complex<double>> c(values.begin(), values.end());
  return run_dft(c, FFTW_FORWARD);
}

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> values) {
  return run_dft(values, FFTW_FORWARD);
}

std::vector<std::complex<double>> ifft(std::span<const std::complex<double>> values) {
  auto out = run_dft(values, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(values.size());
  for (auto& v : out) v *= scale;
  return out;
}

// ---------------------------------------------------------- quadrature

namespace {

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod(const RealFunction& f, double lo, double hi) {
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0, &err);
  return {lo, hi, v, err};
}

}  // namespace

QuadratureResult integrate_partitioned(const RealFunction& f, std::span<const double> breakpoints,
                                       const QuadratureSpec& spec) {
  if (spec.abs_tol <= 0.0 || spec.rel_tol <= 0.0)
    throw std::invalid_argument("integrate: tolerances must be positive");
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
  std::priority_queue<Segment> queue;
  QuadratureResult res;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    Segment s = kronrod(f, breakpoints[i], breakpoints[i + 1]);
    res.value += s.value;
    res.error += s.error;
    queue.push(s);
  }
  const int budget = std::max(spec.max_subdivisions, static_cast<int>(queue.size()) + 1);
  int count = static_cast<int>(queue.size());
  while (!queue.empty() && res.error > std::max(spec.abs_tol, spec.rel_tol * std::abs(res.value)) &&
         count < budget) {
    Segment s = queue.top();
    double mid = 0.5 * (s.lo + s.hi);
    if (!(mid > s.lo && mid < s.hi)) break;  // cannot refine further in double precision
    queue.pop();
    Segment left = kronrod(f, s.lo, mid), right = kronrod(f, mid, s.hi);
    res.value += left.value + right.value - s.value;
    res.error += left.error + right.error - s.error;
    queue.push(left);
    queue.push(right);
    ++count;
  }
  // Re-sum to shed the drift of incremental updates.
  double v = 0.0, e = 0.0;
  while (!queue.empty()) {
    v += queue.top().value;
    e += queue.top().error;
    queue.pop();
  }
  res.value = v;
  res.error = e;
  res.subdivisions = count;
  res.converged = e <= std::max(spec.abs_tol, spec.rel_tol * std::abs(v));
  return res;
}

double integrate(const RealFunction& f, double a, double b, const QuadratureSpec& spec) {
  if (!(b > a)) {
    if (a == b) return 0.0;
    throw std::invalid_argument("integrate: require a <= b");
  }
  double head = 0.0, head_err = 0.0;
  double start = a;
  if (spec.endpoint_singularity_exponent) {
    const double e = *spec.endpoint_singularity_exponent;
    if (!(e > -1.0 && e < 1.0))
      throw std::invalid_argument("integrate: singularity exponent must lie in (-1, 1)");
    // On [a, a+delta] write f = (x-a)^e g(x) and substitute x-a = delta u^{1/(1+e)},
    // leaving integral of g over u in (0, 1) scaled by delta^{1+e}/(1+e).
    const double delta = std::min(1e-4, 0.5 * (b - a));
    const double q = 1.0 / (1.0 + e);
    RealFunction g = [&](double u) {
      if (u <= 0.0) u = 1e-300;
      double t = delta * std::pow(u, q);
      return f(a + t) * std::pow(t, -e);
    };
    const double pts[] = {0.0, 1e-6, 1e-3, 0.1, 1.0};
    QuadratureSpec inner = spec;
    inner.endpoint_singularity_exponent.reset();
    auto r = integrate_partitioned(g, pts, inner);
    const double scale = std::pow(delta, 1.0 + e) / (1.0 + e);
    head = scale * r.value;
    head_err = scale * r.error;
    start = a + delta;
    if (!r.converged)
      throw ConvergenceError("integrate: endpoint panel did not converge", head, head_err);
  }
  double span_pts[] = {start, b};
  // A power-law edge benefits from a geometric initial partition.
  std::vector<double> pts(std::begin(span_pts), std::end(span_pts));
  if (spec.endpoint_singularity_exponent) {
    pts.clear();
    double w = b - start;
    for (double t = 1e-6 * w; t < 0.5 * w; t *= 10.0) pts.push_back(start + t);
    pts.insert(pts.begin(), start);
    pts.push_back(b);
  }
  auto r = integrate_partitioned(f, pts, spec);
  const double total = head + r.value, err = head_err + r.error;
  if (!r.converged && err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total)))
    throw ConvergenceError("integrate: subdivision budget exhausted", total, err);
  return total;
}

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 256) throw std::invalid_argument("gauss_legendre: order in [1, 256]");
  static std::mutex mutex;
  static std::map<int, GaussRule> rules;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = rules.find(order);
  if (it != rules.end()) return it->second;
  GaussRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  const int n = order;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = w;
  }
  return rules.emplace(order, std::move(r)).first->second;
}

// -------------------------------------------------------- root finding

double brent_root(const RealFunction& g, double lo, double hi, double tol) {
  if (!(hi > lo)) throw std::invalid_argument("brent_root: require lo < hi");
  double glo = g(lo), ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if (std::signbit(glo) == std::signbit(ghi))
    throw std::domain_error("brent_root: no sign change in bracket");
  std::uintmax_t max_iter = 300;
  auto stop = [tol](double a, double b) { return std::abs(b - a) < tol; };
  auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, stop, max_iter);
  return 0.5 * (r.first + r.second);
}

// ------------------------------------------------------------ SPD solve

SpdSolveResult spd_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw std::invalid_argument("spd_solve: dimension mismatch");
  const double scale = a.cwiseAbs().maxCoeff();
  if (!a.isApprox(a.transpose(), 1e-12) && (a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("spd_solve: matrix is not symmetric");
  SpdSolveResult out;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) {
    out.x = llt.solve(b);
    return out;
  }
  Eigen::MatrixXd j = a;
  const double jitter = 1e-10 * a.trace() / static_cast<double>(a.rows());
  j.diagonal().array() += jitter;
  llt.compute(j);
  if (jitter <= 0.0 || llt.info() != Eigen::Success)
    throw std::domain_error("spd_solve: matrix not positive definite even after jitter");
  out.x = llt.solve(b);
  out.jittered = true;
  return out;
}

// --------------------------------------------------------- distributions

double chi2_sf(double x, double k) {
  if (!(k >= 1.0)) throw std::invalid_argument("chi2_sf: degrees of freedom must be >= 1");
  if (!(x >= 0.0)) throw std::invalid_argument("chi2_sf: x must be >= 0");
  if (x == 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * k, 0.5 * x);
}

double chi2_quantile(double prob, double k) {
  if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("chi2_quantile: prob in (0,1)");
  return 2.0 * boost::math::gamma_p_inv(0.5 * k, prob);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

KsResult ks_test_normal(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_test_normal: empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double c = normal_cdf(s[i]);
    d = std::max({d, (i + 1) / n - c, c - i / n});
  }
  // Stephens' small-sample correction of the Kolmogorov limit law.
  const double sn = std::sqrt(n);
  const double lam = (sn + 0.12 + 0.11 / sn) * d;
  double p = 0.0;
  if (lam < 0.2) {
    p = 1.0;
  } else {
    for (int k = 1; k <= 100; ++k) {
      double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lam * lam);
      p += term;
      if (std::abs(term) < 1e-16) break;
    }
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

double hurwitz_zeta(double s, double q) {
  if (!(s > 1.0) || !(q > 0.0)) throw std::invalid_argument("hurwitz_zeta: need s > 1, q > 0");
  // Euler-Maclaurin with a direct head of N terms.
  constexpr int kHead = 12;
  static constexpr double kB2j[] = {1.0 / 6,       -1.0 / 30,   1.0 / 42,          -1.0 / 30,
                                    5.0 / 66,      -691.0 / 2730, 7.0 / 6,         -3617.0 / 510};
  double sum = 0.0;
  for (int k = 0; k < kHead; ++k) sum += std::pow(q + k, -s);
  const double x = q + kHead;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  double rising = s;           // s (s+1) ... (s+2j-2)
  double fact = 2.0;           // (2j)!
  double xp = std::pow(x, -s - 1.0);
  for (int j = 1; j <= 8; ++j) {
    double term = kB2j[j - 1] / fact * rising * xp;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    fact *= (2 * j + 1) * (2 * j + 2);
    xp /= x * x;
  }
  return sum;
}

// --------------------------------------------------------------- RNG

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9u};
  engine_.seed(seq);
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

void RngStream::fill_normal(std::span<double> out) {
  for (auto& v : out) v = normal_(engine_);
}

}  // namespace irlm
