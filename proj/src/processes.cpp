#include "irlm/processes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace irlm {

using std::numbers::pi;

// ------------------------------------------------------------- models

SpectralModel SpectralModel::fgn(double hurst, double sigma2) {
  SpectralModel m;
  m.kind = ProcessKind::kFgn;
  m.d = hurst - 0.5;
  m.sigma2 = sigma2;
  return m;
}

SpectralModel SpectralModel::farima(double d, std::vector<double> ar, std::vector<double> ma,
                                    double sigma2, ArmaConvention convention) {
  SpectralModel m;
  m.kind = ProcessKind::kFarima;
  m.d = d;
  m.ar = std::move(ar);
  m.ma = std::move(ma);
  m.sigma2 = sigma2;
  m.convention = convention;
  return m;
}

SpectralModel SpectralModel::power_law(double d, double beta) {
  SpectralModel m;
  m.kind = ProcessKind::kPowerLaw;
  m.d = d;
  m.beta = beta;
  return m;
}

SpectralModel SpectralModel::garma0(double d) {
  SpectralModel m;
  m.kind = ProcessKind::kGarma0;
  m.d = d;
  return m;
}

SpectralModel SpectralModel::custom(std::vector<double> lambda, std::vector<double> density) {
  SpectralModel m;
  m.kind = ProcessKind::kCustom;
  m.custom_lambda = std::move(lambda);
  m.custom_density = std::move(density);
  return m;
}

namespace {

// AR and MA polynomials in the standard convention.
std::vector<double> standard_ar(const SpectralModel& m) {
  std::vector<double> a = m.ar;
  if (m.convention == ArmaConvention::kNegated)
    for (auto& v : a) v = -v;
  return a;
}

std::vector<double> standard_ma(const SpectralModel& m) {
  std::vector<double> b = m.ma;
  if (m.convention == ArmaConvention::kNegated)
    for (auto& v : b) v = -v;
  return b;
}

}  // namespace

void SpectralModel::validate() const {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("model: sigma2 must be positive");
  if (kind != ProcessKind::kCustom && !(d > -0.5 && d < 0.5))
    throw std::invalid_argument("model: d must lie in (-0.5, 0.5)");
  if (kind == ProcessKind::kPowerLaw && !(beta > 0.0))
    throw std::invalid_argument("model: beta must be positive");
  if (kind == ProcessKind::kFarima && !ar.empty()) {
    // 1 - sum a_k z^k has no roots in the closed unit disk iff the companion
    // matrix has all eigenvalues strictly inside it.
    const auto a = standard_ar(*this);
    const int p = static_cast<int>(a.size());
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p, p);
    for (int k = 0; k < p; ++k) comp(0, k) = a[k];
    for (int k = 1; k < p; ++k) comp(k, k - 1) = 1.0;
    const double rmax = comp.eigenvalues().cwiseAbs().maxCoeff();
    if (!(rmax < 1.0)) throw std::invalid_argument("model: AR polynomial has a root on or inside the unit circle");
  }
  if (kind == ProcessKind::kCustom) {
    const auto& x = custom_lambda;
    const auto& f = custom_density;
    if (x.size() < 2 || x.size() != f.size())
      throw std::invalid_argument("model: custom density needs matching grids of size >= 2");
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(f[i]) || f[i] < 0.0) throw std::invalid_argument("model: custom density must be finite and >= 0");
      if (i > 0 && !(x[i] > x[i - 1])) throw std::invalid_argument("model: custom grid must be ascending");
    }
    if (x.front() < 0.0 || std::abs(x.back() - pi) > 1e-12)
      throw std::invalid_argument("model: custom grid must lie in [0, pi] and end at pi");
  }
  if (contamination.innovation != InnovationLaw::kGaussian && kind != ProcessKind::kFarima)
    throw std::invalid_argument("model: non-Gaussian innovations are only defined for FARIMA");
  if (contamination.seasonal_amplitude != 0.0 && !(contamination.seasonal_period > 0.0))
    throw std::invalid_argument("model: seasonal period must be positive");
}

std::string SpectralModel::describe() const {
  std::ostringstream os;
  switch (kind) {
    case ProcessKind::kFgn: os << "fgn(H=" << hurst() << ")"; break;
    case ProcessKind::kFarima: {
      os << "farima(" << ar.size() << ",d=" << d << "," << ma.size() << ")";
      break;
    }
    case ProcessKind::kPowerLaw: os << "powerlaw(d=" << d << ",beta=" << beta << ")"; break;
    case ProcessKind::kGarma0: os << "garma0(d=" << d << ")"; break;
    case ProcessKind::kCustom: os << "custom(" << custom_lambda.size() << " nodes)"; break;
  }
  return os.str();
}

// ----------------------------------------------------- spectral density

double spectral_density(const SpectralModel& m, double x) {
  if (!(x > 0.0 && x <= pi)) throw std::domain_error("spectral_density: lambda must lie in (0, pi]");
  switch (m.kind) {
    case ProcessKind::kFgn: {
      const double h = m.hurst(), s = 2.0 * h + 1.0;
      const double ch = m.sigma2 * std::tgamma(2.0 * h + 1.0) * std::sin(pi * h) / (2.0 * pi);
      constexpr int kTerms = 3;
      double sum = 0.0;
      for (int k = -kTerms; k <= kTerms; ++k) sum += std::pow(std::abs(x + 2.0 * pi * k), -s);
      const double tp = std::pow(2.0 * pi, -s);
      sum += tp * (hurwitz_zeta(s, kTerms + 1 + x / (2.0 * pi)) + hurwitz_zeta(s, kTerms + 1 - x / (2.0 * pi)));
      const double half = std::sin(0.5 * x);
      return ch * 4.0 * half * half * sum;
    }
    case ProcessKind::kFarima: {
      const std::complex<double> z = std::polar(1.0, -x);
      std::complex<double> phi = 1.0, theta = 1.0, zk = 1.0;
      const auto a = standard_ar(m), b = standard_ma(m);
      for (std::size_t k = 0; k < std::max(a.size(), b.size()); ++k) {
        zk *= z;
        if (k < a.size()) phi -= a[k] * zk;
        if (k < b.size()) theta += b[k] * zk;
      }
      return m.sigma2 / (2.0 * pi) * std::norm(theta) / std::norm(phi) *
             std::pow(2.0 * std::sin(0.5 * x), -2.0 * m.d);
    }
    case ProcessKind::kPowerLaw:
      return std::pow(x, -2.0 * m.d) * (1.0 + std::pow(x, m.beta));
    case ProcessKind::kGarma0: {
      const double gap = std::abs(x - 0.5 * pi);
      if (gap == 0.0) throw std::domain_error("spectral_density: pole at pi/2");
      return std::pow(gap, -2.0 * m.d);
    }
    case ProcessKind::kCustom: {
      const auto& g = m.custom_lambda;
      const auto& f = m.custom_density;
      if (x <= g.front()) return f.front();
      auto it = std::lower_bound(g.begin(), g.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - g.begin());
      if (i == 0) return f.front();
      const double t = (x - g[i - 1]) / (g[i] - g[i - 1]);
      return f[i - 1] + t * (f[i] - f[i - 1]);
    }
  }
  throw std::logic_error("spectral_density: unknown kind");
}

// ----------------------------------------------------- autocovariance

namespace {

std::vector<double> fgn_acvf(double h, double sigma2, std::size_t max_lag) {
  std::vector<double> g(max_lag + 1);
  const double h2 = 2.0 * h;
  g[0] = sigma2;
  if (max_lag >= 1) g[1] = 0.5 * sigma2 * (std::pow(2.0, h2) - 2.0);
  for (std::size_t k = 2; k <= max_lag; ++k) {
    // k^{2H} [ (1+1/k)^{2H} - 2 + (1-1/k)^{2H} ] / 2 without the k^{2H} cancellation.
    const double x = 1.0 / static_cast<double>(k);
    const double inner = std::expm1(h2 * std::log1p(x)) + std::expm1(h2 * std::log1p(-x));
    g[k] = 0.5 * sigma2 * std::pow(static_cast<double>(k), h2) * inner;
  }
  return g;
}

std::vector<double> fractional_acvf(double d, std::size_t max_lag) {
  std::vector<double> g(max_lag + 1);
  g[0] = std::exp(std::lgamma(1.0 - 2.0 * d) - 2.0 * std::lgamma(1.0 - d));
  for (std::size_t k = 1; k <= max_lag; ++k) g[k] = g[k - 1] * (k - 1.0 + d) / (k - d);
  return g;
}

std::vector<double> arma_impulse(const std::vector<double>& a, const std::vector<double>& b,
                                 std::size_t count) {
  std::vector<double> psi(count, 0.0);
  if (count == 0) return psi;
  psi[0] = 1.0;
  for (std::size_t j = 1; j < count; ++j) {
    double v = j <= b.size() ? b[j - 1] : 0.0;
    for (std::size_t k = 1; k <= std::min(j, a.size()); ++k) v += a[k - 1] * psi[j - k];
    psi[j] = v;
  }
  return psi;
}

// Autocovariance of the ARMA filter applied to unit white noise, up to the lag
// where it falls below double resolution.
std::vector<double> arma_filter_acvf(const std::vector<double>& a, const std::vector<double>& b) {
  std::size_t len = 64;
  std::vector<double> psi;
  for (;; len *= 2) {
    psi = arma_impulse(a, b, len);
    double tail = 0.0, head = 0.0;
    for (std::size_t j = 0; j < len; ++j) (j < len / 2 ? head : tail) += std::abs(psi[j]);
    if (tail <= 1e-17 * head || len >= (1u << 13)) break;
  }
  std::size_t used = len;
  while (used > 1 && std::abs(psi[used - 1]) < 1e-300) --used;
  std::vector<double> r(used, 0.0);
  for (std::size_t h = 0; h < used; ++h)
    for (std::size_t j = 0; j + h < used; ++j) r[h] += psi[j] * psi[j + h];
  std::size_t keep = used;
  while (keep > 1 && std::abs(r[keep - 1]) < 1e-18 * r[0]) --keep;
  r.resize(keep);
  return r;
}

// I(a, k, c) = int_0^c u^{a-1} cos(k u) du, a > 0.
double power_cosine(double a, double k, double c) {
  if (k == 0.0) return std::pow(c, a) / a;
  const double kc = k * c;
  if (kc <= 60.0) {
    QuadratureSpec spec;
    spec.abs_tol = 1e-14;
    spec.rel_tol = 1e-12;
    spec.max_subdivisions = 4000;
    const double e = a - 1.0;
    auto f = [a, k](double u) { return std::pow(u, a - 1.0) * std::cos(k * u); };
    // Resolve the power law at 0 first, then oscillations on panels of width <= pi/(2k).
    const double first = std::min(c, 0.5 * pi / k);
    double head;
    if (e > -1.0 && e < 1.0) {
      QuadratureSpec s0 = spec;
      s0.endpoint_singularity_exponent = e;
      head = integrate(f, 0.0, first, s0);
    } else {
      head = integrate(f, 0.0, first, spec);
    }
    std::vector<double> pts;
    for (double x = first; x < c; x += 0.5 * pi / k) pts.push_back(x);
    pts.push_back(c);
    if (pts.size() < 2) return head;
    auto r = integrate_partitioned(f, pts, spec);
    return head + r.value;
  }
  // Endpoint asymptotics: the origin contributes Gamma(a) e^{i pi a/2} k^{-a}
  // and the upper limit an expansion in derivatives of u^{a-1}.
  using cd = std::complex<double>;
  cd origin = std::tgamma(a) * std::polar(1.0, 0.5 * pi * a) * std::pow(k, -a);
  cd sum = 0.0;
  double deriv = std::pow(c, a - 1.0);  // g^{(n)}(c)
  cd ik_pow = cd(0.0, k);               // (ik)^{n+1}
  double prev = HUGE_VAL;
  for (int n = 0; n < 200; ++n) {
    cd term = ((n % 2) ? -1.0 : 1.0) * deriv / ik_pow;
    const double mag = std::abs(term);
    if (mag > prev) break;  // asymptotic series started diverging
    sum += term;
    if (mag < 1e-17 * std::abs(origin + sum) || deriv == 0.0) break;
    prev = mag;
    deriv *= (a - 1.0 - n) / c;
    ik_pow *= cd(0.0, k);
  }
  return (origin + std::polar(1.0, kc) * sum).real();
}

std::vector<double> custom_acvf(const SpectralModel& m, std::size_t max_lag) {
  // Exact cosine transform of the piecewise-linear interpolant.
  const auto& x = m.custom_lambda;
  const auto& f = m.custom_density;
  std::vector<double> g(max_lag + 1, 0.0);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    const double kk = static_cast<double>(k);
    double acc = 0.0;
    if (x.front() > 0.0) acc += f.front() * (k == 0 ? x.front() : std::sin(kk * x.front()) / kk);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double x0 = x[i], x1 = x[i + 1];
      const double slope = (f[i + 1] - f[i]) / (x1 - x0);
      const double alpha = f[i] - slope * x0;
      if (k == 0) {
        acc += 0.5 * (f[i] + f[i + 1]) * (x1 - x0);
      } else {
        auto prim = [&](double t) {
          return (alpha + slope * t) * std::sin(kk * t) / kk + slope * std::cos(kk * t) / (kk * kk);
        };
        acc += prim(x1) - prim(x0);
      }
    }
    g[k] = 2.0 * acc;
  }
  return g;
}

}  // namespace

std::vector<double> autocovariance(const SpectralModel& m, std::size_t max_lag) {
  m.validate();
  switch (m.kind) {
    case ProcessKind::kFgn: return fgn_acvf(m.hurst(), m.sigma2, max_lag);
    case ProcessKind::kFarima: {
      const auto a = standard_ar(m), b = standard_ma(m);
      if (a.empty() && b.empty()) {
        auto g = fractional_acvf(m.d, max_lag);
        for (auto& v : g) v *= m.sigma2;
        return g;
      }
      const auto r = arma_filter_acvf(a, b);
      const std::size_t h_max = r.size() - 1;
      const auto g0 = fractional_acvf(m.d, max_lag + h_max);
      std::vector<double> g(max_lag + 1, 0.0);
      for (std::size_t k = 0; k <= max_lag; ++k) {
        double acc = r[0] * g0[k];
        for (std::size_t h = 1; h <= h_max; ++h) {
          const std::size_t lo = k >= h ? k - h : h - k;
          acc += r[h] * (g0[k + h] + g0[lo]);
        }
        g[k] = m.sigma2 * acc;
      }
      return g;
    }
    case ProcessKind::kPowerLaw: {
      std::vector<double> g(max_lag + 1);
      const double a1 = 1.0 - 2.0 * m.d, a2 = a1 + m.beta;
      for (std::size_t k = 0; k <= max_lag; ++k) {
        const double kk = static_cast<double>(k);
        g[k] = 2.0 * (power_cosine(a1, kk, pi) + power_cosine(a2, kk, pi));
      }
      return g;
    }
    case ProcessKind::kGarma0: {
      std::vector<double> g(max_lag + 1, 0.0);
      const double a = 1.0 - 2.0 * m.d;
      for (std::size_t k = 0; k <= max_lag; k += 2) {
        const double kk = static_cast<double>(k);
        const double sign = (k % 4 == 0) ? 1.0 : -1.0;  // cos(k pi / 2)
        g[k] = 4.0 * sign * power_cosine(a, kk, 0.5 * pi);
      }
      return g;
    }
    case ProcessKind::kCustom: return custom_acvf(m, max_lag);
  }
  throw std::logic_error("autocovariance: unknown kind");
}

std::vector<double> farima_ma_weights(const SpectralModel& m, std::size_t count) {
  if (m.kind != ProcessKind::kFarima) throw std::invalid_argument("farima_ma_weights: FARIMA model required");
  std::vector<double> frac(count);
  if (count == 0) return frac;
  frac[0] = 1.0;
  for (std::size_t j = 1; j < count; ++j) frac[j] = frac[j - 1] * (j - 1.0 + m.d) / static_cast<double>(j);
  const auto a = standard_ar(m), b = standard_ma(m);
  if (a.empty() && b.empty()) return frac;
  const auto arma = arma_impulse(a, b, count);
  std::vector<double> w(count, 0.0);
  for (std::size_t j = 0; j < count; ++j)
    for (std::size_t k = 0; k <= j; ++k) w[j] += arma[k] * frac[j - k];
  return w;
}

// ----------------------------------------------------- innovation laws

double burr_cdf(double x, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("burr_cdf: alpha must be positive");
  if (x >= 0.0) return 1.0 - 0.5 / (1.0 + std::pow(x, alpha));
  return 0.5 / (1.0 + std::pow(-x, alpha));
}

double burr_quantile(double u, double alpha) {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("burr_quantile: u must lie in (0, 1)");
  if (u >= 0.5) return std::pow(1.0 / (2.0 * (1.0 - u)) - 1.0, 1.0 / alpha);
  return -std::pow(1.0 / (2.0 * u) - 1.0, 1.0 / alpha);
}

namespace {

double draw_innovation(InnovationLaw law, RngStream& rng) {
  switch (law) {
    case InnovationLaw::kGaussian: return rng.normal();
    case InnovationLaw::kUniform: return std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0);
    case InnovationLaw::kBurr2: return burr_quantile(rng.uniform(), 2.0);
    case InnovationLaw::kBurr15: return burr_quantile(rng.uniform(), 1.5);
  }
  throw std::logic_error("unknown innovation law");
}

constexpr std::size_t kMaTruncation = 5000;
constexpr std::size_t kBurnIn = 2000;

}  // namespace

// ----------------------------------------------------------- generation

void apply_contamination(std::span<double> values, const Contamination& c) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double t = static_cast<double>(i + 1);
    values[i] += c.trend_slope * t;
    if (c.seasonal_amplitude != 0.0)
      values[i] += c.seasonal_amplitude * std::sin(2.0 * pi * t / c.seasonal_period);
  }
}

TimeSeries generate(const SpectralModel& m, std::size_t n, RngStream& rng) {
  m.validate();
  if (n < 2) throw std::invalid_argument("generate: n must be >= 2");
  TimeSeries ts;
  ts.origin = "generated:" + m.describe() + " seed=" + std::to_string(rng.seed()) +
              " stream=" + std::to_string(rng.stream_id());
  ts.values.resize(n);
  if (m.gaussian()) {
    const std::size_t size = next_power_of_two(2 * (n - 1));
    const std::size_t half = size / 2;
    const auto g = autocovariance(m, half);
    std::vector<double> row(size);
    for (std::size_t j = 0; j <= half; ++j) row[j] = g[j];
    for (std::size_t j = 1; j < half; ++j) row[size - j] = g[j];
    const auto spec = fft_real(row);
    double emax = 0.0;
    for (const auto& v : spec) emax = std::max(emax, v.real());
    std::vector<std::complex<double>> w(size);
    const double inv = 1.0 / static_cast<double>(size);
    for (std::size_t k = 0; k < size; ++k) {
      double e = spec[k].real();
      if (e < 0.0) {
        if (e < -1e-8 * emax)
          throw std::runtime_error("generate: circulant embedding is not nonnegative definite");
        e = 0.0;
        ts.clipped = true;
      }
      const double a = rng.normal(), b = rng.normal();
      w[k] = std::sqrt(e * inv) * std::complex<double>(a, b);
    }
    const auto x = fft(w);
    for (std::size_t t = 0; t < n; ++t) ts.values[t] = x[t].real();
  } else {
    const auto weights = farima_ma_weights(m, kMaTruncation);
    const std::size_t total = n + kBurnIn;
    std::vector<double> eps(total + kMaTruncation - 1);
    for (auto& e : eps) e = draw_innovation(m.contamination.innovation, rng);
    const double scale = std::sqrt(m.sigma2);
    for (std::size_t t = 0; t < n; ++t) {
      // Position of X_t inside the innovation buffer, after the burn-in.
      const std::size_t pos = t + kBurnIn + kMaTruncation - 1;
      double acc = 0.0;
      for (std::size_t j = 0; j < kMaTruncation; ++j) acc += weights[j] * eps[pos - j];
      ts.values[t] = scale * acc;
    }
  }
  apply_contamination(ts.values, m.contamination);
  return ts;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

}  // namespace

TimeSeries ingest_csv(const std::filesystem::path& path, const CsvOptions& opt) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_csv: cannot open " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

  std::size_t column = opt.column;
  std::size_t first = 0;
  if (!opt.column_name.empty() || opt.skip_header) {
    if (lines.empty()) throw std::runtime_error("ingest_csv: file is empty");
    if (!opt.column_name.empty()) {
      const auto cells = split(lines[0], opt.delimiter);
      auto it = std::find(cells.begin(), cells.end(), opt.column_name);
      if (it == cells.end()) throw std::runtime_error("ingest_csv: no column named '" + opt.column_name + "'");
      column = static_cast<std::size_t>(it - cells.begin());
    }
    first = 1;
  }
  TimeSeries ts;
  ts.origin = "ingested:" + path.string();
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::size_t row = i + 1;
    const auto cells = split(lines[i], opt.delimiter);
    if (trim(lines[i]).empty() || column >= cells.size() || cells[column].empty())
      throw std::runtime_error("ingest_csv: row " + std::to_string(row) + " is blank or missing column " +
                               std::to_string(column));
    const std::string& cell = cells[column];
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
      throw std::runtime_error("ingest_csv: row " + std::to_string(row) + " is not numeric: '" + cell + "'");
    if (!std::isfinite(v))
      throw std::runtime_error("ingest_csv: row " + std::to_string(row) + " is not finite: '" + cell + "'");
    ts.values.push_back(v);
  }
  if (ts.values.size() < opt.min_rows)
    throw std::runtime_error("ingest_csv: " + std::to_string(ts.values.size()) + " usable rows, need at least " +
                             std::to_string(opt.min_rows));
  return ts;
}

void write_csv(const std::filesystem::path& path, std::span<const double> values, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  if (!header.empty()) out << header << '\n';
  char buf[32];
  for (double v : values) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, ptr - buf);
    out << '\n';
  }
}

}  // namespace irlm
