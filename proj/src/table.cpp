#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "irlm/asymptotics.hpp"

#ifndef IRLM_DEFAULT_TABLE
#define IRLM_DEFAULT_TABLE ""
#endif

namespace irlm {

namespace {

constexpr const char* kMagic = "irlm-asymptotic-table";
constexpr int kFormatVersion = 1;

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok, const std::string& what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw std::runtime_error("table: bad number '" + tok + "' in " + what);
  return v;
}

// Four-point Lagrange weights for position t (in grid units) relative to the
// first of four equispaced nodes.
std::array<double, 4> lagrange4(double t) {
  std::array<double, 4> w{};
  for (int k = 0; k < 4; ++k) {
    double v = 1.0;
    for (int l = 0; l < 4; ++l)
      if (l != k) v *= (t - l) / static_cast<double>(k - l);
    w[k] = v;
  }
  return w;
}

// First node of the 4-point stencil around index position x in [0, n-1].
std::size_t stencil_start(double x, std::size_t n) {
  if (n < 4) throw std::runtime_error("table: need at least four grid points");
  auto i = static_cast<long>(std::floor(x)) - 1;
  i = std::clamp(i, 0L, static_cast<long>(n) - 4);
  return static_cast<std::size_t>(i);
}

}  // namespace

AsymptoticTable build_table(const TableBuildSpec& spec) {
  if (spec.p_max < 2) throw std::invalid_argument("build_table: p_max must be >= 2");
  if (!(spec.d_step > 0.0 && spec.d_step <= 0.1)) throw std::invalid_argument("build_table: d_step out of range");
  AsymptoticTable t;
  t.p_max = spec.p_max;
  t.d_min = kLambda0DMin;
  t.d_step = spec.d_step;
  t.options = spec.gamma;
  const double steps = (kLambda0DMax - kLambda0DMin) / spec.d_step;
  if (std::abs(steps - std::round(steps)) > 1e-6)
    throw std::invalid_argument("build_table: d_step must divide the range [-0.49, 1.49]");
  const auto n = static_cast<std::size_t>(std::llround(steps)) + 1;
  std::size_t n_gamma = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = kLambda0DMin + static_cast<double>(k) * spec.d_step;
    t.d_grid.push_back(d);
    t.lambda0.push_back(lambda0(d));
    t.lambda0_prime.push_back(lambda0_prime(d));
    if (d <= kGammaDMax + 1e-9) n_gamma = k + 1;
  }
  t.gamma.assign(n_gamma, Eigen::MatrixXd());
  int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, threads);
  std::atomic<std::size_t> next{0};
  std::atomic<int> done{0};
  std::mutex mu;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next++;
      if (k >= n_gamma) return;
      try {
        auto g = gamma_matrix(t.d_grid[k], spec.p_max, spec.gamma);
        t.gamma[k] = std::move(g.gamma);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        return;
      }
      const int c = ++done;
      if (spec.progress) {
        std::lock_guard lock(mu);
        spec.progress(c, static_cast<int>(n_gamma));
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return t;
}

void save_table(const AsymptoticTable& t, const std::filesystem::path& path) {
  std::ostringstream body;
  const auto& o = t.options;
  body << "format " << kFormatVersion << "\n";
  body << "p_max " << t.p_max << "\n";
  body << "d_min " << fmt(t.d_min) << "\n";
  body << "d_step " << fmt(t.d_step) << "\n";
  body << "points " << t.d_grid.size() << "\n";
  body << "gamma_points " << t.gamma.size() << "\n";
  body << "method " << (o.method == GammaMethod::kCubature ? "cubature" : "monte_carlo") << "\n";
  body << "cubature " << o.rule.outer_order << " " << o.rule.inner_order << " " << (o.rule.adaptive ? 1 : 0) << " "
       << fmt(o.rule.tol) << "\n";
  body << "far_field_threshold " << fmt(o.far_field_threshold) << "\n";
  body << "tau_rule " << o.grading_levels << " " << o.tau_order << "\n";
  body << "monte_carlo " << o.mc_samples << " " << fmt(o.tau_max) << " " << fmt(o.tau_step) << " " << o.seed
       << "\n";
  for (std::size_t k = 0; k < t.d_grid.size(); ++k) {
    body << "row " << fmt(t.d_grid[k]) << " " << fmt(t.lambda0[k]) << " " << fmt(t.lambda0_prime[k]);
    if (k < t.gamma.size()) {
      const auto& g = t.gamma[k];
      for (int a = 0; a < t.p_max; ++a)
        for (int b = a; b < t.p_max; ++b) body << " " << fmt(g(a, b));
    }
    body << "\n";
  }
  const std::string s = body.str();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_table: cannot open " + path.string());
  char sum[24];
  std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(fnv1a(s)));
  out << kMagic << " checksum " << sum << "\n" << s;
  if (!out) throw std::runtime_error("save_table: write failed for " + path.string());
}

AsymptoticTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_table: cannot open " + path.string());
  std::string first;
  std::getline(in, first);
  std::istringstream hs(first);
  std::string magic, word, sum;
  hs >> magic >> word >> sum;
  if (magic != kMagic || word != "checksum") throw std::runtime_error("load_table: not a table file: " + path.string());
  std::stringstream rest;
  rest << in.rdbuf();
  const std::string body = rest.str();
  char expect[24];
  std::snprintf(expect, sizeof expect, "%016llx", static_cast<unsigned long long>(fnv1a(body)));
  if (sum != expect) throw std::runtime_error("load_table: checksum mismatch in " + path.string());

  AsymptoticTable t;
  std::map<std::string, std::vector<std::string>> header;
  std::istringstream lines(body);
  std::string line;
  std::size_t points = 0, gamma_points = 0;
  while (std::getline(lines, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::vector<std::string> toks;
    for (std::string tok; ls >> tok;) toks.push_back(tok);
    if (key != "row") {
      header[key] = toks;
      continue;
    }
    if (t.p_max == 0) {
      auto get = [&](const char* k) -> const std::vector<std::string>& {
        auto it = header.find(k);
        if (it == header.end() || it->second.empty()) throw std::runtime_error(std::string("load_table: missing ") + k);
        return it->second;
      };
      if (std::stoi(get("format")[0]) != kFormatVersion) throw std::runtime_error("load_table: unsupported format");
      t.p_max = std::stoi(get("p_max")[0]);
      t.d_min = parse_double(get("d_min")[0], "d_min");
      t.d_step = parse_double(get("d_step")[0], "d_step");
      points = std::stoul(get("points")[0]);
      gamma_points = std::stoul(get("gamma_points")[0]);
      auto& o = t.options;
      o.method = get("method")[0] == "cubature" ? GammaMethod::kCubature : GammaMethod::kMonteCarlo;
      const auto& c = get("cubature");
      o.rule.outer_order = std::stoi(c.at(0));
      o.rule.inner_order = std::stoi(c.at(1));
      o.rule.adaptive = c.at(2) == "1";
      o.rule.tol = parse_double(c.at(3), "cubature");
      o.far_field_threshold = parse_double(get("far_field_threshold")[0], "far_field_threshold");
      const auto& tr = get("tau_rule");
      o.grading_levels = std::stoi(tr.at(0));
      o.tau_order = std::stoi(tr.at(1));
      const auto& mc = get("monte_carlo");
      o.mc_samples = std::stoull(mc.at(0));
      o.tau_max = parse_double(mc.at(1), "monte_carlo");
      o.tau_step = parse_double(mc.at(2), "monte_carlo");
      o.seed = std::stoull(mc.at(3));
    }
    const std::size_t k = t.d_grid.size();
    const std::size_t tri = static_cast<std::size_t>(t.p_max) * (t.p_max + 1) / 2;
    const std::size_t want = 3 + (k < gamma_points ? tri : 0);
    if (toks.size() != want) throw std::runtime_error("load_table: malformed row " + std::to_string(k));
    t.d_grid.push_back(parse_double(toks[0], "row"));
    t.lambda0.push_back(parse_double(toks[1], "row"));
    t.lambda0_prime.push_back(parse_double(toks[2], "row"));
    if (k < gamma_points) {
      Eigen::MatrixXd g(t.p_max, t.p_max);
      std::size_t idx = 3;
      for (int a = 0; a < t.p_max; ++a)
        for (int b = a; b < t.p_max; ++b) g(a, b) = g(b, a) = parse_double(toks[idx++], "row");
      t.gamma.push_back(std::move(g));
    }
  }
  if (t.d_grid.size() != points || t.gamma.size() != gamma_points || points < 4 || gamma_points < 4)
    throw std::runtime_error("load_table: truncated table " + path.string());
  return t;
}

Interpolated interpolate(const AsymptoticTable& t, double d, int p) {
  if (p < 1 || p > t.p_max)
    throw std::invalid_argument("interpolate: p=" + std::to_string(p) + " exceeds table p_max=" +
                                std::to_string(t.p_max));
  double x = (d - t.d_min) / t.d_step;
  // Grid points return the stored values unchanged.
  if (std::abs(x - std::round(x)) < 1e-9) x = std::round(x);
  if (x < -1e-9 || x > static_cast<double>(t.d_grid.size() - 1) + 1e-9)
    throw std::domain_error("interpolate: d outside the table range");
  Interpolated out;
  {
    const std::size_t s = stencil_start(x, t.d_grid.size());
    const auto w = lagrange4(x - static_cast<double>(s));
    for (int k = 0; k < 4; ++k) {
      out.lambda0 += w[k] * t.lambda0[s + k];
      out.lambda0_prime += w[k] * t.lambda0_prime[s + k];
    }
  }
  if (x > static_cast<double>(t.gamma.size() - 1) + 1e-9)
    throw std::domain_error("interpolate: Gamma is tabulated only up to d=" + fmt(t.gamma_d_max()));
  const std::size_t s = stencil_start(x, t.gamma.size());
  const auto w = lagrange4(x - static_cast<double>(s));
  out.gamma = Eigen::MatrixXd::Zero(p, p);
  for (int k = 0; k < 4; ++k) out.gamma += w[k] * t.gamma[s + k].topLeftCorner(p, p);
  return out;
}

std::filesystem::path default_table_path() {
  if (const char* env = std::getenv("IRLM_TABLE"); env && *env) return env;
  return IRLM_DEFAULT_TABLE;
}

const AsymptoticTable& cached_table(const std::filesystem::path& path) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<AsymptoticTable>> cache;
  std::lock_guard lock(mu);
  const auto key = std::filesystem::absolute(path).lexically_normal().string();
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<AsymptoticTable>(load_table(path))).first;
  return *it->second;
}

}  // namespace irlm
