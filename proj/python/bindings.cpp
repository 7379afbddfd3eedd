// Python bindings for the estimator, simulation and transfer functions.

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "irlm/harness.hpp"

namespace py = pybind11;
using namespace irlm;

namespace {

std::span<const double> as_span(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
  return {a.data(), static_cast<std::size_t>(a.shape(0))};
}

py::dict flags_dict(const EstimationFlags& f) {
  py::dict d;
  d["clamped_inversion"] = f.clamped_inversion;
  d["gamma_clamped"] = f.gamma_clamped;
  d["jittered"] = f.jittered;
  d["grid_boundary"] = f.grid_boundary;
  d["m_capped"] = f.m_capped;
  return d;
}

py::dict report_dict(const EstimationReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["p"] = r.p;
  d["d_ir"] = r.d_ir;
  d["asymptotic_sd"] = r.asymptotic_sd;
  d["per_scale_d"] = r.per_scale_d;
  d["gls_d"] = r.gls_d;
  d["sigma_hat"] = r.sigma_hat;
  d["alpha_hat"] = r.alpha_hat;
  d["alpha_tilde"] = r.alpha_tilde;
  d["m_hat"] = r.m_hat;
  d["m_tilde"] = r.m_tilde;
  d["m_tilde_raw"] = r.m_tilde_raw;
  d["test_stat"] = r.test_stat;
  d["p_value"] = r.p_value;
  py::list grid;
  for (const auto& g : r.grid) {
    py::dict e;
    e["alpha"] = g.alpha;
    e["m"] = g.m;
    e["feasible"] = g.feasible;
    e["q"] = g.q;
    e["d_gls"] = g.d_gls;
    grid.append(e);
  }
  d["grid"] = grid;
  d["flags"] = flags_dict(r.flags);
  return d;
}

SpectralModel make_model(const std::string& kind, double d, double beta, std::vector<double> ar,
                         std::vector<double> ma, double sigma2) {
  if (kind == "fgn") return SpectralModel::fgn(d + 0.5, sigma2);
  if (kind == "farima") return SpectralModel::farima(d, std::move(ar), std::move(ma), sigma2);
  if (kind == "power_law") return SpectralModel::power_law(d, beta);
  if (kind == "garma0") return SpectralModel::garma0(d);
  throw std::invalid_argument("unknown model kind '" + kind + "' (fgn, farima, power_law, garma0)");
}

}  // namespace

PYBIND11_MODULE(_irlm, m) {
  m.doc() = "Adaptive increment-ratio estimation of the memory parameter";

  py::register_exception<EstimationError>(m, "EstimationError", PyExc_ValueError);

  m.def("psi", &psi, py::arg("x"), py::arg("y"));
  m.def("ir_statistic", [](py::array_t<double, py::array::c_style | py::array::forcecast> x, std::size_t mm) {
    return ir_statistic(as_span(x), mm);
  }, py::arg("x"), py::arg("m"));
  m.def("ir_profile", [](py::array_t<double, py::array::c_style | py::array::forcecast> x, std::size_t mm,
                         std::size_t p) { return ir_profile(as_span(x), mm, p).values; },
        py::arg("x"), py::arg("m"), py::arg("p"));

  m.def("lambda_", &lambda, py::arg("r"));
  m.def("rho", &rho, py::arg("d"));
  m.def("lambda0", &lambda0, py::arg("d"));
  m.def("lambda0_prime", &lambda0_prime, py::arg("d"));
  m.def("lambda0_inv", [](double x, bool clamp) {
    const auto r = lambda0_inv(x, clamp);
    return py::make_tuple(r.d, r.clamped);
  }, py::arg("x"), py::arg("clamp") = true);

  m.def("sigma_entry", [](double d, int i, int j) { return sigma_entry(d, i, j).value; },
        py::arg("d"), py::arg("i"), py::arg("j"));
  m.def("gamma_matrix", [](double d, int p) { return gamma_matrix(d, p).gamma; }, py::arg("d"), py::arg("p"));

  m.def("expected_ir", [](const std::string& kind, double d, std::size_t mm, double beta) {
    const auto r = expected_ir(make_model(kind, d, beta, {}, {}, 1.0), mm);
    return py::make_tuple(r.expected_ir, r.ratio);
  }, py::arg("kind"), py::arg("d"), py::arg("m"), py::arg("beta") = 1.0);

  m.def("generate", [](const std::string& kind, double d, std::size_t n, std::uint64_t seed, std::uint64_t stream,
                       double beta, std::vector<double> ar, std::vector<double> ma, double sigma2) {
    RngStream rng(seed, stream);
    const auto ts = generate(make_model(kind, d, beta, std::move(ar), std::move(ma), sigma2), n, rng);
    return py::array_t<double>(static_cast<py::ssize_t>(ts.values.size()), ts.values.data());
  }, py::arg("kind"), py::arg("d"), py::arg("n"), py::arg("seed") = 1, py::arg("stream") = 0,
     py::arg("beta") = 1.0, py::arg("ar") = std::vector<double>{}, py::arg("ma") = std::vector<double>{},
     py::arg("sigma2") = 1.0);

  m.def("scale_grid", [](std::size_t n, std::size_t p) {
    const auto g = scale_grid(n, p);
    return py::make_tuple(g.k_values, g.alphas, g.m_values);
  }, py::arg("n"), py::arg("p"));
  m.def("adapt_alpha", [](double a, std::size_t p, std::size_t n) {
    const auto r = adapt_alpha(a, p, n);
    return py::make_tuple(r.alpha, r.m, r.capped);
  }, py::arg("alpha_hat"), py::arg("p"), py::arg("n"));
  m.def("default_p", &default_p, py::arg("n"));

  m.def("estimate", [](py::array_t<double, py::array::c_style | py::array::forcecast> x, std::size_t p,
                       const std::string& table) {
    EstimateOptions opt;
    opt.p = p;
    if (!table.empty()) opt.table = &cached_table(table);
    EstimationReport r;
    {
      py::gil_scoped_release release;
      r = estimate(as_span(x), opt);
    }
    return report_dict(r);
  }, py::arg("x"), py::arg("p") = 0, py::arg("table") = "");

  m.def("default_table_path", []() { return default_table_path().string(); });
}
