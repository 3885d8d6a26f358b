#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlsdyn/config.hpp"
#include "nlsdyn/effective.hpp"
#include "nlsdyn/error.hpp"
#include "nlsdyn/experiment.hpp"
#include "nlsdyn/fit.hpp"
#include "nlsdyn/frame.hpp"
#include "nlsdyn/linearization.hpp"
#include "nlsdyn/modulation.hpp"
#include "nlsdyn/profile.hpp"
#include "nlsdyn/profile_family.hpp"
#include "nlsdyn/spectral.hpp"

namespace py = pybind11;
using namespace nlsdyn;

namespace {

using CArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

py::array_t<double> to_numpy(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<cplx> to_numpy(const ComplexField& u) {
  const auto& g = u.grid();
  std::vector<py::ssize_t> shape(g.dim(), g.n());
  py::array_t<cplx> out(shape);
  std::copy(u.values().begin(), u.values().end(), out.mutable_data());
  return out;
}

ComplexField from_numpy(const CArray& a, const GridPtr& g) {
  if (static_cast<std::size_t>(a.size()) != g->size())
    throw UsageError("array has " + std::to_string(a.size()) + " values, grid has " + std::to_string(g->size()));
  return ComplexField(g, std::vector<cplx>(a.data(), a.data() + a.size()));
}

py::array_t<double> matrix(const Eigen::MatrixXd& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto r = out.mutable_unchecked<2>();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return out;
}

py::dict spectral_dict(const SpectralReport& r) {
  py::dict d;
  d["mu"] = r.mu;
  d["dim"] = r.dim;
  d["negative_L1"] = r.negative_L1;
  d["negative_L2"] = r.negative_L2;
  d["lowest_L1"] = r.lowest_L1;
  d["lowest_L2"] = r.lowest_L2;
  d["zero_eigenvalue_L2"] = r.zero_eigenvalue_L2;
  d["zero_overlap_L2"] = r.zero_overlap_L2;
  d["algebra_residual"] = std::vector<double>(std::begin(r.algebra_residual), std::end(r.algebra_residual));
  d["eta_L1inv_eta"] = r.eta_L1inv_eta;
  d["condition_F"] = r.condition_F;
  d["condition_F_detail"] = r.condition_F_detail;
  if (r.omega) {
    d["omega_inv"] = matrix(r.omega->omega_inv);
    d["omega"] = matrix(r.omega->omega);
  } else {
    d["omega_inv"] = py::none();
    d["omega"] = py::none();
  }
  d["omega_error"] = r.omega_error;
  d["rho"] = r.rho ? py::object(py::float_(*r.rho)) : py::object(py::none());
  d["rho_refined"] = r.rho_refined;
  d["rho_unconstrained"] = r.rho_unconstrained;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Generalized NLS solitons in slowly varying potentials";

  static py::exception<Error> base(m, "NlsdynError", PyExc_RuntimeError);
  static py::exception<ConfigError> cfg_err(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      py::set_error(cfg_err, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<NonlinearitySpec>(m, "Nonlinearity")
      .def_static("power", &NonlinearitySpec::power, py::arg("s") = 1.0, py::arg("lam") = 1.0)
      .def_static("hartree_gaussian", &NonlinearitySpec::hartree_gaussian, py::arg("strength") = 1.0,
                  py::arg("width") = 1.0)
      .def_static("hartree_delta", &NonlinearitySpec::hartree_delta, py::arg("strength") = 1.0)
      .def_property_readonly("name", &NonlinearitySpec::name)
      .def_property_readonly("is_local", &NonlinearitySpec::is_local)
      .def("__repr__", &NonlinearitySpec::describe);

  py::class_<PotentialSpec>(m, "Potential")
      .def_static("zero", &PotentialSpec::zero, py::arg("d") = 1)
      .def_static("constant", &PotentialSpec::constant, py::arg("d"), py::arg("value"))
      .def_static("cosine", &PotentialSpec::cosine_from_eps, py::arg("d"), py::arg("amplitude"), py::arg("eps"),
                  py::arg("mu0") = 1.0)
      .def_static("gaussian_well", &PotentialSpec::gaussian_well_from_eps, py::arg("d"), py::arg("depth"),
                  py::arg("eps"), py::arg("mu0") = 1.0)
      .def_property_readonly("eps_V", &PotentialSpec::eps_V)
      .def("value", &PotentialSpec::value)
      .def("gradient", &PotentialSpec::gradient);

  py::class_<SolitonParams>(m, "SolitonParams")
      .def(py::init([](std::array<double, 2> a, std::array<double, 2> v, double gamma, double mu) {
             return SolitonParams{a, v, gamma, mu};
           }),
           py::arg("a") = std::array<double, 2>{0.0, 0.0}, py::arg("v") = std::array<double, 2>{0.0, 0.0},
           py::arg("gamma") = 0.0, py::arg("mu") = 1.0)
      .def_readwrite("a", &SolitonParams::a)
      .def_readwrite("v", &SolitonParams::v)
      .def_readwrite("gamma", &SolitonParams::gamma)
      .def_readwrite("mu", &SolitonParams::mu)
      .def("__repr__", [](const SolitonParams& s) {
        return "SolitonParams(a=(" + std::to_string(s.a[0]) + ", " + std::to_string(s.a[1]) + "), v=(" +
               std::to_string(s.v[0]) + ", " + std::to_string(s.v[1]) + "), gamma=" + std::to_string(s.gamma) +
               ", mu=" + std::to_string(s.mu) + ")";
      });

  py::class_<SpatialGrid, std::shared_ptr<SpatialGrid>>(m, "Grid")
      .def(py::init([](int dim, int n, double half_extent) {
             return std::const_pointer_cast<SpatialGrid>(make_grid(dim, n, half_extent));
           }),
           py::arg("dim"), py::arg("n"), py::arg("half_extent"))
      .def_property_readonly("dim", &SpatialGrid::dim)
      .def_property_readonly("n", &SpatialGrid::n)
      .def_property_readonly("half_extent", &SpatialGrid::half_extent)
      .def_property_readonly("spacing", &SpatialGrid::spacing)
      .def_property_readonly("axis", [](const SpatialGrid& g) {
        return to_numpy(std::vector<double>(g.axis().begin(), g.axis().end()));
      });

  py::class_<RadialProfile, std::shared_ptr<RadialProfile>>(m, "Profile")
      .def_readonly("mu", &RadialProfile::mu)
      .def_readonly("dim", &RadialProfile::dim)
      .def_readonly("mass", &RadialProfile::mass)
      .def_readonly("dmass", &RadialProfile::dmass)
      .def_readonly("residual", &RadialProfile::residual)
      .def_property_readonly("r", [](const RadialProfile& p) { return to_numpy(p.r); })
      .def_property_readonly("eta", [](const RadialProfile& p) { return to_numpy(p.eta.f); })
      .def_property_readonly("dmu_eta", [](const RadialProfile& p) { return to_numpy(p.dmu.f); })
      .def_property_readonly("eta0", &RadialProfile::eta0)
      .def("__call__", [](const RadialProfile& p, double r) { return p.eval(r).eta; })
      .def("table", &profile_table);

  m.def(
      "solve_profile",
      [](const NonlinearitySpec& spec, double mu, int d) {
        py::gil_scoped_release nogil;
        return std::make_shared<RadialProfile>(solve_profile(spec, mu, d));
      },
      py::arg("spec"), py::arg("mu") = 1.0, py::arg("d") = 1);

  m.def(
      "mass_curve",
      [](const NonlinearitySpec& spec, const std::vector<double>& mus, int d) {
        MassCurve c;
        {
          py::gil_scoped_release nogil;
          c = mass_curve(spec, mus, d);
        }
        py::dict out;
        out["mu"] = to_numpy(c.mu);
        out["m"] = to_numpy(c.m);
        out["dm"] = to_numpy(c.dm);
        out["stable"] = c.stable;
        return out;
      },
      py::arg("spec"), py::arg("mus"), py::arg("d") = 1);

  m.def(
      "certify",
      [](const RadialProfile& p, const NonlinearitySpec& spec, int k_max) {
        CertifyOptions o;
        o.k_max = k_max;
        SpectralReport r;
        {
          py::gil_scoped_release nogil;
          r = certify(p, spec, o);
        }
        return spectral_dict(r);
      },
      py::arg("profile"), py::arg("spec"), py::arg("k_max") = 4);

  m.def(
      "synthesize",
      [](const RadialProfile& p, const SolitonParams& s, std::shared_ptr<SpatialGrid> g) {
        return to_numpy(synthesize(p, s, g));
      },
      py::arg("profile"), py::arg("sigma"), py::arg("grid"));

  py::class_<ProfileFamily, std::shared_ptr<ProfileFamily>>(m, "ProfileFamily")
      .def(py::init([](const NonlinearitySpec& spec, int d, double mu_lo, double mu_hi) {
             py::gil_scoped_release nogil;
             return std::make_shared<ProfileFamily>(spec, d, mu_lo, mu_hi);
           }),
           py::arg("spec"), py::arg("d"), py::arg("mu_lo"), py::arg("mu_hi"))
      .def_property_readonly("mu_lo", &ProfileFamily::mu_lo)
      .def_property_readonly("mu_hi", &ProfileFamily::mu_hi)
      .def("at", [](const ProfileFamily& f, double mu) { return std::const_pointer_cast<RadialProfile>(f.at(mu)); });

  m.def(
      "decompose",
      [](const CArray& psi, std::shared_ptr<SpatialGrid> g, const SolitonParams& guess, const ProfileFamily& family) {
        const auto field = from_numpy(psi, g);
        ModulationState st;
        {
          py::gil_scoped_release nogil;
          st = decompose(field, guess, family);
        }
        py::dict out;
        out["sigma"] = st.sigma;
        out["w"] = to_numpy(st.w);
        out["w_l2"] = st.w_l2;
        out["w_h1"] = st.w_h1;
        out["iterations"] = st.iterations;
        out["constraint_residual"] = st.constraint_residual;
        return out;
      },
      py::arg("psi"), py::arg("grid"), py::arg("guess"), py::arg("family"));

  m.def(
      "newton_flow",
      [](const SolitonParams& s0, const PotentialSpec& V, double t_end, double dt) {
        EffectiveTrajectory tr;
        {
          py::gil_scoped_release nogil;
          tr = newton_flow(s0, V, t_end, dt);
        }
        std::vector<double> a, v, gamma, mu;
        for (const auto& s : tr.sigma) {
          a.push_back(s.a[0]);
          v.push_back(s.v[0]);
          gamma.push_back(s.gamma);
          mu.push_back(s.mu);
        }
        py::dict out;
        out["t"] = to_numpy(tr.t);
        out["a"] = to_numpy(a);
        out["v"] = to_numpy(v);
        out["gamma"] = to_numpy(gamma);
        out["mu"] = to_numpy(mu);
        out["energy_drift"] = tr.energy_drift;
        return out;
      },
      py::arg("sigma0"), py::arg("potential"), py::arg("t_end"), py::arg("dt") = 0.01);

  m.def(
      "fit_loglog",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        const auto f = fit_loglog(x, y);
        py::dict out;
        out["slope"] = f.slope;
        out["intercept"] = f.intercept;
        out["r2"] = f.r2;
        out["slope_stderr"] = f.slope_stderr;
        out["points"] = f.points;
        return out;
      },
      py::arg("x"), py::arg("y"));

  py::class_<ExperimentConfig>(m, "Config")
      .def(py::init<>())
      .def_static(
          "parse", [](const std::string& text, bool strict) { return parse_config(text, strict); }, py::arg("text"),
          py::arg("strict") = true)
      .def_static(
          "load", [](const std::string& path, bool strict) { return load_config(path, strict); }, py::arg("path"),
          py::arg("strict") = true)
      .def("to_ini", &ExperimentConfig::to_ini)
      .def("validate", &ExperimentConfig::validate)
      .def("set", [](ExperimentConfig& c, const std::string& name, double value) { set_parameter(c, name, value); })
      .def_property_readonly("t_end", &ExperimentConfig::resolved_t_end)
      .def_readwrite("out_dir", &ExperimentConfig::out_dir)
      .def_readwrite("seed", &ExperimentConfig::seed);

  m.def(
      "run_experiment_json",
      [](const ExperimentConfig& cfg, bool write_outputs, bool certify_run) {
        RunOptions o;
        o.write_outputs = write_outputs;
        o.certify = certify_run;
        py::gil_scoped_release nogil;
        return run_experiment(cfg, o).to_json().str();
      },
      py::arg("config"), py::arg("write_outputs") = true, py::arg("certify") = true);

  m.def(
      "sweep_orders_json",
      [](const ExperimentConfig& base, const std::string& parameter, const std::vector<double>& values,
         const std::vector<std::string>& observables, int workers, bool certify_run) {
        RunOptions o;
        o.certify = certify_run;
        py::gil_scoped_release nogil;
        return sweep_orders(base, parameter, values, observables, workers, o).to_json().str();
      },
      py::arg("base"), py::arg("parameter"), py::arg("values"), py::arg("observables"), py::arg("workers") = 0,
      py::arg("certify") = true);
}
