#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "besov/experiment.hpp"
#include "besov/metrics.hpp"
#include "besov/parallel.hpp"

namespace py = pybind11;
using namespace besov;

PYBIND11_MODULE(besovinv, m) {
  m.doc() = "Bayesian inversion with Besov priors: wavelet priors, elliptic "
            "forward maps, posterior sampling and verification metrics";

  py::enum_<BasisFamily>(m, "BasisFamily")
      .value("HaarPeriodic", BasisFamily::HaarPeriodic)
      .value("Fourier", BasisFamily::Fourier);

  py::class_<BasisSpec>(m, "BasisSpec")
      .def(py::init([](BasisFamily f, int dim) {
             BasisSpec b{f, dim};
             b.validate();
             return b;
           }),
           py::arg("family"), py::arg("dim"))
      .def_readonly("family", &BasisSpec::family)
      .def_readonly("dim", &BasisSpec::dim)
      .def_property_readonly("regularity", &BasisSpec::regularity);

  py::class_<WaveletIndex>(m, "WaveletIndex")
      .def_readonly("scaling", &WaveletIndex::scaling)
      .def_readonly("level", &WaveletIndex::level)
      .def_readonly("type", &WaveletIndex::type)
      .def_readonly("shift", &WaveletIndex::shift);

  py::class_<GridFunction>(m, "GridFunction")
      .def(py::init<int, int>(), py::arg("dim"), py::arg("n_per_axis"))
      .def_readonly("dim", &GridFunction::dim)
      .def_readonly("n_per_axis", &GridFunction::n_per_axis)
      .def_readwrite("values", &GridFunction::values)
      .def("mean", &GridFunction::mean)
      .def("max_abs", &GridFunction::max_abs);

  m.def("index_to_level", &index_to_level, py::arg("l"), py::arg("d"));
  m.def("level_to_index", &level_to_index, py::arg("w"), py::arg("d"));
  m.def("synthesize", &synthesize, py::arg("coefs"), py::arg("basis"),
        py::arg("n_per_axis"));
  m.def("analyze", &analyze, py::arg("f"), py::arg("basis"), py::arg("N"));

  py::class_<PriorParams>(m, "PriorParams")
      .def(py::init([](double s, double q, double kappa, int dim, BasisSpec basis) {
             PriorParams p{s, q, kappa, dim, basis};
             p.validate();
             return p;
           }),
           py::arg("s"), py::arg("q"), py::arg("kappa"), py::arg("dim"),
           py::arg("basis"))
      .def_readonly("s", &PriorParams::s)
      .def_readonly("q", &PriorParams::q)
      .def_readonly("kappa", &PriorParams::kappa)
      .def_readonly("dim", &PriorParams::dim);

  m.def(
      "sample_prior",
      [](const PriorParams& p, std::int64_t N, std::uint64_t seed) {
        Rng rng(seed);
        return sample_prior(p, N, rng);
      },
      py::arg("prior"), py::arg("N"), py::arg("seed"));
  m.def("coefficient_weight", &coefficient_weight, py::arg("l"), py::arg("prior"));
  m.def("norm_Xtq", &norm_Xtq, py::arg("coefs"), py::arg("t"), py::arg("q"),
        py::arg("d"));
  m.def("norm_Ct_proxy", &norm_Ct_proxy, py::arg("coefs"), py::arg("t"),
        py::arg("prior"));
  m.def("log_prior_density", &log_prior_density, py::arg("coefs"), py::arg("prior"));
  m.def("fernique_rstar", &fernique_rstar, py::arg("s"), py::arg("t"), py::arg("q"),
        py::arg("d"));

  py::class_<EllipticProblem>(m, "EllipticProblem")
      .def_static("zero_source", &EllipticProblem::zero_source, py::arg("dim"),
                  py::arg("n_per_axis"))
      .def_readwrite("f", &EllipticProblem::f)
      .def_readwrite("solver_tol", &EllipticProblem::solver_tol);

  py::class_<ObservationSetup>(m, "ObservationSetup")
      .def_static("iso", &ObservationSetup::iso, py::arg("dim"), py::arg("points"),
                  py::arg("sigma"))
      .def_readwrite("y", &ObservationSetup::y);

  m.def("solve_elliptic", &solve_elliptic, py::arg("u"), py::arg("problem"));
  m.def("observe", &observe, py::arg("p"), py::arg("obs"));
  m.def("forward_G", &forward_G, py::arg("coefs"), py::arg("prior"),
        py::arg("problem"), py::arg("obs"), py::arg("truncation") = py::none());

  py::class_<HellingerEstimate>(m, "HellingerEstimate")
      .def_readonly("value", &HellingerEstimate::value)
      .def_readonly("std_error", &HellingerEstimate::std_error)
      .def_readonly("n_samples", &HellingerEstimate::n_samples);

  m.def("hellinger_from_potentials", &hellinger_from_potentials, py::arg("phi_a"),
        py::arg("phi_b"));

  py::class_<ChainSummary>(m, "ChainSummary")
      .def_readonly("samples", &ChainSummary::samples)
      .def_readonly("phis", &ChainSummary::phis)
      .def_readonly("acceptance_rate", &ChainSummary::acceptance_rate)
      .def_readonly("running_mean", &ChainSummary::running_mean)
      .def_readonly("step_size", &ChainSummary::step_size);

  m.def(
      "run_chain_elliptic",
      [](const PriorParams& prior, std::int64_t n_coef, const EllipticProblem& prob,
         const ObservationSetup& obs, std::int64_t n_steps, double step_size,
         std::int64_t thin, std::uint64_t seed) {
        PosteriorSpec spec = PosteriorSpec::elliptic(prior, n_coef, prob, obs);
        ChainOptions opt;
        opt.n_steps = n_steps;
        opt.step_size = step_size;
        opt.thin = thin;
        Rng rng(seed);
        return run_chain(spec, opt, rng);
      },
      py::arg("prior"), py::arg("n_coef"), py::arg("problem"), py::arg("obs"),
      py::arg("n_steps"), py::arg("step_size"), py::arg("thin"), py::arg("seed"));

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& out_dir) {
        ExperimentConfig cfg = ExperimentConfig::from_json(Json::parse(config_json));
        if (!out_dir.empty()) {
          cfg.output_dir = out_dir;
          cfg.raw["output_dir"] = out_dir;
        }
        return run_experiment(cfg).string();
      },
      py::arg("config_json"), py::arg("out_dir") = "");

  m.def("set_num_threads", &set_num_threads, py::arg("n"));
}
