#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pwdlab/cccn.hpp"
#include "pwdlab/dist_learn.hpp"
#include "pwdlab/distributions.hpp"
#include "pwdlab/harness.hpp"
#include "pwdlab/reductions.hpp"
#include "pwdlab/scenario.hpp"
#include "pwdlab/verify.hpp"

namespace py = pybind11;
using namespace pwdlab;

namespace {

py::dict row_dict(const ReportRow& r) {
  py::dict d;
  d["scenario"] = r.scenario;
  d["trial"] = r.trial;
  d["seed"] = r.seed;
  d["pipeline"] = r.pipeline;
  d["err_T"] = r.err_T;
  d["err_h"] = r.err_h;
  d["kl0"] = r.kl0;
  d["kl1"] = r.kl1;
  d["chosen_provenance"] = r.chosen_provenance;
  d["draws_used"] = r.draws_used;
  d["runtime_ms"] = r.runtime_ms ? py::cast(*r.runtime_ms) : py::none();
  d["success"] = r.success;
  return d;
}

py::dict suite_dict(const SuiteResult& s) {
  py::dict metrics;
  for (const auto& [k, v] : s.metrics) metrics[py::str(k)] = v;
  py::dict d;
  d["name"] = s.name;
  d["passed"] = s.passed;
  d["metrics"] = metrics;
  return d;
}

}  // namespace

PYBIND11_MODULE(pwdlab, m) {
  m.doc() = "Learning with distributions: simulator, learners and property suites";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<BudgetExhausted>(m, "BudgetExhausted", PyExc_RuntimeError);

  py::class_<DistributionSpec>(m, "DistributionSpec")
      .def_static("bernoulli", &DistributionSpec::bernoulli, py::arg("biases"), py::arg("lam"))
      .def_static("bary", &DistributionSpec::bary, py::arg("k"), py::arg("b"), py::arg("rows"),
                  py::arg("lam"))
      .def_static("gaussian", &DistributionSpec::gaussian, py::arg("means"), py::arg("sigmas"),
                  py::arg("box_lo") = 0.0, py::arg("box_hi") = 1.0)
      .def_property_readonly("family", [](const DistributionSpec& d) { return std::string(to_string(d.family())); })
      .def_property_readonly("k", &DistributionSpec::k)
      .def_property_readonly("params", [](const DistributionSpec& d) {
        return std::vector<double>(d.params().begin(), d.params().end());
      })
      .def("log_density", [](const DistributionSpec& d, const std::vector<double>& y) {
        return log_density_exact(d, y);
      });

  m.def("kl_divergence", &kl_divergence, "KL(p || q) in bits", py::arg("p"), py::arg("q"));
  m.def("entropy", &entropy, py::arg("p"));

  m.def("lab_parameters", [](double p_hat, double q_hat, double xi) {
    const LabParams L = lab_parameters(p_hat, q_hat, xi);
    py::dict d;
    d["a0"] = L.a0;
    d["a1"] = L.a1;
    d["b0"] = L.b0;
    d["b1"] = L.b1;
    return d;
  }, py::arg("p_hat"), py::arg("q_hat"), py::arg("xi"));
  m.def("lab_parameters_valid", &lab_parameters_valid, py::arg("p_hat"), py::arg("q_hat"), py::arg("xi"));
  m.def("noise_rates", [](double p, double q, double p_hat, double q_hat, double xi) {
    const NoiseRates r = noise_rates(p, q, lab_parameters(p_hat, q_hat, xi));
    return py::make_tuple(r.eta0, r.eta1);
  }, py::arg("p"), py::arg("q"), py::arg("p_hat"), py::arg("q_hat"), py::arg("xi"));
  m.def("guess_grid_size", [](double xi) { return guess_grid(xi).pairs.size(); }, py::arg("xi"));

  m.def("cn_sample_size", &cn_sample_size, py::arg("epsilon"), py::arg("delta"), py::arg("xi"),
        py::arg("class_size"), py::arg("grid_size"), py::arg("constant") = 32.0);
  m.def("amplification_repetitions", &amplification_repetitions, py::arg("delta"));
  m.def("ml_selection_sample_size", &ml_selection_sample_size, py::arg("m_bound"), py::arg("epsilon"),
        py::arg("delta"), py::arg("list_size"));
  m.def("default_gamma", &default_gamma, py::arg("m_bound"), py::arg("m_p"), py::arg("epsilon"));

  m.def("normalize_scenario", [](const std::string& text) { return serialize_scenario(parse_scenario(text)); },
        "Parse, validate and re-serialize with every default explicit", py::arg("text"));

  m.def("run_experiment", [](const std::string& text, std::optional<std::size_t> trials,
                             std::optional<std::uint64_t> seed, std::optional<std::string> pipeline,
                             std::size_t workers) {
    const ScenarioSpec spec = parse_scenario(text);
    RunOptions opts;
    opts.trials = trials;
    opts.seed = seed;
    if (pipeline) opts.pipeline = parse_pipeline(*pipeline);
    opts.workers = workers;
    std::vector<ReportRow> rows;
    {
      py::gil_scoped_release release;
      rows = run_experiment(spec, opts);
    }
    py::list out;
    for (const auto& r : rows) out.append(row_dict(r));
    return out;
  }, "Run a scenario given as JSON text; one dict per trial", py::arg("config"),
        py::arg("trials") = py::none(), py::arg("seed") = py::none(), py::arg("pipeline") = py::none(),
        py::arg("workers") = 1);

  m.def("report_csv", [](const std::string& text, std::optional<std::size_t> trials,
                         std::optional<std::uint64_t> seed) {
    RunOptions opts;
    opts.trials = trials;
    opts.seed = seed;
    py::gil_scoped_release release;
    return to_csv(run_experiment(parse_scenario(text), opts));
  }, py::arg("config"), py::arg("trials") = py::none(), py::arg("seed") = py::none());

  m.def("verify", [](const std::string& which, std::uint64_t seed, double scale) {
    VerifyOptions opts;
    opts.seed = seed;
    opts.scale = scale;
    std::vector<SuiteResult> results;
    {
      py::gil_scoped_release release;
      results = run_suites(which, opts);
    }
    py::list out;
    for (const auto& s : results) out.append(suite_dict(s));
    return out;
  }, py::arg("which") = "all", py::arg("seed") = VerifyOptions{}.seed, py::arg("scale") = 1.0);

  m.attr("suite_names") = suite_names();
  m.attr("report_schema") = kReportSchema;
}
