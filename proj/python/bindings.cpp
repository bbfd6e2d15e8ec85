#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "priorcheck/calibration.hpp"
#include "priorcheck/checks.hpp"
#include "priorcheck/error.hpp"
#include "priorcheck/io.hpp"
#include "priorcheck/sampler.hpp"
#include "priorcheck/sufficiency.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace priorcheck;

namespace {

GroupedDataset dataset_from_pairs(const std::vector<std::pair<std::string, double>>& pairs) {
  std::vector<Observation> raw;
  raw.reserve(pairs.size());
  for (const auto& [group, value] : pairs) raw.push_back({group, value, std::nullopt});
  return validate_dataset(raw);
}

std::vector<std::vector<double>> to_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < m.rows(); ++i) rows.emplace_back(m.row(i).begin(), m.row(i).end());
  return rows;
}

Stage stage_from_name(const std::string& name) {
  const auto stage = parse_stage(name);
  if (!stage) throw Error(ErrorCode::InvalidParameter, "unknown stage '" + name + "'");
  return *stage;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Staged prior-data conflict checks for the balanced normal-normal model";

  py::register_exception<Error>(m, "PriorcheckError", PyExc_ValueError);

  py::class_<GroupedDataset>(m, "Dataset")
      .def_static("from_pairs", &dataset_from_pairs, py::arg("pairs"),
                  "Build from (group, value) pairs; groups keep first-appearance order.")
      .def_static("from_csv", [](const std::string& path) { return io::load_dataset_csv(path); })
      .def_property_readonly("groups", &GroupedDataset::groups)
      .def_property_readonly("per_group", &GroupedDataset::per_group)
      .def_property_readonly("group_ids", &GroupedDataset::group_ids)
      .def_property_readonly("values", [](const GroupedDataset& d) { return to_rows(d.values()); })
      .def("to_csv", &io::dataset_to_csv);

  py::class_<HyperPrior>(m, "HyperPrior")
      .def_static("improper_flat", &HyperPrior::improper_flat)
      .def_static("normal_inv_gamma", &HyperPrior::normal_inv_gamma, py::arg("m0"),
                  py::arg("s0sq"), py::arg("a0"), py::arg("b0"))
      .def_property_readonly("is_proper", &HyperPrior::is_proper);

  py::class_<PValueResult>(m, "PValueResult")
      .def_readonly("p", &PValueResult::p)
      .def_readonly("n_draws", &PValueResult::n_draws)
      .def_readonly("seed", &PValueResult::seed)
      .def_readonly("mc_stderr", &PValueResult::mc_stderr)
      .def_readonly("discrepancy_name", &PValueResult::discrepancy_name)
      .def_readonly("observed_h", &PValueResult::observed_h)
      .def_readonly("degenerate", &PValueResult::degenerate)
      .def("__repr__", [](const PValueResult& r) {
        return "PValueResult(p=" + format_real(r.p) + ", n_draws=" + std::to_string(r.n_draws) +
               ", discrepancy='" + r.discrepancy_name + "')";
      });

  m.def("helmert_basis", [](std::size_t groups) { return to_rows(helmert_basis(groups).matrix()); },
        py::arg("groups"));
  m.def("sample_unit_sphere",
        [](std::size_t dim, std::uint64_t seed, std::uint64_t stream_id) {
          RngStream rng(seed, stream_id);
          return sample_unit_sphere(dim, rng);
        },
        py::arg("dim"), py::arg("seed") = 1, py::arg("stream_id") = 0);
  m.def("sample_t_given_v",
        [](double s, double q, std::size_t groups, std::uint64_t seed, std::uint64_t stream_id) {
          RngStream rng(seed, stream_id);
          return sample_T_given_V(HyperStat{s, q}, groups, helmert_basis(groups), rng);
        },
        py::arg("s"), py::arg("q"), py::arg("groups"), py::arg("seed") = 1,
        py::arg("stream_id") = 0);

  m.def("compute_t", [](const GroupedDataset& d) { return compute_T(d).means; });
  m.def("compute_v", [](const std::vector<double>& means) {
    const auto v = compute_V(SufficientStat{means});
    return std::make_pair(v.s, v.q);
  });
  m.def("compute_residuals",
        [](const GroupedDataset& d) { return to_rows(compute_residuals(d, compute_T(d))); });

  m.def("mc_pvalue", &mc_pvalue, py::arg("observed_h"), py::arg("reference_draws"));
  m.def("check_simple", &check_simple, py::arg("xbar"), py::arg("n"), py::arg("sigma2"),
        py::arg("mu0"), py::arg("tau0sq"));

  m.def("check_model",
        [](const GroupedDataset& d, double sigma2, const std::string& h, std::size_t n_draws,
           std::uint64_t seed, unsigned threads) {
          const SamplingModel model(sigma2, d.per_group(), d.groups());
          return check_model(d, model, residual_discrepancy(h), {n_draws, seed, threads});
        },
        py::arg("data"), py::arg("sigma2"), py::arg("discrepancy") = "chisq_total",
        py::arg("n_draws") = 10000, py::arg("seed") = 1, py::arg("threads") = 1);
  m.def("check_pi2",
        [](const GroupedDataset& d, double sigma2, const std::string& h, std::size_t n_draws,
           std::uint64_t seed, unsigned threads) {
          const SamplingModel model(sigma2, d.per_group(), d.groups());
          return check_pi2(d, model, t_discrepancy(h), {n_draws, seed, threads});
        },
        py::arg("data"), py::arg("sigma2"), py::arg("discrepancy") = "skew",
        py::arg("n_draws") = 10000, py::arg("seed") = 1, py::arg("threads") = 1);
  m.def("check_pi1",
        [](const GroupedDataset& d, double sigma2, const HyperPrior& prior, const std::string& h,
           std::size_t n_draws, std::uint64_t seed, unsigned threads) {
          const SamplingModel model(sigma2, d.per_group(), d.groups());
          return check_pi1(d, model, prior, v_discrepancy(h), {n_draws, seed, threads});
        },
        py::arg("data"), py::arg("sigma2"), py::arg("prior"),
        py::arg("discrepancy") = "mahalanobis_mv", py::arg("n_draws") = 10000,
        py::arg("seed") = 1, py::arg("threads") = 1);

  m.def("run_protocol_json",
        [](const GroupedDataset& d, double sigma2, const HyperPrior& prior, double alpha,
           std::size_t n_draws, std::uint64_t seed, unsigned threads) {
          const SamplingModel model(sigma2, d.per_group(), d.groups());
          ProtocolConfig cfg;
          cfg.alpha = alpha;
          cfg.n_draws = n_draws;
          cfg.seed = seed;
          cfg.threads = threads;
          return io::report_to_json(run_protocol(d, model, prior, cfg));
        },
        py::arg("data"), py::arg("sigma2"), py::arg("prior"), py::arg("alpha") = 0.05,
        py::arg("n_draws") = 10000, py::arg("seed") = 1, py::arg("threads") = 1,
        "Run the staged protocol and return the report as schema-1 JSON text.");

  m.def("ks_statistic", [](const std::vector<double>& sample) {
    const auto ks = ks_statistic(sample);
    return std::make_pair(ks.distance, ks.pvalue);
  });

  m.def("calibrate_json",
        [](const std::string& stage, double sigma2, std::size_t groups, std::size_t per_group,
           const std::string& discrepancy, std::size_t datasets, std::size_t draws, double mu,
           double tau2, std::optional<HyperPrior> prior, std::uint64_t seed, unsigned threads) {
          CalibrationSpec spec;
          spec.stage = stage_from_name(stage);
          spec.discrepancy = discrepancy;
          spec.datasets = datasets;
          spec.inner_draws = draws;
          spec.seed = seed;
          spec.threads = threads;
          CalibrationTruth truth;
          truth.fixed = Hyper{mu, tau2};
          truth.prior = std::move(prior);
          return io::calibration_to_json(
              calibrate_stage(SamplingModel(sigma2, per_group, groups), truth, spec));
        },
        py::arg("stage"), py::arg("sigma2"), py::arg("groups"), py::arg("per_group"),
        py::arg("discrepancy"), py::arg("datasets") = 2000, py::arg("draws") = 999,
        py::arg("mu") = 0.0, py::arg("tau2") = 1.0, py::arg("prior") = std::nullopt,
        py::arg("seed") = 1, py::arg("threads") = 1);

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
