#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mvtc/analytic.hpp"
#include "mvtc/errors.hpp"
#include "mvtc/graph.hpp"
#include "mvtc/infer.hpp"
#include "mvtc/mclab.hpp"
#include "mvtc/measures.hpp"
#include "mvtc/model.hpp"

namespace py = pybind11;
using namespace mvtc;

namespace {

LaggedNode to_node(const std::pair<int, int>& p) { return {p.first, p.second}; }

std::vector<LaggedNode> to_nodes(const std::vector<std::pair<int, int>>& v) {
  std::vector<LaggedNode> out;
  out.reserve(v.size());
  for (const auto& p : v) out.push_back(to_node(p));
  return out;
}

std::vector<std::pair<int, int>> from_nodes(const std::vector<LaggedNode>& v) {
  std::vector<std::pair<int, int>> out;
  out.reserve(v.size());
  for (const auto& n : v) out.emplace_back(n.var, n.lag);
  return out;
}

py::dict result_dict(const MeasureResult& r) {
  py::dict d;
  d["kind"] = to_string(r.kind);
  d["source"] = py::make_tuple(r.source.var, r.source.lag);
  d["target"] = r.target;
  d["estimate"] = r.estimate;
  d["q"] = r.q;
  d["n_eff"] = r.n_eff;
  d["t_stat"] = r.t_stat;
  d["p_value"] = r.p_value;
  if (r.ci)
    d["ci"] = py::make_tuple(r.ci->low, r.ci->high, r.ci->level);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "coupling-strength analysis for multivariate autoregressive "
            "time series";

  py::register_exception<Error>(m, "MvtcError", PyExc_RuntimeError);

  py::class_<VarModel>(m, "VarModel")
      .def(py::init([](std::vector<Eigen::MatrixXd> phi, Eigen::MatrixXd sigma,
                       std::vector<std::string> var_names) {
             VarModel model;
             model.order = static_cast<int>(phi.size());
             model.n_vars = static_cast<int>(sigma.rows());
             model.phi = std::move(phi);
             model.sigma = std::move(sigma);
             model.var_names = std::move(var_names);
             return model;
           }),
           py::arg("phi"), py::arg("sigma"),
           py::arg("var_names") = std::vector<std::string>{})
      .def_readonly("n_vars", &VarModel::n_vars)
      .def_readonly("order", &VarModel::order)
      .def_readonly("phi", &VarModel::phi)
      .def_readonly("sigma", &VarModel::sigma)
      .def_readonly("var_names", &VarModel::var_names)
      .def("to_json", &model_to_json)
      .def_static("from_json", &model_from_json);

  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("stationary", &ValidationReport::stationary)
      .def_readonly("spectral_radius", &ValidationReport::spectral_radius)
      .def_readonly("sigma_pd", &ValidationReport::sigma_pd)
      .def_readonly("warning", &ValidationReport::warning);

  py::class_<TimeSeriesData>(m, "TimeSeriesData")
      .def(py::init([](Eigen::MatrixXd values,
                       std::vector<std::string> var_names) {
             TimeSeriesData data;
             data.values = std::move(values);
             data.var_names = std::move(var_names);
             return data;
           }),
           py::arg("values"), py::arg("var_names"))
      .def_readonly("values", &TimeSeriesData::values)
      .def_readonly("var_names", &TimeSeriesData::var_names)
      .def_property_readonly("length", &TimeSeriesData::length);

  py::class_<TimeSeriesGraph>(m, "TimeSeriesGraph")
      .def(py::init<>())
      .def_readwrite("n_vars", &TimeSeriesGraph::n_vars)
      .def_readwrite("var_names", &TimeSeriesGraph::var_names)
      .def("add_directed", &TimeSeriesGraph::add_directed)
      .def("add_contemporaneous", &TimeSeriesGraph::add_contemporaneous)
      .def("max_lag", &TimeSeriesGraph::max_lag)
      .def_property_readonly("directed_links",
                             [](const TimeSeriesGraph& g) {
                               std::vector<std::tuple<int, int, int>> out;
                               for (const auto& l : g.directed_links)
                                 out.emplace_back(l.source, l.target, l.lag);
                               return out;
                             })
      .def_property_readonly("contemporaneous_links",
                             [](const TimeSeriesGraph& g) {
                               return std::vector<std::pair<int, int>>(
                                   g.contemporaneous_links.begin(),
                                   g.contemporaneous_links.end());
                             })
      .def("to_json", &graph_to_json)
      .def_static("from_json", &graph_from_json);

  m.def("validate_model", &validate_model);
  m.def("spectral_radius", &spectral_radius);
  m.def("simulate", &simulate, py::arg("model"), py::arg("length"),
        py::arg("seed"), py::arg("burn_in") = -1);

  m.def("graph_from_model",
        [](const VarModel& model, double eps) {
          return graph_from_model(model, {eps});
        },
        py::arg("model"), py::arg("eps") = 1e-12);
  m.def("parents",
        [](const TimeSeriesGraph& g, int target) {
          return from_nodes(parents(g, target));
        });
  m.def("ancestors",
        [](const TimeSeriesGraph& g, int target, int horizon) {
          return from_nodes(ancestors(g, target, horizon));
        },
        py::arg("graph"), py::arg("target"), py::arg("horizon") = -1);

  m.def("psi",
        [](const VarModel& model, int n_max) {
          return psi(model, n_max).matrices;
        });
  m.def("lagged_covariance",
        [](const VarModel& model, int tau_max, double tol) {
          return lagged_covariance(model, tau_max, tol).gammas;
        },
        py::arg("model"), py::arg("tau_max"), py::arg("tol") = 1e-14);
  m.def("analytic_cross_correlation", &analytic_cross_correlation,
        py::arg("model"), py::arg("x"), py::arg("y"), py::arg("tau"),
        py::arg("tol") = 1e-14);
  m.def("theorem_mit",
        [](const VarModel& model, std::pair<int, int> source, int target) {
          const auto graph = graph_from_model(model);
          return theorem_quantities(model, graph, to_node(source), target)
              .mit();
        },
        py::arg("model"), py::arg("source"), py::arg("target"));
  m.def("analytic_partial_correlation",
        [](const VarModel& model, std::pair<int, int> x, std::pair<int, int> y,
           const std::vector<std::pair<int, int>>& conds) {
          return analytic_partial_correlation(model, to_node(x), to_node(y),
                                              to_nodes(conds));
        });

  m.def("cross_correlation_function",
        [](const TimeSeriesData& data, int x, int y, int tau_max) {
          py::list out;
          for (const auto& r : cross_correlation_function(data, x, y, tau_max))
            out.append(result_dict(r));
          return out;
        });
  m.def("coupling_measure",
        [](const TimeSeriesData& data, const TimeSeriesGraph& graph,
           const std::string& kind, std::pair<int, int> source, int target) {
          return result_dict(coupling_measure(
              data, graph, measure_kind_from_string(kind), to_node(source),
              target));
        });
  m.def("mits",
        [](const TimeSeriesData& data, const TimeSeriesGraph& graph,
           const VarModel& model, std::pair<int, int> source, int target) {
          return result_dict(mits(data, graph, model, to_node(source), target));
        });
  m.def("contemporaneous_mit",
        [](const TimeSeriesData& data, const TimeSeriesGraph& graph, int x,
           int y) { return result_dict(contemporaneous_mit(data, graph, x, y)); });
  m.def("significance",
        [](double estimate, int n_eff, int q, double alpha) {
          const auto s = significance(estimate, n_eff, q, alpha);
          py::dict d;
          d["t_stat"] = s.t_stat;
          d["p_value"] = s.p_value;
          d["significant"] = s.significant;
          return d;
        },
        py::arg("estimate"), py::arg("n_eff"), py::arg("q"),
        py::arg("alpha") = 0.05);
  m.def("bootstrap_ci",
        [](const TimeSeriesData& data, const TimeSeriesGraph& graph,
           const std::string& kind, std::pair<int, int> source, int target,
           double level, int n_boot, std::uint64_t seed) {
          const auto ci =
              bootstrap_ci(data, graph, measure_kind_from_string(kind),
                           to_node(source), target, level, n_boot, seed);
          return py::make_tuple(ci.low, ci.high);
        },
        py::arg("data"), py::arg("graph"), py::arg("kind"), py::arg("source"),
        py::arg("target"), py::arg("level") = 0.9, py::arg("n_boot") = 1000,
        py::arg("seed") = 0);

  py::class_<InferenceConfig>(m, "InferenceConfig")
      .def(py::init<>())
      .def_readwrite("tau_max", &InferenceConfig::tau_max)
      .def_readwrite("alpha", &InferenceConfig::alpha)
      .def_readwrite("max_conds", &InferenceConfig::max_conds)
      .def_readwrite("max_iters", &InferenceConfig::max_iters);

  m.def("infer_parents",
        [](const TimeSeriesData& data, int target,
           const InferenceConfig& config) {
          return from_nodes(infer_parents(data, target, config));
        });
  m.def("infer_graph",
        [](const TimeSeriesData& data, const InferenceConfig& config) {
          auto inferred = infer_graph(data, config);
          py::list results;
          for (const auto& r : inferred.link_results)
            results.append(result_dict(r));
          return py::make_tuple(inferred.graph, results);
        });

  py::class_<EnsembleSample>(m, "EnsembleSample")
      .def_readonly("t_values", &EnsembleSample::t_values)
      .def_readonly("df", &EnsembleSample::df)
      .def_readonly("reps", &EnsembleSample::reps)
      .def_readonly("excluded", &EnsembleSample::excluded)
      .def_readonly("model_tag", &EnsembleSample::model_tag);

  m.def("run_ensemble",
        [](const VarModel& model, const std::string& kind,
           std::pair<int, int> source, int target, int length, int reps,
           std::uint64_t seed) {
          return run_ensemble(model, measure_kind_from_string(kind),
                              to_node(source), target, length, reps, seed);
        });
  m.def("ks_test", [](const EnsembleSample& s) {
    const auto r = ks_test(s);
    return py::make_tuple(r.d, r.p);
  });
  m.def("qq_points", &qq_points);
}
