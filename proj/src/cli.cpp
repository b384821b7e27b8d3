#include "mvtc/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "mvtc/analytic.hpp"
#include "mvtc/errors.hpp"
#include "mvtc/graph.hpp"
#include "mvtc/infer.hpp"
#include "mvtc/mclab.hpp"
#include "mvtc/measures.hpp"
#include "mvtc/model.hpp"

namespace mvtc::cli {

namespace {

using nlohmann::json;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
}

json node_list_json(const std::vector<LaggedNode>& nodes,
                    const std::vector<std::string>& names) {
  json arr = json::array();
  for (const auto& n : nodes) arr.push_back({names.at(n.var), n.lag});
  return arr;
}

/// Per-calendar-month mean removal for monthly series.
void deseasonalize_monthly(TimeSeriesData& data) {
  const int period = 12;
  for (int v = 0; v < data.n_vars(); ++v) {
    for (int m = 0; m < period; ++m) {
      double sum = 0.0;
      int count = 0;
      for (int t = m; t < data.length(); t += period) {
        sum += data.values(t, v);
        ++count;
      }
      if (count == 0) continue;
      const double mean = sum / count;
      for (int t = m; t < data.length(); t += period)
        data.values(t, v) -= mean;
    }
  }
}

struct CommonArgs {
  std::string model_path, data_path, graph_path, out_path;
  std::string source, target, kind = "MIT";
  int lag = 1;
  int tau_max = 10;
  int length = 1000;
  int reps = 1000;
  int boot = 0;
  double alpha = 0.05;
  double level = 0.9;
  std::uint64_t seed = 0;
  int burn_in = -1;
  bool deseasonalize = false;
  std::string out_links, out_qq, out_graph;
};

int dispatch(const std::string& cmd, const CommonArgs& a) {
  if (cmd == "simulate") {
    const auto model = load_model(a.model_path);
    const auto data = simulate(model, a.length, a.seed, a.burn_in);
    save_data_csv(data, a.out_path);
    return 0;
  }

  if (cmd == "cov") {
    const auto model = load_model(a.model_path);
    const auto table = lagged_covariance(model, a.tau_max);
    std::ostringstream os;
    os.precision(17);
    os << "lag,var_i,var_j,gamma\n";
    const auto names = graph_from_model(model).var_names;
    for (int tau = 0; tau <= a.tau_max; ++tau)
      for (int i = 0; i < model.n_vars; ++i)
        for (int j = 0; j < model.n_vars; ++j)
          os << tau << ',' << names[i] << ',' << names[j] << ','
             << table.at(i, j, tau) << '\n';
    write_file(a.out_path, os.str());
    return 0;
  }

  if (cmd == "theorem") {
    const auto model = load_model(a.model_path);
    const auto graph = graph_from_model(model);
    const LaggedNode source{graph.var_index(a.source), a.lag};
    const int target = graph.var_index(a.target);
    const auto q = theorem_quantities(model, graph, source, target);
    json j;
    j["source"] = a.source;
    j["target"] = a.target;
    j["lag"] = a.lag;
    j["c"] = q.c;
    j["sigma_x2"] = q.sigma_x2;
    j["sigma_y2"] = q.sigma_y2;
    j["sidepath_cov"] = std::vector<double>(
        q.sidepath_cov.data(), q.sidepath_cov.data() + q.sidepath_cov.size());
    json schur = json::array();
    for (Eigen::Index r = 0; r < q.schur.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c2 = 0; c2 < q.schur.cols(); ++c2)
        row.push_back(q.schur(r, c2));
      schur.push_back(std::move(row));
    }
    j["schur"] = std::move(schur);
    j["cov_xy"] = q.cov_xy;
    j["var_y"] = q.var_y;
    j["var_x"] = q.var_x;
    j["mit"] = q.mit();
    j["w_nodes"] = node_list_json(q.w_nodes, graph.var_names);
    j["z_nodes"] = node_list_json(q.z_nodes, graph.var_names);
    const std::string text = j.dump(2) + "\n";
    if (a.out_path.empty())
      std::cout << text;
    else
      write_file(a.out_path, text);
    return 0;
  }

  if (cmd == "measure") {
    const auto data = load_data_csv(a.data_path);
    const auto graph = load_graph(a.graph_path);
    const auto kind = measure_kind_from_string(a.kind);
    const LaggedNode source{data.var_index(a.source),
                            kind == MeasureKind::CMIT ? 0 : a.lag};
    const int target = data.var_index(a.target);

    MeasureResult result;
    switch (kind) {
      case MeasureKind::CC:
        result = cross_correlation_function(data, source.var, target, a.lag)
                     .back();
        break;
      case MeasureKind::MIT:
      case MeasureKind::ITY:
      case MeasureKind::ITX:
        result = coupling_measure(data, graph, kind, source, target);
        break;
      case MeasureKind::MITS:
        result = mits(data, graph, a.alpha, source, target);
        break;
      case MeasureKind::CMIT:
        result = contemporaneous_mit(data, graph, source.var, target);
        break;
    }
    if (a.boot > 0 && kind != MeasureKind::MITS && kind != MeasureKind::CMIT)
      result.ci =
          bootstrap_ci(data, graph, kind, source, target, a.level, a.boot, a.seed);
    const std::string text = result_to_json(result, data.var_names) + "\n";
    if (a.out_path.empty())
      std::cout << text;
    else
      write_file(a.out_path, text);
    return 0;
  }

  if (cmd == "infer") {
    const auto data = load_data_csv(a.data_path);
    InferenceConfig config;
    config.tau_max = a.tau_max;
    config.alpha = a.alpha;
    const auto inferred = infer_graph(data, config);
    save_graph(inferred.graph, a.out_path);
    if (!a.out_links.empty()) {
      std::ostringstream os;
      os.precision(17);
      os << "source,target,lag,mit,t_stat,p_value,ci_low,ci_high\n";
      for (const auto& r : inferred.link_results) {
        os << data.var_names.at(r.source.var) << ','
           << data.var_names.at(r.target) << ',' << r.source.lag << ','
           << r.estimate << ',' << r.t_stat << ',' << r.p_value << ',';
        if (a.boot > 0) {
          const auto ci = bootstrap_ci(data, inferred.graph, MeasureKind::MIT,
                                       r.source, r.target, a.level, a.boot,
                                       a.seed);
          os << ci.low << ',' << ci.high;
        } else {
          os << ',';
        }
        os << '\n';
      }
      write_file(a.out_links, os.str());
    }
    return 0;
  }

  if (cmd == "analyze") {
    auto data = load_data_csv(a.data_path);
    if (a.deseasonalize) deseasonalize_monthly(data);
    InferenceConfig config;
    config.tau_max = a.tau_max;
    config.alpha = a.alpha;
    const auto inferred = infer_graph(data, config);
    if (!a.out_graph.empty()) save_graph(inferred.graph, a.out_graph);

    std::ostringstream os;
    os.precision(17);
    os << "source,target,lag,cc,cc_t,cc_p,cc_significant,link,mit,mit_t,"
          "mit_p,mit_ci_low,mit_ci_high\n";
    const int n = data.n_vars();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto ccs = cross_correlation_function(data, i, j, a.tau_max);
        for (const auto& cc : ccs) {
          const int tau = cc.source.lag;
          if (i == j && tau == 0) continue;
          os << data.var_names[i] << ',' << data.var_names[j] << ',' << tau
             << ',' << cc.estimate << ',' << cc.t_stat << ',' << cc.p_value
             << ',' << (cc.p_value < a.alpha ? 1 : 0) << ',';
          const bool is_link =
              tau >= 1 && inferred.graph.has_directed(i, j, tau);
          os << (is_link ? 1 : 0) << ',';
          if (is_link) {
            auto mit = coupling_measure(data, inferred.graph, MeasureKind::MIT,
                                        {i, tau}, j);
            os << mit.estimate << ',' << mit.t_stat << ',' << mit.p_value << ',';
            const int n_boot = a.boot > 0 ? a.boot : 1000;
            const auto ci = bootstrap_ci(data, inferred.graph, MeasureKind::MIT,
                                         {i, tau}, j, a.level, n_boot, a.seed);
            os << ci.low << ',' << ci.high;
          } else {
            os << ",,,,";
          }
          os << '\n';
        }
      }
    }
    write_file(a.out_path, os.str());
    return 0;
  }

  if (cmd == "mc") {
    const auto model = load_model(a.model_path);
    const auto graph = graph_from_model(model);
    const auto kind = measure_kind_from_string(a.kind);
    const LaggedNode source{graph.var_index(a.source), a.lag};
    const int target = graph.var_index(a.target);
    const auto sample =
        run_ensemble(model, kind, source, target, a.length, a.reps, a.seed);
    write_file(a.out_path, ensemble_summary_json(sample) + "\n");
    if (!a.out_qq.empty()) write_file(a.out_qq, qq_to_csv(sample));
    return 0;
  }

  throw IoError("unknown command '" + cmd + "'");
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"coupling-strength analysis for multivariate autoregressive "
               "time series"};
  app.require_subcommand(1);
  CommonArgs a;

  auto* sim = app.add_subcommand("simulate", "simulate a VAR model to CSV");
  sim->add_option("--model", a.model_path)->required();
  sim->add_option("--out", a.out_path)->required();
  sim->add_option("--length", a.length)->check(CLI::PositiveNumber);
  sim->add_option("--seed", a.seed);
  sim->add_option("--burn-in", a.burn_in);

  auto* cov = app.add_subcommand("cov", "analytic lagged covariances to CSV");
  cov->add_option("--model", a.model_path)->required();
  cov->add_option("--out", a.out_path)->required();
  cov->add_option("--tau-max", a.tau_max)->check(CLI::NonNegativeNumber);

  auto* thm = app.add_subcommand(
      "theorem", "analytic coupling-strength decomposition of one link");
  thm->add_option("--model", a.model_path)->required();
  thm->add_option("--source", a.source)->required();
  thm->add_option("--target", a.target)->required();
  thm->add_option("--lag", a.lag)->check(CLI::PositiveNumber);
  thm->add_option("--out", a.out_path);

  auto* mea = app.add_subcommand("measure", "estimate one coupling measure");
  mea->add_option("--data", a.data_path)->required();
  mea->add_option("--graph", a.graph_path)->required();
  mea->add_option("--kind", a.kind);
  mea->add_option("--source", a.source)->required();
  mea->add_option("--target", a.target)->required();
  mea->add_option("--lag", a.lag)->check(CLI::NonNegativeNumber);
  mea->add_option("--alpha", a.alpha);
  mea->add_option("--boot", a.boot);
  mea->add_option("--level", a.level);
  mea->add_option("--seed", a.seed);
  mea->add_option("--out", a.out_path);

  auto* inf = app.add_subcommand("infer", "estimate the time series graph");
  inf->add_option("--data", a.data_path)->required();
  inf->add_option("--out", a.out_path)->required();
  inf->add_option("--out-links", a.out_links);
  inf->add_option("--tau-max", a.tau_max)->check(CLI::PositiveNumber);
  inf->add_option("--alpha", a.alpha);
  inf->add_option("--boot", a.boot);
  inf->add_option("--level", a.level);
  inf->add_option("--seed", a.seed);

  auto* ana = app.add_subcommand(
      "analyze", "lag-function matrix with MIT at inferred links");
  ana->add_option("--data", a.data_path)->required();
  ana->add_option("--out", a.out_path)->required();
  ana->add_option("--out-graph", a.out_graph);
  ana->add_option("--tau-max", a.tau_max)->check(CLI::PositiveNumber);
  ana->add_option("--alpha", a.alpha);
  ana->add_option("--boot", a.boot);
  ana->add_option("--level", a.level);
  ana->add_option("--seed", a.seed);
  ana->add_flag("--deseasonalize", a.deseasonalize,
                "remove per-calendar-month means (monthly data)");

  auto* mc = app.add_subcommand("mc", "sampling-distribution ensemble study");
  mc->add_option("--model", a.model_path)->required();
  mc->add_option("--kind", a.kind);
  mc->add_option("--source", a.source)->required();
  mc->add_option("--target", a.target)->required();
  mc->add_option("--lag", a.lag)->check(CLI::PositiveNumber);
  mc->add_option("--length", a.length)->check(CLI::PositiveNumber);
  mc->add_option("--reps", a.reps)->check(CLI::PositiveNumber);
  mc->add_option("--seed", a.seed);
  mc->add_option("--out", a.out_path)->required();
  mc->add_option("--out-qq", a.out_qq);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), a);
  } catch (const IoError& e) {
    std::cerr << json{{"error", {{"type", e.kind()}, {"message", e.what()}}}}
              << std::endl;
    return 1;
  } catch (const KeyError& e) {
    std::cerr << json{{"error", {{"type", e.kind()}, {"message", e.what()}}}}
              << std::endl;
    return 1;
  } catch (const Error& e) {
    std::cerr << json{{"error", {{"type", e.kind()}, {"message", e.what()}}}}
              << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"type", "Error"}, {"message", e.what()}}}}
              << std::endl;
    return 2;
  }
}

}  // namespace mvtc::cli
