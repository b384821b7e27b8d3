#include "mvtc/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvtc/analytic.hpp"
#include "mvtc/errors.hpp"

namespace mvtc {

namespace {

void check_var(const TimeSeriesGraph& g, int var) {
  if (var < 0 || var >= g.n_vars)
    throw KeyError("variable index " + std::to_string(var) + " out of range");
}

}  // namespace

int TimeSeriesGraph::max_lag() const {
  int m = 0;
  for (const auto& link : directed_links) m = std::max(m, link.lag);
  return m;
}

int TimeSeriesGraph::var_index(const std::string& name) const {
  auto it = std::find(var_names.begin(), var_names.end(), name);
  if (it == var_names.end()) throw KeyError("unknown variable '" + name + "'");
  return static_cast<int>(it - var_names.begin());
}

bool TimeSeriesGraph::has_directed(int source, int target, int lag) const {
  return directed_links.count({source, target, lag}) > 0;
}

void TimeSeriesGraph::add_directed(int source, int target, int lag) {
  check_var(*this, source);
  check_var(*this, target);
  if (lag < 1) throw ConditionError("directed links require lag >= 1");
  directed_links.insert({source, target, lag});
}

void TimeSeriesGraph::add_contemporaneous(int a, int b) {
  check_var(*this, a);
  check_var(*this, b);
  if (a == b) throw ConditionError("contemporaneous self-link is invalid");
  contemporaneous_links.insert({std::min(a, b), std::max(a, b)});
}

TimeSeriesGraph graph_from_model(const VarModel& model,
                                 const GraphFromModelOptions& opts) {
  const auto report = validate_model(model);
  if (!report.sigma_pd)
    throw CovarianceError("sigma is not symmetric positive definite");
  if (opts.eps <= 0) throw ConditionError("eps must be positive");

  TimeSeriesGraph g;
  g.n_vars = model.n_vars;
  g.var_names = model.var_names;
  if (g.var_names.empty())
    for (int i = 0; i < model.n_vars; ++i)
      g.var_names.push_back("V" + std::to_string(i));

  for (int s = 1; s <= model.order; ++s) {
    const Eigen::MatrixXd& phi = model.phi[s - 1];
    for (int target = 0; target < model.n_vars; ++target)
      for (int source = 0; source < model.n_vars; ++source)
        if (std::abs(phi(target, source)) > opts.eps)
          g.directed_links.insert({source, target, s});
  }

  Eigen::MatrixXd contemp;
  if (opts.contemporaneous_from_sigma) {
    contemp = model.sigma;
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(model.sigma);
    if (llt.info() != Eigen::Success)
      throw CovarianceError("sigma inversion failed");
    contemp = llt.solve(Eigen::MatrixXd::Identity(model.n_vars, model.n_vars));
  }
  for (int a = 0; a < model.n_vars; ++a)
    for (int b = a + 1; b < model.n_vars; ++b)
      if (std::abs(contemp(a, b)) > opts.eps)
        g.contemporaneous_links.insert({a, b});
  return g;
}

std::vector<LaggedNode> parents(const TimeSeriesGraph& graph, int target) {
  check_var(graph, target);
  std::vector<LaggedNode> out;
  for (const auto& link : graph.directed_links)
    if (link.target == target) out.push_back({link.source, link.lag});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LaggedNode> parents(const TimeSeriesGraph& graph,
                                const std::string& target) {
  return parents(graph, graph.var_index(target));
}

std::vector<int> neighbors(const TimeSeriesGraph& graph, int target) {
  check_var(graph, target);
  std::vector<int> out;
  for (const auto& [a, b] : graph.contemporaneous_links) {
    if (a == target) out.push_back(b);
    if (b == target) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<LaggedNode> ancestors(const TimeSeriesGraph& graph, int target,
                                  int horizon) {
  check_var(graph, target);
  if (horizon < 0) horizon = std::min(10 * std::max(1, graph.max_lag()), 100);
  if (horizon < 1) throw ConditionError("horizon must be >= 1");

  // predecessors per variable: (source, lag) lists
  std::vector<std::vector<LaggedNode>> preds(graph.n_vars);
  for (const auto& link : graph.directed_links)
    preds[link.target].push_back({link.source, link.lag});

  std::set<LaggedNode> seen;
  std::deque<LaggedNode> queue;
  queue.push_back({target, 0});
  while (!queue.empty()) {
    const LaggedNode node = queue.front();
    queue.pop_front();
    for (const auto& p : preds[node.var]) {
      const LaggedNode up{p.var, node.lag + p.lag};
      if (up.lag > horizon) continue;
      if (seen.insert(up).second) queue.push_back(up);
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<LaggedNode> sidepath_nodes(const TimeSeriesGraph& graph,
                                       const VarModel& model,
                                       LaggedNode source, int target,
                                       double eps, int horizon) {
  check_var(graph, source.var);
  check_var(graph, target);
  if (eps <= 0) throw ConditionError("eps must be positive");

  // shifted parents of the source: (Z, h) enters at lag source.lag + h
  std::vector<LaggedNode> source_parents;
  for (const auto& p : parents(graph, source.var))
    source_parents.push_back({p.var, p.lag + source.lag});

  std::set<LaggedNode> excluded(source_parents.begin(), source_parents.end());
  excluded.insert(source);

  std::vector<LaggedNode> out;
  for (const auto& node : ancestors(graph, target, horizon)) {
    if (excluded.count(node)) continue;
    const double rho =
        analytic_partial_correlation(model, node, source, source_parents);
    if (std::abs(rho) > eps) out.push_back(node);
  }
  return out;
}

// --- serialization --------------------------------------------------------

std::string graph_to_json(const TimeSeriesGraph& graph) {
  nlohmann::json j;
  j["n_vars"] = graph.n_vars;
  j["var_names"] = graph.var_names;
  nlohmann::json dl = nlohmann::json::array();
  for (const auto& link : graph.directed_links)
    dl.push_back({graph.var_names.at(link.source), graph.var_names.at(link.target),
                  link.lag});
  j["directed_links"] = std::move(dl);
  nlohmann::json cl = nlohmann::json::array();
  for (const auto& [a, b] : graph.contemporaneous_links)
    cl.push_back({graph.var_names.at(a), graph.var_names.at(b)});
  j["contemporaneous_links"] = std::move(cl);
  return j.dump(2);
}

TimeSeriesGraph graph_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("invalid graph JSON: ") + e.what());
  }
  TimeSeriesGraph g;
  try {
    g.var_names = j.at("var_names").get<std::vector<std::string>>();
    g.n_vars = j.contains("n_vars") ? j.at("n_vars").get<int>()
                                    : static_cast<int>(g.var_names.size());
    for (const auto& link : j.at("directed_links")) {
      const int source = g.var_index(link.at(0).get<std::string>());
      const int target = g.var_index(link.at(1).get<std::string>());
      g.add_directed(source, target, link.at(2).get<int>());
    }
    for (const auto& pair : j.at("contemporaneous_links")) {
      const int a = g.var_index(pair.at(0).get<std::string>());
      const int b = g.var_index(pair.at(1).get<std::string>());
      g.add_contemporaneous(a, b);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("invalid graph JSON: ") + e.what());
  }
  if (static_cast<int>(g.var_names.size()) != g.n_vars)
    throw IoError("graph JSON: var_names count does not match n_vars");
  return g;
}

TimeSeriesGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return graph_from_json(buf.str());
}

void save_graph(const TimeSeriesGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file '" + path + "'");
  out << graph_to_json(graph) << '\n';
}

}  // namespace mvtc
