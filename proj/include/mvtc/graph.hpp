#pragma once

#include <compare>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mvtc/model.hpp"

namespace mvtc {

/// A variable at a non-negative lag relative to some reference time t:
/// (var, lag) stands for the node X^var_{t-lag}.
struct LaggedNode {
  int var = 0;
  int lag = 0;
  auto operator<=>(const LaggedNode&) const = default;
};

/// A directed link source_{t-lag} -> target_t, lag >= 1.
struct DirectedLink {
  int source = 0;
  int target = 0;
  int lag = 1;
  auto operator<=>(const DirectedLink&) const = default;
};

/// The time series graph of a stationary process: lag-specific directed
/// links plus undirected contemporaneous links. A link (X, Y, tau) stands
/// for X_{t-tau} -> Y_t at every t.
struct TimeSeriesGraph {
  int n_vars = 0;
  std::vector<std::string> var_names;
  std::set<DirectedLink> directed_links;
  std::set<std::pair<int, int>> contemporaneous_links;  // ordered pairs a < b

  int max_lag() const;
  int var_index(const std::string& name) const;
  bool has_directed(int source, int target, int lag) const;
  void add_directed(int source, int target, int lag);
  void add_contemporaneous(int a, int b);
};

struct GraphFromModelOptions {
  double eps = 1e-12;
  /// Alternative convention: contemporaneous link iff Sigma_XY != 0
  /// instead of (Sigma^-1)_XY != 0. Off by default.
  bool contemporaneous_from_sigma = false;
};

/// Builds the graph of a VAR model: directed link (X,Y,tau) iff
/// |Phi_YX(tau)| > eps; contemporaneous link {X,Y} iff |(Sigma^-1)_XY| > eps.
TimeSeriesGraph graph_from_model(const VarModel& model,
                                 const GraphFromModelOptions& opts = {});

/// Parents of target_t: all (Z, tau) with a directed link Z_{t-tau} -> target_t.
std::vector<LaggedNode> parents(const TimeSeriesGraph& graph, int target);
std::vector<LaggedNode> parents(const TimeSeriesGraph& graph,
                                const std::string& target);

/// Contemporaneous neighbors of target_t.
std::vector<int> neighbors(const TimeSeriesGraph& graph, int target);

/// All lagged nodes with a directed path into target_t of total lag
/// <= horizon, by breadth-first traversal of the unrolled graph.
/// horizon < 0 selects the default 10 * max_lag, capped at 100.
std::vector<LaggedNode> ancestors(const TimeSeriesGraph& graph, int target,
                                  int horizon = -1);

/// The sidepath node set for a link source -> target: ancestors of
/// target_t, excluding the source node and the (shifted) parents of the
/// source, whose analytic partial correlation with the source given the
/// source's parents exceeds eps in magnitude.
std::vector<LaggedNode> sidepath_nodes(const TimeSeriesGraph& graph,
                                       const VarModel& model,
                                       LaggedNode source, int target,
                                       double eps = 1e-8, int horizon = -1);

// --- serialization -------------------------------------------------------

/// Graph JSON: var_names plus directed_links as [source, target, lag]
/// triples (names) and contemporaneous_links as [a, b] pairs.
std::string graph_to_json(const TimeSeriesGraph& graph);
TimeSeriesGraph graph_from_json(const std::string& text);
TimeSeriesGraph load_graph(const std::string& path);
void save_graph(const TimeSeriesGraph& graph, const std::string& path);

}  // namespace mvtc
