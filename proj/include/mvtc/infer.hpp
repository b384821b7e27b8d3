#pragma once

#include <vector>

#include "mvtc/graph.hpp"
#include "mvtc/measures.hpp"
#include "mvtc/model.hpp"

namespace mvtc {

struct InferenceConfig {
  int tau_max = 10;
  double alpha = 0.05;    // two-sided rejection level
  int max_conds = 3;      // conditioning-set size cap per test
  int max_iters = 10;     // sweep cap
  int subset_pool = 5;    // strongest others beyond k admitted to subsets
  int subset_cap = 128;   // subsets tested per candidate per sweep
};

/// PC-style lag-specific parent discovery for one target variable.
/// Candidates (X, tau), tau = 1..tau_max, are ranked by |t| of the
/// unconditional lagged correlation; at growing cardinality k each
/// candidate is tested against k-subsets of the strongest other current
/// candidates and removed on the first non-significant test; sweeps
/// repeat until the set is stable at k = max_conds.
std::vector<LaggedNode> infer_parents(const TimeSeriesData& data, int target,
                                      const InferenceConfig& config);

struct InferredGraph {
  TimeSeriesGraph graph;
  std::vector<MeasureResult> link_results;  // MIT per retained directed link
};

/// Full graph estimation: per-variable parent discovery, MIT re-test of
/// every discovered link (pruning the non-significant), then
/// contemporaneous-link detection on the parent-regression residuals.
InferredGraph infer_graph(const TimeSeriesData& data,
                          const InferenceConfig& config);

}  // namespace mvtc
