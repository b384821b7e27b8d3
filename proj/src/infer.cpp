#include "mvtc/infer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mvtc/errors.hpp"
#include "mvtc/linreg.hpp"
#include "mvtc/stats.hpp"
#include "parallel.hpp"

namespace mvtc {

namespace {

constexpr double kDegenerateRho = 1.0 - 1e-12;

struct Test {
  double abs_t = 0.0;
  bool significant = false;
};

/// Partial-correlation significance test of candidate vs target_t.
Test test_candidate(const TimeSeriesData& data, LaggedNode candidate,
                    int target, const std::vector<LaggedNode>& conds,
                    double alpha) {
  const auto block = build_block(data, conds, candidate.lag);
  const auto x = aligned_series(data, candidate, block.align_lag);
  const auto y = aligned_series(data, {target, 0}, block.align_lag);
  const double rho = partial_correlation(x, y, block);
  Test t;
  if (std::abs(rho) >= kDegenerateRho) {
    t.abs_t = INFINITY;
    t.significant = true;
    return t;
  }
  const auto s = significance(rho, block.t_eff, block.q(), alpha);
  t.abs_t = std::abs(s.t_stat);
  t.significant = s.significant;
  return t;
}

void validate_config(const TimeSeriesData& data, const InferenceConfig& c) {
  if (c.tau_max < 1) throw ConditionError("tau_max must be >= 1");
  if (c.alpha <= 0 || c.alpha >= 1) throw ConditionError("alpha must be in (0,1)");
  if (c.max_conds < 1) throw ConditionError("max_conds must be >= 1");
  if (c.max_iters < 1) throw ConditionError("max_iters must be >= 1");
  if (data.length() <= c.tau_max + c.max_conds + 3)
    throw LengthError("series too short for tau_max and max_conds");
}

/// Deterministic candidate order: score desc, then lag asc, variable asc.
void sort_by_score(std::vector<LaggedNode>& cands,
                   const std::map<LaggedNode, double>& score) {
  std::sort(cands.begin(), cands.end(),
            [&](const LaggedNode& a, const LaggedNode& b) {
              const double sa = score.at(a), sb = score.at(b);
              if (sa != sb) return sa > sb;
              if (a.lag != b.lag) return a.lag < b.lag;
              return a.var < b.var;
            });
}

/// Visits k-subsets of pool[0..pool_size) in lexicographic rank order
/// until visit returns false or the cap is reached.
template <typename Visit>
void for_each_subset(const std::vector<LaggedNode>& pool, int k, int cap,
                     Visit&& visit) {
  const int n = static_cast<int>(pool.size());
  if (n < k) {
    visit(pool);  // single test on everything available (possibly empty)
    return;
  }
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  int tested = 0;
  std::vector<LaggedNode> subset(k);
  while (tested < cap) {
    for (int i = 0; i < k; ++i) subset[i] = pool[idx[i]];
    ++tested;
    if (!visit(subset)) return;
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

std::vector<LaggedNode> infer_parents(const TimeSeriesData& data, int target,
                                      const InferenceConfig& config) {
  if (target < 0 || target >= data.n_vars())
    throw KeyError("target index out of range");
  validate_config(data, config);

  std::vector<LaggedNode> cands;
  for (int v = 0; v < data.n_vars(); ++v)
    for (int lag = 1; lag <= config.tau_max; ++lag) cands.push_back({v, lag});

  std::map<LaggedNode, double> score;
  for (const auto& c : cands)
    score[c] = test_candidate(data, c, target, {}, config.alpha).abs_t;
  sort_by_score(cands, score);

  int k = 1;
  for (int iter = 0; iter < config.max_iters; ++iter) {
    bool removed_any = false;
    std::map<LaggedNode, double> next_score;
    std::vector<LaggedNode> keep;
    for (const auto& c : cands) {
      std::vector<LaggedNode> pool;
      for (const auto& o : cands)
        if (!(o == c)) pool.push_back(o);
      if (static_cast<int>(pool.size()) > k + config.subset_pool)
        pool.resize(k + config.subset_pool);

      bool alive = true;
      double min_abs_t = INFINITY;
      for_each_subset(pool, k, config.subset_cap,
                      [&](const std::vector<LaggedNode>& subset) {
                        const Test t =
                            test_candidate(data, c, target, subset, config.alpha);
                        min_abs_t = std::min(min_abs_t, t.abs_t);
                        if (!t.significant) {
                          alive = false;
                          return false;
                        }
                        return true;
                      });
      if (alive) {
        keep.push_back(c);
        next_score[c] = std::isfinite(min_abs_t) ? min_abs_t : score[c];
      } else {
        removed_any = true;
      }
    }
    cands = std::move(keep);
    score = std::move(next_score);
    sort_by_score(cands, score);
    if (cands.empty()) break;
    if (!removed_any) {
      if (k >= config.max_conds) break;
      ++k;
    }
  }
  std::sort(cands.begin(), cands.end());
  return cands;
}

InferredGraph infer_graph(const TimeSeriesData& data,
                          const InferenceConfig& config) {
  validate_config(data, config);
  const int n = data.n_vars();

  std::vector<std::vector<LaggedNode>> discovered(n);
  detail::parallel_for(n, [&](int v) {
    discovered[v] = infer_parents(data, v, config);
  });

  TimeSeriesGraph candidate_graph;
  candidate_graph.n_vars = n;
  candidate_graph.var_names = data.var_names;
  for (int v = 0; v < n; ++v)
    for (const auto& p : discovered[v])
      candidate_graph.add_directed(p.var, v, p.lag);

  InferredGraph out;
  out.graph.n_vars = n;
  out.graph.var_names = data.var_names;
  for (int v = 0; v < n; ++v) {
    for (const auto& p : discovered[v]) {
      auto result =
          coupling_measure(data, candidate_graph, MeasureKind::MIT, p, v);
      if (result.p_value < config.alpha) {
        out.graph.add_directed(p.var, v, p.lag);
        out.link_results.push_back(std::move(result));
      }
    }
  }

  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const auto result = contemporaneous_mit(data, out.graph, a, b);
      if (result.p_value < config.alpha) out.graph.add_contemporaneous(a, b);
    }
  }
  return out;
}

}  // namespace mvtc
