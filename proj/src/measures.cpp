#include "mvtc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvtc/errors.hpp"
#include "mvtc/linreg.hpp"
#include "mvtc/stats.hpp"
#include "parallel.hpp"

namespace mvtc {

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::CC: return "CC";
    case MeasureKind::MIT: return "MIT";
    case MeasureKind::ITY: return "ITY";
    case MeasureKind::ITX: return "ITX";
    case MeasureKind::MITS: return "MITS";
    case MeasureKind::CMIT: return "CMIT";
  }
  return "?";
}

MeasureKind measure_kind_from_string(const std::string& name) {
  if (name == "CC") return MeasureKind::CC;
  if (name == "MIT") return MeasureKind::MIT;
  if (name == "ITY") return MeasureKind::ITY;
  if (name == "ITX") return MeasureKind::ITX;
  if (name == "MITS") return MeasureKind::MITS;
  if (name == "CMIT") return MeasureKind::CMIT;
  throw KeyError("unknown measure kind '" + name + "'");
}

Significance significance(double estimate, int n_eff, int q, double alpha) {
  const int df = n_eff - 2 - q;
  if (df < 1)
    throw DegreesOfFreedomError("n_eff - 2 - q = " + std::to_string(df) +
                                " leaves no degrees of freedom");
  if (std::abs(estimate) >= 1.0)
    throw DegenerateError("|estimate| must be < 1 for the t transform");
  Significance s;
  s.t_stat = estimate * std::sqrt(df / (1.0 - estimate * estimate));
  s.p_value = stats::two_sided_t_pvalue(s.t_stat, df);
  s.significant = s.p_value < alpha;
  return s;
}

namespace {

constexpr double kDegenerateRho = 1.0 - 1e-12;

MeasureResult make_result(MeasureKind kind, LaggedNode source, int target,
                          double estimate, int n_eff, int q) {
  MeasureResult r;
  r.kind = kind;
  r.source = source;
  r.target = target;
  r.estimate = estimate;
  r.q = q;
  r.n_eff = n_eff;
  if (std::abs(estimate) >= kDegenerateRho) {
    r.t_stat = estimate > 0 ? INFINITY : -INFINITY;
    r.p_value = 0.0;
  } else {
    const auto s = significance(estimate, n_eff, q, 0.05);
    r.t_stat = s.t_stat;
    r.p_value = s.p_value;
  }
  return r;
}

void check_pair(const TimeSeriesData& data, int x, int y) {
  if (x < 0 || x >= data.n_vars() || y < 0 || y >= data.n_vars())
    throw KeyError("variable index out of range");
}

/// Deduplicated, sorted condition set; rejects the source and target nodes.
std::vector<LaggedNode> finalize_conditions(std::set<LaggedNode> conds,
                                            LaggedNode source, int target) {
  if (conds.count(source))
    throw ConditionError("source node appears among the conditions");
  if (conds.count({target, 0}))
    throw ConditionError("target node appears among the conditions");
  return {conds.begin(), conds.end()};
}

std::vector<LaggedNode> shifted_parents(const TimeSeriesGraph& graph, int var,
                                        int shift) {
  std::vector<LaggedNode> out;
  for (const auto& p : parents(graph, var)) out.push_back({p.var, p.lag + shift});
  return out;
}

MeasureResult estimate_with_conditions(const TimeSeriesData& data,
                                       MeasureKind kind, LaggedNode source,
                                       int target,
                                       const std::vector<LaggedNode>& conds) {
  const auto block = build_block(data, conds, source.lag);
  const int q = static_cast<int>(conds.size());
  if (block.t_eff <= q + 3)
    throw LengthError("too few aligned samples for " + std::to_string(q) +
                      " conditions");
  const auto x = aligned_series(data, source, block.align_lag);
  const auto y = aligned_series(data, {target, 0}, block.align_lag);
  const double rho = partial_correlation(x, y, block);
  return make_result(kind, source, target, rho, block.t_eff, q);
}

}  // namespace

std::vector<MeasureResult> cross_correlation_function(
    const TimeSeriesData& data, int x, int y, int tau_max) {
  check_pair(data, x, y);
  if (tau_max < 0) throw ConditionError("tau_max must be >= 0");
  if (tau_max >= data.length() / 2)
    throw LengthError("tau_max must be below T/2");

  std::vector<MeasureResult> out;
  for (int tau = 0; tau <= tau_max; ++tau) {
    const RegressorBlock empty = build_block(data, {}, tau);
    const auto xs = aligned_series(data, {x, tau}, empty.align_lag);
    const auto ys = aligned_series(data, {y, 0}, empty.align_lag);
    const double rho = partial_correlation(xs, ys, empty);
    out.push_back(make_result(MeasureKind::CC, {x, tau}, y, rho, empty.t_eff, 0));
  }
  return out;
}

std::vector<LaggedNode> measure_conditions(const TimeSeriesGraph& graph,
                                           MeasureKind kind, LaggedNode source,
                                           int target) {
  std::set<LaggedNode> conds;
  const bool use_target_parents =
      kind == MeasureKind::MIT || kind == MeasureKind::ITY;
  const bool use_source_parents =
      kind == MeasureKind::MIT || kind == MeasureKind::ITX;
  if (use_target_parents) {
    for (const auto& p : parents(graph, target))
      if (!(p == source)) conds.insert(p);
  }
  if (use_source_parents) {
    // a parent (Z, h) of the source variable enters at total lag tau + h
    for (const auto& z : shifted_parents(graph, source.var, source.lag))
      conds.insert(z);
  }
  return finalize_conditions(std::move(conds), source, target);
}

MeasureResult coupling_measure(const TimeSeriesData& data,
                               const TimeSeriesGraph& graph, MeasureKind kind,
                               LaggedNode source, int target) {
  check_pair(data, source.var, target);
  if (source.lag < 1) throw ConditionError("coupling measures require lag >= 1");
  if (kind != MeasureKind::MIT && kind != MeasureKind::ITY &&
      kind != MeasureKind::ITX)
    throw ConditionError("coupling_measure handles MIT, ITY and ITX only");
  const auto conds = measure_conditions(graph, kind, source, target);
  return estimate_with_conditions(data, kind, source, target, conds);
}

namespace {

std::vector<LaggedNode> mits_conditions(
    const TimeSeriesGraph& graph, LaggedNode source, int target,
    const std::vector<LaggedNode>& sidepath_set) {
  std::set<LaggedNode> conds;
  for (const auto& p : parents(graph, target)) conds.insert(p);
  for (const auto& a : sidepath_set)
    for (const auto& p : shifted_parents(graph, a.var, a.lag)) conds.insert(p);
  for (const auto& a : sidepath_set) conds.erase(a);
  conds.erase(source);
  for (const auto& z : shifted_parents(graph, source.var, source.lag))
    conds.insert(z);
  return finalize_conditions(std::move(conds), source, target);
}

}  // namespace

MeasureResult mits(const TimeSeriesData& data, const TimeSeriesGraph& graph,
                   const VarModel& model, LaggedNode source, int target,
                   double eps) {
  check_pair(data, source.var, target);
  if (source.lag < 1) throw ConditionError("MITS requires lag >= 1");
  const auto sidepaths = sidepath_nodes(graph, model, source, target, eps);
  const auto conds = mits_conditions(graph, source, target, sidepaths);
  return estimate_with_conditions(data, MeasureKind::MITS, source, target, conds);
}

MeasureResult mits(const TimeSeriesData& data, const TimeSeriesGraph& graph,
                   double alpha, LaggedNode source, int target) {
  check_pair(data, source.var, target);
  if (source.lag < 1) throw ConditionError("MITS requires lag >= 1");
  if (alpha <= 0 || alpha >= 1) throw ConditionError("alpha must be in (0,1)");

  // data-driven sidepath set: ancestors significantly correlated with the
  // source given the source's parents
  const auto source_parents = shifted_parents(graph, source.var, source.lag);
  std::set<LaggedNode> excluded(source_parents.begin(), source_parents.end());
  excluded.insert(source);

  std::vector<LaggedNode> sidepaths;
  for (const auto& node : ancestors(graph, target)) {
    if (excluded.count(node)) continue;
    int align = source.lag;
    for (const auto& c : source_parents) align = std::max(align, c.lag);
    align = std::max(align, node.lag);
    if (data.length() - align <= static_cast<int>(source_parents.size()) + 3)
      continue;
    const auto block = build_block(data, source_parents, align);
    const auto w = aligned_series(data, node, block.align_lag);
    const auto x = aligned_series(data, source, block.align_lag);
    const double rho = partial_correlation(w, x, block);
    if (std::abs(rho) >= kDegenerateRho ||
        significance(rho, block.t_eff, block.q(), alpha).significant)
      sidepaths.push_back(node);
  }
  const auto conds = mits_conditions(graph, source, target, sidepaths);
  return estimate_with_conditions(data, MeasureKind::MITS, source, target, conds);
}

MeasureResult contemporaneous_mit(const TimeSeriesData& data,
                                  const TimeSeriesGraph& graph, int x, int y) {
  check_pair(data, x, y);
  if (x == y) throw ConditionError("contemporaneous MIT needs two variables");
  const int n = data.n_vars();

  std::set<LaggedNode> all_parents;
  int align = 0;
  for (int v = 0; v < n; ++v)
    for (const auto& p : parents(graph, v)) {
      all_parents.insert(p);
      align = std::max(align, p.lag);
    }

  const int t_eff = data.length() - align;
  if (t_eff <= static_cast<int>(all_parents.size()) + n + 3)
    throw LengthError("too few samples for the residual block");

  Eigen::MatrixXd residuals(t_eff, n);
  for (int v = 0; v < n; ++v) {
    const auto block = build_block(data, parents(graph, v), align);
    Eigen::VectorXd series = aligned_series(data, {v, 0}, align);
    series.array() -= series.mean();
    RegressorBlock centered = block;
    for (int j = 0; j < centered.q(); ++j)
      centered.matrix.col(j).array() -= centered.matrix.col(j).mean();
    residuals.col(v) = residualize(centered, series);
  }

  const Eigen::MatrixXd cov = residuals.transpose() * residuals / t_eff;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= 0 || hi / lo > 1e12)
    throw SingularityError("residual covariance is singular");
  const Eigen::MatrixXd precision = cov.inverse();

  const double rho = std::clamp(
      -precision(x, y) / std::sqrt(precision(x, x) * precision(y, y)), -1.0,
      1.0);
  const int q = static_cast<int>(all_parents.size()) + (n - 2);
  return make_result(MeasureKind::CMIT, {x, 0}, y, rho, t_eff, q);
}

ConfidenceInterval bootstrap_ci(const TimeSeriesData& data,
                                const TimeSeriesGraph& graph, MeasureKind kind,
                                LaggedNode source, int target, double level,
                                int n_boot, std::uint64_t seed) {
  if (n_boot < 100) throw ConditionError("n_boot must be >= 100");
  if (level <= 0 || level >= 1) throw ConditionError("level must be in (0,1)");

  std::vector<LaggedNode> conds;
  if (kind == MeasureKind::MIT || kind == MeasureKind::ITY ||
      kind == MeasureKind::ITX)
    conds = measure_conditions(graph, kind, source, target);
  else if (kind != MeasureKind::CC)
    throw ConditionError("bootstrap_ci handles CC, MIT, ITY and ITX");

  const auto block = build_block(data, conds, source.lag);
  const auto x = aligned_series(data, source, block.align_lag);
  const auto y = aligned_series(data, {target, 0}, block.align_lag);
  const auto pairs = partial_correlation_detail(x, y, block);

  const int n = block.t_eff;
  std::vector<double> estimates(n_boot);
  detail::parallel_for(n_boot, [&](int b) {
    std::mt19937_64 rng(detail::mix_seed(seed, static_cast<std::uint64_t>(b)));
    std::uniform_int_distribution<int> pick(0, n - 1);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      const int j = pick(rng);
      const double xv = pairs.x_residual[j], yv = pairs.y_residual[j];
      sx += xv; sy += yv;
      sxx += xv * xv; syy += yv * yv; sxy += xv * yv;
    }
    const double cx = sxx - sx * sx / n, cy = syy - sy * sy / n;
    const double cxy = sxy - sx * sy / n;
    estimates[b] = (cx > 0 && cy > 0) ? cxy / std::sqrt(cx * cy) : 0.0;
  });

  std::sort(estimates.begin(), estimates.end());
  ConfidenceInterval ci;
  ci.level = level;
  ci.low = stats::sorted_quantile(estimates, (1.0 - level) / 2.0);
  ci.high = stats::sorted_quantile(estimates, 1.0 - (1.0 - level) / 2.0);
  return ci;
}

// --- serialization --------------------------------------------------------

namespace {

nlohmann::json result_json(const MeasureResult& r,
                           const std::vector<std::string>& names) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind);
  j["source"] = names.at(r.source.var);
  j["source_lag"] = r.source.lag;
  j["target"] = names.at(r.target);
  j["estimate"] = r.estimate;
  j["q"] = r.q;
  j["n_eff"] = r.n_eff;
  j["t_stat"] = r.t_stat;
  j["p_value"] = r.p_value;
  if (r.ci) {
    j["ci"] = {{"low", r.ci->low}, {"high", r.ci->high}, {"level", r.ci->level}};
  }
  return j;
}

}  // namespace

std::string result_to_json(const MeasureResult& result,
                           const std::vector<std::string>& var_names) {
  return result_json(result, var_names).dump(2);
}

std::string results_to_csv(const std::vector<MeasureResult>& results,
                           const std::vector<std::string>& var_names) {
  std::ostringstream os;
  os << "kind,source,source_lag,target,estimate,q,n_eff,t_stat,p_value,"
        "ci_low,ci_high\n";
  os.precision(17);
  for (const auto& r : results) {
    os << to_string(r.kind) << ',' << var_names.at(r.source.var) << ','
       << r.source.lag << ',' << var_names.at(r.target) << ',' << r.estimate
       << ',' << r.q << ',' << r.n_eff << ',' << r.t_stat << ',' << r.p_value
       << ',';
    if (r.ci)
      os << r.ci->low << ',' << r.ci->high;
    else
      os << ',';
    os << '\n';
  }
  return os.str();
}

}  // namespace mvtc
