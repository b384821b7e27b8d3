#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mvtc/graph.hpp"
#include "mvtc/model.hpp"

namespace mvtc {

enum class MeasureKind { CC, MIT, ITY, ITX, MITS, CMIT };

std::string to_string(MeasureKind kind);
MeasureKind measure_kind_from_string(const std::string& name);

struct ConfidenceInterval {
  double low = 0.0;
  double high = 0.0;
  double level = 0.0;
};

/// One coupling-strength estimate with its condition-adjusted Student-t
/// significance: t = rho sqrt((n_eff - 2 - q) / (1 - rho^2)), two-sided
/// p with n_eff - 2 - q degrees of freedom.
struct MeasureResult {
  MeasureKind kind = MeasureKind::CC;
  LaggedNode source;
  int target = 0;
  double estimate = 0.0;
  int q = 0;
  int n_eff = 0;
  double t_stat = 0.0;
  double p_value = 1.0;
  std::optional<ConfidenceInterval> ci;
};

struct Significance {
  double t_stat = 0.0;
  double p_value = 1.0;
  bool significant = false;
};

/// The Student-t transform of a (partial) correlation with q conditions.
/// Throws DegreesOfFreedomError when n_eff - 2 - q < 1.
Significance significance(double estimate, int n_eff, int q, double alpha);

/// Sample cross-correlation lag function rho(X_{t-tau}; Y_t), tau = 0..tau_max,
/// each lag aligned on its own tau. Requires tau_max < T/2.
std::vector<MeasureResult> cross_correlation_function(
    const TimeSeriesData& data, int x, int y, int tau_max);

/// Condition sets (relative to the target time) used by the estimators:
/// MIT: P(Y_t) \ {source} plus P(X) shifted by tau; ITY: P(Y_t) \ {source};
/// ITX: P(X) shifted by tau.
std::vector<LaggedNode> measure_conditions(const TimeSeriesGraph& graph,
                                           MeasureKind kind,
                                           LaggedNode source, int target);

/// MIT / ITY / ITX estimate for source -> target_t at source.lag >= 1.
MeasureResult coupling_measure(const TimeSeriesData& data,
                               const TimeSeriesGraph& graph, MeasureKind kind,
                               LaggedNode source, int target);

/// MITS: conditions keep the sidepaths open by replacing the sidepath
/// node set A* with the parents of its members. A* membership comes from
/// analytic partial correlations when a model is given.
MeasureResult mits(const TimeSeriesData& data, const TimeSeriesGraph& graph,
                   const VarModel& model, LaggedNode source, int target,
                   double eps = 1e-8);

/// Data-only variant: A* membership decided by the significance test at
/// level alpha.
MeasureResult mits(const TimeSeriesData& data, const TimeSeriesGraph& graph,
                   double alpha, LaggedNode source, int target);

/// Contemporaneous MIT: each variable is regressed on its parents; the
/// estimate is the partial correlation of the X and Y residual series
/// given all other variables' residuals (the sign-adjusted normalized
/// inverse-covariance entry of the residual block).
MeasureResult contemporaneous_mit(const TimeSeriesData& data,
                                  const TimeSeriesGraph& graph, int x, int y);

/// Percentile bootstrap over resampled aligned residual pairs.
/// Deterministic per seed. kind must be MIT, ITY, ITX or CC.
ConfidenceInterval bootstrap_ci(const TimeSeriesData& data,
                                const TimeSeriesGraph& graph, MeasureKind kind,
                                LaggedNode source, int target, double level,
                                int n_boot, std::uint64_t seed);

// --- serialization -------------------------------------------------------

std::string result_to_json(const MeasureResult& result,
                           const std::vector<std::string>& var_names);

/// CSV table export, one row per result:
/// kind,source,source_lag,target,estimate,q,n_eff,t_stat,p_value,ci_low,ci_high
std::string results_to_csv(const std::vector<MeasureResult>& results,
                           const std::vector<std::string>& var_names);

}  // namespace mvtc
