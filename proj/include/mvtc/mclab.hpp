#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mvtc/measures.hpp"
#include "mvtc/model.hpp"

namespace mvtc {

/// t-statistics of one measure over repeated short simulations of a model,
/// estimated with the true-graph condition sets.
struct EnsembleSample {
  MeasureKind kind = MeasureKind::CC;
  std::vector<double> t_values;
  int df = 0;  // n_eff - 2 - q shared by all replications
  std::string model_tag;
  int reps = 0;
  int excluded = 0;  // degenerate replications (|rho| ~ 1) dropped
};

/// Runs reps independent simulations (seed-derived streams, parallel
/// schedule independent) of length T and collects the measure's
/// t-statistics. Degenerate estimates are excluded and counted.
EnsembleSample run_ensemble(const VarModel& model, MeasureKind kind,
                            LaggedNode source, int target, int length,
                            int reps, std::uint64_t seed);

/// Sorted empirical t-values paired with Student-t(df) quantiles at
/// plotting positions (i - 0.5) / reps.
std::vector<std::pair<double, double>> qq_points(const EnsembleSample& sample);

struct KsResult {
  double d = 0.0;
  double p = 0.0;
};

/// One-sample Kolmogorov-Smirnov test of the t-values against
/// Student-t(df), asymptotic p-value.
KsResult ks_test(const EnsembleSample& sample);

/// qq CSV: columns theoretical,empirical,kind,df.
std::string qq_to_csv(const EnsembleSample& sample);

/// Ensemble summary JSON: kind, D, p, reps, df, excluded_count, model_tag.
std::string ensemble_summary_json(const EnsembleSample& sample);

}  // namespace mvtc
