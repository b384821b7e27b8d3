#include "mvtc/mclab.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mvtc/errors.hpp"
#include "mvtc/linreg.hpp"
#include "mvtc/stats.hpp"
#include "parallel.hpp"

namespace mvtc {

namespace {

constexpr double kDegenerateRho = 1.0 - 1e-12;

}  // namespace

EnsembleSample run_ensemble(const VarModel& model, MeasureKind kind,
                            LaggedNode source, int target, int length,
                            int reps, std::uint64_t seed) {
  if (reps < 100) throw ConditionError("reps must be >= 100");
  if (source.lag < 1) throw ConditionError("source lag must be >= 1");
  const auto graph = graph_from_model(model);

  std::vector<LaggedNode> conds;
  switch (kind) {
    case MeasureKind::CC:
      break;
    case MeasureKind::MIT:
    case MeasureKind::ITY:
    case MeasureKind::ITX:
      conds = measure_conditions(graph, kind, source, target);
      break;
    default:
      throw ConditionError("run_ensemble handles CC, MIT, ITY and ITX");
  }

  int align = source.lag;
  for (const auto& c : conds) align = std::max(align, c.lag);
  const int n_eff = length - align;
  const int q = static_cast<int>(conds.size());
  const int df = n_eff - 2 - q;
  if (df < 1)
    throw DegreesOfFreedomError("length " + std::to_string(length) +
                                " leaves no degrees of freedom");

  std::vector<double> slots(reps, NAN);
  detail::parallel_for(reps, [&](int rep) {
    const auto data =
        simulate(model, length, detail::mix_seed(seed, rep));
    try {
      const auto block = build_block(data, conds, source.lag);
      const auto x = aligned_series(data, source, block.align_lag);
      const auto y = aligned_series(data, {target, 0}, block.align_lag);
      const double rho = partial_correlation(x, y, block);
      if (std::abs(rho) < kDegenerateRho)
        slots[rep] = rho * std::sqrt(df / (1.0 - rho * rho));
    } catch (const DegenerateError&) {
      // short series can yield |rho| = 1 or vanishing residuals; excluded
    }
  });

  EnsembleSample sample;
  sample.kind = kind;
  sample.df = df;
  sample.reps = reps;
  for (double t : slots) {
    if (std::isnan(t))
      ++sample.excluded;
    else
      sample.t_values.push_back(t);
  }
  std::ostringstream tag;
  tag << "N=" << model.n_vars << ",p=" << model.order << ",T=" << length
      << "," << to_string(kind);
  sample.model_tag = tag.str();
  return sample;
}

std::vector<std::pair<double, double>> qq_points(const EnsembleSample& sample) {
  if (static_cast<int>(sample.t_values.size()) < 100)
    throw ConditionError("qq_points needs at least 100 values");
  std::vector<double> sorted = sample.t_values;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back())
    throw DegenerateError("constant sample has a degenerate quantile plot");
  const auto n = sorted.size();
  std::vector<std::pair<double, double>> points;
  points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    points.emplace_back(stats::student_t_quantile(p, sample.df), sorted[i]);
  }
  return points;
}

KsResult ks_test(const EnsembleSample& sample) {
  if (static_cast<int>(sample.t_values.size()) < 100)
    throw ConditionError("ks_test needs at least 100 values");
  std::vector<double> sorted = sample.t_values;
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = stats::student_t_cdf(sorted[i], sample.df);
    d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
    d = std::max(d, std::abs(cdf - (static_cast<double>(i) + 1.0) / n));
  }
  KsResult r;
  r.d = d;
  r.p = stats::kolmogorov_survival(std::sqrt(n) * d);
  return r;
}

std::string qq_to_csv(const EnsembleSample& sample) {
  std::ostringstream os;
  os << "theoretical,empirical,kind,df\n";
  os.precision(17);
  for (const auto& [theo, emp] : qq_points(sample))
    os << theo << ',' << emp << ',' << to_string(sample.kind) << ','
       << sample.df << '\n';
  return os.str();
}

std::string ensemble_summary_json(const EnsembleSample& sample) {
  const auto ks = ks_test(sample);
  nlohmann::json j;
  j["kind"] = to_string(sample.kind);
  j["D"] = ks.d;
  j["p"] = ks.p;
  j["reps"] = sample.reps;
  j["df"] = sample.df;
  j["excluded_count"] = sample.excluded;
  j["model_tag"] = sample.model_tag;
  return j.dump(2);
}

}  // namespace mvtc
